#pragma once

// Greedy partitioning of a formula into coprocessor-sized clause groups, with
// per-partition global<->local variable maps and a variable -> partitions index.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bcpsim/cnf.hpp"

namespace bcpsim {

struct PartitionConfig {
  std::size_t max_clauses = 224; // C
  std::size_t max_vars = 63;     // V, distinct variables per partition
};

class PartitionError : public std::runtime_error {
public:
  PartitionError(std::size_t clause_index, std::size_t distinct_vars, std::size_t max_vars)
      : std::runtime_error("clause " + std::to_string(clause_index) + " has " +
                           std::to_string(distinct_vars) +
                           " distinct variables, partition capacity is " +
                           std::to_string(max_vars)),
        clause_index_(clause_index) {}
  std::size_t clause_index() const { return clause_index_; }

private:
  std::size_t clause_index_;
};

struct Partition {
  std::size_t id = 0;
  std::vector<std::size_t> clause_refs; // indices into Formula::clauses, ascending
  std::vector<Var> local_to_global;     // local id i+1 -> global variable
  std::unordered_map<Var, Var> global_to_local;

  std::size_t num_vars() const { return local_to_global.size(); }
  bool contains(Var global) const { return global_to_local.contains(global); }

  std::optional<Var> local_of(Var global) const {
    auto it = global_to_local.find(global);
    if (it == global_to_local.end()) return std::nullopt;
    return it->second;
  }

  Var add_var(Var global) {
    auto [it, inserted] = global_to_local.try_emplace(global, static_cast<Var>(local_to_global.size() + 1));
    if (inserted) local_to_global.push_back(global);
    return it->second;
  }
};

struct PartitionPlan {
  std::vector<Partition> partitions;
  /// var_index[v] = ascending ids of partitions containing global variable v.
  std::vector<std::vector<std::size_t>> var_index;

  std::size_t size() const { return partitions.size(); }

  /// Variables occurring in more than one partition.
  std::size_t shared_var_count() const {
    std::size_t n = 0;
    for (const auto& ps : var_index) n += ps.size() > 1;
    return n;
  }

  std::size_t max_partition_vars() const {
    std::size_t m = 0;
    for (const auto& p : partitions) m = std::max(m, p.num_vars());
    return m;
  }
};

inline std::size_t distinct_var_count(const Clause& clause) {
  std::vector<Var> vars;
  vars.reserve(clause.size());
  for (Literal l : clause) vars.push_back(l.var());
  std::sort(vars.begin(), vars.end());
  return static_cast<std::size_t>(std::unique(vars.begin(), vars.end()) - vars.begin());
}

inline void rebuild_var_index(PartitionPlan& plan, std::size_t num_vars) {
  plan.var_index.assign(num_vars + 1, {});
  for (const Partition& p : plan.partitions)
    for (Var g : p.local_to_global)
      if (g < plan.var_index.size()) plan.var_index[g].push_back(p.id);
}

/// Greedy partitioning: each clause, in formula order, joins the last
/// partition unless that would push it past `max_clauses` clauses or
/// `max_vars` distinct variables, in which case a new partition is opened.
inline PartitionPlan partition(const Formula& formula, const PartitionConfig& config) {
  if (config.max_clauses == 0 || config.max_vars == 0)
    throw std::invalid_argument("partition thresholds must be >= 1");

  for (std::size_t i = 0; i < formula.clauses.size(); ++i) {
    std::size_t n = distinct_var_count(formula.clauses[i]);
    if (n > config.max_vars) throw PartitionError(i, n, config.max_vars);
  }

  PartitionPlan plan;
  plan.partitions.emplace_back();
  std::vector<Var> fresh;
  for (std::size_t i = 0; i < formula.clauses.size(); ++i) {
    const Clause& clause = formula.clauses[i];
    Partition* last = &plan.partitions.back();

    fresh.clear();
    for (Literal l : clause)
      if (!last->contains(l.var()) && std::find(fresh.begin(), fresh.end(), l.var()) == fresh.end())
        fresh.push_back(l.var());

    if (last->clause_refs.size() + 1 > config.max_clauses ||
        last->num_vars() + fresh.size() > config.max_vars) {
      plan.partitions.emplace_back();
      plan.partitions.back().id = plan.partitions.size() - 1;
      last = &plan.partitions.back();
    }
    last->clause_refs.push_back(i);
    for (Literal l : clause) last->add_var(l.var());
  }
  rebuild_var_index(plan, formula.num_vars);
  return plan;
}

class LocalizeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rewrites a clause into the partition's local variable ids, signs preserved.
inline Clause localize_clause(const Partition& partition, const Clause& clause) {
  Clause out;
  out.reserve(clause.size());
  for (Literal l : clause) {
    auto local = partition.local_of(l.var());
    if (!local)
      throw LocalizeError("variable " + std::to_string(l.var()) + " not in partition " +
                          std::to_string(partition.id));
    out.emplace_back(*local, l.negated());
  }
  return out;
}

inline Literal localize(const Partition& partition, Literal lit) {
  return localize_clause(partition, Clause{lit}).front();
}

inline Clause globalize_clause(const Partition& partition, const Clause& local) {
  Clause out;
  out.reserve(local.size());
  for (Literal l : local) {
    if (l.var() == 0 || l.var() > partition.local_to_global.size())
      throw LocalizeError("local variable " + std::to_string(l.var()) + " not in partition " +
                          std::to_string(partition.id));
    out.emplace_back(partition.local_to_global[l.var() - 1], l.negated());
  }
  return out;
}

inline Literal globalize(const Partition& partition, Literal local) {
  return globalize_clause(partition, Clause{local}).front();
}

struct PlanViolation {
  enum class Kind : std::uint8_t {
    ClauseThreshold,
    VarThreshold,
    VarMapCoverage,
    VarMapOrder,
    Cover,
    ClauseOrder,
    VarIndex,
    PartitionId,
  };
  std::optional<std::size_t> partition;
  Kind kind;
  std::string reason;
};

/// Checks every plan invariant; an empty result means the plan is valid.
inline std::vector<PlanViolation> validate_plan(const PartitionPlan& plan, const Formula& formula,
                                                const PartitionConfig& config) {
  using K = PlanViolation::Kind;
  std::vector<PlanViolation> out;
  auto report = [&](std::optional<std::size_t> p, K kind, std::string reason) {
    out.push_back({p, kind, std::move(reason)});
  };

  std::vector<std::size_t> cover;
  for (std::size_t pi = 0; pi < plan.partitions.size(); ++pi) {
    const Partition& p = plan.partitions[pi];
    if (p.id != pi)
      report(pi, K::PartitionId, "id " + std::to_string(p.id) + " at position " + std::to_string(pi));
    if (p.clause_refs.size() > config.max_clauses)
      report(pi, K::ClauseThreshold,
             std::to_string(p.clause_refs.size()) + " clauses > " + std::to_string(config.max_clauses));
    if (p.num_vars() > config.max_vars)
      report(pi, K::VarThreshold,
             std::to_string(p.num_vars()) + " variables > " + std::to_string(config.max_vars));
    if (!std::is_sorted(p.clause_refs.begin(), p.clause_refs.end()))
      report(pi, K::ClauseOrder, "clause references not in formula order");

    // Expected map: first-occurrence order over the partition's clauses.
    std::vector<Var> expected;
    bool refs_ok = true;
    for (std::size_t ci : p.clause_refs) {
      if (ci >= formula.clauses.size()) {
        report(pi, K::Cover, "clause index " + std::to_string(ci) + " out of range");
        refs_ok = false;
        continue;
      }
      for (Literal l : formula.clauses[ci])
        if (std::find(expected.begin(), expected.end(), l.var()) == expected.end())
          expected.push_back(l.var());
    }
    if (refs_ok) {
      std::vector<Var> a = expected, b = p.local_to_global;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b)
        report(pi, K::VarMapCoverage, "variable map does not match the partition's variables");
      else if (expected != p.local_to_global)
        report(pi, K::VarMapOrder, "local ids not dense in first-occurrence order");
    }
    bool bijective = p.global_to_local.size() == p.local_to_global.size();
    for (std::size_t li = 0; bijective && li < p.local_to_global.size(); ++li) {
      auto it = p.global_to_local.find(p.local_to_global[li]);
      bijective = it != p.global_to_local.end() && it->second == li + 1;
    }
    if (!bijective) report(pi, K::VarMapCoverage, "global/local maps are not inverse");
    cover.insert(cover.end(), p.clause_refs.begin(), p.clause_refs.end());
  }

  for (std::size_t i = 0; i < formula.clauses.size() || i < cover.size(); ++i) {
    if (i >= cover.size()) {
      report(std::nullopt, K::Cover, "clause " + std::to_string(i) + " not covered");
      break;
    }
    if (cover[i] != i) {
      report(std::nullopt, K::Cover,
             "clause cover is not an exact order-preserving partition of 0.." +
                 std::to_string(formula.clauses.size()) + " (position " + std::to_string(i) + ")");
      break;
    }
  }

  PartitionPlan expected_index = plan;
  rebuild_var_index(expected_index, formula.num_vars);
  if (expected_index.var_index != plan.var_index)
    report(std::nullopt, K::VarIndex, "variable index inconsistent with partition maps");
  return out;
}

/// One line per partition: `partition <id>: clauses=<i,j,..> vars=<g,h,..>`.
/// Clause indices are 0-based in formula order; variables are listed by local id.
inline void dump_plan(std::ostream& out, const PartitionPlan& plan) {
  for (const Partition& p : plan.partitions) {
    out << "partition " << p.id << ": clauses=";
    for (std::size_t i = 0; i < p.clause_refs.size(); ++i) out << (i ? "," : "") << p.clause_refs[i];
    out << " vars=";
    for (std::size_t i = 0; i < p.local_to_global.size(); ++i)
      out << (i ? "," : "") << p.local_to_global[i];
    out << '\n';
  }
}

} // namespace bcpsim
