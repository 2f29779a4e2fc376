#pragma once

// Chronological DPLL shared by the software and coprocessor paths. The search
// skeleton is generic over a propagator so both paths make identical
// decisions and backtrack identically; only BCP differs.

#include <chrono>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcpsim/cnf.hpp"

namespace bcpsim {

enum class Reason : std::uint8_t { Decision, Implication };

struct TrailEntry {
  Literal lit;
  Reason reason = Reason::Decision;
  std::uint32_t level = 0;
  bool flipped = false; // decision whose other polarity was already refuted
};

class Trail {
public:
  explicit Trail(std::size_t num_vars) : assignment_(num_vars) {}

  std::uint32_t level() const { return level_; }
  std::span<const TrailEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const Assignment& assignment() const { return assignment_; }
  Value value(Literal lit) const { return assignment_.value(lit); }
  std::uint64_t implications_pushed() const { return implications_pushed_; }

  void push_decision(Literal lit, bool flipped = false) {
    require_unassigned(lit);
    ++level_;
    entries_.push_back({lit, Reason::Decision, level_, flipped});
    assignment_.assign(lit);
  }

  void push_implication(Literal lit) {
    require_unassigned(lit);
    entries_.push_back({lit, Reason::Implication, level_, false});
    assignment_.assign(lit);
    ++implications_pushed_;
  }

  /// Lowest-index unassigned variable, positive polarity.
  std::optional<Literal> pick_decision() const {
    for (Var v = 1; v <= assignment_.num_vars(); ++v)
      if (!assignment_.is_assigned(v)) return Literal{v, false};
    return std::nullopt;
  }

  /// Pops back to the most recent decision not yet tried both ways, removes
  /// it and returns its negation. nullopt (trail untouched) if none exists.
  std::optional<Literal> backtrack() {
    std::size_t i = entries_.size();
    while (i > 0) {
      const TrailEntry& e = entries_[i - 1];
      if (e.reason == Reason::Decision && !e.flipped) break;
      --i;
    }
    if (i == 0) return std::nullopt;
    Literal resume = -entries_[i - 1].lit;
    level_ = entries_[i - 1].level - 1;
    while (entries_.size() >= i) {
      assignment_.unassign(entries_.back().lit.var());
      entries_.pop_back();
    }
    return resume;
  }

private:
  void require_unassigned(Literal lit) const {
    if (assignment_.is_assigned(lit.var()))
      throw std::logic_error("variable " + std::to_string(lit.var()) + " already on the trail");
  }

  std::vector<TrailEntry> entries_;
  Assignment assignment_;
  std::uint32_t level_ = 0;
  std::uint64_t implications_pushed_ = 0;
};

struct SolveStats {
  std::uint64_t decisions = 0;
  std::uint64_t implications = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t backtracks = 0;
  std::uint64_t partition_swaps = 0;
  std::uint64_t bcp_calls = 0;
  std::uint64_t total_model_cycles = 0;
  double wall_time = 0.0; // seconds

  /// Every field but wall_time, for reproducibility checks.
  std::string deterministic_fields() const {
    std::ostringstream s;
    s << "decisions=" << decisions << " implications=" << implications
      << " conflicts=" << conflicts << " backtracks=" << backtracks
      << " partition_swaps=" << partition_swaps << " bcp_calls=" << bcp_calls
      << " total_model_cycles=" << total_model_cycles;
    return s.str();
  }
};

struct Verdict {
  enum class Result : std::uint8_t { Sat, Unsat };
  Result result = Result::Unsat;
  Assignment model; // meaningful for Sat only
  SolveStats stats;

  bool sat() const { return result == Result::Sat; }
};

/// BCP policy plugged into dpll_search. Both calls return false on conflict.
template <typename P>
concept DpllPropagator = requires(P& p, Trail& trail, Literal lit) {
  { p.propagate_initial(trail) } -> std::same_as<bool>;
  { p.propagate(trail, lit) } -> std::same_as<bool>;
  { p.on_backtrack(trail) };
};

/// Decide, propagate, backtrack chronologically until a model is found or
/// the search space is exhausted. Fills the search counters of `stats`.
template <DpllPropagator P>
Verdict dpll_search(const Formula& formula, P& propagator, Trail& trail, SolveStats& stats) {
  Verdict verdict;
  auto finish = [&](Verdict::Result r) {
    verdict.result = r;
    stats.implications = trail.implications_pushed();
    if (r == Verdict::Result::Sat) verdict.model = trail.assignment();
    verdict.stats = stats;
    return verdict;
  };

  if (formula.has_empty_clause) return finish(Verdict::Result::Unsat);
  if (!propagator.propagate_initial(trail)) {
    ++stats.conflicts;
    return finish(Verdict::Result::Unsat);
  }
  for (;;) {
    auto decision = trail.pick_decision();
    if (!decision) {
      if (evaluate(formula, trail.assignment()) != Evaluation::Satisfied)
        throw std::logic_error("complete assignment does not satisfy the formula");
      return finish(Verdict::Result::Sat);
    }
    trail.push_decision(*decision);
    ++stats.decisions;
    bool ok = propagator.propagate(trail, *decision);
    while (!ok) {
      ++stats.conflicts;
      auto resume = trail.backtrack();
      propagator.on_backtrack(trail);
      if (!resume) return finish(Verdict::Result::Unsat);
      ++stats.backtracks;
      trail.push_decision(*resume, true);
      ok = propagator.propagate(trail, *resume);
    }
  }
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

} // namespace bcpsim
