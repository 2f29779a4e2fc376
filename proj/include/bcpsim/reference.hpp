#pragma once

// Software-only BCP: a naive scan-all-clauses unit propagator, a vanilla DPLL
// over the whole formula, and a brute-force enumerator. These are the
// baseline and the correctness oracle for the coprocessor path.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bcpsim/cnf.hpp"
#include "bcpsim/dpll.hpp"

namespace bcpsim {

struct PropagationResult {
  std::vector<Literal> implications;
  bool conflict = false;
};

/// Applies the unit rule to fixpoint over `clauses`, starting from
/// `assignment` plus `seed`. Without a seed only existing units fire.
inline PropagationResult unit_propagate(std::span<const Clause> clauses, const Assignment& assignment,
                                        std::optional<Literal> seed = std::nullopt) {
  PropagationResult result;
  Assignment work = assignment;
  if (seed) {
    Value v = work.value(*seed);
    if (v == Value::False) throw std::invalid_argument("seed literal contradicts the assignment");
    work.assign(*seed);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& clause : clauses) {
      ClauseStatus s = clause_status(clause, work);
      if (s.kind == ClauseStatus::Kind::Falsified) {
        result.conflict = true;
        return result;
      }
      if (s.kind == ClauseStatus::Kind::Unit) {
        work.assign(s.unit);
        result.implications.push_back(s.unit);
        changed = true;
      }
    }
  }
  return result;
}

/// Whole-formula software propagation for dpll_search.
class ReferencePropagator {
public:
  explicit ReferencePropagator(const Formula& formula) : formula_(formula) {}

  bool propagate_initial(Trail& trail) { return apply(trail, unit_propagate(formula_.clauses, trail.assignment())); }

  bool propagate(Trail& trail, Literal lit) {
    return apply(trail, unit_propagate(formula_.clauses, trail.assignment(), lit));
  }

  void on_backtrack(Trail&) {}

private:
  static bool apply(Trail& trail, const PropagationResult& r) {
    for (Literal l : r.implications) trail.push_implication(l);
    return !r.conflict;
  }

  const Formula& formula_;
};

inline Verdict solve_reference(const Formula& formula) {
  Stopwatch clock;
  Trail trail(formula.num_vars);
  SolveStats stats;
  ReferencePropagator propagator(formula);
  Verdict v = dpll_search(formula, propagator, trail, stats);
  v.stats.wall_time = clock.seconds();
  return v;
}

class EnumerationLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kBruteForceMaxVars = 24;

/// Exhaustive enumeration; the first satisfying assignment in binary
/// counting order (variable 1 = least significant bit) is returned.
inline Verdict brute_force(const Formula& formula) {
  if (formula.num_vars > kBruteForceMaxVars)
    throw EnumerationLimitError(std::to_string(formula.num_vars) + " variables exceed the " +
                                std::to_string(kBruteForceMaxVars) + "-variable enumeration limit");
  Stopwatch clock;
  Verdict v;
  v.result = Verdict::Result::Unsat;
  if (!formula.has_empty_clause) {
    struct Masks {
      std::uint32_t pos = 0, neg = 0;
    };
    std::vector<Masks> masks;
    masks.reserve(formula.clauses.size());
    for (const Clause& c : formula.clauses) {
      Masks m;
      for (Literal l : c) (l.negated() ? m.neg : m.pos) |= 1u << (l.var() - 1);
      masks.push_back(m);
    }
    const std::uint64_t limit = std::uint64_t{1} << formula.num_vars;
    for (std::uint64_t bits = 0; bits < limit; ++bits) {
      const auto a = static_cast<std::uint32_t>(bits);
      bool all = true;
      for (const Masks& m : masks) {
        if (((a & m.pos) | (~a & m.neg)) == 0) {
          all = false;
          break;
        }
      }
      if (all) {
        v.result = Verdict::Result::Sat;
        v.model = Assignment(formula.num_vars);
        for (Var x = 1; x <= formula.num_vars; ++x)
          v.model.set(x, (a >> (x - 1)) & 1u ? Value::True : Value::False);
        break;
      }
    }
  }
  v.stats.wall_time = clock.seconds();
  return v;
}

} // namespace bcpsim
