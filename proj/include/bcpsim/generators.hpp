#pragma once

// Instance generators for tests and benchmarks.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "bcpsim/cnf.hpp"

namespace bcpsim {

/// Uniform random k-SAT: each clause draws k distinct variables and random
/// signs. Deterministic for a given seed.
inline Formula random_ksat(std::size_t num_vars, std::size_t num_clauses, std::size_t k,
                           std::uint64_t seed) {
  if (k == 0 || k > num_vars) throw std::invalid_argument("random k-SAT needs 1 <= k <= num_vars");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Var> pick_var(1, static_cast<Var>(num_vars));
  std::bernoulli_distribution negate(0.5);

  Formula f;
  f.num_vars = num_vars;
  f.clauses.reserve(num_clauses);
  for (std::size_t i = 0; i < num_clauses; ++i) {
    Clause c;
    c.reserve(k);
    while (c.size() < k) {
      Var v = pick_var(rng);
      bool dup = false;
      for (Literal l : c) dup |= l.var() == v;
      if (!dup) c.emplace_back(v, negate(rng));
    }
    f.clauses.push_back(std::move(c));
  }
  return f;
}

/// Pigeonhole principle with holes+1 pigeons: UNSAT for every holes >= 1.
/// Variable p*holes + h + 1 means pigeon p sits in hole h.
inline Formula pigeonhole(std::size_t holes) {
  const std::size_t pigeons = holes + 1;
  auto x = [&](std::size_t p, std::size_t h) { return static_cast<Var>(p * holes + h + 1); };
  Formula f;
  f.num_vars = pigeons * holes;
  for (std::size_t p = 0; p < pigeons; ++p) {
    Clause c;
    for (std::size_t h = 0; h < holes; ++h) c.emplace_back(x(p, h), false);
    f.clauses.push_back(std::move(c));
  }
  for (std::size_t h = 0; h < holes; ++h)
    for (std::size_t p = 0; p < pigeons; ++p)
      for (std::size_t q = p + 1; q < pigeons; ++q)
        f.clauses.push_back({Literal{x(p, h), true}, Literal{x(q, h), true}});
  return f;
}

} // namespace bcpsim
