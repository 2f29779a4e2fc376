#pragma once

// Host side of the accelerated solver: DPLL search whose BCP runs on the
// coprocessor model through its register interface, with partition hot-swap
// and cross-partition relay of implications.

#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bcpsim/cnf.hpp"
#include "bcpsim/coproc.hpp"
#include "bcpsim/dpll.hpp"
#include "bcpsim/partition.hpp"

namespace bcpsim {

/// Cost attribution collected when tracing is on.
struct HostTrace {
  bool enabled = false;
  CycleCounters initial_load_cycles; // first load into the empty coprocessor, with its replay
  CycleCounters swap_cycles;         // later loads replacing a resident partition, with their replays
  double simulator_seconds = 0.0; // wall time spent inside the coprocessor model
  double solve_seconds = 0.0;
};

inline PartitionConfig partition_config_for(const CoprocConfig& c) {
  return {c.num_cps, c.max_local_vars};
}

class HostSolver {
public:
  HostSolver(const Formula& formula, const CoprocConfig& coproc_config,
             std::optional<PartitionConfig> partition_config = std::nullopt, bool trace = false)
      : formula_(formula),
        partition_config_(partition_config.value_or(partition_config_for(coproc_config))),
        plan_(partition(formula, partition_config_)),
        coproc_(coproc_config),
        trail_(formula.num_vars),
        loads_per_partition_(plan_.size(), 0) {
    if (partition_config_.max_clauses > coproc_config.num_cps ||
        partition_config_.max_vars > coproc_config.max_local_vars)
      throw std::invalid_argument("partition thresholds exceed coprocessor capacity");
    trace_.enabled = trace;
    localized_.reserve(plan_.size());
    for (const Partition& p : plan_.partitions) {
      std::vector<Clause> clauses;
      clauses.reserve(p.clause_refs.size());
      for (std::size_t ci : p.clause_refs) clauses.push_back(localize_clause(p, formula.clauses[ci]));
      localized_.push_back(std::move(clauses));
    }
  }

  /// Full DPLL search. Call once per instance.
  Verdict solve() {
    Stopwatch clock;
    if (!plan_.partitions.empty()) swap_in(0); // initial configuration
    Adapter adapter{*this};
    Verdict v = dpll_search(formula_, adapter, trail_, stats_);
    stats_.total_model_cycles = coproc_.cycles().total();
    stats_.wall_time = clock.seconds();
    trace_.solve_seconds = stats_.wall_time;
    v.stats = stats_;
    return v;
  }

  std::optional<Literal> pick_decision() const { return trail_.pick_decision(); }

  /// Pushes a decision and propagates it; false on conflict.
  bool assume(Literal decision) {
    trail_.push_decision(decision);
    ++stats_.decisions;
    return propagate_global(decision);
  }

  /// Relays `lit` (already on the trail) to every partition containing its
  /// variable, then keeps relaying the resulting implications to the other
  /// partitions until nothing is pending. False on conflict.
  bool propagate_global(Literal lit) {
    if (trail_.value(lit) != Value::True) throw std::logic_error("propagated literal is not on the trail");
    pending_.push_back({lit, std::nullopt});
    return drain();
  }

  /// Makes partition `id` resident and brings its CP-local assignments in
  /// line with the trail. Returns the modeled cycles spent; 0 when the
  /// partition is already resident and current.
  std::uint64_t swap_in(std::size_t id) {
    if (id >= plan_.size()) throw std::out_of_range("partition id out of range");
    if (resident_ == id && !needs_replay_) return 0;
    const CycleCounters before = coproc_.cycles();
    const bool loading = resident_ != id;
    const bool first_load = !resident_.has_value();
    if (loading) {
      load(id);
      resident_ = id;
      ++stats_.partition_swaps;
      ++loads_per_partition_[id];
    }
    needs_replay_ = false;
    const Partition& p = plan_.partitions[id];
    const std::size_t snapshot = trail_.size();
    for (std::size_t i = 0; i < snapshot; ++i) {
      Literal g = trail_.entries()[i].lit;
      auto local = p.local_of(g.var());
      if (!local) continue;
      ++replay_broadcasts_;
      if (!run_decide(id, Literal{*local, g.negated()})) {
        replay_conflict_ = true;
        break;
      }
    }
    const CycleCounters& after = coproc_.cycles();
    CycleCounters delta{after.bcp - before.bcp, after.load - before.load, after.clear - before.clear,
                        after.transaction - before.transaction};
    if (loading) {
      CycleCounters& bucket = first_load ? trace_.initial_load_cycles : trace_.swap_cycles;
      bucket.bcp += delta.bcp;
      bucket.load += delta.load;
      bucket.clear += delta.clear;
      bucket.transaction += delta.transaction;
    }
    return delta.total();
  }

  /// Chronological backtrack: truncates the trail to the latest untried
  /// decision and returns its negation, clearing the coprocessor's
  /// assignments. nullopt means the search space is exhausted.
  std::optional<Literal> backtrack() {
    auto resume = trail_.backtrack();
    on_backtrack();
    return resume;
  }

  const Formula& formula() const { return formula_; }
  const PartitionPlan& plan() const { return plan_; }
  const Trail& trail() const { return trail_; }
  const SolveStats& stats() const { return stats_; }
  const Coprocessor& coprocessor() const { return coproc_; }
  const HostTrace& trace() const { return trace_; }
  std::optional<std::size_t> resident() const { return resident_; }
  const std::vector<std::uint64_t>& loads_per_partition() const { return loads_per_partition_; }
  std::uint64_t replay_broadcasts() const { return replay_broadcasts_; }

private:
  struct Pending {
    Literal lit;
    std::optional<std::size_t> origin; // partition that produced it, already closed under it
  };

  struct Adapter {
    HostSolver& host;
    bool propagate_initial(Trail&) { return host.propagate_initial(); }
    bool propagate(Trail&, Literal lit) { return host.propagate_global(lit); }
    void on_backtrack(Trail&) { host.on_backtrack(); }
  };

  // Input unit clauses are assigned at level 0 before the first decision.
  bool propagate_initial() {
    for (const Clause& c : formula_.clauses) {
      if (c.size() != 1) continue;
      switch (trail_.value(c.front())) {
      case Value::True: break;
      case Value::False: return false;
      case Value::Unassigned:
        trail_.push_implication(c.front());
        pending_.push_back({c.front(), std::nullopt});
        break;
      }
    }
    return drain();
  }

  void on_backtrack() {
    pending_.clear();
    replay_conflict_ = false;
    if (resident_) {
      timed([&] { coproc_.write_register(reg::kCmd, static_cast<std::uint32_t>(Command::Clear)); });
      needs_replay_ = true;
    }
  }

  bool drain() {
    while (!pending_.empty()) {
      Pending next = pending_.front();
      pending_.pop_front();
      for (std::size_t pid : plan_.var_index[next.lit.var()]) {
        if (next.origin == pid) continue;
        if (!visit(pid, next.lit)) {
          pending_.clear();
          return false;
        }
      }
    }
    return true;
  }

  bool visit(std::size_t pid, Literal lit) {
    if (resident_ != pid || needs_replay_) {
      // The replay re-broadcasts the whole trail, `lit` included.
      swap_in(pid);
      if (replay_conflict_) {
        replay_conflict_ = false;
        return false;
      }
      return true;
    }
    return run_decide(pid, localize(plan_.partitions[pid], lit));
  }

  void load(std::size_t id) {
    timed([&] {
      coproc_.write_register(reg::kArg0, 0);
      coproc_.write_register(reg::kCmd, static_cast<std::uint32_t>(Command::LoadBegin));
      for (const Clause& c : localized_[id]) {
        for (Literal l : c) load_word(encode_load_word(l));
        load_word(0);
      }
    });
    if (coproc_.error()) throw std::logic_error("coprocessor rejected partition load");
  }

  void load_word(std::uint32_t w) {
    coproc_.write_register(reg::kArg0, w);
    coproc_.write_register(reg::kCmd, static_cast<std::uint32_t>(Command::LoadWord));
  }

  // DECIDE on the resident partition, poll until finished, drain IMPL and
  // relay each implication to the trail. False on conflict.
  bool run_decide(std::size_t pid, Literal local) {
    std::uint32_t status = 0;
    impl_words_.clear();
    timed([&] {
      coproc_.write_register(reg::kArg0, encode_assignment_word(local));
      coproc_.write_register(reg::kCmd, static_cast<std::uint32_t>(Command::Decide));
      do {
        status = coproc_.read_register(reg::kStatus);
      } while (status == static_cast<std::uint32_t>(Status::Busy));
      for (std::uint32_t w; (w = coproc_.read_register(reg::kImpl)) != 0;) impl_words_.push_back(w);
    });
    ++stats_.bcp_calls;
    if (status == static_cast<std::uint32_t>(Status::Error))
      throw std::logic_error("coprocessor reported an error during BCP");

    const Partition& p = plan_.partitions[pid];
    for (std::uint32_t w : impl_words_) {
      Literal g = globalize(p, *decode_assignment_word(w));
      switch (trail_.value(g)) {
      case Value::True: break; // already known to the host
      case Value::False: return false;
      case Value::Unassigned:
        trail_.push_implication(g);
        pending_.push_back({g, pid});
        break;
      }
    }
    return status != static_cast<std::uint32_t>(Status::Conflict);
  }

  template <typename F> void timed(F&& f) {
    if (!trace_.enabled) {
      f();
      return;
    }
    auto start = std::chrono::steady_clock::now();
    f();
    trace_.simulator_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  const Formula& formula_;
  PartitionConfig partition_config_;
  PartitionPlan plan_;
  std::vector<std::vector<Clause>> localized_;
  Coprocessor coproc_;
  Trail trail_;
  SolveStats stats_;
  HostTrace trace_;
  std::deque<Pending> pending_;
  std::vector<std::uint32_t> impl_words_;
  std::optional<std::size_t> resident_;
  bool needs_replay_ = false;
  bool replay_conflict_ = false;
  std::vector<std::uint64_t> loads_per_partition_;
  std::uint64_t replay_broadcasts_ = 0;
};

inline Verdict solve(const Formula& formula, const CoprocConfig& coproc_config = {},
                     std::optional<PartitionConfig> partition_config = std::nullopt) {
  HostSolver host(formula, coproc_config, partition_config);
  return host.solve();
}

} // namespace bcpsim
