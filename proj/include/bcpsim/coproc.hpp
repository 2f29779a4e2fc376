#pragma once

// Cycle-accounted model of the BCP coprocessor: a memory-mapped register file
// for the host, a control unit, an array of clause processors (one clause
// each, evaluated together every iteration) and a lowest-index implication
// selector.
//
// Register map (32-bit words):
//   0x00 CMD        write  0=NOP 1=RESET 2=LOAD_BEGIN(ARG0=cp index)
//                          3=LOAD_WORD(ARG0=literal word, 0 ends clause)
//                          4=DECIDE(ARG0=assignment word) 5=CLEAR
//   0x04 ARG0       write
//   0x08 STATUS     read   0=IDLE 1=BUSY 2=DONE 3=CONFLICT 4=ERROR
//   0x0C IMPL       read   next implication (assignment word), 0 when drained
//   0x10 CYCLES_LO  read
//   0x14 CYCLES_HI  read
//
// Word layout: bits [31:8] zero, bits [7:1] local variable id, bit 0 is the
// negation flag for LOAD_WORD and the assigned value (1 = true) for DECIDE and
// IMPL. Word 0 is the sentinel everywhere.
//
// Timing: a DECIDE leaves the unit BUSY. Each STATUS poll while BUSY returns
// BUSY and advances the engine by one BCP iteration, so the number of BUSY
// polls equals the iteration count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcpsim/cnf.hpp"

namespace bcpsim {

struct CoprocConfig {
  std::size_t num_cps = 224;
  std::size_t max_local_vars = 63;
  double clock_hz = 106'660'000.0;
  std::uint64_t cycles_per_bcp_iteration = 3;
  std::uint64_t cycles_per_load_word = 1;
  std::uint64_t host_transaction_cycles = 10;

  static constexpr std::size_t kWordVarCapacity = 127;

  void validate() const {
    if (num_cps == 0) throw std::invalid_argument("num_cps must be >= 1");
    if (max_local_vars == 0 || max_local_vars > kWordVarCapacity)
      throw std::invalid_argument("max_local_vars must be in [1, 127]");
    if (!(clock_hz > 0.0)) throw std::invalid_argument("clock_hz must be positive");
    if (cycles_per_bcp_iteration == 0 || cycles_per_load_word == 0 || host_transaction_cycles == 0)
      throw std::invalid_argument("cycle costs must be >= 1");
  }
};

class CoprocError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace reg {
inline constexpr std::uint32_t kCmd = 0x00;
inline constexpr std::uint32_t kArg0 = 0x04;
inline constexpr std::uint32_t kStatus = 0x08;
inline constexpr std::uint32_t kImpl = 0x0C;
inline constexpr std::uint32_t kCyclesLo = 0x10;
inline constexpr std::uint32_t kCyclesHi = 0x14;
} // namespace reg

enum class Command : std::uint32_t { Nop = 0, Reset = 1, LoadBegin = 2, LoadWord = 3, Decide = 4, Clear = 5 };
enum class Status : std::uint32_t { Idle = 0, Busy = 1, Done = 2, Conflict = 3, Error = 4 };
enum class ControlState : std::uint8_t { Idle, Loading, BcpRunning, Done, Conflict };

constexpr std::uint32_t encode_load_word(Literal local) {
  return (local.var() << 1) | (local.negated() ? 1u : 0u);
}

constexpr std::uint32_t encode_assignment_word(Literal local) {
  return (local.var() << 1) | (local.negated() ? 0u : 1u);
}

/// nullopt for the sentinel, reserved bits or variable id 0.
constexpr std::optional<Literal> decode_load_word(std::uint32_t word) {
  if (word == 0 || (word >> 8) != 0 || (word >> 1) == 0) return std::nullopt;
  return Literal{word >> 1, (word & 1u) != 0};
}

constexpr std::optional<Literal> decode_assignment_word(std::uint32_t word) {
  if (word == 0 || (word >> 8) != 0 || (word >> 1) == 0) return std::nullopt;
  return Literal{word >> 1, (word & 1u) == 0};
}

struct CpResult {
  enum class Kind : std::uint8_t { Satisfied, Falsified, Unit, Unresolved, EmptySlot };
  Kind kind = Kind::EmptySlot;
  Literal unit;

  bool operator==(const CpResult&) const = default;
};

/// One clause slot plus its private copy of the values of its own variables.
class ClauseProcessor {
public:
  bool empty() const { return literals_.empty(); }
  std::span<const Literal> literals() const { return literals_; }

  void clear_slot() {
    literals_.clear();
    values_.clear();
  }

  void append(Literal lit) {
    literals_.push_back(lit);
    values_.push_back(Value::Unassigned);
  }

  bool holds_var(Var v) const {
    for (Literal l : literals_)
      if (l.var() == v) return true;
    return false;
  }

  /// Latches `assignment` into the local copy if this clause watches its variable.
  void observe(Literal assignment) {
    for (std::size_t i = 0; i < literals_.size(); ++i)
      if (literals_[i].var() == assignment.var())
        values_[i] = assignment.negated() ? Value::False : Value::True;
  }

  void clear_assignment() { std::fill(values_.begin(), values_.end(), Value::Unassigned); }

  /// Local value of variable v, Unassigned if not held.
  Value value_of(Var v) const {
    for (std::size_t i = 0; i < literals_.size(); ++i)
      if (literals_[i].var() == v) return values_[i];
    return Value::Unassigned;
  }

  CpResult evaluate() const {
    if (literals_.empty()) return {CpResult::Kind::EmptySlot, {}};
    std::size_t free_count = 0;
    Literal free_lit;
    for (std::size_t i = 0; i < literals_.size(); ++i) {
      Value v = values_[i];
      if (v == Value::Unassigned) {
        ++free_count;
        free_lit = literals_[i];
        continue;
      }
      bool lit_true = (v == Value::True) != literals_[i].negated();
      if (lit_true) return {CpResult::Kind::Satisfied, {}};
    }
    if (free_count == 0) return {CpResult::Kind::Falsified, {}};
    if (free_count == 1) return {CpResult::Kind::Unit, free_lit};
    return {CpResult::Kind::Unresolved, {}};
  }

private:
  std::vector<Literal> literals_;
  std::vector<Value> values_; // parallel to literals_
};

inline CpResult cp_evaluate(const ClauseProcessor& cp) { return cp.evaluate(); }

/// Lowest-indexed CP reporting a unit wins. Opposing units are not compared
/// here; the losing clause shows up falsified on the next evaluation.
inline std::optional<Literal> select_implication(std::span<const CpResult> results) {
  for (const CpResult& r : results)
    if (r.kind == CpResult::Kind::Unit) return r.unit;
  return std::nullopt;
}

struct BcpOutcome {
  std::vector<Literal> implications; // local literals, propagation order
  bool conflict = false;
  std::size_t iterations = 0;
  std::uint64_t cycles = 0; // iterations * cycles_per_bcp_iteration
  std::optional<std::size_t> conflict_cp;

  bool operator==(const BcpOutcome&) const = default;
};

struct CycleCounters {
  std::uint64_t bcp = 0;
  std::uint64_t load = 0;
  std::uint64_t clear = 0;
  std::uint64_t transaction = 0;

  std::uint64_t total() const { return bcp + load + clear + transaction; }
  bool operator==(const CycleCounters&) const = default;
};

struct Instrumentation {
  std::uint64_t iterations = 0;
  std::uint64_t cp_evaluations = 0;
  std::uint64_t selections = 0;
  std::uint64_t conflicts_by_evaluation = 0;
  std::uint64_t register_reads = 0;
  std::uint64_t register_writes = 0;
  std::uint64_t rejected_commands = 0;
};

class Coprocessor {
public:
  explicit Coprocessor(CoprocConfig config = {}) : config_(config) {
    config_.validate();
    cps_.resize(config_.num_cps);
    results_.resize(config_.num_cps);
  }

  const CoprocConfig& config() const { return config_; }
  ControlState state() const { return state_; }
  const CycleCounters& cycles() const { return cycles_; }
  const Instrumentation& instrumentation() const { return instr_; }
  std::span<const ClauseProcessor> clause_processors() const { return cps_; }
  /// CP results of the most recent evaluation.
  std::span<const CpResult> last_results() const { return results_; }
  /// Outcome of the current or most recent BCP run.
  const BcpOutcome& current_run() const { return run_; }
  bool error() const { return error_; }

  std::size_t loaded_clauses() const {
    std::size_t n = 0;
    for (const auto& cp : cps_) n += !cp.empty();
    return n;
  }

  Status status() const {
    if (error_) return Status::Error;
    switch (state_) {
    case ControlState::BcpRunning: return Status::Busy;
    case ControlState::Done: return Status::Done;
    case ControlState::Conflict: return Status::Conflict;
    default: return Status::Idle;
    }
  }

  // ---- register interface -------------------------------------------------

  void write_register(std::uint32_t addr, std::uint32_t word) {
    ++instr_.register_writes;
    cycles_.transaction += config_.host_transaction_cycles;
    switch (addr) {
    case reg::kArg0: arg0_ = word; return;
    case reg::kCmd: execute(word); return;
    default: throw CoprocError("write to unknown or read-only register 0x" + hex(addr));
    }
  }

  std::uint32_t read_register(std::uint32_t addr) {
    ++instr_.register_reads;
    cycles_.transaction += config_.host_transaction_cycles;
    switch (addr) {
    case reg::kStatus: {
      Status s = status();
      if (state_ == ControlState::BcpRunning) step();
      return static_cast<std::uint32_t>(s);
    }
    case reg::kImpl: {
      if (impl_queue_.empty()) return 0;
      std::uint32_t w = encode_assignment_word(impl_queue_.front());
      impl_queue_.pop_front();
      return w;
    }
    case reg::kCyclesLo: return static_cast<std::uint32_t>(cycles_.total() & 0xFFFF'FFFFu);
    case reg::kCyclesHi: return static_cast<std::uint32_t>(cycles_.total() >> 32);
    default: throw CoprocError("read from unknown or write-only register 0x" + hex(addr));
    }
  }

  // ---- control-unit operations --------------------------------------------

  /// Empties every CP, clears assignments and the sticky error. Counters survive.
  void reset() {
    for (auto& cp : cps_) cp.clear_slot();
    std::fill(results_.begin(), results_.end(), CpResult{});
    impl_queue_.clear();
    run_ = {};
    cursor_ = 0;
    error_ = false;
    state_ = ControlState::Idle;
  }

  /// Empties CPs from `cp_index` on, clears all local assignments and starts
  /// writing clauses at that CP.
  void begin_load(std::size_t cp_index) {
    require_not_busy("LOAD_BEGIN");
    if (cp_index >= config_.num_cps)
      throw CoprocError("load start index " + std::to_string(cp_index) + " out of range");
    for (std::size_t i = cp_index; i < cps_.size(); ++i) cps_[i].clear_slot();
    for (auto& cp : cps_) cp.clear_assignment();
    impl_queue_.clear();
    cursor_ = cp_index;
    state_ = ControlState::Loading;
  }

  void load_word(std::uint32_t word) {
    if (state_ != ControlState::Loading) throw CoprocError("LOAD_WORD outside a load sequence");
    cycles_.load += config_.cycles_per_load_word;
    if (cursor_ >= cps_.size()) throw CoprocError("more clauses than clause processors");
    if (word == 0) {
      ++cursor_;
      return;
    }
    auto lit = decode_load_word(word);
    if (!lit) throw CoprocError("malformed literal word");
    if (lit->var() > config_.max_local_vars)
      throw CoprocError("local variable " + std::to_string(lit->var()) + " exceeds capacity");
    ClauseProcessor& cp = cps_[cursor_];
    if (cp.holds_var(lit->var())) throw CoprocError("variable repeated within a clause");
    cp.append(*lit);
  }

  /// Overwrites the CP array with `clauses` (locally encoded) and returns the
  /// load cycles: one word per literal plus one terminator per clause.
  std::uint64_t load_partition(std::span<const Clause> clauses) {
    require_not_busy("load");
    if (clauses.size() > config_.num_cps)
      throw CoprocError(std::to_string(clauses.size()) + " clauses exceed " +
                        std::to_string(config_.num_cps) + " clause processors");
    for (const Clause& c : clauses) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].var() == 0 || c[i].var() > config_.max_local_vars)
          throw CoprocError("local variable " + std::to_string(c[i].var()) + " out of range");
        for (std::size_t j = 0; j < i; ++j)
          if (c[j].var() == c[i].var()) throw CoprocError("variable repeated within a clause");
      }
    }
    std::uint64_t before = cycles_.load;
    begin_load(0);
    for (const Clause& c : clauses) {
      for (Literal l : c) load_word(encode_load_word(l));
      load_word(0);
    }
    state_ = ControlState::Idle;
    return cycles_.load - before;
  }

  /// Starts a BCP run on `decision` (a local literal); advance with step().
  void begin_decide(Literal decision) {
    require_not_busy("DECIDE");
    if (decision.var() == 0 || decision.var() > config_.max_local_vars)
      throw CoprocError("decision variable " + std::to_string(decision.var()) + " out of range");
    run_ = {};
    impl_queue_.clear();
    pending_ = decision;
    state_ = ControlState::BcpRunning;
  }

  /// One BCP iteration: broadcast, evaluate every CP, select. Returns true
  /// while the run continues.
  bool step() {
    if (state_ != ControlState::BcpRunning) return false;
    broadcast(pending_);
    evaluate_all();
    ++run_.iterations;
    ++instr_.iterations;
    run_.cycles += config_.cycles_per_bcp_iteration;
    cycles_.bcp += config_.cycles_per_bcp_iteration;

    for (std::size_t i = 0; i < results_.size(); ++i) {
      if (results_[i].kind == CpResult::Kind::Falsified) {
        run_.conflict = true;
        run_.conflict_cp = i;
        ++instr_.conflicts_by_evaluation;
        state_ = ControlState::Conflict;
        return false;
      }
    }
    ++instr_.selections;
    if (auto next = select_implication(results_)) {
      run_.implications.push_back(*next);
      impl_queue_.push_back(*next);
      pending_ = *next;
      return true;
    }
    state_ = ControlState::Done;
    return false;
  }

  BcpOutcome decide(Literal decision) {
    begin_decide(decision);
    while (step()) {
    }
    return run_;
  }

  /// Unassigns every local variable; clauses stay loaded. One cycle.
  std::uint64_t backtrack_clear() {
    require_not_busy("CLEAR");
    for (auto& cp : cps_) cp.clear_assignment();
    impl_queue_.clear();
    cycles_.clear += 1;
    state_ = ControlState::Idle;
    return 1;
  }

  /// Latches an assignment into every CP (the broadcast stage on its own).
  void broadcast(Literal assignment) {
    for (auto& cp : cps_) cp.observe(assignment);
  }

  /// Evaluates all CPs, loaded or not.
  std::span<const CpResult> evaluate_all() {
    for (std::size_t i = 0; i < cps_.size(); ++i) results_[i] = cps_[i].evaluate();
    instr_.cp_evaluations += cps_.size();
    return results_;
  }

  /// Local value of v as seen by the CPs holding it; nullopt if the CPs disagree.
  std::optional<Value> local_value(Var v) const {
    std::optional<Value> seen;
    for (const auto& cp : cps_) {
      if (!cp.holds_var(v)) continue;
      Value x = cp.value_of(v);
      if (seen && *seen != x) return std::nullopt;
      seen = x;
    }
    return seen.value_or(Value::Unassigned);
  }

private:
  void require_not_busy(const char* what) const {
    if (state_ == ControlState::BcpRunning)
      throw CoprocError(std::string(what) + " while BCP is running");
  }

  void execute(std::uint32_t cmd) {
    if (state_ == ControlState::BcpRunning && cmd != static_cast<std::uint32_t>(Command::Reset)) {
      ++instr_.rejected_commands;
      error_ = true;
      return;
    }
    try {
      switch (static_cast<Command>(cmd)) {
      case Command::Nop: return;
      case Command::Reset: reset(); return;
      case Command::LoadBegin: begin_load(arg0_); return;
      case Command::LoadWord: load_word(arg0_); return;
      case Command::Decide: {
        auto lit = decode_assignment_word(arg0_);
        if (!lit) throw CoprocError("malformed decision word");
        begin_decide(*lit);
        return;
      }
      case Command::Clear: backtrack_clear(); return;
      }
      throw CoprocError("unknown command " + std::to_string(cmd));
    } catch (const CoprocError&) {
      ++instr_.rejected_commands;
      error_ = true;
    }
  }

  static std::string hex(std::uint32_t v) {
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string s;
    do {
      s.insert(s.begin(), digits[v & 0xF]);
      v >>= 4;
    } while (v);
    return s;
  }

  CoprocConfig config_;
  std::vector<ClauseProcessor> cps_;
  std::vector<CpResult> results_;
  std::deque<Literal> impl_queue_;
  BcpOutcome run_;
  Literal pending_;
  std::uint32_t arg0_ = 0;
  std::size_t cursor_ = 0;
  bool error_ = false;
  ControlState state_ = ControlState::Idle;
  CycleCounters cycles_;
  Instrumentation instr_;
};

} // namespace bcpsim
