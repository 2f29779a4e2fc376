#pragma once

// Benchmark harness: runs an instance on both BCP paths and reports one
// BenchRecord (CSV row) plus an optional per-phase time breakdown.

#include <charconv>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcpsim/cnf.hpp"
#include "bcpsim/coproc.hpp"
#include "bcpsim/host.hpp"
#include "bcpsim/reference.hpp"

namespace bcpsim {

struct BenchRecord {
  std::string instance;
  std::uint64_t num_vars = 0;
  std::uint64_t num_clauses = 0;
  std::uint64_t partitions = 0;
  std::uint64_t swaps = 0;
  std::uint64_t decisions = 0;
  std::uint64_t implications = 0;
  std::uint64_t conflicts = 0;
  std::string verdict;
  std::uint64_t coproc_model_cycles = 0;
  double coproc_model_seconds = 0.0;   // cycles / clock_hz
  double host_wall_seconds = 0.0;      // whole coprocessor-path solve, simulator included
  double reference_wall_seconds = 0.0; // software-only solve
  double bcp_per_model_second = 0.0;   // implications / coproc_model_seconds
  double bcp_per_wall_second = 0.0;    // implications / host_wall_seconds
  /// reference_wall_seconds / (host_wall_seconds - simulator time + coproc_model_seconds):
  /// the simulator's own run time is replaced by the modeled hardware time.
  double speedup_vs_reference = 0.0;
};

inline constexpr const char* kBenchCsvHeader =
    "instance,num_vars,num_clauses,partitions,swaps,decisions,implications,conflicts,verdict,"
    "coproc_model_cycles,coproc_model_seconds,host_wall_seconds,reference_wall_seconds,"
    "bcp_per_model_second,bcp_per_wall_second,speedup_vs_reference";

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

} // namespace detail

inline std::string to_csv_row(const BenchRecord& r) {
  std::string name = r.instance;
  for (char& c : name)
    if (c == ',' || c == '\n') c = '_';
  std::ostringstream s;
  s << name << ',' << r.num_vars << ',' << r.num_clauses << ',' << r.partitions << ',' << r.swaps
    << ',' << r.decisions << ',' << r.implications << ',' << r.conflicts << ',' << r.verdict << ','
    << r.coproc_model_cycles << ',' << detail::format_double(r.coproc_model_seconds) << ','
    << detail::format_double(r.host_wall_seconds) << ','
    << detail::format_double(r.reference_wall_seconds) << ','
    << detail::format_double(r.bcp_per_model_second) << ','
    << detail::format_double(r.bcp_per_wall_second) << ','
    << detail::format_double(r.speedup_vs_reference);
  return s.str();
}

/// Shares of the coprocessor-path run time. Modeled components are converted
/// with the configured clock; host logic is measured wall time outside the
/// simulator.
struct Breakdown {
  double coproc_bcp_seconds = 0.0;   // BCP iterations and clears, outside loads
  double transaction_seconds = 0.0;  // register transactions, outside loads
  double initial_load_seconds = 0.0; // configuring the first partition
  double swap_seconds = 0.0;         // replacing a resident partition, replay included
  double host_logic_seconds = 0.0;   // decisions, backtracking, relay bookkeeping

  double total() const {
    return coproc_bcp_seconds + transaction_seconds + initial_load_seconds + swap_seconds + host_logic_seconds;
  }
  double fraction(double part) const { return detail::ratio(part, total()); }
};

class TraceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline Breakdown compute_breakdown(const HostTrace& trace, const CycleCounters& totals, double clock_hz) {
  if (!trace.enabled) throw TraceError("no trace collected; rerun with tracing enabled");
  const CycleCounters& s = trace.swap_cycles;
  const CycleCounters& i = trace.initial_load_cycles;
  Breakdown b;
  b.coproc_bcp_seconds = static_cast<double>((totals.bcp + totals.clear + totals.load) -
                                             (s.bcp + s.clear + s.load) - (i.bcp + i.clear + i.load)) /
                         clock_hz;
  b.transaction_seconds = static_cast<double>(totals.transaction - s.transaction - i.transaction) / clock_hz;
  b.initial_load_seconds = static_cast<double>(i.total()) / clock_hz;
  b.swap_seconds = static_cast<double>(s.total()) / clock_hz;
  double host = trace.solve_seconds - trace.simulator_seconds;
  b.host_logic_seconds = host > 0.0 ? host : 0.0;
  return b;
}

inline std::string emit_breakdown(const BenchRecord& record, const Breakdown& b) {
  std::ostringstream s;
  s << "breakdown for " << record.instance << " (" << record.partitions << " partitions, "
    << record.swaps << " swaps)\n";
  auto row = [&](const char* name, double secs) {
    s << "  " << std::left << std::setw(22) << name << std::right << std::setw(14)
      << std::scientific << std::setprecision(4) << secs << " s  " << std::fixed
      << std::setprecision(4) << b.fraction(secs) << '\n';
  };
  row("coprocessor BCP", b.coproc_bcp_seconds);
  row("register transactions", b.transaction_seconds);
  row("initial load", b.initial_load_seconds);
  row("partition swapping", b.swap_seconds);
  row("host logic", b.host_logic_seconds);
  return s.str();
}

class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct BenchRun {
  BenchRecord record;
  Breakdown breakdown;
  Verdict coproc;
  Verdict reference;
};

inline const char* verdict_name(const Verdict& v) { return v.sat() ? "SAT" : "UNSAT"; }

/// Solves `formula` on both paths, checks they agree and fills a record.
inline BenchRun run_instance(const std::string& name, const Formula& formula, const CoprocConfig& config) {
  BenchRun run;
  HostSolver host(formula, config, std::nullopt, /*trace=*/true);
  run.coproc = host.solve();
  run.reference = solve_reference(formula);
  if (run.coproc.result != run.reference.result)
    throw DivergenceError(name + ": coprocessor path says " + verdict_name(run.coproc) +
                          ", reference says " + verdict_name(run.reference));

  BenchRecord& r = run.record;
  const SolveStats& st = run.coproc.stats;
  r.instance = name;
  r.num_vars = formula.num_vars;
  r.num_clauses = formula.num_clauses();
  r.partitions = host.plan().size();
  r.swaps = st.partition_swaps;
  r.decisions = st.decisions;
  r.implications = st.implications;
  r.conflicts = st.conflicts;
  r.verdict = verdict_name(run.coproc);
  r.coproc_model_cycles = st.total_model_cycles;
  r.coproc_model_seconds = static_cast<double>(st.total_model_cycles) / config.clock_hz;
  r.host_wall_seconds = st.wall_time;
  r.reference_wall_seconds = run.reference.stats.wall_time;
  r.bcp_per_model_second = detail::ratio(static_cast<double>(r.implications), r.coproc_model_seconds);
  r.bcp_per_wall_second = detail::ratio(static_cast<double>(r.implications), r.host_wall_seconds);

  run.breakdown = compute_breakdown(host.trace(), host.coprocessor().cycles(), config.clock_hz);
  double system_seconds = run.breakdown.host_logic_seconds + r.coproc_model_seconds;
  r.speedup_vs_reference = detail::ratio(r.reference_wall_seconds, system_seconds);
  return run;
}

} // namespace bcpsim
