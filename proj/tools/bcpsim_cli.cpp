// bcpsim: solve, partition and benchmark DIMACS CNF instances on the
// simulated BCP coprocessor.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bcpsim/bcpsim.hpp"

namespace fs = std::filesystem;
using namespace bcpsim;

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitError = 1;

Formula read_formula(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_dimacs(in);
}

void print_verdict(const Verdict& v) {
  if (!v.sat()) {
    std::cout << "s UNSATISFIABLE\n";
    return;
  }
  std::cout << "s SATISFIABLE\nv";
  for (Var x = 1; x <= v.model.num_vars(); ++x)
    std::cout << ' ' << (v.model[x] == Value::False ? -static_cast<long>(x) : static_cast<long>(x));
  std::cout << " 0\n";
}

void print_stats(const char* label, const SolveStats& s) {
  std::cout << "c " << label << ' ' << s.deterministic_fields() << " wall_time=" << s.wall_time << '\n';
}

void append_csv(const std::string& path, const std::vector<BenchRecord>& rows) {
  bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) out << to_csv_row(r) << '\n';
}

std::string instance_name(const fs::path& p) { return p.filename().string(); }

struct SolveOptions {
  std::string file;
  std::string mode = "coproc";
  CoprocConfig config;
  std::string stats_csv;
  bool trace = false;
};

int cmd_solve(const SolveOptions& opt) {
  Formula f = read_formula(opt.file);
  for (const auto& note : f.notes) std::cout << "c warning: " << note << '\n';
  std::cout << "c " << f.num_vars << " variables, " << f.num_clauses() << " clauses\n";

  const bool want_coproc = opt.mode != "reference";
  const bool want_reference = opt.mode != "coproc";

  // A stats row needs both paths, so --stats always runs the full harness.
  if (!opt.stats_csv.empty() || opt.mode == "both") {
    BenchRun run = run_instance(instance_name(opt.file), f, opt.config);
    if (want_coproc) print_stats("coproc", run.coproc.stats);
    if (want_reference) print_stats("reference", run.reference.stats);
    if (opt.trace) std::cout << emit_breakdown(run.record, run.breakdown);
    if (!opt.stats_csv.empty()) append_csv(opt.stats_csv, {run.record});
    print_verdict(want_coproc ? run.coproc : run.reference);
    return run.coproc.sat() ? kExitSat : kExitUnsat;
  }

  Verdict v;
  if (want_coproc) {
    HostSolver host(f, opt.config, std::nullopt, opt.trace);
    std::cout << "c " << host.plan().size() << " partitions\n";
    v = host.solve();
    print_stats("coproc", v.stats);
    if (opt.trace) {
      BenchRecord r;
      r.instance = instance_name(opt.file);
      r.partitions = host.plan().size();
      r.swaps = v.stats.partition_swaps;
      std::cout << emit_breakdown(
          r, compute_breakdown(host.trace(), host.coprocessor().cycles(), opt.config.clock_hz));
    }
  } else {
    v = solve_reference(f);
    print_stats("reference", v.stats);
    if (opt.trace) std::cout << "c no trace collected for the reference path\n";
  }
  print_verdict(v);
  return v.sat() ? kExitSat : kExitUnsat;
}

int cmd_partition(const std::string& file, std::size_t max_clauses, std::size_t max_vars) {
  Formula f = read_formula(file);
  PartitionPlan plan = partition(f, {max_clauses, max_vars});
  dump_plan(std::cout, plan);
  std::cout << "c partitions=" << plan.size() << " max_vars_per_partition=" << plan.max_partition_vars()
            << " shared_vars=" << plan.shared_var_count() << '\n';
  return 0;
}

struct BenchOptions {
  std::vector<std::string> paths;
  bool gen_random = false;
  std::size_t vars = 63;
  std::size_t clauses = 224;
  std::size_t k = 3;
  std::uint64_t seed = 1;
  std::vector<std::size_t> sweep_clauses;
  std::vector<std::size_t> sweep_vars;
  std::string csv;
  CoprocConfig config;
  unsigned jobs = 1;
  bool trace = false;
};

struct BenchJob {
  std::string name;
  Formula formula;
};

std::vector<BenchJob> collect_jobs(const BenchOptions& opt) {
  std::vector<BenchJob> jobs;
  if (opt.gen_random) {
    auto clause_axis = opt.sweep_clauses.empty() ? std::vector<std::size_t>{opt.clauses} : opt.sweep_clauses;
    auto var_axis = opt.sweep_vars.empty() ? std::vector<std::size_t>{opt.vars} : opt.sweep_vars;
    for (std::size_t m : clause_axis)
      for (std::size_t n : var_axis) {
        std::ostringstream name;
        name << "rand" << opt.k << "sat-v" << n << "-c" << m << "-s" << opt.seed;
        jobs.push_back({name.str(), random_ksat(n, m, opt.k, opt.seed)});
      }
  }
  std::vector<fs::path> files;
  for (const auto& p : opt.paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> entries;
      for (const auto& e : fs::directory_iterator(p, ec))
        if (e.is_regular_file()) entries.push_back(e.path());
      std::sort(entries.begin(), entries.end());
      files.insert(files.end(), entries.begin(), entries.end());
    } else {
      files.emplace_back(p);
    }
  }
  for (const auto& file : files) {
    try {
      jobs.push_back({instance_name(file), read_formula(file.string())});
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << file.string() << ": " << e.what() << '\n';
    }
  }
  return jobs;
}

int cmd_bench(const BenchOptions& opt) {
  std::vector<BenchJob> jobs = collect_jobs(opt);
  if (jobs.empty()) {
    std::cerr << "error: no instances to benchmark\n";
    return kExitError;
  }
  std::vector<std::optional<BenchRun>> runs(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        runs[i] = run_instance(jobs[i].name, jobs[i].formula, opt.config);
        std::lock_guard lock(log_mutex);
        std::cout << "c " << jobs[i].name << ' ' << runs[i]->record.verdict << " swaps="
                  << runs[i]->record.swaps << " implications=" << runs[i]->record.implications << '\n';
        if (opt.trace) std::cout << emit_breakdown(runs[i]->record, runs[i]->breakdown);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, opt.jobs); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::vector<BenchRecord> rows;
  int rc = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (runs[i]) rows.push_back(runs[i]->record);
    if (!failures[i].empty()) {
      std::cerr << "error: " << jobs[i].name << ": " << failures[i] << '\n';
      rc = kExitError;
    }
  }
  std::ofstream out(opt.csv, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + opt.csv);
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) out << to_csv_row(r) << '\n';
  return rc;
}

void add_coproc_options(CLI::App* app, CoprocConfig& config, const std::string& vars_flag) {
  app->add_option("--cps", config.num_cps, "clause processors (partition clause threshold)")
      ->check(CLI::PositiveNumber);
  app->add_option(vars_flag, config.max_local_vars, "local variable capacity (partition variable threshold)")
      ->check(CLI::Range(1, 127));
  app->add_option("--cycles-per-iter", config.cycles_per_bcp_iteration, "cycles per BCP iteration")
      ->check(CLI::PositiveNumber);
  app->add_option("--host-txn-cycles", config.host_transaction_cycles, "cycles per register transaction")
      ->check(CLI::PositiveNumber);
  app->add_option("--load-word-cycles", config.cycles_per_load_word, "cycles per loaded literal word")
      ->check(CLI::PositiveNumber);
  app->add_option("--clock-hz", config.clock_hz, "modeled clock frequency")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"DPLL SAT solving with a simulated BCP coprocessor"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  auto* solve_cmd = app.add_subcommand("solve", "solve a DIMACS CNF file");
  solve_cmd->add_option("file", solve_opt.file, "DIMACS CNF file")->required();
  solve_cmd->add_option("--mode", solve_opt.mode, "BCP path")
      ->check(CLI::IsMember({"coproc", "reference", "both"}));
  add_coproc_options(solve_cmd, solve_opt.config, "--vars");
  solve_cmd->add_option("--stats", solve_opt.stats_csv, "append a benchmark record to this CSV");
  solve_cmd->add_flag("--trace", solve_opt.trace, "print the execution-time breakdown");

  std::string part_file;
  std::size_t part_c = 224, part_v = 63;
  auto* part_cmd = app.add_subcommand("partition", "print the greedy partition plan");
  part_cmd->add_option("file", part_file, "DIMACS CNF file")->required();
  part_cmd->add_option("-C", part_c, "clauses per partition")->required()->check(CLI::PositiveNumber);
  part_cmd->add_option("-V", part_v, "distinct variables per partition")->required()->check(CLI::PositiveNumber);

  BenchOptions bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "benchmark both BCP paths and write CSV");
  bench_cmd->add_option("paths", bench_opt.paths, "DIMACS files or directories");
  bench_cmd->add_flag("--gen-random", bench_opt.gen_random, "generate uniform random k-SAT instances");
  bench_cmd->add_option("--vars", bench_opt.vars, "generated variable count")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--clauses", bench_opt.clauses, "generated clause count");
  bench_cmd->add_option("--k", bench_opt.k, "literals per generated clause")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_opt.seed, "generator seed");
  bench_cmd->add_option("--sweep-clauses", bench_opt.sweep_clauses, "clause counts to sweep")->delimiter(',');
  bench_cmd->add_option("--sweep-vars", bench_opt.sweep_vars, "variable counts to sweep")->delimiter(',');
  bench_cmd->add_option("--csv", bench_opt.csv, "output CSV")->required();
  bench_cmd->add_option("--jobs", bench_opt.jobs, "instances solved concurrently");
  bench_cmd->add_flag("--trace", bench_opt.trace, "print per-instance breakdowns");
  add_coproc_options(bench_cmd, bench_opt.config, "--vars-per-partition");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return cmd_solve(solve_opt);
    if (*part_cmd) return cmd_partition(part_file, part_c, part_v);
    if (*bench_cmd) return cmd_bench(bench_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
