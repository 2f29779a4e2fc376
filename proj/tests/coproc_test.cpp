#include <gtest/gtest.h>

#include <random>

#include "bcpsim/coproc.hpp"
#include "bcpsim/partition.hpp"
#include "bcpsim/reference.hpp"
#include "test_util.hpp"

using namespace bcpsim;
using namespace bcpsim::testing;

namespace {

using Kind = CpResult::Kind;

// Partition 0 of the clause-limited worked example: (-a|b|-c), (a|-b|-c).
std::vector<Clause> example_partition0() { return {lits({-1, 2, -3}), lits({1, -2, -3})}; }

CoprocConfig small_config(std::size_t cps = 8, std::size_t vars = 8) {
  CoprocConfig c;
  c.num_cps = cps;
  c.max_local_vars = vars;
  return c;
}

void write_cmd(Coprocessor& cp, Command cmd, std::uint32_t arg = 0) {
  cp.write_register(reg::kArg0, arg);
  cp.write_register(reg::kCmd, static_cast<std::uint32_t>(cmd));
}

Status read_status(Coprocessor& cp) { return static_cast<Status>(cp.read_register(reg::kStatus)); }

} // namespace

TEST(LiteralWord, Encoding) {
  EXPECT_EQ(encode_load_word(Literal{5}), 0b1010u);
  EXPECT_EQ(encode_load_word(Literal{-5}), 0b1011u);
  EXPECT_EQ(encode_assignment_word(Literal{5}), 0b1011u);  // 5 := true
  EXPECT_EQ(encode_assignment_word(Literal{-5}), 0b1010u); // 5 := false
  EXPECT_EQ(encode_load_word(Literal{127}), 0xFEu);
  EXPECT_FALSE(decode_load_word(0).has_value());
  EXPECT_FALSE(decode_load_word(1).has_value());     // variable 0
  EXPECT_FALSE(decode_load_word(0x100).has_value()); // reserved bits
  for (int v = 1; v <= 127; ++v)
    for (int s : {1, -1}) {
      Literal l{v * s};
      EXPECT_EQ(decode_load_word(encode_load_word(l)), l);
      EXPECT_EQ(decode_assignment_word(encode_assignment_word(l)), l);
    }
}

TEST(CpEvaluate, Examples) {
  ClauseProcessor cp;
  for (Literal l : lits({-1, 2, -3})) cp.append(l);
  cp.observe(Literal{1});
  cp.observe(Literal{3});
  EXPECT_EQ(cp_evaluate(cp), (CpResult{Kind::Unit, Literal{2}}));

  ClauseProcessor cp2;
  for (Literal l : lits({1, -2, -3})) cp2.append(l);
  cp2.observe(Literal{1});
  EXPECT_EQ(cp_evaluate(cp2).kind, Kind::Satisfied);

  ClauseProcessor empty;
  empty.observe(Literal{1});
  EXPECT_EQ(cp_evaluate(empty).kind, Kind::EmptySlot);
}

TEST(CpEvaluate, MirrorsClauseStatusExhaustively) {
  const std::vector<Clause> clauses = {lits({1}), lits({-2, 3}), lits({1, -2, 3}), lits({-1, -2, -3})};
  for (const Clause& c : clauses)
    for (const Assignment& a : all_partial_assignments(3)) {
      ClauseProcessor cp;
      for (Literal l : c) cp.append(l);
      for (Literal l : a.literals()) cp.observe(l);
      ClauseStatus s = clause_status(c, a);
      CpResult r = cp_evaluate(cp);
      switch (s.kind) {
      case ClauseStatus::Kind::Satisfied: EXPECT_EQ(r.kind, Kind::Satisfied); break;
      case ClauseStatus::Kind::Falsified: EXPECT_EQ(r.kind, Kind::Falsified); break;
      case ClauseStatus::Kind::Unit: EXPECT_EQ(r, (CpResult{Kind::Unit, s.unit})); break;
      case ClauseStatus::Kind::Unresolved: EXPECT_EQ(r.kind, Kind::Unresolved); break;
      }
    }
}

TEST(SelectImplication, LowestIndexWins) {
  std::vector<CpResult> r = {{Kind::Satisfied, {}}, {Kind::Unit, Literal{2}}, {Kind::Unit, Literal{-3}}};
  EXPECT_EQ(select_implication(r), Literal{2});
  std::vector<CpResult> none = {{Kind::Satisfied, {}}, {Kind::Unresolved, {}}, {Kind::EmptySlot, {}}};
  EXPECT_FALSE(select_implication(none).has_value());
  std::vector<CpResult> one = {{Kind::Unit, Literal{5}}};
  EXPECT_EQ(select_implication(one), Literal{5});
}

TEST(LoadPartition, CyclesCountLiteralWordsAndTerminators) {
  Coprocessor cp;
  EXPECT_EQ(cp.load_partition(example_partition0()), 8u); // (3 + 1) * 2
  EXPECT_EQ(cp.loaded_clauses(), 2u);
  EXPECT_EQ(cp.clause_processors()[0].literals().size(), 3u);
  EXPECT_TRUE(cp.clause_processors()[2].empty());

  CoprocConfig slow;
  slow.cycles_per_load_word = 4;
  Coprocessor cp2(slow);
  EXPECT_EQ(cp2.load_partition(example_partition0()), 32u);
}

TEST(LoadPartition, EmptyPartitionIsVacuous) {
  Coprocessor cp;
  EXPECT_EQ(cp.load_partition({}), 0u);
  BcpOutcome out = cp.decide(Literal{1});
  EXPECT_TRUE(out.implications.empty());
  EXPECT_FALSE(out.conflict);
}

TEST(LoadPartition, CapacityAndRangeErrors) {
  Coprocessor cp;
  std::vector<Clause> too_many(225, lits({1}));
  EXPECT_THROW(cp.load_partition(too_many), CoprocError);
  EXPECT_THROW(cp.load_partition(std::vector<Clause>{lits({64})}), CoprocError);
  EXPECT_THROW(cp.load_partition(std::vector<Clause>{lits({1, -1})}), CoprocError);
  // A rejected load leaves the previous contents alone.
  cp.load_partition(example_partition0());
  EXPECT_THROW(cp.load_partition(too_many), CoprocError);
  EXPECT_EQ(cp.loaded_clauses(), 2u);
}

TEST(LoadPartition, OverwriteReplacesEverySlot) {
  Coprocessor cp(small_config(4, 8));
  cp.load_partition(std::vector<Clause>{lits({1}), lits({2}), lits({3})});
  cp.decide(Literal{4});
  cp.load_partition(std::vector<Clause>{lits({-1, 2})});
  EXPECT_EQ(cp.loaded_clauses(), 1u);
  EXPECT_EQ(cp.local_value(1), Value::Unassigned);
}

TEST(Decide, WorkedExampleSequence) {
  Coprocessor cp;
  cp.load_partition(example_partition0());
  BcpOutcome a = cp.decide(Literal{1});
  EXPECT_TRUE(a.implications.empty());
  EXPECT_FALSE(a.conflict);
  EXPECT_EQ(a.iterations, 1u);
  EXPECT_EQ(a.cycles, 3u);

  BcpOutcome c = cp.decide(Literal{3});
  EXPECT_EQ(c.implications, lits({2}));
  EXPECT_FALSE(c.conflict);
  EXPECT_EQ(c.iterations, 2u);
  EXPECT_EQ(c.cycles, 6u);
  EXPECT_EQ(cp.state(), ControlState::Done);
}

TEST(Decide, ContradictoryUnitsConflict) {
  Coprocessor cp;
  cp.load_partition(std::vector<Clause>{lits({1}), lits({-1})});
  BcpOutcome out = cp.decide(Literal{1});
  EXPECT_TRUE(out.conflict);
  EXPECT_EQ(out.conflict_cp, 1u);
  EXPECT_EQ(out.iterations, 1u);
  EXPECT_EQ(cp.state(), ControlState::Conflict);
}

TEST(Decide, VariableAbsentFromPartitionIsHarmless) {
  Coprocessor cp;
  cp.load_partition(example_partition0());
  BcpOutcome out = cp.decide(Literal{40});
  EXPECT_TRUE(out.implications.empty());
  EXPECT_FALSE(out.conflict);
  EXPECT_THROW(cp.decide(Literal{64}), CoprocError);
}

TEST(Decide, EveryCpEvaluatedEveryIteration) {
  Coprocessor cp;
  cp.load_partition(std::vector<Clause>{lits({-1, 2}), lits({-2, 3}), lits({-3, 4})});
  BcpOutcome out = cp.decide(Literal{1});
  EXPECT_EQ(out.implications, lits({2, 3, 4}));
  EXPECT_EQ(out.iterations, 4u);
  EXPECT_EQ(cp.instrumentation().cp_evaluations, 4u * 224u);
}

TEST(BacktrackClear, ClearsAssignmentsKeepsClauses) {
  Coprocessor cp;
  cp.load_partition(example_partition0());
  cp.decide(Literal{1});
  BcpOutcome first = cp.decide(Literal{3});
  EXPECT_EQ(cp.backtrack_clear(), 1u);
  EXPECT_EQ(cp.state(), ControlState::Idle);
  for (const CpResult& r : cp.evaluate_all())
    EXPECT_TRUE(r.kind == Kind::Unresolved || r.kind == Kind::EmptySlot);
  EXPECT_EQ(cp.loaded_clauses(), 2u);

  cp.decide(Literal{1});
  EXPECT_EQ(cp.decide(Literal{3}), first);
}

TEST(BacktrackClear, OnFreshPartitionChangesNothing) {
  Coprocessor cp;
  cp.load_partition(example_partition0());
  auto before = std::vector<CpResult>(cp.evaluate_all().begin(), cp.evaluate_all().end());
  cp.backtrack_clear();
  auto after = cp.evaluate_all();
  EXPECT_TRUE(std::equal(before.begin(), before.end(), after.begin(), after.end()));
}

TEST(Registers, ResetEmptiesEverything) {
  Coprocessor cp;
  cp.load_partition(example_partition0());
  write_cmd(cp, Command::Reset);
  EXPECT_EQ(read_status(cp), Status::Idle);
  EXPECT_EQ(cp.loaded_clauses(), 0u);
}

TEST(Registers, DecidePollsBusyThenDone) {
  Coprocessor cp;
  write_cmd(cp, Command::LoadBegin, 0);
  for (Literal l : lits({-1, 2, -3})) write_cmd(cp, Command::LoadWord, encode_load_word(l));
  write_cmd(cp, Command::LoadWord, 0);
  for (Literal l : lits({1, -2, -3})) write_cmd(cp, Command::LoadWord, encode_load_word(l));
  write_cmd(cp, Command::LoadWord, 0);
  EXPECT_EQ(read_status(cp), Status::Idle);
  EXPECT_EQ(cp.loaded_clauses(), 2u);

  write_cmd(cp, Command::Decide, encode_assignment_word(Literal{1}));
  EXPECT_EQ(read_status(cp), Status::Busy);
  EXPECT_EQ(read_status(cp), Status::Done);
  EXPECT_EQ(cp.read_register(reg::kImpl), 0u);

  write_cmd(cp, Command::Decide, encode_assignment_word(Literal{3}));
  int busy_polls = 0;
  Status s;
  while ((s = read_status(cp)) == Status::Busy) ++busy_polls;
  EXPECT_EQ(s, Status::Done);
  EXPECT_EQ(busy_polls, 2); // one per iteration
  EXPECT_EQ(cp.read_register(reg::kImpl), encode_assignment_word(Literal{2}));
  EXPECT_EQ(cp.read_register(reg::kImpl), 0u);
}

TEST(Registers, ConflictStatus) {
  Coprocessor cp;
  cp.load_partition(std::vector<Clause>{lits({1}), lits({-1})});
  write_cmd(cp, Command::Decide, encode_assignment_word(Literal{1}));
  while (read_status(cp) == Status::Busy) {
  }
  EXPECT_EQ(read_status(cp), Status::Conflict);
}

TEST(Registers, CommandWhileBusyIsRejectedAndSticky) {
  Coprocessor cp;
  cp.load_partition(example_partition0());
  write_cmd(cp, Command::Decide, encode_assignment_word(Literal{1}));
  write_cmd(cp, Command::Clear);
  EXPECT_TRUE(cp.error());
  EXPECT_EQ(read_status(cp), Status::Error);
  EXPECT_EQ(read_status(cp), Status::Error);
  EXPECT_EQ(cp.instrumentation().rejected_commands, 1u);
  write_cmd(cp, Command::Reset);
  EXPECT_EQ(read_status(cp), Status::Idle);
}

TEST(Registers, MalformedCommandsSetError) {
  Coprocessor cp;
  write_cmd(cp, Command::Decide, 0);
  EXPECT_EQ(read_status(cp), Status::Error);
  write_cmd(cp, Command::Reset);
  write_cmd(cp, Command::LoadWord, encode_load_word(Literal{1})); // no LOAD_BEGIN
  EXPECT_TRUE(cp.error());
  write_cmd(cp, Command::Reset);
  cp.write_register(reg::kCmd, 99);
  EXPECT_TRUE(cp.error());
  write_cmd(cp, Command::Reset);
  write_cmd(cp, Command::LoadBegin, 224);
  EXPECT_TRUE(cp.error());
}

TEST(Registers, UnknownAddress) {
  Coprocessor cp;
  EXPECT_THROW(cp.write_register(0x18, 0), CoprocError);
  EXPECT_THROW(cp.read_register(0x18), CoprocError);
  EXPECT_THROW(cp.write_register(reg::kStatus, 0), CoprocError);
  EXPECT_THROW(cp.read_register(reg::kCmd), CoprocError);
}

TEST(Registers, TransactionsAreCharged) {
  Coprocessor cp;
  cp.read_register(reg::kStatus);
  cp.write_register(reg::kArg0, 0);
  EXPECT_EQ(cp.cycles().transaction, 20u);
  std::uint64_t lo = cp.read_register(reg::kCyclesLo);
  std::uint64_t hi = cp.read_register(reg::kCyclesHi);
  EXPECT_EQ(lo, 30u);
  EXPECT_EQ(hi, 0u);
}

TEST(Registers, PartialReloadFromIndex) {
  Coprocessor cp(small_config(4, 8));
  cp.load_partition(std::vector<Clause>{lits({1}), lits({2}), lits({3})});
  write_cmd(cp, Command::LoadBegin, 1);
  write_cmd(cp, Command::LoadWord, encode_load_word(Literal{-4}));
  write_cmd(cp, Command::LoadWord, 0);
  EXPECT_EQ(cp.loaded_clauses(), 2u);
  EXPECT_EQ(cp.clause_processors()[0].literals()[0], Literal{1});
  EXPECT_EQ(cp.clause_processors()[1].literals()[0], Literal{-4});
}

// Opposing units in one iteration are not arbitrated: the selector takes the
// lower CP and the other clause is found falsified on the next evaluation.
TEST(Decide, OpposingUnitsConflictOnNextEvaluation) {
  Coprocessor cp;
  cp.load_partition(std::vector<Clause>{lits({1, 2}), lits({-1, 3}), lits({-3}), lits({-2})});
  cp.begin_decide(Literal{1});
  ASSERT_TRUE(cp.step());
  auto r = cp.last_results();
  EXPECT_EQ(r[1], (CpResult{Kind::Unit, Literal{3}}));
  EXPECT_EQ(r[2], (CpResult{Kind::Unit, Literal{-3}}));
  EXPECT_FALSE(cp.step());
  EXPECT_TRUE(cp.current_run().conflict);
  EXPECT_EQ(cp.current_run().conflict_cp, 2u);
  EXPECT_EQ(cp.current_run().iterations, 2u);
  EXPECT_EQ(cp.current_run().implications, lits({3}));
}

// Random partitions checked against the independent closure oracle.
TEST(DecideProperty, ClosureMatchesOracleAndCyclesAreStructural) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t vars = 2 + rng() % 20;
    const std::size_t m = rng() % 40;
    std::vector<Clause> clauses;
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t k = 1 + rng() % std::min<std::size_t>(vars, 4);
      Clause c;
      while (c.size() < k) {
        Var v = static_cast<Var>(1 + rng() % vars);
        if (std::none_of(c.begin(), c.end(), [&](Literal l) { return l.var() == v; }))
          c.emplace_back(v, rng() % 2 == 1);
      }
      clauses.push_back(c);
    }
    std::vector<int> start(vars + 1, 0);
    Coprocessor cp(small_config(std::max<std::size_t>(m, 1), vars));
    cp.load_partition(clauses);
    for (Var v = 1; v <= vars; ++v)
      if (rng() % 4 == 0) {
        start[v] = rng() % 2 ? 1 : -1;
        cp.broadcast(Literal{v, start[v] < 0});
      }
    std::vector<Var> free_vars;
    for (Var v = 1; v <= vars; ++v)
      if (start[v] == 0) free_vars.push_back(v);
    if (free_vars.empty()) continue;
    Literal d{free_vars[rng() % free_vars.size()], rng() % 2 == 1};

    Closure expected = closure_oracle(clauses, start, d.dimacs());
    BcpOutcome out = cp.decide(d);
    ASSERT_EQ(out.conflict, expected.conflict) << "trial " << trial;
    if (!out.conflict) {
      EXPECT_EQ(as_set(out.implications), expected.implied) << "trial " << trial;
    }
    EXPECT_EQ(out.cycles, out.iterations * 3);
    EXPECT_EQ(out.iterations, out.implications.size() + 1);
    for (Var v = 1; v <= vars; ++v) EXPECT_TRUE(cp.local_value(v).has_value());
  }
}
