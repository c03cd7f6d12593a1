#include <gtest/gtest.h>

#include <unordered_set>

#include "cip/decomposer.hpp"
#include "cip/error.hpp"
#include "cip/interpreter.hpp"
#include "test_support.hpp"

namespace cip {
namespace {

using namespace cip::testing;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kMalformedInput;
}

// Working programs from both generator shapes, with their seeds.
std::vector<std::pair<WorkingProgram, std::uint64_t>> working_programs(int n) {
  std::vector<std::pair<WorkingProgram, std::uint64_t>> out;
  const RandomPool pool;
  for (int i = 0; i < n; ++i) {
    const auto seed = static_cast<std::uint64_t>(i);
    GeneratorOptions opts;
    if (i % 2) opts.mode = GenerationMode::kThreaded;
    const int budget = 2 + i % 60;
    out.emplace_back(generate_working_program(budget, seed, InstructionTable::builtins(), pool, 100'000, opts), seed);
  }
  return out;
}

TEST(EligibleCuts, Examples) {
  const Program p = P("add(mul(x,2),1)");
  const auto cuts = eligible_cuts(p);
  ASSERT_EQ(cuts.size(), 1u);
  EXPECT_EQ(Program(cuts[0].node), P("mul(x,2)"));
  EXPECT_TRUE(eligible_cuts(P("add(x,1)")).empty());
  EXPECT_TRUE(eligible_cuts(P("x")).empty());
  EXPECT_EQ(code_of([] { eligible_cuts(P("add(1,2)")); }), ErrorCode::kNoInput);
}

TEST(EligibleCuts, FollowsTheLargestChildAndHoldsEveryInput) {
  // The spine continues into mul, the larger argument of add, but mul
  // holds only one of the two x.
  const Program p = P("neg(add(mul(x,3),abs(x)))");
  const auto cuts = eligible_cuts(p);
  ASSERT_EQ(cuts.size(), 1u);
  EXPECT_EQ(Program(cuts[0].node), P("add(mul(x,3),abs(x))"));
  // Deepest first.
  const auto deep = eligible_cuts(P("neg(abs(neg(abs(x))))"));
  ASSERT_EQ(deep.size(), 3u);
  EXPECT_EQ(Program(deep[0].node), P("abs(x)"));
  EXPECT_EQ(Program(deep[2].node), P("abs(neg(abs(x)))"));
  EXPECT_EQ(max_chunks(P("neg(abs(neg(abs(x))))")), 4);
}

TEST(Split, Examples) {
  const Program p = P("add(mul(x,2),1)");
  const auto two = split_into_chunks(p, 2, 0);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].code, P("mul(x,2)"));
  EXPECT_EQ(two[1].code, P("add(x,1)"));
  EXPECT_EQ(two[0].index, 1);
  EXPECT_EQ(two[1].index, 2);

  const auto one = split_into_chunks(p, 1, 0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].code, p);

  EXPECT_EQ(code_of([] { split_into_chunks(P("add(x,1)"), 2, 0); }), ErrorCode::kNotEnoughCuts);
  EXPECT_EQ(code_of([&] { split_into_chunks(p, 0, 0); }), ErrorCode::kPreconditionViolated);
  EXPECT_EQ(code_of([&] { split_into_chunks(p, 33, 0); }), ErrorCode::kPreconditionViolated);
}

TEST(Split, IsSeededAndUsesDistinctCuts) {
  const Program p = P("neg(abs(neg(abs(neg(abs(neg(x)))))))");
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = split_into_chunks(p, 3, seed);
    const auto b = split_into_chunks(p, 3, seed);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].code, b[i].code);
      // Distinct cuts leave every chunk with at least one instruction.
      EXPECT_GE(count_applies(*a[i].code.root()), 1u);
    }
    differs = differs || !(a[0].code == split_into_chunks(p, 3, 0)[0].code);
  }
  EXPECT_TRUE(differs);
}

TEST(Recompose, Examples) {
  EXPECT_EQ(recompose({{1, P("mul(x,2)")}, {2, P("add(x,1)")}}), P("add(mul(x,2),1)"));
  EXPECT_EQ(recompose({{1, P("upper(x)")}}), P("upper(x)"));
  EXPECT_EQ(code_of([] { recompose({}); }), ErrorCode::kEmptyChain);
}

TEST(Recompose, InvertsSplitForEveryFeasibleK) {
  std::size_t splits = 0;
  for (const auto& [w, seed] : working_programs(1000)) {
    const int top = max_chunks(w.program);
    ASSERT_LE(top, kMaxChunks);
    ASSERT_LE(static_cast<std::size_t>(top), std::max<std::size_t>(1, count_applies(*w.program.root())));
    for (int k = 1; k <= top; ++k) {
      const auto chunks = split_into_chunks(w.program, k, seed);
      ASSERT_EQ(chunks.size(), static_cast<std::size_t>(k));
      ASSERT_EQ(recompose(chunks), w.program) << serialize(w.program) << " k=" << k;
      for (const Chunk& c : chunks) ASSERT_GE(count_inputs(*c.code.root()), 1u);
      ++splits;
    }
    if (top < kMaxChunks) {
      EXPECT_EQ(code_of([&, p = w.program] { split_into_chunks(p, top + 1, seed); }), ErrorCode::kNotEnoughCuts);
    }
  }
  EXPECT_GT(splits, 3000u);
}

TEST(Recompose, ChunksChainToTheOriginalOutput) {
  for (const auto& [w, seed] : working_programs(300)) {
    const int k = max_chunks(w.program);
    const auto chunks = split_into_chunks(w.program, k, seed);
    for (std::size_t i = 0; i < w.report.probe_inputs.size(); ++i) {
      Value v = w.report.probe_inputs[i];
      for (const Chunk& c : chunks) {
        Outcome out = evaluate(c.code, v);
        ASSERT_TRUE(out.ok()) << serialize(c.code);
        v = std::move(out).value();
      }
      EXPECT_EQ(v, w.report.probe_outputs[i]) << serialize(w.program);
    }
  }
}

TEST(StepCases, DoubleChunkExample) {
  WorkabilityReport report;
  report.works = true;
  report.profile = InputProfile::kInt;
  report.probe_inputs = {I(1), I(2), I(5)};
  report.probe_outputs = {I(2), I(4), I(10)};
  const std::vector<Chunk> chunks = {{1, P("mul(x,2)")}};
  // Find a seed that asks for three cases; the observed inputs come first.
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 200 && !seen; ++seed) {
    const auto steps = make_step_cases(chunks, report, seed);
    if (steps[0].cases.size() != 3) continue;
    seen = true;
    EXPECT_EQ(steps[0].cases, (std::vector<Case>{{I(1), I(2)}, {I(2), I(4)}, {I(5), I(10)}}));
  }
  EXPECT_TRUE(seen);
}

TEST(StepCases, AbandonsWhenNoInputWorks) {
  WorkabilityReport report;
  report.works = true;
  report.profile = InputProfile::kListInt;
  report.probe_inputs = {L({}), L({})};
  report.probe_outputs = {};
  RandomPool empty_lists;
  empty_lists.max_list_length = 0;
  const std::vector<Chunk> chunks = {{1, P("head(x)")}};
  EXPECT_EQ(code_of([&] { make_step_cases(chunks, report, 4, 64, {}, empty_lists); }), ErrorCode::kAbandonProgram);
}

TEST(StepCases, CasesAreValidDistinctAndBounded) {
  int abandoned = 0, produced = 0;
  for (const auto& [w, seed] : working_programs(400)) {
    const int k = std::min(4, max_chunks(w.program));
    const auto chunks = split_into_chunks(w.program, k, seed);
    std::vector<StepCases> steps;
    try {
      steps = make_step_cases(chunks, w.report, seed);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::kAbandonProgram);
      ++abandoned;
      continue;
    }
    ++produced;
    ASSERT_EQ(steps.size(), chunks.size());
    for (std::size_t j = 0; j < steps.size(); ++j) {
      const auto& cases = steps[j].cases;
      EXPECT_EQ(steps[j].chunk_index, chunks[j].index);
      ASSERT_GE(cases.size(), 1u);
      ASSERT_LE(cases.size(), 8u);
      std::unordered_set<Value, ValueHash> inputs;
      bool changes = false;
      std::unordered_set<Value, ValueHash> outputs;
      for (const Case& c : cases) {
        EXPECT_TRUE(inputs.insert(c.input).second) << "duplicate input " << literal_text(c.input);
        EXPECT_EQ(evaluate(chunks[j].code, c.input), Outcome(c.output));
        changes = changes || !(c.output == c.input);
        outputs.insert(c.output);
      }
      EXPECT_TRUE(changes) << serialize(chunks[j].code);
      if (cases.size() >= 2) EXPECT_GE(outputs.size(), 2u) << serialize(chunks[j].code);
    }
    // Same seed, same cases.
    const auto again = make_step_cases(chunks, w.report, seed);
    for (std::size_t j = 0; j < steps.size(); ++j) EXPECT_EQ(again[j].cases, steps[j].cases);
  }
  EXPECT_GT(produced, abandoned);
}

}  // namespace
}  // namespace cip
