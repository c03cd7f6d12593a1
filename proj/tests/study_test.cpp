#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cip/error.hpp"
#include "cip/stats.hpp"
#include "cip/study.hpp"
#include "cip/text.hpp"

namespace cip {
namespace {

namespace fs = std::filesystem;

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

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

StudyConfig small(int max_steps, int per_step, std::uint64_t seed) {
  StudyConfig c;
  c.max_steps = max_steps;
  c.programs_per_step = per_step;
  c.master_seed = seed;
  c.keep_artifacts = true;
  return c;
}

class StudyFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cip_study_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(BudgetRule, StaysWithinFactorsAndCap) {
  const BudgetRule rule;
  for (int k = 1; k <= 32; ++k) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const int b = rule.sample(k, s);
      EXPECT_EQ(b, rule.sample(k, s));
      EXPECT_LE(b, 96);
      EXPECT_GE(b, std::min(2 * k, 96));
      EXPECT_LE(b, 6 * k);
    }
  }
}

TEST(Study, SmallRunProducesValidRecordsInOrder) {
  const StudyResult r = run_study(small(2, 2, 7));
  ASSERT_EQ(r.records.size(), 4u);
  ASSERT_EQ(r.artifacts.size(), 4u);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const StudyRecord& rec = r.records[i];
    EXPECT_EQ(rec.program_id, static_cast<int>(i) + 1);
    EXPECT_EQ(rec.steps, static_cast<int>(i / 2) + 1);
    EXPECT_GE(rec.total_cases, rec.steps);
    EXPECT_LE(rec.total_cases, 8 * rec.steps);
    EXPECT_GE(rec.size_bytes, 1u);
    EXPECT_TRUE(validate_record(rec, r.artifacts[i]));
    EXPECT_EQ(recompose(r.artifacts[i].chunks), r.artifacts[i].original);
  }
}

TEST(Study, ValidateRejectsTampering) {
  const StudyResult r = run_study(small(2, 1, 3));
  const StudyRecord& rec = r.records[1];
  const RecordArtifacts& art = r.artifacts[1];
  ASSERT_TRUE(validate_record(rec, art));

  StudyRecord bad_size = rec;
  bad_size.size_bytes += 1;
  EXPECT_FALSE(validate_record(bad_size, art));

  StudyRecord bad_cases = rec;
  bad_cases.total_cases += 1;
  EXPECT_FALSE(validate_record(bad_cases, art));

  RecordArtifacts perturbed = art;
  Case& c = perturbed.cases.back().cases.front();
  c.output = c.output.is_int() ? Value::integer(c.output.as_int() + 1) : Value::list({c.output});
  EXPECT_FALSE(validate_record(rec, perturbed));
}

TEST(Study, DeterministicAcrossWorkerCounts) {
  StudyConfig one = small(3, 2, 11);
  StudyConfig many = one;
  many.workers = 3;
  EXPECT_EQ(records_to_csv(run_study(one).records), records_to_csv(run_study(many).records));
}

TEST(Study, RejectsBadConfig) {
  EXPECT_EQ(code_of([] { run_study(small(0, 1, 1)); }), ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { run_study(small(33, 1, 1)); }), ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { run_study(small(1, -1, 1)); }), ErrorCode::kConfigInvalid);
  StudyConfig c = small(1, 1, 1);
  c.workers = 0;
  EXPECT_EQ(code_of([&] { run_study(c); }), ErrorCode::kConfigInvalid);
}

TEST_F(StudyFiles, ZeroQuotaWritesHeaderOnly) {
  run_study(small(3, 0, 1), dir_ / "r.csv");
  EXPECT_EQ(slurp(dir_ / "r.csv"), std::string(kCsvHeader) + "\n");
}

TEST_F(StudyFiles, CsvIsByteIdenticalAcrossRuns) {
  run_study(small(2, 2, 7), dir_ / "a.csv");
  run_study(small(2, 2, 7), dir_ / "b.csv", dir_ / "audit");
  const std::string a = slurp(dir_ / "a.csv");
  EXPECT_EQ(a, slurp(dir_ / "b.csv"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 5);
  EXPECT_EQ(a.find('\r'), std::string::npos);
  EXPECT_EQ(a.substr(0, kCsvHeader.size() + 1), std::string(kCsvHeader) + "\n");

  std::istringstream audit(slurp(dir_ / "audit" / "audit.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(audit, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["program_id"], ++n);
    EXPECT_EQ(j["chunks"].size(), j["steps"].size());
    EXPECT_EQ(j["cases"].size(), j["steps"].size());
    EXPECT_EQ(parse(j["regenerated"].get<std::string>()).root() != nullptr, true);
  }
  EXPECT_EQ(n, 4);
}

TEST_F(StudyFiles, UnwritableOutputLeavesNoFile) {
  const fs::path target = dir_ / "missing" / "r.csv";
  EXPECT_EQ(code_of([&] { run_study(small(1, 1, 1), target); }), ErrorCode::kOutputUnwritable);
  EXPECT_FALSE(fs::exists(target));
  EXPECT_TRUE(fs::is_empty(dir_));
}

TEST(Csv, RoundTripsAndChecksTheHeader) {
  std::vector<StudyRecord> records(3);
  for (int i = 0; i < 3; ++i) {
    records[i] = {i + 1, i + 1, 2 * i + 3, static_cast<std::size_t>(40 + i), 5 + i, 0xfedcba9876543210ULL + i};
  }
  EXPECT_EQ(records_from_csv(records_to_csv(records)), records);
  EXPECT_EQ(code_of([] { records_from_csv("id,steps\n1,2\n"); }), ErrorCode::kMalformedInput);
  EXPECT_EQ(code_of([] { records_from_csv(""); }), ErrorCode::kMalformedInput);
  EXPECT_EQ(code_of([] { records_from_csv(std::string(kCsvHeader) + "\n1,2,x,4,5,6\n"); }),
            ErrorCode::kMalformedInput);
  EXPECT_EQ(code_of([] { records_from_csv(std::string(kCsvHeader) + "\n1,2,3\n"); }), ErrorCode::kMalformedInput);
}

TEST(Study, RegeneratedProgramsAreTypicallyNoLarger) {
  const StudyResult r = run_study(small(2, 250, 5));
  std::vector<double> original, regenerated;
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    original.push_back(static_cast<double>(size_bytes(r.artifacts[i].original)));
    regenerated.push_back(static_cast<double>(r.records[i].size_bytes));
  }
  ASSERT_EQ(original.size(), 500u);
  EXPECT_LE(median(regenerated), median(original));
}

}  // namespace
}  // namespace cip
