#include "cip/study.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cip/error.hpp"
#include "cip/interpreter.hpp"
#include "cip/json_value.hpp"
#include "cip/text.hpp"

namespace cip {

int BudgetRule::sample(int steps, std::uint64_t seed) const {
  Rng rng(derive_seed(seed, {purpose::kBudget}));
  const auto u = rng.uniform(min_factor, max_factor);
  return static_cast<int>(std::min<std::int64_t>(steps * u, cap));
}

SynthesisLimits StudyConfig::default_study_limits() {
  SynthesisLimits limits;
  limits.time_budget_ms = 0;
  limits.max_candidates = 1'000'000;
  return limits;
}

namespace {

void check_config(const StudyConfig& config) {
  auto invalid = [](const std::string& what) { return Error(ErrorCode::kConfigInvalid, what); };
  if (config.max_steps < 1 || config.max_steps > kMaxChunks) {
    throw invalid("max_steps must be in [1, " + std::to_string(kMaxChunks) + "]");
  }
  if (config.programs_per_step < 0) throw invalid("programs_per_step must be >= 0");
  if (config.workers < 1) throw invalid("workers must be >= 1");
  if (config.max_attempts < 1) throw invalid("max_attempts must be >= 1");
  const BudgetRule& rule = config.budget_rule;
  if (rule.min_factor < 1 || rule.max_factor < rule.min_factor || rule.cap < 1) {
    throw invalid("budget rule needs 1 <= min_factor <= max_factor and cap >= 1");
  }
}

}  // namespace

bool validate_record(const StudyRecord& record, const RecordArtifacts& artifacts) {
  const auto& steps = artifacts.regenerated.steps;
  if (record.steps < 1 || static_cast<std::size_t>(record.steps) != steps.size()) return false;
  if (artifacts.cases.size() != steps.size()) return false;
  if (!(compose_chain(steps) == artifacts.regenerated.program)) return false;
  int total = 0;
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const auto& cases = artifacts.cases[j].cases;
    if (cases.empty() || cases.size() > static_cast<std::size_t>(kMaxCasesPerStep)) return false;
    total += static_cast<int>(cases.size());
    for (const Case& c : cases) {
      const Outcome out = evaluate(steps[j], c.input);
      if (!out.ok() || !(out.value() == c.output)) return false;
    }
  }
  return record.total_cases == total && record.size_bytes == size_bytes(artifacts.regenerated.program);
}

std::pair<StudyRecord, RecordArtifacts> produce_record(const StudyConfig& config, int steps, int slot,
                                                       AttemptCounts& restarts) {
  const InstructionTable& table = InstructionTable::builtins();
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    const std::uint64_t seed = derive_seed(
        config.master_seed, {purpose::kStudy, static_cast<std::uint64_t>(steps), static_cast<std::uint64_t>(slot),
                             static_cast<std::uint64_t>(attempt)});
    const int budget = config.budget_rule.sample(steps, seed);

    RecordArtifacts art;
    art.original = generate_random_program(budget, seed, table, config.pool, config.generator);
    art.report = check_workability(art.original, seed, 8, config.exec_budget, config.pool);
    if (!art.report.works) {
      ++restarts.not_working;
      continue;
    }
    if (max_chunks(art.original) < steps) {
      ++restarts.not_enough_cuts;
      continue;
    }
    art.chunks = split_into_chunks(art.original, steps, seed);
    try {
      art.cases = make_step_cases(art.chunks, art.report, seed, config.max_draws, config.exec_budget, config.pool);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAbandonProgram) throw;
      ++restarts.abandoned;
      continue;
    }
    try {
      art.regenerated = regenerate(art.cases, table, config.limits);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSynthesisFailure) throw;
      ++restarts.synthesis_failures;
      continue;
    }

    StudyRecord record;
    record.program_id = (steps - 1) * config.programs_per_step + slot + 1;
    record.steps = steps;
    for (const StepCases& sc : art.cases) record.total_cases += static_cast<int>(sc.cases.size());
    record.size_bytes = size_bytes(art.regenerated.program);
    record.budget = budget;
    record.seed = seed;
    if (!validate_record(record, art)) {
      throw Error(ErrorCode::kSynthesisFailure, "record " + std::to_string(record.program_id) + " failed validation");
    }
    return {record, std::move(art)};
  }
  throw Error(ErrorCode::kAttemptsExhausted, "no record for steps=" + std::to_string(steps) +
                                                 " slot=" + std::to_string(slot) + " after " +
                                                 std::to_string(config.max_attempts) + " attempts");
}

StudyResult run_study(const StudyConfig& config, const ProgressFn& progress) {
  check_config(config);
  const int total = config.max_steps * config.programs_per_step;
  const auto n = static_cast<std::size_t>(total);

  std::vector<StudyRecord> records(n);
  std::vector<RecordArtifacts> artifacts(config.keep_artifacts ? n : 0);
  std::vector<AttemptCounts> restarts(n);

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto work = [&] {
    for (int i = next++; i < total; i = next++) {
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        const int steps = i / config.programs_per_step + 1;
        const int slot = i % config.programs_per_step;
        auto [record, art] = produce_record(config, steps, slot, restarts[static_cast<std::size_t>(i)]);
        records[static_cast<std::size_t>(i)] = record;
        if (config.keep_artifacts) artifacts[static_cast<std::size_t>(i)] = std::move(art);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      const int d = ++done;
      if (progress) {
        std::lock_guard lock(mu);
        progress(d, total);
      }
    }
  };

  const int workers = std::min(config.workers, std::max(total, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  StudyResult result;
  result.records = std::move(records);
  result.artifacts = std::move(artifacts);
  for (const AttemptCounts& r : restarts) {
    result.restarts.not_enough_cuts += r.not_enough_cuts;
    result.restarts.not_working += r.not_working;
    result.restarts.abandoned += r.abandoned;
    result.restarts.synthesis_failures += r.synthesis_failures;
  }
  return result;
}

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& p) {
  std::filesystem::path tmp = p;
  tmp += ".partial";
  return tmp;
}

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kOutputUnwritable, "cannot write " + p.string());
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& tmp, const std::filesystem::path& dest) {
  out.close();
  std::error_code ec;
  if (!out || (std::filesystem::rename(tmp, dest, ec), ec)) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kOutputUnwritable, "cannot write " + dest.string());
  }
}

}  // namespace

StudyResult run_study(const StudyConfig& config, const std::filesystem::path& csv_path,
                      const std::optional<std::filesystem::path>& audit_dir, const ProgressFn& progress) {
  check_config(config);
  const auto csv_tmp = temp_sibling(csv_path);
  std::ofstream csv = open_output(csv_tmp);
  std::filesystem::path audit_path, audit_tmp;
  std::ofstream audit;
  std::error_code ec;
  if (audit_dir) {
    std::filesystem::create_directories(*audit_dir, ec);
    audit_path = *audit_dir / "audit.jsonl";
    audit_tmp = temp_sibling(audit_path);
    try {
      audit = open_output(audit_tmp);
    } catch (...) {
      csv.close();
      std::filesystem::remove(csv_tmp, ec);
      throw;
    }
  }

  StudyConfig cfg = config;
  cfg.keep_artifacts = cfg.keep_artifacts || audit_dir.has_value();
  StudyResult result;
  try {
    result = run_study(cfg, progress);
    csv << records_to_csv(result.records);
    finish_output(csv, csv_tmp, csv_path);
    if (audit_dir) {
      for (std::size_t i = 0; i < result.records.size(); ++i) {
        audit << audit_line(result.records[i], result.artifacts[i]) << '\n';
      }
      finish_output(audit, audit_tmp, audit_path);
    }
  } catch (...) {
    csv.close();
    audit.close();
    std::filesystem::remove(csv_tmp, ec);
    if (audit_dir) std::filesystem::remove(audit_tmp, ec);
    throw;
  }
  return result;
}

std::string records_to_csv(const std::vector<StudyRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const StudyRecord& r : records) {
    out += std::to_string(r.program_id) + ',' + std::to_string(r.steps) + ',' + std::to_string(r.total_cases) + ',' +
           std::to_string(r.size_bytes) + ',' + std::to_string(r.budget) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

namespace {

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kMalformedInput,
                "line " + std::to_string(line) + ": bad field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<StudyRecord> records_from_csv(std::string_view text) {
  std::vector<StudyRecord> records;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != kCsvHeader) throw Error(ErrorCode::kMalformedInput, "unexpected CSV header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) {
      throw Error(ErrorCode::kMalformedInput, "line " + std::to_string(line_no) + ": expected 6 fields");
    }
    StudyRecord r;
    r.program_id = parse_field<int>(fields[0], line_no);
    r.steps = parse_field<int>(fields[1], line_no);
    r.total_cases = parse_field<int>(fields[2], line_no);
    r.size_bytes = parse_field<std::size_t>(fields[3], line_no);
    r.budget = parse_field<int>(fields[4], line_no);
    r.seed = parse_field<std::uint64_t>(fields[5], line_no);
    records.push_back(r);
  }
  if (header) throw Error(ErrorCode::kMalformedInput, "missing CSV header");
  return records;
}

std::string audit_line(const StudyRecord& record, const RecordArtifacts& artifacts) {
  nlohmann::json j;
  j["program_id"] = record.program_id;
  j["seed"] = record.seed;
  j["budget"] = record.budget;
  j["original"] = serialize(artifacts.original);
  if (artifacts.report.profile) j["profile"] = profile_name(*artifacts.report.profile);
  j["chunks"] = nlohmann::json::array();
  for (const Chunk& c : artifacts.chunks) j["chunks"].push_back(serialize(c.code));
  j["cases"] = nlohmann::json::array();
  for (const StepCases& sc : artifacts.cases) {
    nlohmann::json step = nlohmann::json::array();
    for (const Case& c : sc.cases) step.push_back({{"input", value_to_json(c.input)}, {"output", value_to_json(c.output)}});
    j["cases"].push_back(std::move(step));
  }
  j["steps"] = nlohmann::json::array();
  for (const Program& p : artifacts.regenerated.steps) j["steps"].push_back(serialize(p));
  j["regenerated"] = serialize(artifacts.regenerated.program);
  return j.dump();
}

}  // namespace cip
