#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cip/decomposer.hpp"
#include "cip/generator.hpp"
#include "cip/synthesizer.hpp"

namespace cip {

/// budget = k * u, u ~ Uniform{min_factor..max_factor}, capped.
struct BudgetRule {
  int min_factor = 2;
  int max_factor = 6;
  int cap = 96;

  int sample(int steps, std::uint64_t seed) const;
};

struct StudyConfig {
  int max_steps = 32;
  int programs_per_step = 3000;
  std::uint64_t master_seed = 0;
  BudgetRule budget_rule;
  SynthesisLimits limits = default_study_limits();
  GeneratorOptions generator{.mode = GenerationMode::kThreaded};
  RandomPool pool;
  // Probe and fuzz execution budget.
  ExecBudget exec_budget;
  int max_draws = 64;
  int workers = 1;
  // Keep programs and cases of every record in the result.
  bool keep_artifacts = false;
  // Attempts per record before the study gives up with AttemptsExhausted.
  int max_attempts = 1'000'000;

  static SynthesisLimits default_study_limits();
};

/// One regenerated program: steps is the chain length (derived values plus
/// the output), total_cases the summed case count, size_bytes the size of
/// the regenerated program's canonical text.
struct StudyRecord {
  int program_id = 0;
  int steps = 0;
  int total_cases = 0;
  std::size_t size_bytes = 0;
  int budget = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const StudyRecord&, const StudyRecord&) = default;
};

struct RecordArtifacts {
  Program original{input_node()};
  WorkabilityReport report;
  std::vector<Chunk> chunks;
  std::vector<StepCases> cases;
  Regeneration regenerated{Program(input_node()), {}};
};

/// Why attempts were restarted.
struct AttemptCounts {
  std::uint64_t not_enough_cuts = 0;
  std::uint64_t not_working = 0;
  std::uint64_t abandoned = 0;
  std::uint64_t synthesis_failures = 0;

  std::uint64_t total() const { return not_enough_cuts + not_working + abandoned + synthesis_failures; }
};

struct StudyResult {
  std::vector<StudyRecord> records;
  std::vector<RecordArtifacts> artifacts;
  AttemptCounts restarts;
};

inline constexpr std::string_view kCsvHeader = "program_id,steps,total_cases,size_bytes,budget,seed";

/// True iff the regenerated program is the composition of its step
/// solutions, every step solution reproduces every case of its step, and
/// the record's counts and size match the artifacts.
bool validate_record(const StudyRecord& record, const RecordArtifacts& artifacts);

/// Builds the record for slot (steps, slot) of the study: generate, check,
/// split, fuzz and regenerate, restarting with the next derived seed on any
/// failure. Deterministic in (config, steps, slot).
std::pair<StudyRecord, RecordArtifacts> produce_record(const StudyConfig& config, int steps, int slot,
                                                       AttemptCounts& restarts);

using ProgressFn = std::function<void(int done, int total)>;

/// Runs the whole pipeline in memory. Records come back in program_id order,
/// (k-1) * programs_per_step + slot + 1. Throws ConfigInvalid.
StudyResult run_study(const StudyConfig& config, const ProgressFn& progress = {});

/// Runs the study and writes the results CSV (and optionally an audit JSONL
/// with every record's programs and cases). Throws ConfigInvalid or
/// OutputUnwritable; no file is left behind on failure.
StudyResult run_study(const StudyConfig& config, const std::filesystem::path& csv_path,
                      const std::optional<std::filesystem::path>& audit_dir = std::nullopt,
                      const ProgressFn& progress = {});

std::string records_to_csv(const std::vector<StudyRecord>& records);

/// Parses a results CSV; the header must match exactly. Throws MalformedInput.
std::vector<StudyRecord> records_from_csv(std::string_view text);

std::string audit_line(const StudyRecord& record, const RecordArtifacts& artifacts);

}  // namespace cip
