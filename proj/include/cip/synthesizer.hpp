#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cip/case.hpp"
#include "cip/instructions.hpp"
#include "cip/program.hpp"

namespace cip {

struct SynthesisLimits {
  int max_length = 9;
  std::size_t max_bank_entries = 200'000;
  // Total size of banked output values, counted in value slots, nested
  // list elements included. Entries past either cap are tested but not kept.
  std::size_t max_bank_weight = 8'000'000;
  // Wall-clock safety net; 0 disables it.
  std::int64_t time_budget_ms = 5'000;
  // Per-candidate execution budget. Only the fuel part applies during
  // enumeration, where candidates are evaluated one instruction at a time.
  ExecBudget candidate_budget{.fuel = 10'000, .wall_clock_ms = 50};
  // Deterministic work cap: candidate applications before giving up.
  std::uint64_t max_candidates = 50'000'000;
  // Keep one representative per distinct output vector.
  bool observational_equivalence = true;
};

/// How often a step solution may reference its input.
enum class InputUse {
  kAny,
  // Exactly one InputRef, so substituting the solution into a chain adds
  // its length minus one.
  kExactlyOnce,
};

struct SynthesisStats {
  std::uint64_t candidates = 0;
  std::size_t bank_entries = 0;
  int length_reached = 0;
};

/// Terminal constants for a step, duplicates dropped, in this order:
/// every input and output value in case order, each followed by its
/// elements when it is a list of at most 8 items; then constants every case
/// agrees on: the offset output - input and the ratio output / input for
/// numeric cases (floats compared to 12 significant digits, integral
/// floats also offered as integers), and the longest prefix and suffix
/// shared by all list or string outputs; then 0, 1, 2, -1, true, false, "".
std::vector<Value> constant_pool(std::span<const Case> cases);

/// Most concise program (fewest nodes) over the table and the constant pool
/// that maps every case input to its output exactly. Ties go to the first
/// candidate in enumeration order: by length, then instruction-table order,
/// then argument length composition, then bank order, with the input before
/// constants among terminals.
/// Throws InconsistentCases or SynthesisFailure.
Program synthesize_step(std::span<const Case> cases, const InstructionTable& table = InstructionTable::builtins(),
                        const SynthesisLimits& limits = {}, InputUse input_use = InputUse::kAny,
                        SynthesisStats* stats = nullptr);

/// Back-to-back composition: each program is substituted into the next
/// one's InputRef. Throws EmptyChain.
Program compose_chain(const std::vector<Program>& solutions);

struct SpecCase {
  Value input;
  std::vector<Value> derive;
  Value output;
};

/// A test-case specification with optional derived values and used programs.
struct Spec {
  std::string name;
  std::vector<SpecCase> cases;
  std::vector<std::string> use;

  std::size_t steps() const { return cases.empty() ? 0 : cases.front().derive.size() + 1; }
};

/// Throws MalformedInput.
Spec spec_from_json(const nlohmann::json& doc);
Spec load_spec(const std::filesystem::path& path);

/// name -> program. Programs may use other programs in the same registry.
using Registry = std::map<std::string, Program>;

/// Loads every <name>.zil in `dir`. Throws MalformedInput, SyntaxError,
/// UnknownInstruction or UnknownUse (also for cyclic uses).
Registry load_registry(const std::filesystem::path& dir);

/// Builtins plus every registry program as an "@name" pseudo-instruction,
/// in name order.
InstructionTable registry_table(const Registry& registry);

/// Step j's cases, pairing consecutive values v_{j-1} -> v_j of every spec
/// case. Throws RaggedDerives or InconsistentCases.
std::vector<StepCases> spec_step_cases(const Spec& spec);

/// Compiles a spec: used programs become "@name" pseudo-instructions
/// (appended in `use` order), each step is synthesized, and the chain is
/// composed. Steps after the first use their input exactly once.
/// Throws RaggedDerives, UnknownUse, InconsistentCases or SynthesisFailure.
Program compile_spec(const Spec& spec, const Registry& registry, const SynthesisLimits& limits = {});

struct Regeneration {
  Program program;
  std::vector<Program> steps;
};

/// Synthesizes every step and composes the chain. Each step solution is
/// re-checked with the interpreter before composition. Steps after the
/// first use their input exactly once.
/// Throws EmptyChain, PreconditionViolated or SynthesisFailure (naming the step).
Regeneration regenerate(const std::vector<StepCases>& steps,
                        const InstructionTable& table = InstructionTable::builtins(),
                        const SynthesisLimits& limits = {});

}  // namespace cip
