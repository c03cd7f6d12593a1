#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cip/instructions.hpp"
#include "cip/program.hpp"
#include "cip/rng.hpp"
#include "cip/value.hpp"

namespace cip {

/// Value family a program is probed with. Profiles are tried in
/// declaration order.
enum class InputProfile : std::uint8_t { kInt, kString, kListInt, kFloat, kBool };

inline constexpr std::array<InputProfile, 5> kProfileOrder = {
    InputProfile::kInt, InputProfile::kString, InputProfile::kListInt, InputProfile::kFloat, InputProfile::kBool};

std::string_view profile_name(InputProfile profile);

/// Profile a value belongs to, if any. Empty lists count as list-int.
std::optional<InputProfile> profile_of(const Value& v);

/// Random data values of each type.
struct RandomPool {
  std::int64_t int_min = -100;
  std::int64_t int_max = 100;
  // Floats are drawn on a 0.1 grid so constants stay short in program text.
  double float_min = -100.0;
  double float_max = 100.0;
  std::size_t max_string_length = 8;
  std::size_t max_list_length = 8;

  Value draw(InputProfile profile, Rng& rng) const;

  /// Pure in (seed, profile, index).
  Value draw(InputProfile profile, std::uint64_t seed, std::uint64_t index) const;

  /// A constant of a uniformly chosen type.
  Value constant(Rng& rng) const;
};

enum class GenerationMode {
  // Top-down recursion: pick an instruction, split the remaining budget
  // among its arguments by a uniform random composition, recurse.
  kNested,
  // Grow a single input path from the bottom up. Each level wraps the
  // current expression in a random instruction with small input-free side
  // arguments, and is kept only if it still evaluates on a set of probe
  // inputs. Produces deep chains with one InputRef.
  kThreaded,
};

struct GeneratorOptions {
  GenerationMode mode = GenerationMode::kNested;
  // Probability that a leaf is the input rather than a constant (nested).
  double input_leaf_probability = 0.5;
  // A node with remaining budget b becomes a leaf with probability leaf_bias / b (nested).
  double leaf_bias = 1.0;
  // Probability that a side argument is a single constant (threaded).
  double side_leaf_probability = 0.75;
  // Largest side argument subtree (threaded).
  int max_side_budget = 4;
  // Consecutive rejected levels before growth stops (threaded).
  int max_rejections = 64;
};

/// Random program of Halstead length at most `budget`. Throws InvalidBudget
/// when budget < 1.
Program generate_random_program(int budget, std::uint64_t seed,
                                const InstructionTable& table = InstructionTable::builtins(),
                                const RandomPool& pool = {}, const GeneratorOptions& options = {});

struct WorkabilityReport {
  bool works = false;
  std::optional<InputProfile> profile;
  std::vector<Value> probe_inputs;
  std::vector<Value> probe_outputs;
  std::optional<int> failed_criterion;
};

/// Applies the six working criteria per input profile:
///   1 the program can be executed
///   2 no evaluation raises a fault
///   3 every probe produces a result (null counts as none)
///   4 the results are not all the same
///   5 at least one result differs from its input
///   6 every probe finishes within the execution budget
/// The first profile that passes all six is recorded. When none passes,
/// failed_criterion is the highest criterion number reached across
/// profiles, and the probes shown are from that profile.
WorkabilityReport check_workability(const Program& program, std::uint64_t seed, int probes_per_profile = 8,
                                    const ExecBudget& budget = {}, const RandomPool& pool = {});

struct WorkingProgram {
  Program program;
  WorkabilityReport report;
  std::uint64_t seed = 0;
  int attempts = 0;
};

/// Generates and checks programs with derived seeds until one works.
/// Throws AttemptsExhausted, or PreconditionViolated when max_attempts < 1.
WorkingProgram generate_working_program(int budget, std::uint64_t seed, const InstructionTable& table,
                                        const RandomPool& pool, int max_attempts,
                                        const GeneratorOptions& options = {});

}  // namespace cip
