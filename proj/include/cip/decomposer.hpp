#pragma once

#include <cstdint>
#include <vector>

#include "cip/case.hpp"
#include "cip/generator.hpp"
#include "cip/program.hpp"

namespace cip {

/// One slice of a program. Its InputRef stands for the previous chunk's
/// value; chunk 1's InputRef is the program input.
struct Chunk {
  int index = 1;
  Program code;
};

/// A cut candidate on the spine, `depth` Apply nodes below the root.
struct CutPoint {
  std::size_t depth = 0;
  NodePtr node;
};

inline constexpr int kMaxChunks = 32;
inline constexpr int kMaxCasesPerStep = 8;

/// Spine Apply nodes (excluding the root) whose subtree holds every
/// InputRef, deepest first. The spine descends into the child with the
/// most nodes, leftmost on ties. Throws NoInput for input-free programs.
std::vector<CutPoint> eligible_cuts(const Program& program);

/// Largest k accepted by split_into_chunks for this program.
int max_chunks(const Program& program);

/// Cuts the program at k-1 seeded, distinct eligible cut points, returning
/// chunks ordered from input to output. Throws NotEnoughCuts or
/// PreconditionViolated (k outside [1, 32]).
std::vector<Chunk> split_into_chunks(const Program& program, int k, std::uint64_t seed);

/// Substitutes each chunk into the next one's InputRef. Throws EmptyChain.
Program recompose(const std::vector<Chunk>& chunks);

/// Fuzzes each chunk into 1-8 cases. Candidate inputs are the values seen
/// at the chunk's input boundary while probing the whole program, then
/// fresh draws of the same profile. Throws AbandonProgram when a chunk
/// cannot reach its case count within max_draws candidates.
std::vector<StepCases> make_step_cases(const std::vector<Chunk>& chunks, const WorkabilityReport& report,
                                       std::uint64_t seed, int max_draws = 64, const ExecBudget& budget = {},
                                       const RandomPool& pool = {});

}  // namespace cip
