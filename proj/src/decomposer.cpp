#include "cip/decomposer.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "cip/error.hpp"
#include "cip/interpreter.hpp"

namespace cip {

namespace {

std::size_t node_count(const Node& n) { return halstead_counts(n).length(); }

// Child index taken at each Apply node along the spine.
std::vector<std::size_t> spine_path(const Node& root) {
  std::vector<std::size_t> path;
  const Node* n = &root;
  while (n->kind == Node::Kind::kApply) {
    std::size_t best = 0, best_size = 0;
    for (std::size_t i = 0; i < n->args.size(); ++i) {
      const std::size_t s = node_count(*n->args[i]);
      if (s > best_size) {
        best = i;
        best_size = s;
      }
    }
    path.push_back(best);
    n = n->args[best].get();
  }
  return path;
}

NodePtr node_at(const NodePtr& root, const std::vector<std::size_t>& path, std::size_t depth) {
  NodePtr n = root;
  for (std::size_t d = 0; d < depth; ++d) n = n->args[path[d]];
  return n;
}

// Copy of the subtree at `from`, with the spine node at depth `to` replaced by
// the input.
NodePtr slice(const NodePtr& root, const std::vector<std::size_t>& path, std::size_t from, std::size_t to) {
  const NodePtr top = node_at(root, path, from);
  std::function<NodePtr(const NodePtr&, std::size_t)> rebuild = [&](const NodePtr& n, std::size_t depth) -> NodePtr {
    if (depth == to) return input_node();
    std::vector<NodePtr> args = n->args;
    args[path[depth]] = rebuild(n->args[path[depth]], depth + 1);
    return apply_node(n->op, std::move(args));
  };
  return rebuild(top, from);
}

}  // namespace

std::vector<CutPoint> eligible_cuts(const Program& program) {
  const Node& root = *program.root();
  const std::size_t total_inputs = count_inputs(root);
  if (total_inputs == 0) throw Error(ErrorCode::kNoInput, "program has no input reference");
  const auto path = spine_path(root);
  std::vector<CutPoint> cuts;
  NodePtr n = program.root();
  for (std::size_t depth = 1; depth <= path.size(); ++depth) {
    n = n->args[path[depth - 1]];
    if (n->kind != Node::Kind::kApply) break;
    if (count_inputs(*n) == total_inputs) cuts.push_back({depth, n});
  }
  std::reverse(cuts.begin(), cuts.end());
  return cuts;
}

int max_chunks(const Program& program) {
  if (count_inputs(*program.root()) == 0) return 1;
  return std::min(kMaxChunks, 1 + static_cast<int>(eligible_cuts(program).size()));
}

std::vector<Chunk> split_into_chunks(const Program& program, int k, std::uint64_t seed) {
  if (k < 1 || k > kMaxChunks) {
    throw Error(ErrorCode::kPreconditionViolated, "chunk count must be in [1, 32], got " + std::to_string(k));
  }
  if (k == 1) return {Chunk{1, Program(program.root())}};
  const auto cuts = eligible_cuts(program);
  if (static_cast<std::size_t>(k) > cuts.size() + 1) {
    throw Error(ErrorCode::kNotEnoughCuts,
                std::to_string(k) + " chunks requested, " + std::to_string(cuts.size()) + " eligible cuts");
  }
  std::vector<std::size_t> depths;
  for (const auto& c : cuts) depths.push_back(c.depth);
  Rng rng(derive_seed(seed, {purpose::kSplit, static_cast<std::uint64_t>(k)}));
  rng.shuffle(depths);
  depths.resize(static_cast<std::size_t>(k - 1));
  std::sort(depths.rbegin(), depths.rend());

  const auto path = spine_path(*program.root());
  std::vector<Chunk> chunks;
  chunks.push_back({1, Program(node_at(program.root(), path, depths.front()))});
  for (std::size_t i = 1; i < depths.size(); ++i) {
    chunks.push_back({static_cast<int>(i) + 1, Program(slice(program.root(), path, depths[i], depths[i - 1]))});
  }
  chunks.push_back({k, Program(slice(program.root(), path, 0, depths.back()))});
  return chunks;
}

Program recompose(const std::vector<Chunk>& chunks) {
  if (chunks.empty()) throw Error(ErrorCode::kEmptyChain, "no chunks to recompose");
  NodePtr acc = chunks.front().code.root();
  for (std::size_t i = 1; i < chunks.size(); ++i) acc = substitute_input(chunks[i].code.root(), acc);
  return Program(acc);
}

namespace {

// Picks `count` cases satisfying the per-step criteria from `found`, in
// discovery order: one case whose output differs from its input, then
// (count >= 2) one whose output differs from that, then the rest.
std::optional<std::vector<Case>> select_cases(const std::vector<Case>& found, std::size_t count) {
  if (found.size() < count) return std::nullopt;
  std::vector<bool> taken(found.size(), false);
  std::size_t anchor = found.size();
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (!(found[i].output == found[i].input)) {
      anchor = i;
      break;
    }
  }
  if (anchor == found.size()) return std::nullopt;
  taken[anchor] = true;
  std::size_t picked = 1;
  if (count >= 2) {
    std::size_t second = found.size();
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (!taken[i] && !(found[i].output == found[anchor].output)) {
        second = i;
        break;
      }
    }
    if (second == found.size()) return std::nullopt;
    taken[second] = true;
    ++picked;
  }
  for (std::size_t i = 0; i < found.size() && picked < count; ++i) {
    if (!taken[i]) {
      taken[i] = true;
      ++picked;
    }
  }
  std::vector<Case> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (taken[i]) out.push_back(found[i]);
  }
  return out;
}

}  // namespace

std::vector<StepCases> make_step_cases(const std::vector<Chunk>& chunks, const WorkabilityReport& report,
                                       std::uint64_t seed, int max_draws, const ExecBudget& budget,
                                       const RandomPool& pool) {
  // Values observed at each chunk's input while replaying the probes.
  std::vector<std::vector<Value>> observed(chunks.size());
  for (const Value& probe : report.probe_inputs) {
    Value v = probe;
    for (std::size_t j = 0; j < chunks.size(); ++j) {
      if (std::find(observed[j].begin(), observed[j].end(), v) == observed[j].end()) observed[j].push_back(v);
      Outcome out = evaluate(chunks[j].code, v, budget);
      if (!out.ok()) break;
      v = std::move(out).value();
    }
  }

  std::vector<StepCases> steps;
  for (std::size_t j = 0; j < chunks.size(); ++j) {
    const auto index = static_cast<std::uint64_t>(chunks[j].index);
    Rng rng(derive_seed(seed, {purpose::kCases, index}));
    const auto count = static_cast<std::size_t>(rng.uniform(1, kMaxCasesPerStep));
    std::optional<InputProfile> profile;
    if (!observed[j].empty()) profile = profile_of(observed[j].front());

    std::vector<Case> found;
    std::unordered_set<Value, ValueHash> tried;
    std::optional<std::vector<Case>> chosen;
    for (int draw = 0; draw < max_draws && !chosen; ++draw) {
      Value candidate;
      if (static_cast<std::size_t>(draw) < observed[j].size()) {
        candidate = observed[j][static_cast<std::size_t>(draw)];
      } else if (profile) {
        candidate = pool.draw(*profile, rng);
      } else {
        break;
      }
      if (!tried.insert(candidate).second) continue;
      Outcome out = evaluate(chunks[j].code, candidate, budget);
      if (!out.ok() || out.value().is_null()) continue;
      found.push_back({std::move(candidate), std::move(out).value()});
      chosen = select_cases(found, count);
    }
    if (!chosen) {
      throw Error(ErrorCode::kAbandonProgram, "chunk " + std::to_string(index) + " yielded " +
                                                  std::to_string(found.size()) + " usable inputs, needed " +
                                                  std::to_string(count));
    }
    steps.push_back({chunks[j].index, std::move(*chosen)});
  }
  return steps;
}

}  // namespace cip
