#include "cip/generator.hpp"

#include <algorithm>
#include <cmath>

#include "cip/error.hpp"
#include "cip/interpreter.hpp"

namespace cip {

std::string_view profile_name(InputProfile profile) {
  switch (profile) {
    case InputProfile::kInt: return "int";
    case InputProfile::kString: return "string";
    case InputProfile::kListInt: return "list-int";
    case InputProfile::kFloat: return "float";
    case InputProfile::kBool: return "bool";
  }
  return "?";
}

std::optional<InputProfile> profile_of(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kInt: return InputProfile::kInt;
    case Value::Kind::kString: return InputProfile::kString;
    case Value::Kind::kFloat: return InputProfile::kFloat;
    case Value::Kind::kBool: return InputProfile::kBool;
    case Value::Kind::kList:
      for (const Value& item : v.as_list()) {
        if (!item.is_int()) return std::nullopt;
      }
      return InputProfile::kListInt;
    case Value::Kind::kNull: return std::nullopt;
  }
  return std::nullopt;
}

Value RandomPool::draw(InputProfile profile, Rng& rng) const {
  switch (profile) {
    case InputProfile::kInt:
      return Value::integer(rng.uniform(int_min, int_max));
    case InputProfile::kFloat: {
      const auto lo = static_cast<std::int64_t>(std::ceil(float_min * 10));
      const auto hi = static_cast<std::int64_t>(std::floor(float_max * 10));
      return Value::real(static_cast<double>(rng.uniform(lo, hi)) / 10.0);
    }
    case InputProfile::kString: {
      static constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
      const auto n = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(max_string_length)));
      std::string s;
      for (std::size_t i = 0; i < n; ++i) s += kAlphabet[rng.below(kAlphabet.size())];
      return Value::string(std::move(s));
    }
    case InputProfile::kListInt: {
      const auto n = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(max_list_length)));
      Value::List items;
      for (std::size_t i = 0; i < n; ++i) items.push_back(Value::integer(rng.uniform(int_min, int_max)));
      return Value::list(std::move(items));
    }
    case InputProfile::kBool:
      return Value::boolean(rng.chance(0.5));
  }
  return Value::null();
}

Value RandomPool::draw(InputProfile profile, std::uint64_t seed, std::uint64_t index) const {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(profile), index}));
  return draw(profile, rng);
}

Value RandomPool::constant(Rng& rng) const { return draw(kProfileOrder[rng.below(kProfileOrder.size())], rng); }

namespace {

class Builder {
 public:
  Builder(Rng& rng, const InstructionTable& table, const RandomPool& pool, const GeneratorOptions& options)
      : rng_(rng), pool_(pool), options_(options) {
    for (const auto& op : table) by_max_arity_.push_back(op);
    std::stable_sort(by_max_arity_.begin(), by_max_arity_.end(),
                     [](const InstructionRef& a, const InstructionRef& b) { return a->arity < b->arity; });
  }

  NodePtr build(int budget, bool allow_input = true) {
    if (budget == 1 || rng_.chance(options_.leaf_bias / budget)) return leaf(allow_input);
    // Instructions whose operator plus one node per argument fit the budget.
    std::size_t fitting = 0;
    while (fitting < by_max_arity_.size() && by_max_arity_[fitting]->arity <= budget - 1) ++fitting;
    if (fitting == 0) return leaf(allow_input);
    const InstructionRef& op = by_max_arity_[rng_.below(fitting)];

    // Uniform random composition of budget-1 into `arity` positive parts.
    const int total = budget - 1;
    std::vector<int> cuts;
    while (static_cast<int>(cuts.size()) < op->arity - 1) {
      const int c = static_cast<int>(rng_.uniform(1, total - 1));
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(total);
    std::vector<NodePtr> args;
    int prev = 0;
    for (int c : cuts) {
      args.push_back(build(c - prev, allow_input));
      prev = c;
    }
    return apply_node(op, std::move(args));
  }

  NodePtr thread(int budget) {
    const InputProfile profile = kProfileOrder[rng_.below(kProfileOrder.size())];
    std::vector<Value> values;
    for (int i = 0; i < 8; ++i) values.push_back(pool_.draw(profile, rng_));

    NodePtr expr = input_node();
    int used = 1;
    for (int rejected = 0; used < budget && rejected < options_.max_rejections;) {
      const int remaining = budget - used;
      std::size_t fitting = 0;
      while (fitting < by_max_arity_.size() && by_max_arity_[fitting]->arity <= remaining) ++fitting;
      const InstructionRef& op = by_max_arity_[rng_.below(fitting)];
      const auto slot = static_cast<int>(rng_.below(static_cast<std::uint64_t>(op->arity)));
      int cost = 1;
      std::vector<NodePtr> args;
      for (int a = 0; a < op->arity; ++a) {
        if (a == slot) {
          args.push_back(expr);
          continue;
        }
        int side = 1;
        if (!rng_.chance(options_.side_leaf_probability)) {
          side = static_cast<int>(rng_.uniform(2, std::max(2, options_.max_side_budget)));
        }
        NodePtr arg = build(side, false);
        cost += static_cast<int>(halstead_counts(*arg).length());
        args.push_back(std::move(arg));
      }
      std::optional<std::vector<Value>> next;
      if (cost <= remaining) next = step_values(*op, args, slot, values);
      if (!next) {
        ++rejected;
        continue;
      }
      expr = apply_node(op, std::move(args));
      values = std::move(*next);
      used += cost;
      rejected = 0;
    }
    return expr;
  }

 private:
  NodePtr leaf(bool allow_input) {
    if (allow_input && rng_.chance(options_.input_leaf_probability)) return input_node();
    return const_node(pool_.constant(rng_));
  }

  // Outputs of op(args) per probe, given the threaded argument's current
  // values. Rejects faults, nulls, and levels whose outputs are all equal.
  static std::optional<std::vector<Value>> step_values(const Instruction& op, const std::vector<NodePtr>& args,
                                                       int slot, const std::vector<Value>& values) {
    Meter meter = Meter::fuel_only(100'000);
    std::vector<Value> side(args.size());
    for (std::size_t a = 0; a < args.size(); ++a) {
      if (static_cast<int>(a) == slot) continue;
      Outcome v = evaluate_node(*args[a], Value::null(), meter);
      if (!v.ok()) return std::nullopt;
      side[a] = std::move(v).value();
    }
    std::vector<Value> out;
    out.reserve(values.size());
    for (const Value& in : values) {
      ArgList list;
      for (std::size_t a = 0; a < args.size(); ++a) list.push(static_cast<int>(a) == slot ? in : side[a]);
      Outcome r = apply_instruction(op, list, meter);
      if (!r.ok() || r.value().is_null()) return std::nullopt;
      out.push_back(std::move(r).value());
    }
    if (std::all_of(out.begin(), out.end(), [&](const Value& v) { return v == out.front(); })) return std::nullopt;
    return out;
  }

  Rng& rng_;
  const RandomPool& pool_;
  const GeneratorOptions& options_;
  std::vector<InstructionRef> by_max_arity_;
};

}  // namespace

Program generate_random_program(int budget, std::uint64_t seed, const InstructionTable& table,
                                const RandomPool& pool, const GeneratorOptions& options) {
  if (budget < 1) throw Error(ErrorCode::kInvalidBudget, "budget must be at least 1, got " + std::to_string(budget));
  Rng rng(derive_seed(seed, {purpose::kGenerate, static_cast<std::uint64_t>(budget)}));
  Builder builder(rng, table, pool, options);
  if (options.mode == GenerationMode::kThreaded) return Program(builder.thread(budget));
  return Program(builder.build(budget));
}

WorkabilityReport check_workability(const Program& program, std::uint64_t seed, int probes_per_profile,
                                    const ExecBudget& budget, const RandomPool& pool) {
  WorkabilityReport best;
  best.failed_criterion = 1;
  if (!program.root()) return best;

  const std::uint64_t probe_seed = derive_seed(seed, {purpose::kProbe});
  for (InputProfile profile : kProfileOrder) {
    WorkabilityReport r;
    r.profile = profile;
    for (int i = 0; i < probes_per_profile; ++i) {
      r.probe_inputs.push_back(pool.draw(profile, probe_seed, static_cast<std::uint64_t>(i)));
    }
    std::optional<int> failed;
    for (const Value& in : r.probe_inputs) {
      Outcome out = evaluate(program, in, budget);
      if (!out.ok()) {
        failed = is_resource_fault(out.fault()) ? 6 : 2;
        break;
      }
      r.probe_outputs.push_back(std::move(out).value());
    }
    if (!failed) {
      const auto& outs = r.probe_outputs;
      if (std::any_of(outs.begin(), outs.end(), [](const Value& v) { return v.is_null(); })) {
        failed = 3;
      } else if (std::all_of(outs.begin(), outs.end(), [&](const Value& v) { return v == outs.front(); })) {
        failed = 4;
      } else {
        bool differs = false;
        for (std::size_t i = 0; i < outs.size(); ++i) differs = differs || !(outs[i] == r.probe_inputs[i]);
        if (!differs) failed = 5;
      }
    }
    if (!failed) {
      r.works = true;
      return r;
    }
    if (*failed > *best.failed_criterion) {
      r.failed_criterion = failed;
      best = std::move(r);
      best.profile.reset();
    }
  }
  return best;
}

WorkingProgram generate_working_program(int budget, std::uint64_t seed, const InstructionTable& table,
                                        const RandomPool& pool, int max_attempts, const GeneratorOptions& options) {
  if (max_attempts < 1) throw Error(ErrorCode::kPreconditionViolated, "max_attempts must be at least 1");
  if (budget < 1) throw Error(ErrorCode::kInvalidBudget, "budget must be at least 1, got " + std::to_string(budget));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = derive_seed(seed, {purpose::kAttempt, static_cast<std::uint64_t>(attempt)});
    Program p = generate_random_program(budget, s, table, pool, options);
    WorkabilityReport report = check_workability(p, s);
    if (report.works) return {std::move(p), std::move(report), s, attempt + 1};
  }
  throw Error(ErrorCode::kAttemptsExhausted,
              "no working program in " + std::to_string(max_attempts) + " attempts at budget " + std::to_string(budget));
}

}  // namespace cip
