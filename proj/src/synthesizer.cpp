#include "cip/synthesizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "cip/error.hpp"
#include "cip/interpreter.hpp"
#include "cip/json_value.hpp"
#include "cip/rng.hpp"
#include "cip/text.hpp"

namespace cip {

namespace {

// Lists longer than this contribute no elements to the pool.
constexpr std::size_t kMaxAtomizedList = 8;

std::optional<Value> agreed(std::span<const Case> cases, bool ratio) {
  bool all_int = true;
  for (const Case& c : cases) {
    if (!c.input.is_number() || !c.output.is_number()) return std::nullopt;
    all_int = all_int && c.input.is_int() && c.output.is_int();
  }
  if (all_int) {
    std::optional<std::int64_t> k;
    for (const Case& c : cases) {
      const std::int64_t in = c.input.as_int(), out = c.output.as_int();
      std::int64_t v = 0;
      if (ratio) {
        if (in == 0 || (in == -1 && out == std::numeric_limits<std::int64_t>::min()) || out % in != 0) {
          return std::nullopt;
        }
        v = out / in;
      } else if (__builtin_sub_overflow(out, in, &v)) {
        return std::nullopt;
      }
      if (k && *k != v) return std::nullopt;
      k = v;
    }
    return Value::integer(*k);
  }
  // Floats agree when they match to 12 significant digits.
  std::optional<double> k;
  for (const Case& c : cases) {
    const double in = c.input.as_number(), out = c.output.as_number();
    if (ratio && in == 0.0) return std::nullopt;
    const double raw = ratio ? out / in : out - in;
    if (!std::isfinite(raw)) return std::nullopt;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", raw);
    const double v = std::strtod(buf, nullptr);
    if (k && *k != v) return std::nullopt;
    k = v;
  }
  return Value::real(*k);
}

std::size_t utf8_boundary(const std::string& s, std::size_t n) {
  while (n > 0 && n < s.size() && (static_cast<unsigned char>(s[n]) & 0xc0) == 0x80) --n;
  return n;
}

// Longest prefix (or suffix) shared by all outputs when they are all lists
// or all strings.
std::optional<Value> shared_affix(std::span<const Case> cases, bool suffix) {
  const Value& first = cases.front().output;
  if (first.is_list()) {
    std::size_t n = first.as_list().size();
    for (const Case& c : cases) {
      if (!c.output.is_list()) return std::nullopt;
      const auto& a = first.as_list();
      const auto& b = c.output.as_list();
      std::size_t i = 0;
      while (i < n && i < b.size() && (suffix ? a[a.size() - 1 - i] == b[b.size() - 1 - i] : a[i] == b[i])) ++i;
      n = i;
    }
    if (n == 0) return std::nullopt;
    const auto& a = first.as_list();
    return Value::list(suffix ? Value::List(a.end() - static_cast<std::ptrdiff_t>(n), a.end())
                              : Value::List(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n)));
  }
  if (first.is_string()) {
    const std::string& a = first.as_string();
    std::size_t n = a.size();
    for (const Case& c : cases) {
      if (!c.output.is_string()) return std::nullopt;
      const std::string& b = c.output.as_string();
      std::size_t i = 0;
      while (i < n && i < b.size() && (suffix ? a[a.size() - 1 - i] == b[b.size() - 1 - i] : a[i] == b[i])) ++i;
      n = i;
    }
    n = suffix ? a.size() - utf8_boundary(a, a.size() - n) : utf8_boundary(a, n);
    if (n == 0) return std::nullopt;
    return Value::string(suffix ? a.substr(a.size() - n) : a.substr(0, n));
  }
  return std::nullopt;
}

}  // namespace

std::vector<Value> constant_pool(std::span<const Case> cases) {
  std::vector<Value> pool;
  std::unordered_set<Value, ValueHash> seen;
  auto add = [&](const Value& v) {
    if (seen.insert(v).second) pool.push_back(v);
  };
  auto add_atoms = [&](const Value& v) {
    if (!v.is_list()) {
      add(v);
    } else if (v.as_list().size() <= kMaxAtomizedList) {
      for (const Value& item : v.as_list()) add(item);
    }
  };
  for (const Case& c : cases) {
    add_atoms(c.input);
    add_atoms(c.output);
  }
  if (cases.size() >= 2) {
    for (auto derived : {agreed(cases, false), agreed(cases, true), shared_affix(cases, false),
                         shared_affix(cases, true)}) {
      if (!derived) continue;
      if (derived->is_float() && std::trunc(derived->as_float()) == derived->as_float() &&
          std::abs(derived->as_float()) < 1e15) {
        add(Value::integer(static_cast<std::int64_t>(derived->as_float())));
      }
      add(*derived);
    }
  }
  for (const Value& v : {Value::integer(0), Value::integer(1), Value::integer(2), Value::integer(-1),
                         Value::boolean(true), Value::boolean(false), Value::string("")}) {
    add(v);
  }
  return pool;
}

namespace {

void check_consistent(std::span<const Case> cases) {
  std::unordered_map<Value, const Value*, ValueHash> outputs;
  for (const Case& c : cases) {
    auto [it, inserted] = outputs.emplace(c.input, &c.output);
    if (!inserted && !(*it->second == c.output)) {
      throw Error(ErrorCode::kInconsistentCases, "input " + literal_text(c.input) + " maps to both " +
                                                     literal_text(*it->second) + " and " + literal_text(c.output));
    }
  }
}

// Rough storage size of a value in units of one Value slot.
std::size_t value_weight(const Value& v) {
  if (v.is_string()) return 1 + v.as_string().size() / sizeof(Value);
  if (!v.is_list()) return 1;
  std::size_t w = 1;
  for (const Value& item : v.as_list()) w += value_weight(item);
  return w;
}

constexpr std::uint32_t kTerminal = std::numeric_limits<std::uint32_t>::max();

// Bottom-up enumerator. Entry i's outputs on the m case inputs live at
// outs_[i*m, (i+1)*m) and its accumulated fuel at costs_[i*m, (i+1)*m).
class Enumerator {
 public:
  Enumerator(std::span<const Case> cases, const InstructionTable& table, const SynthesisLimits& limits,
             InputUse input_use)
      : cases_(cases),
        m_(cases.size()),
        table_(table),
        limits_(limits),
        linear_(input_use == InputUse::kExactlyOnce),
        bank_(16, Hasher{this}, Equal{this}),
        start_(std::chrono::steady_clock::now()) {
    for (const Case& c : cases) target_.push_back(c.output);
  }

  std::optional<Program> run(SynthesisStats* stats) {
    std::optional<Program> found = search();
    if (stats) {
      stats->candidates = candidates_;
      stats->bank_entries = entries_.size();
      stats->length_reached = length_;
    }
    return found;
  }

 private:
  struct Entry {
    std::uint32_t op = kTerminal;
    std::uint32_t args[3] = {0, 0, 0};
    std::uint8_t inputs = 0;  // input references, saturating at 2
    NodePtr terminal;
    std::size_t hash = 0;
  };

  struct Hasher {
    const Enumerator* self;
    std::size_t operator()(std::uint32_t id) const { return self->entries_[id].hash; }
  };
  struct Equal {
    const Enumerator* self;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      if (self->linear_ && self->entries_[a].inputs != self->entries_[b].inputs) return false;
      for (std::size_t c = 0; c < self->m_; ++c) {
        if (!(self->outs_[a * self->m_ + c] == self->outs_[b * self->m_ + c])) return false;
      }
      return true;
    }
  };

  enum class Verdict { kContinue, kFound, kStop };

  std::optional<Program> search() {
    by_length_.assign(static_cast<std::size_t>(limits_.max_length) + 1, {});
    length_ = 1;
    if (offer_terminal(input_node()) == Verdict::kFound) return build_found();
    for (const Value& v : constant_pool(cases_)) {
      if (offer_terminal(const_node(v)) == Verdict::kFound) return build_found();
    }
    for (length_ = 2; length_ <= limits_.max_length; ++length_) {
      for (std::uint32_t op = 0; op < table_.size(); ++op) {
        if (enumerate_op(op) != Verdict::kContinue) {
          if (found_) return build_found();
          return std::nullopt;
        }
      }
    }
    return std::nullopt;
  }

  Verdict offer_terminal(NodePtr node) {
    Entry e;
    e.terminal = node;
    e.inputs = node->kind == Node::Kind::kInput ? 1 : 0;
    for (const Case& c : cases_) {
      outs_.push_back(node->kind == Node::Kind::kInput ? c.input : node->constant);
      costs_.push_back(1);
    }
    return admit(std::move(e));
  }

  // Tries every argument-length composition of length_-1 for one instruction.
  Verdict enumerate_op(std::uint32_t op_index) {
    const Instruction& op = *table_[op_index];
    const int budget = length_ - 1;
    if (op.arity > budget) return Verdict::kContinue;
    std::uint32_t ids[3];
    if (op.arity == 1) {
      return combine(op_index, ids, 0, {budget, 0, 0});
    }
    if (op.arity == 2) {
      for (int l1 = 1; l1 <= budget - 1; ++l1) {
        if (Verdict v = combine(op_index, ids, 0, {l1, budget - l1, 0}); v != Verdict::kContinue) return v;
      }
      return Verdict::kContinue;
    }
    for (int l1 = 1; l1 <= budget - 2; ++l1) {
      for (int l2 = 1; l2 <= budget - 1 - l1; ++l2) {
        if (Verdict v = combine(op_index, ids, 0, {l1, l2, budget - l1 - l2}); v != Verdict::kContinue) return v;
      }
    }
    return Verdict::kContinue;
  }

  Verdict combine(std::uint32_t op_index, std::uint32_t* ids, int depth, std::array<int, 3> lengths) {
    const Instruction& op = *table_[op_index];
    if (depth == op.arity) return evaluate_candidate(op_index, ids);
    const auto& pool = by_length_[static_cast<std::size_t>(lengths[static_cast<std::size_t>(depth)])];
    int inputs_so_far = 0;
    for (int d = 0; d < depth; ++d) inputs_so_far += entries_[ids[d]].inputs;
    for (std::uint32_t id : pool) {
      if (linear_ && inputs_so_far + entries_[id].inputs > 1) continue;
      ids[depth] = id;
      if (Verdict v = combine(op_index, ids, depth + 1, lengths); v != Verdict::kContinue) return v;
    }
    return Verdict::kContinue;
  }

  Verdict evaluate_candidate(std::uint32_t op_index, const std::uint32_t* ids) {
    const Instruction& op = *table_[op_index];
    if (++candidates_ > limits_.max_candidates) return Verdict::kStop;
    if ((candidates_ & 0xfff) == 0 && out_of_time()) return Verdict::kStop;

    const std::size_t base = outs_.size();
    for (std::size_t c = 0; c < m_; ++c) {
      ArgList args;
      std::int64_t spent = 1;
      for (int a = 0; a < op.arity; ++a) {
        const std::size_t at = ids[a] * m_ + c;
        args.push(outs_[at]);
        spent += costs_[at];
      }
      Outcome out = Fault::kFuelExhausted;
      if (spent <= limits_.candidate_budget.fuel) {
        Meter meter = Meter::fuel_only(limits_.candidate_budget.fuel - spent);
        out = apply_instruction(op, args, meter);
        spent += meter.used();
      }
      if (!out.ok()) {
        outs_.resize(base);
        costs_.resize(base);
        return Verdict::kContinue;
      }
      outs_.push_back(std::move(out).value());
      costs_.push_back(static_cast<std::int32_t>(spent));
    }
    Entry e;
    e.op = op_index;
    int inputs = 0;
    for (int a = 0; a < op.arity; ++a) {
      e.args[a] = ids[a];
      inputs += entries_[ids[a]].inputs;
    }
    e.inputs = static_cast<std::uint8_t>(std::min(inputs, 2));
    return admit(std::move(e));
  }

  // Takes ownership of the outputs already appended for `e`. Returns kFound
  // if they match the target, otherwise banks the entry if it is new.
  Verdict admit(Entry e) {
    const std::size_t base = outs_.size() - m_;
    const auto id = static_cast<std::uint32_t>(entries_.size());
    bool matches = !linear_ || e.inputs == 1;
    for (std::size_t c = 0; c < m_ && matches; ++c) matches = outs_[base + c] == target_[c];
    std::size_t h = linear_ ? e.inputs : 0;
    for (std::size_t c = 0; c < m_; ++c) h = mix64(h ^ outs_[base + c].hash()) + c;
    e.hash = h;
    entries_.push_back(std::move(e));
    if (matches) {
      found_ = id;
      return Verdict::kFound;
    }
    std::size_t weight = 0;
    for (std::size_t c = 0; c < m_; ++c) weight += value_weight(outs_[base + c]);
    const bool full = entries_.size() > limits_.max_bank_entries || bank_weight_ + weight > limits_.max_bank_weight;
    bool keep = !full;
    if (keep && limits_.observational_equivalence) keep = bank_.insert(id).second;
    if (keep) {
      bank_weight_ += weight;
      by_length_[static_cast<std::size_t>(length_)].push_back(id);
    } else {
      entries_.pop_back();
      outs_.resize(base);
      costs_.resize(base);
    }
    return Verdict::kContinue;
  }

  bool out_of_time() const {
    return limits_.time_budget_ms > 0 &&
           std::chrono::steady_clock::now() - start_ > std::chrono::milliseconds(limits_.time_budget_ms);
  }

  NodePtr build(std::uint32_t id) const {
    const Entry& e = entries_[id];
    if (e.op == kTerminal) return e.terminal;
    const InstructionRef& op = table_[e.op];
    std::vector<NodePtr> args;
    for (int a = 0; a < op->arity; ++a) args.push_back(build(e.args[a]));
    return apply_node(op, std::move(args));
  }

  Program build_found() const { return Program(build(*found_)); }

  std::span<const Case> cases_;
  std::size_t m_;
  const InstructionTable& table_;
  const SynthesisLimits& limits_;
  bool linear_;
  std::vector<Value> target_;

  std::vector<Entry> entries_;
  std::vector<Value> outs_;
  std::vector<std::int32_t> costs_;
  std::vector<std::vector<std::uint32_t>> by_length_;
  std::unordered_set<std::uint32_t, Hasher, Equal> bank_;

  std::size_t bank_weight_ = 0;
  int length_ = 1;
  std::uint64_t candidates_ = 0;
  std::optional<std::uint32_t> found_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Program synthesize_step(std::span<const Case> cases, const InstructionTable& table, const SynthesisLimits& limits,
                        InputUse input_use, SynthesisStats* stats) {
  if (cases.empty()) throw Error(ErrorCode::kPreconditionViolated, "no cases to synthesize from");
  check_consistent(cases);
  std::optional<Program> found = Enumerator(cases, table, limits, input_use).run(stats);
  if (!found) {
    throw Error(ErrorCode::kSynthesisFailure,
                "no program of length <= " + std::to_string(limits.max_length) + " within limits");
  }
  return *found;
}

Program compose_chain(const std::vector<Program>& solutions) {
  if (solutions.empty()) throw Error(ErrorCode::kEmptyChain, "no step solutions to compose");
  NodePtr acc = solutions.front().root();
  for (std::size_t i = 1; i < solutions.size(); ++i) acc = substitute_input(solutions[i].root(), acc);
  return Program(acc);
}

Spec spec_from_json(const nlohmann::json& doc) {
  auto malformed = [](const std::string& what) { return Error(ErrorCode::kMalformedInput, what); };
  if (!doc.is_object()) throw malformed("spec must be a JSON object");
  Spec spec;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw malformed("\"name\" must be a string");
    spec.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("cases") || !doc["cases"].is_array() || doc["cases"].empty()) {
    throw malformed("\"cases\" must be a non-empty array");
  }
  for (const auto& c : doc["cases"]) {
    if (!c.is_object() || !c.contains("input") || !c.contains("output")) {
      throw malformed("each case needs \"input\" and \"output\"");
    }
    SpecCase sc;
    sc.input = value_from_json(c["input"]);
    sc.output = value_from_json(c["output"]);
    if (c.contains("derive")) {
      if (!c["derive"].is_array()) throw malformed("\"derive\" must be an array");
      for (const auto& d : c["derive"]) sc.derive.push_back(value_from_json(d));
    }
    spec.cases.push_back(std::move(sc));
  }
  if (doc.contains("use")) {
    if (!doc["use"].is_array()) throw malformed("\"use\" must be an array of names");
    for (const auto& u : doc["use"]) {
      if (!u.is_string()) throw malformed("\"use\" must be an array of names");
      spec.use.push_back(u.get<std::string>());
    }
  }
  return spec;
}

Spec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMalformedInput, "cannot read " + path.string());
  try {
    return spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, path.string() + ": " + e.what());
  }
}

Registry load_registry(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kMalformedInput, "registry is not a directory: " + dir.string());
  std::map<std::string, std::string> sources;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".zil") continue;
    std::ifstream in(entry.path());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    sources[entry.path().stem().string()] = std::move(text);
  }

  // Programs may use each other; resolve the "@name" references depth first.
  Registry registry;
  std::set<std::string> resolving;
  std::function<const Program&(const std::string&)> resolve = [&](const std::string& name) -> const Program& {
    if (auto it = registry.find(name); it != registry.end()) return it->second;
    auto src = sources.find(name);
    if (src == sources.end()) throw Error(ErrorCode::kUnknownUse, name);
    if (!resolving.insert(name).second) throw Error(ErrorCode::kUnknownUse, "cyclic use of " + name);
    InstructionTable table = InstructionTable::builtins();
    const std::string& text = src->second;
    for (std::size_t at = text.find('@'); at != std::string::npos; at = text.find('@', at + 1)) {
      std::size_t end = at + 1;
      while (end < text.size() && (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_')) ++end;
      const std::string used = text.substr(at + 1, end - at - 1);
      if (!used.empty() && !table.find("@" + used)) table = table.with_use(used, resolve(used).root());
    }
    Program p(parse(text, table).root(), name);
    resolving.erase(name);
    return registry.emplace(name, std::move(p)).first->second;
  };
  for (const auto& [name, text] : sources) resolve(name);
  return registry;
}

InstructionTable registry_table(const Registry& registry) {
  InstructionTable table = InstructionTable::builtins();
  for (const auto& [name, program] : registry) table = table.with_use(name, program.root());
  return table;
}

std::vector<StepCases> spec_step_cases(const Spec& spec) {
  if (spec.cases.empty()) throw Error(ErrorCode::kPreconditionViolated, "spec has no cases");
  const std::size_t derives = spec.cases.front().derive.size();
  for (const SpecCase& c : spec.cases) {
    if (c.derive.size() != derives) {
      throw Error(ErrorCode::kRaggedDerives, "cases carry " + std::to_string(derives) + " and " +
                                                 std::to_string(c.derive.size()) + " derived values");
    }
  }
  std::vector<StepCases> steps(derives + 1);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    steps[j].chunk_index = static_cast<int>(j) + 1;
    for (const SpecCase& c : spec.cases) {
      const Value& from = j == 0 ? c.input : c.derive[j - 1];
      const Value& to = j == derives ? c.output : c.derive[j];
      Case step_case{from, to};
      if (std::find(steps[j].cases.begin(), steps[j].cases.end(), step_case) == steps[j].cases.end()) {
        steps[j].cases.push_back(std::move(step_case));
      }
    }
    check_consistent(steps[j].cases);
  }
  return steps;
}

Regeneration regenerate(const std::vector<StepCases>& steps, const InstructionTable& table,
                        const SynthesisLimits& limits) {
  if (steps.empty()) throw Error(ErrorCode::kEmptyChain, "no steps to regenerate");
  Regeneration out{Program(input_node()), {}};
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const StepCases& step = steps[j];
    if (step.chunk_index != static_cast<int>(j) + 1) {
      throw Error(ErrorCode::kPreconditionViolated, "steps must be numbered 1.." + std::to_string(steps.size()));
    }
    const InputUse use = j == 0 ? InputUse::kAny : InputUse::kExactlyOnce;
    Program solution(input_node());
    try {
      solution = synthesize_step(step.cases, table, limits, use);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSynthesisFailure) throw;
      throw Error(ErrorCode::kSynthesisFailure, "step " + std::to_string(j + 1) + ": " + e.detail());
    }
    for (const Case& c : step.cases) {
      if (!(evaluate(solution, c.input) == Outcome(c.output))) {
        throw Error(ErrorCode::kSynthesisFailure,
                    "step " + std::to_string(j + 1) + " solution " + serialize(solution) + " fails a case");
      }
    }
    out.steps.push_back(std::move(solution));
  }
  out.program = compose_chain(out.steps);
  return out;
}

Program compile_spec(const Spec& spec, const Registry& registry, const SynthesisLimits& limits) {
  std::vector<StepCases> steps = spec_step_cases(spec);
  InstructionTable table = InstructionTable::builtins();
  for (const std::string& name : spec.use) {
    auto it = registry.find(name);
    if (it == registry.end()) throw Error(ErrorCode::kUnknownUse, name);
    table = table.with_use(name, it->second.root());
  }
  Regeneration r = regenerate(steps, table, limits);
  for (const SpecCase& c : spec.cases) {
    if (!(evaluate(r.program, c.input) == Outcome(c.output))) {
      throw Error(ErrorCode::kSynthesisFailure, "compiled program fails the case with input " + literal_text(c.input));
    }
  }
  return Program(r.program.root(), spec.name.empty() ? std::nullopt : std::optional<std::string>(spec.name));
}

}  // namespace cip
