#include "cip/instructions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "cip/error.hpp"
#include "cip/text.hpp"

namespace cip {

Meter::Meter(const ExecBudget& budget)
    : remaining_(budget.fuel),
      has_deadline_(true),
      deadline_(std::chrono::steady_clock::now() + std::chrono::milliseconds(budget.wall_clock_ms)) {}

Meter Meter::fuel_only(std::int64_t fuel) {
  Meter m;
  m.remaining_ = fuel;
  return m;
}

std::optional<Fault> Meter::probe_clock() {
  last_probe_ = used_ >> 10;
  if (std::chrono::steady_clock::now() > deadline_) return Fault::kWallClockExceeded;
  return std::nullopt;
}

namespace {

using Args = const ArgList&;
using I64 = std::int64_t;

// Splits a UTF-8 string into code point slices. Invalid lead bytes are
// treated as single-byte units.
std::vector<std::string_view> code_points(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 1;
    n = std::min(n, s.size() - i);
    out.push_back(s.substr(i, n));
    i += n;
  }
  return out;
}

Outcome finite_or_overflow(double d) {
  if (!std::isfinite(d)) return Fault::kOverflow;
  return Value::real(d);
}

enum class Arith { kAdd, kSub, kMul };

Outcome arith(const Value& a, const Value& b, Arith op) {
  if (a.is_int() && b.is_int()) {
    I64 r;
    bool overflow = false;
    switch (op) {
      case Arith::kAdd: overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &r); break;
      case Arith::kSub: overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &r); break;
      case Arith::kMul: overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &r); break;
    }
    if (overflow) return Fault::kOverflow;
    return Value::integer(r);
  }
  if (!a.is_number() || !b.is_number()) return Fault::kTypeMismatch;
  const double x = a.as_number(), y = b.as_number();
  switch (op) {
    case Arith::kAdd: return finite_or_overflow(x + y);
    case Arith::kSub: return finite_or_overflow(x - y);
    case Arith::kMul: return finite_or_overflow(x * y);
  }
  return Fault::kTypeMismatch;
}

// Three-way numeric or string comparison; nullopt when not comparable.
std::optional<int> compare(const Value& a, const Value& b) {
  if (a.is_int() && b.is_int()) return a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int() ? 1 : 0;
  if (a.is_number() && b.is_number()) {
    const double x = a.as_number(), y = b.as_number();
    return x < y ? -1 : x > y ? 1 : 0;
  }
  if (a.is_string() && b.is_string()) {
    const int c = a.as_string().compare(b.as_string());
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  return std::nullopt;
}

Outcome op_neg(Args a, Meter&) {
  if (a[0].is_int()) {
    if (a[0].as_int() == std::numeric_limits<I64>::min()) return Fault::kOverflow;
    return Value::integer(-a[0].as_int());
  }
  if (a[0].is_float()) return Value::real(-a[0].as_float());
  return Fault::kTypeMismatch;
}

Outcome op_abs(Args a, Meter&) {
  if (a[0].is_int()) {
    if (a[0].as_int() == std::numeric_limits<I64>::min()) return Fault::kOverflow;
    return Value::integer(a[0].as_int() < 0 ? -a[0].as_int() : a[0].as_int());
  }
  if (a[0].is_float()) return Value::real(std::fabs(a[0].as_float()));
  return Fault::kTypeMismatch;
}

Outcome op_not(Args a, Meter&) {
  if (!a[0].is_bool()) return Fault::kTypeMismatch;
  return Value::boolean(!a[0].as_bool());
}

Outcome map_case(const Value& v, bool to_upper) {
  if (!v.is_string()) return Fault::kTypeMismatch;
  std::string s = v.as_string();
  for (char& c : s) {
    if (to_upper && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    if (!to_upper && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return Value::string(std::move(s));
}

Outcome op_upper(Args a, Meter&) { return map_case(a[0], true); }
Outcome op_lower(Args a, Meter&) { return map_case(a[0], false); }

Outcome op_reverse(Args a, Meter& m) {
  if (a[0].is_list()) {
    if (auto f = m.charge(static_cast<I64>(a[0].as_list().size()))) return *f;
    Value::List items(a[0].as_list().rbegin(), a[0].as_list().rend());
    return Value::list(std::move(items));
  }
  if (a[0].is_string()) {
    if (auto f = m.charge(static_cast<I64>(a[0].as_string().size()))) return *f;
    auto cps = code_points(a[0].as_string());
    std::string out;
    out.reserve(a[0].as_string().size());
    for (auto it = cps.rbegin(); it != cps.rend(); ++it) out += *it;
    return Value::string(std::move(out));
  }
  return Fault::kTypeMismatch;
}

Outcome op_length(Args a, Meter& m) {
  if (a[0].is_list()) {
    const auto n = static_cast<I64>(a[0].as_list().size());
    if (auto f = m.charge(n)) return *f;
    return Value::integer(n);
  }
  if (a[0].is_string()) {
    if (auto f = m.charge(static_cast<I64>(a[0].as_string().size()))) return *f;
    return Value::integer(static_cast<I64>(code_points(a[0].as_string()).size()));
  }
  return Fault::kTypeMismatch;
}

Outcome op_head(Args a, Meter&) {
  if (a[0].is_list()) {
    if (a[0].as_list().empty()) return Fault::kIndexOutOfRange;
    return a[0].as_list().front();
  }
  if (a[0].is_string()) {
    auto cps = code_points(a[0].as_string());
    if (cps.empty()) return Fault::kIndexOutOfRange;
    return Value::string(std::string(cps.front()));
  }
  return Fault::kTypeMismatch;
}

Outcome op_tail(Args a, Meter&) {
  if (a[0].is_list()) {
    const auto& items = a[0].as_list();
    if (items.empty()) return Fault::kIndexOutOfRange;
    return Value::list(Value::List(items.begin() + 1, items.end()));
  }
  if (a[0].is_string()) {
    auto cps = code_points(a[0].as_string());
    if (cps.empty()) return Fault::kIndexOutOfRange;
    return Value::string(a[0].as_string().substr(cps.front().size()));
  }
  return Fault::kTypeMismatch;
}

Outcome op_last(Args a, Meter&) {
  if (a[0].is_list()) {
    if (a[0].as_list().empty()) return Fault::kIndexOutOfRange;
    return a[0].as_list().back();
  }
  if (a[0].is_string()) {
    auto cps = code_points(a[0].as_string());
    if (cps.empty()) return Fault::kIndexOutOfRange;
    return Value::string(std::string(cps.back()));
  }
  return Fault::kTypeMismatch;
}

// Lists of numbers sort numerically, lists of strings lexicographically;
// anything mixed is a type error.
Outcome op_sort(Args a, Meter& m) {
  if (!a[0].is_list()) return Fault::kTypeMismatch;
  const auto& items = a[0].as_list();
  if (auto f = m.charge(static_cast<I64>(items.size()))) return *f;
  const bool numbers = std::all_of(items.begin(), items.end(), [](const Value& v) { return v.is_number(); });
  const bool strings = std::all_of(items.begin(), items.end(), [](const Value& v) { return v.is_string(); });
  if (!numbers && !strings) return Fault::kTypeMismatch;
  Value::List sorted = items;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Value& x, const Value& y) { return *compare(x, y) < 0; });
  return Value::list(std::move(sorted));
}

Outcome op_sum(Args a, Meter& m) {
  if (!a[0].is_list()) return Fault::kTypeMismatch;
  const auto& items = a[0].as_list();
  if (auto f = m.charge(static_cast<I64>(items.size()))) return *f;
  Value acc = Value::integer(0);
  for (const Value& v : items) {
    if (!v.is_number()) return Fault::kTypeMismatch;
    Outcome next = arith(acc, v, Arith::kAdd);
    if (!next.ok()) return next;
    acc = std::move(next).value();
  }
  return acc;
}

Outcome op_to_string(Args a, Meter&) {
  if (a[0].is_string()) return a[0];
  return Value::string(literal_text(a[0]));
}

Outcome op_to_int(Args a, Meter&) {
  const Value& v = a[0];
  switch (v.kind()) {
    case Value::Kind::kInt:
      return v;
    case Value::Kind::kBool:
      return Value::integer(v.as_bool() ? 1 : 0);
    case Value::Kind::kFloat: {
      const double t = std::trunc(v.as_float());
      if (!(t >= -9.2233720368547758e18 && t < 9.2233720368547758e18)) return Fault::kOverflow;
      return Value::integer(static_cast<I64>(t));
    }
    case Value::Kind::kString: {
      const std::string& s = v.as_string();
      I64 out = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return Fault::kTypeMismatch;
      return Value::integer(out);
    }
    default:
      return Fault::kTypeMismatch;
  }
}

Outcome op_range(Args a, Meter& m) {
  if (!a[0].is_int()) return Fault::kTypeMismatch;
  const I64 n = a[0].as_int();
  if (n < 0) return Fault::kNegativeRange;
  if (auto f = m.charge(n)) return *f;
  Value::List items;
  items.reserve(static_cast<std::size_t>(n));
  for (I64 i = 0; i < n; ++i) items.push_back(Value::integer(i));
  return Value::list(std::move(items));
}

Outcome op_add(Args a, Meter&) { return arith(a[0], a[1], Arith::kAdd); }
Outcome op_sub(Args a, Meter&) { return arith(a[0], a[1], Arith::kSub); }
Outcome op_mul(Args a, Meter&) { return arith(a[0], a[1], Arith::kMul); }

// Integer division truncates toward zero.
Outcome op_div(Args a, Meter&) {
  if (a[0].is_int() && a[1].is_int()) {
    if (a[1].as_int() == 0) return Fault::kDivisionByZero;
    if (a[0].as_int() == std::numeric_limits<I64>::min() && a[1].as_int() == -1) return Fault::kOverflow;
    return Value::integer(a[0].as_int() / a[1].as_int());
  }
  if (!a[0].is_number() || !a[1].is_number()) return Fault::kTypeMismatch;
  if (a[1].as_number() == 0.0) return Fault::kDivisionByZero;
  return finite_or_overflow(a[0].as_number() / a[1].as_number());
}

// Remainder takes the sign of the dividend, consistent with div.
Outcome op_mod(Args a, Meter&) {
  if (a[0].is_int() && a[1].is_int()) {
    if (a[1].as_int() == 0) return Fault::kDivisionByZero;
    if (a[1].as_int() == -1) return Value::integer(0);
    return Value::integer(a[0].as_int() % a[1].as_int());
  }
  if (!a[0].is_number() || !a[1].is_number()) return Fault::kTypeMismatch;
  if (a[1].as_number() == 0.0) return Fault::kDivisionByZero;
  return finite_or_overflow(std::fmod(a[0].as_number(), a[1].as_number()));
}

Outcome op_min(Args a, Meter&) {
  auto c = compare(a[0], a[1]);
  if (!c) return Fault::kTypeMismatch;
  return *c <= 0 ? a[0] : a[1];
}

Outcome op_max(Args a, Meter&) {
  auto c = compare(a[0], a[1]);
  if (!c) return Fault::kTypeMismatch;
  return *c >= 0 ? a[0] : a[1];
}

Outcome op_eq(Args a, Meter&) { return Value::boolean(a[0] == a[1]); }

Outcome op_lt(Args a, Meter&) {
  auto c = compare(a[0], a[1]);
  if (!c) return Fault::kTypeMismatch;
  return Value::boolean(*c < 0);
}

Outcome op_gt(Args a, Meter&) {
  auto c = compare(a[0], a[1]);
  if (!c) return Fault::kTypeMismatch;
  return Value::boolean(*c > 0);
}

Outcome op_concat(Args a, Meter& m) {
  if (a[0].is_string() && a[1].is_string()) {
    std::string out = a[0].as_string() + a[1].as_string();
    if (auto f = m.charge(static_cast<I64>(out.size()))) return *f;
    return Value::string(std::move(out));
  }
  if (a[0].is_list() && a[1].is_list()) {
    const auto& l = a[0].as_list();
    const auto& r = a[1].as_list();
    if (auto f = m.charge(static_cast<I64>(l.size() + r.size()))) return *f;
    Value::List out;
    out.reserve(l.size() + r.size());
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
    return Value::list(std::move(out));
  }
  return Fault::kTypeMismatch;
}

Outcome op_append(Args a, Meter&) {
  if (!a[0].is_list()) return Fault::kTypeMismatch;
  Value::List out = a[0].as_list();
  out.push_back(a[1]);
  return Value::list(std::move(out));
}

Outcome op_nth(Args a, Meter&) {
  if (!a[0].is_list() || !a[1].is_int()) return Fault::kTypeMismatch;
  const auto& items = a[0].as_list();
  const I64 i = a[1].as_int();
  if (i < 0 || i >= static_cast<I64>(items.size())) return Fault::kIndexOutOfRange;
  return items[static_cast<std::size_t>(i)];
}

Outcome op_if(Args a, Meter&) {
  if (!a[0].is_bool()) return Fault::kTypeMismatch;
  return a[0].as_bool() ? a[1] : a[2];
}

InstructionRef make_builtin(std::string name, int arity, Builtin fn) {
  auto op = std::make_shared<Instruction>();
  op->name = std::move(name);
  op->arity = arity;
  op->builtin = fn;
  return op;
}

}  // namespace

InstructionTable::InstructionTable(std::vector<InstructionRef> ops) : ops_(std::move(ops)) {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (!index_.emplace(ops_[i]->name, i).second)
      throw Error(ErrorCode::kPreconditionViolated, "duplicate instruction " + ops_[i]->name);
  }
}

const InstructionTable& InstructionTable::builtins() {
  static const InstructionTable table({
      make_builtin("neg", 1, op_neg),
      make_builtin("abs", 1, op_abs),
      make_builtin("not", 1, op_not),
      make_builtin("upper", 1, op_upper),
      make_builtin("lower", 1, op_lower),
      make_builtin("reverse", 1, op_reverse),
      make_builtin("length", 1, op_length),
      make_builtin("head", 1, op_head),
      make_builtin("tail", 1, op_tail),
      make_builtin("last", 1, op_last),
      make_builtin("sort", 1, op_sort),
      make_builtin("sum", 1, op_sum),
      make_builtin("to_string", 1, op_to_string),
      make_builtin("to_int", 1, op_to_int),
      make_builtin("range", 1, op_range),
      make_builtin("add", 2, op_add),
      make_builtin("sub", 2, op_sub),
      make_builtin("mul", 2, op_mul),
      make_builtin("div", 2, op_div),
      make_builtin("mod", 2, op_mod),
      make_builtin("min", 2, op_min),
      make_builtin("max", 2, op_max),
      make_builtin("eq", 2, op_eq),
      make_builtin("lt", 2, op_lt),
      make_builtin("gt", 2, op_gt),
      make_builtin("concat", 2, op_concat),
      make_builtin("append", 2, op_append),
      make_builtin("nth", 2, op_nth),
      make_builtin("if", 3, op_if),
  });
  return table;
}

InstructionTable InstructionTable::restricted(std::span<const std::string_view> names) const {
  std::vector<InstructionRef> kept;
  for (const auto& op : ops_) {
    if (std::find(names.begin(), names.end(), op->name) != names.end()) kept.push_back(op);
  }
  return InstructionTable(std::move(kept));
}

InstructionTable InstructionTable::with_use(std::string_view name, std::shared_ptr<const Node> body) const {
  auto op = std::make_shared<Instruction>();
  op->name = "@" + std::string(name);
  op->arity = 1;
  op->body = std::move(body);
  std::vector<InstructionRef> ops = ops_;
  ops.push_back(std::move(op));
  return InstructionTable(std::move(ops));
}

InstructionRef InstructionTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : ops_[it->second];
}

}  // namespace cip
