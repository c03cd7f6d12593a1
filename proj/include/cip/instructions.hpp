#pragma once

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cip/value.hpp"

namespace cip {

/// Runtime faults raised while evaluating a program.
enum class Fault : std::uint8_t {
  kTypeMismatch,
  kDivisionByZero,
  kIndexOutOfRange,
  kFuelExhausted,
  kWallClockExceeded,
  kNegativeRange,
  kOverflow,  // int64 overflow or a non-finite float result
};

std::string_view fault_name(Fault fault);

/// Faults caused by the execution budget rather than the program's logic.
inline bool is_resource_fault(Fault f) { return f == Fault::kFuelExhausted || f == Fault::kWallClockExceeded; }

class Outcome {
 public:
  Outcome(Value v) : data_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Outcome(Fault f) : data_(f) {}             // NOLINT(google-explicit-constructor)

  bool ok() const { return data_.index() == 0; }
  const Value& value() const& { return std::get<0>(data_); }
  Value&& value() && { return std::get<0>(std::move(data_)); }
  Fault fault() const { return std::get<1>(data_); }

  friend bool operator==(const Outcome&, const Outcome&) = default;

 private:
  std::variant<Value, Fault> data_;
};

struct ExecBudget {
  std::int64_t fuel = 1'000'000;
  std::int64_t wall_clock_ms = 200;
};

/// Fuel and wall-clock accounting for one evaluation. The clock is sampled
/// once per 1024 fuel units so the fuel path stays deterministic.
class Meter {
 public:
  explicit Meter(const ExecBudget& budget);
  /// Fuel only, no deadline.
  static Meter fuel_only(std::int64_t fuel);

  std::optional<Fault> charge(std::int64_t units) {
    if (units > remaining_) {
      remaining_ = -1;
      return Fault::kFuelExhausted;
    }
    remaining_ -= units;
    used_ += units;
    if (has_deadline_ && (used_ >> 10) != last_probe_) return probe_clock();
    return std::nullopt;
  }

  std::int64_t used() const { return used_; }
  std::int64_t remaining() const { return remaining_; }

 private:
  Meter() = default;
  std::optional<Fault> probe_clock();

  std::int64_t remaining_ = 0;
  std::int64_t used_ = 0;
  std::int64_t last_probe_ = 0;
  bool has_deadline_ = false;
  std::chrono::steady_clock::time_point deadline_{};
};

struct Node;

/// Borrowed argument values for one instruction application.
class ArgList {
 public:
  ArgList() = default;
  ArgList(std::initializer_list<const Value*> refs) {
    for (const Value* r : refs) refs_[size_++] = r;
  }
  void push(const Value& v) { refs_[size_++] = &v; }

  const Value& operator[](std::size_t i) const { return *refs_[i]; }
  std::size_t size() const { return size_; }

 private:
  const Value* refs_[3] = {nullptr, nullptr, nullptr};
  std::size_t size_ = 0;
};

using Builtin = Outcome (*)(const ArgList& args, Meter& meter);

/// One entry of the instruction table: either a built-in or a 'use'
/// pseudo-instruction whose body is an existing program (arity 1).
struct Instruction {
  std::string name;
  int arity = 1;
  Builtin builtin = nullptr;
  std::shared_ptr<const Node> body;

  bool is_use() const { return builtin == nullptr; }
};

using InstructionRef = std::shared_ptr<const Instruction>;

/// Ordered, immutable instruction set. Order drives synthesis tie-breaking.
class InstructionTable {
 public:
  InstructionTable() = default;
  explicit InstructionTable(std::vector<InstructionRef> ops);

  /// The 29 built-ins in their fixed order.
  static const InstructionTable& builtins();

  /// Subset of this table, keeping this table's order.
  InstructionTable restricted(std::span<const std::string_view> names) const;

  /// Appends one arity-1 "@name" pseudo-instruction per used program.
  InstructionTable with_use(std::string_view name, std::shared_ptr<const Node> body) const;

  InstructionRef find(std::string_view name) const;

  std::size_t size() const { return ops_.size(); }
  const InstructionRef& operator[](std::size_t i) const { return ops_[i]; }
  auto begin() const { return ops_.begin(); }
  auto end() const { return ops_.end(); }

 private:
  std::vector<InstructionRef> ops_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cip
