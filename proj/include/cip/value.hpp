#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cip {

/// Dynamically typed runtime datum. Equality is deep and never crosses
/// types, so integer 1 and float 1.0 compare unequal.
class Value {
 public:
  using List = std::vector<Value>;

  enum class Kind : std::uint8_t { kNull, kBool, kInt, kFloat, kString, kList };

  Value() = default;

  static Value null() { return Value(); }
  static Value boolean(bool b) { return Value(Data(std::in_place_index<1>, b)); }
  static Value integer(std::int64_t i) { return Value(Data(std::in_place_index<2>, i)); }
  static Value real(double d) { return Value(Data(std::in_place_index<3>, d)); }
  static Value string(std::string s) { return Value(Data(std::in_place_index<4>, std::move(s))); }
  static Value list(List items) { return Value(Data(std::in_place_index<5>, std::move(items))); }

  Kind kind() const { return static_cast<Kind>(data_.index()); }

  bool is_null() const { return kind() == Kind::kNull; }
  bool is_bool() const { return kind() == Kind::kBool; }
  bool is_int() const { return kind() == Kind::kInt; }
  bool is_float() const { return kind() == Kind::kFloat; }
  bool is_number() const { return is_int() || is_float(); }
  bool is_string() const { return kind() == Kind::kString; }
  bool is_list() const { return kind() == Kind::kList; }

  bool as_bool() const { return std::get<1>(data_); }
  std::int64_t as_int() const { return std::get<2>(data_); }
  double as_float() const { return std::get<3>(data_); }
  const std::string& as_string() const { return std::get<4>(data_); }
  const List& as_list() const { return std::get<5>(data_); }

  /// Numeric view of an int or float.
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }

  std::size_t hash() const;

  friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

 private:
  using Data = std::variant<std::monostate, bool, std::int64_t, double, std::string, List>;
  explicit Value(Data d) : data_(std::move(d)) {}

  Data data_;
};

std::string_view kind_name(Value::Kind kind);

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

}  // namespace cip
