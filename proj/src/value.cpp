#include "cip/value.hpp"

#include <bit>
#include <functional>

#include "cip/rng.hpp"

namespace cip {

std::size_t Value::hash() const {
  std::uint64_t h = static_cast<std::uint64_t>(data_.index()) * 0x9e3779b97f4a7c15ULL;
  switch (kind()) {
    case Kind::kNull:
      break;
    case Kind::kBool:
      h ^= as_bool() ? 1 : 2;
      break;
    case Kind::kInt:
      h ^= static_cast<std::uint64_t>(as_int());
      break;
    case Kind::kFloat: {
      double d = as_float();
      if (d == 0.0) d = 0.0;  // -0.0 == 0.0
      h ^= std::bit_cast<std::uint64_t>(d);
      break;
    }
    case Kind::kString:
      h ^= std::hash<std::string>{}(as_string());
      break;
    case Kind::kList:
      for (const Value& item : as_list()) h = mix64(h ^ item.hash()) + 1;
      h ^= as_list().size();
      break;
  }
  return static_cast<std::size_t>(mix64(h));
}

std::string_view kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::kNull: return "null";
    case Value::Kind::kBool: return "bool";
    case Value::Kind::kInt: return "int";
    case Value::Kind::kFloat: return "float";
    case Value::Kind::kString: return "string";
    case Value::Kind::kList: return "list";
  }
  return "?";
}

}  // namespace cip
