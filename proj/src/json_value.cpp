#include "cip/json_value.hpp"

#include <limits>

#include "cip/error.hpp"

namespace cip {

Value value_from_json(const nlohmann::json& j) {
  using T = nlohmann::json::value_t;
  switch (j.type()) {
    case T::null:
      return Value::null();
    case T::boolean:
      return Value::boolean(j.get<bool>());
    case T::number_integer:
      return Value::integer(j.get<std::int64_t>());
    case T::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw Error(ErrorCode::kMalformedInput, "integer out of range: " + j.dump());
      return Value::integer(static_cast<std::int64_t>(u));
    }
    case T::number_float:
      return Value::real(j.get<double>());
    case T::string:
      return Value::string(j.get<std::string>());
    case T::array: {
      Value::List items;
      items.reserve(j.size());
      for (const auto& e : j) items.push_back(value_from_json(e));
      return Value::list(std::move(items));
    }
    default:
      throw Error(ErrorCode::kMalformedInput, "unsupported JSON value: " + j.dump());
  }
}

nlohmann::json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kNull: return nullptr;
    case Value::Kind::kBool: return v.as_bool();
    case Value::Kind::kInt: return v.as_int();
    case Value::Kind::kFloat: return v.as_float();
    case Value::Kind::kString: return v.as_string();
    case Value::Kind::kList: {
      auto arr = nlohmann::json::array();
      for (const Value& item : v.as_list()) arr.push_back(value_to_json(item));
      return arr;
    }
  }
  return nullptr;
}

}  // namespace cip
