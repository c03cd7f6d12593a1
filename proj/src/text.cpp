#include "cip/text.hpp"

#include <charconv>
#include <json.hpp>

#include "cip/error.hpp"

namespace cip {

namespace {

void append_literal(std::string& out, const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kNull:
      out += "null";
      return;
    case Value::Kind::kBool:
      out += v.as_bool() ? "true" : "false";
      return;
    case Value::Kind::kInt:
      out += std::to_string(v.as_int());
      return;
    case Value::Kind::kFloat: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.as_float());
      std::string_view text(buf, static_cast<std::size_t>(end - buf));
      out += text;
      if (text.find_first_of(".en") == std::string_view::npos) out += ".0";
      return;
    }
    case Value::Kind::kString: {
      // JSON escaping, plus spaces as \u0020 so program text never holds whitespace.
      const std::string quoted =
          nlohmann::json(v.as_string()).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
      for (char c : quoted) {
        if (c == ' ')
          out += "\\u0020";
        else
          out += c;
      }
      return;
    }
    case Value::Kind::kList: {
      out += '[';
      bool first = true;
      for (const Value& item : v.as_list()) {
        if (!first) out += ',';
        first = false;
        append_literal(out, item);
      }
      out += ']';
      return;
    }
  }
}

void append_node(std::string& out, const Node& node) {
  switch (node.kind) {
    case Node::Kind::kInput:
      out += 'x';
      return;
    case Node::Kind::kConst:
      append_literal(out, node.constant);
      return;
    case Node::Kind::kApply:
      out += node.op->name;
      out += '(';
      for (std::size_t i = 0; i < node.args.size(); ++i) {
        if (i) out += ',';
        append_node(out, *node.args[i]);
      }
      out += ')';
      return;
  }
}

bool is_name_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view text, const InstructionTable* table) : text_(text), table_(table) {}

  NodePtr parse_program() {
    NodePtr root = parse_expr();
    expect_end();
    return root;
  }

  Value parse_single_literal() {
    Value v = parse_literal();
    expect_end();
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kSyntaxError, what + " at offset " + std::to_string(pos_));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool at_end() const { return pos_ >= text_.size(); }

  void expect(char c) {
    if (peek() != c || at_end()) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void expect_end() const {
    if (!at_end()) fail("unexpected trailing input");
  }

  NodePtr parse_expr() {
    if (at_end()) fail("unexpected end of input");
    const char c = peek();
    if (c == '@' || is_name_start(c)) {
      const std::size_t start = pos_;
      if (c == '@') ++pos_;
      if (!is_name_start(peek())) fail("expected a name");
      while (is_name_char(peek()) && !at_end()) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (peek() != '(' || at_end()) {
        if (name == "x") return input_node();
        if (name == "true") return const_node(Value::boolean(true));
        if (name == "false") return const_node(Value::boolean(false));
        if (name == "null") return const_node(Value::null());
        fail("unknown identifier '" + std::string(name) + "'");
      }
      return parse_call(name);
    }
    return const_node(parse_literal());
  }

  NodePtr parse_call(std::string_view name) {
    expect('(');
    std::vector<NodePtr> args;
    args.push_back(parse_expr());
    while (peek() == ',' && !at_end()) {
      ++pos_;
      args.push_back(parse_expr());
    }
    expect(')');
    InstructionRef op = table_->find(name);
    if (!op) throw Error(ErrorCode::kUnknownInstruction, std::string(name));
    return apply_node(std::move(op), std::move(args));
  }

  Value parse_literal() {
    if (at_end()) fail("unexpected end of input");
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_list();
    if (c == '-' || is_digit(c)) return parse_number();
    if (is_name_start(c)) {
      const std::size_t start = pos_;
      while (is_name_char(peek()) && !at_end()) ++pos_;
      std::string_view word = text_.substr(start, pos_ - start);
      if (word == "true") return Value::boolean(true);
      if (word == "false") return Value::boolean(false);
      if (word == "null") return Value::null();
      pos_ = start;
      fail("expected a literal");
    }
    fail("expected a literal");
  }

  Value parse_list() {
    expect('[');
    Value::List items;
    if (peek() == ']' && !at_end()) {
      ++pos_;
      return Value::list(std::move(items));
    }
    items.push_back(parse_literal());
    while (peek() == ',' && !at_end()) {
      ++pos_;
      items.push_back(parse_literal());
    }
    expect(']');
    return Value::list(std::move(items));
  }

  Value parse_string() {
    const std::size_t start = pos_;
    ++pos_;
    while (!at_end() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    if (at_end()) fail("unterminated string");
    ++pos_;
    try {
      auto j = nlohmann::json::parse(text_.substr(start, pos_ - start));
      return Value::string(j.get<std::string>());
    } catch (const nlohmann::json::exception&) {
      pos_ = start;
      fail("malformed string literal");
    }
  }

  Value parse_number() {
    const std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    if (!is_digit(peek()) || at_end()) fail("expected digits");
    while (!at_end() && is_digit(peek())) ++pos_;
    bool is_float = false;
    if (!at_end() && peek() == '.') {
      is_float = true;
      ++pos_;
      if (!is_digit(peek()) || at_end()) fail("expected fraction digits");
      while (!at_end() && is_digit(peek())) ++pos_;
    }
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      is_float = true;
      ++pos_;
      if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
      if (!is_digit(peek()) || at_end()) fail("expected exponent digits");
      while (!at_end() && is_digit(peek())) ++pos_;
    }
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    if (is_float) {
      double d = 0;
      auto [ptr, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || ptr != last) fail("bad float literal");
      return Value::real(d);
    }
    std::int64_t i = 0;
    auto [ptr, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || ptr != last) fail("integer literal out of range");
    return Value::integer(i);
  }

  std::string_view text_;
  const InstructionTable* table_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string literal_text(const Value& v) {
  std::string out;
  append_literal(out, v);
  return out;
}

std::string serialize(const Program& program) {
  std::string out;
  append_node(out, *program.root());
  return out;
}

std::size_t size_bytes(const Program& program) { return serialize(program).size(); }

Program parse(std::string_view text, const InstructionTable& table) {
  return Program(Parser(text, &table).parse_program());
}

Value parse_literal(std::string_view text) { return Parser(text, nullptr).parse_single_literal(); }

}  // namespace cip
