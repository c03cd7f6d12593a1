#pragma once

#include <string>
#include <string_view>

#include "cip/instructions.hpp"
#include "cip/program.hpp"
#include "cip/value.hpp"

namespace cip {

// Canonical program text, with no whitespace anywhere:
//
//   program := expr
//   expr    := "x" | literal | name "(" expr ("," expr)* ")"
//   literal := integer | float | json-string | "true" | "false" | "null"
//            | "[" literal ("," literal)* "]" | "[]"
//
// 'use' pseudo-instructions are spelled "@" name "(" expr ")".

/// Canonical literal text of a value. Floats use the shortest round-trip
/// decimal and always carry a '.' or an exponent.
std::string literal_text(const Value& v);

std::string serialize(const Program& program);

/// Byte length of serialize(program).
std::size_t size_bytes(const Program& program);

/// Throws SyntaxError, UnknownInstruction or ArityMismatch.
Program parse(std::string_view text, const InstructionTable& table = InstructionTable::builtins());

/// Parses a single literal.
Value parse_literal(std::string_view text);

}  // namespace cip
