#pragma once

#include <span>

#include "cip/instructions.hpp"
#include "cip/program.hpp"
#include "cip/value.hpp"

namespace cip {

/// Evaluates `program` on `input`. Costs one fuel unit per node visit plus
/// the element count for list-traversing instructions. All arguments are
/// evaluated before an instruction runs, including both arms of `if`.
Outcome evaluate(const Program& program, const Value& input, const ExecBudget& budget = {});

struct TracedOutcome {
  Outcome outcome;
  std::int64_t fuel_used;
};

TracedOutcome evaluate_traced(const Program& program, const Value& input, const ExecBudget& budget = {});

Outcome evaluate_node(const Node& node, const Value& input, Meter& meter);

/// Applies one instruction to already-evaluated arguments. A 'use'
/// pseudo-instruction runs its body with the argument bound to the input.
Outcome apply_instruction(const Instruction& op, const ArgList& args, Meter& meter);

}  // namespace cip
