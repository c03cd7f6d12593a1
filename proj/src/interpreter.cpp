#include "cip/interpreter.hpp"

#include <array>

namespace cip {

Outcome apply_instruction(const Instruction& op, const ArgList& args, Meter& meter) {
  if (op.is_use()) return evaluate_node(*op.body, args[0], meter);
  return op.builtin(args, meter);
}

Outcome evaluate_node(const Node& node, const Value& input, Meter& meter) {
  if (auto f = meter.charge(1)) return *f;
  switch (node.kind) {
    case Node::Kind::kInput:
      return input;
    case Node::Kind::kConst:
      return node.constant;
    case Node::Kind::kApply:
      break;
  }
  std::array<Value, 3> values;
  ArgList args;
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    Outcome r = evaluate_node(*node.args[i], input, meter);
    if (!r.ok()) return r;
    values[i] = std::move(r).value();
    args.push(values[i]);
  }
  return apply_instruction(*node.op, args, meter);
}

TracedOutcome evaluate_traced(const Program& program, const Value& input, const ExecBudget& budget) {
  Meter meter(budget);
  Outcome out = evaluate_node(*program.root(), input, meter);
  return {std::move(out), meter.used()};
}

Outcome evaluate(const Program& program, const Value& input, const ExecBudget& budget) {
  return evaluate_traced(program, input, budget).outcome;
}

}  // namespace cip
