#include "cip/program.hpp"

#include "cip/error.hpp"

namespace cip {

NodePtr input_node() {
  static const NodePtr shared = std::make_shared<const Node>();
  return shared;
}

NodePtr const_node(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kConst;
  n->constant = std::move(v);
  return n;
}

NodePtr apply_node(InstructionRef op, std::vector<NodePtr> args) {
  if (static_cast<int>(args.size()) != op->arity) {
    throw Error(ErrorCode::kArityMismatch, op->name + " expects " + std::to_string(op->arity) + " arguments, got " +
                                               std::to_string(args.size()));
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kApply;
  n->op = std::move(op);
  n->args = std::move(args);
  return n;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::kInput:
      return true;
    case Node::Kind::kConst:
      return a.constant == b.constant;
    case Node::Kind::kApply:
      if (a.op->name != b.op->name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!structurally_equal(*a.args[i], *b.args[i])) return false;
      }
      return true;
  }
  return false;
}

bool operator==(const Program& a, const Program& b) { return structurally_equal(*a.root(), *b.root()); }

HalsteadCounts halstead_counts(const Node& node) {
  HalsteadCounts c;
  if (node.kind != Node::Kind::kApply) {
    c.operands = 1;
    return c;
  }
  c.operators = 1;
  for (const auto& arg : node.args) {
    HalsteadCounts sub = halstead_counts(*arg);
    c.operators += sub.operators;
    c.operands += sub.operands;
  }
  return c;
}

std::size_t count_inputs(const Node& node) {
  if (node.kind == Node::Kind::kInput) return 1;
  std::size_t n = 0;
  for (const auto& arg : node.args) n += count_inputs(*arg);
  return n;
}

std::size_t count_applies(const Node& node) {
  if (node.kind != Node::Kind::kApply) return 0;
  std::size_t n = 1;
  for (const auto& arg : node.args) n += count_applies(*arg);
  return n;
}

NodePtr substitute_input(const NodePtr& node, const NodePtr& replacement) {
  switch (node->kind) {
    case Node::Kind::kInput:
      return replacement;
    case Node::Kind::kConst:
      return node;
    case Node::Kind::kApply: {
      std::vector<NodePtr> args;
      args.reserve(node->args.size());
      for (const auto& arg : node->args) args.push_back(substitute_input(arg, replacement));
      return apply_node(node->op, std::move(args));
    }
  }
  return node;
}

}  // namespace cip
