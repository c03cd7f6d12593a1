#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cip/instructions.hpp"
#include "cip/value.hpp"

namespace cip {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Expression node. Nodes are immutable and may be shared between programs.
struct Node {
  enum class Kind : std::uint8_t { kInput, kConst, kApply };

  Kind kind = Kind::kInput;
  Value constant;
  InstructionRef op;
  std::vector<NodePtr> args;
};

NodePtr input_node();
NodePtr const_node(Value v);
/// Throws ArityMismatch when args.size() != op->arity.
NodePtr apply_node(InstructionRef op, std::vector<NodePtr> args);

/// A single-input expression program.
class Program {
 public:
  explicit Program(NodePtr root, std::optional<std::string> name = std::nullopt)
      : root_(std::move(root)), name_(std::move(name)) {}

  const NodePtr& root() const { return root_; }
  const std::optional<std::string>& name() const { return name_; }

  /// Structural equality of the ASTs; the name is ignored.
  friend bool operator==(const Program& a, const Program& b);

 private:
  NodePtr root_;
  std::optional<std::string> name_;
};

bool structurally_equal(const Node& a, const Node& b);

struct HalsteadCounts {
  std::size_t operators = 0;
  std::size_t operands = 0;
  std::size_t length() const { return operators + operands; }
};

HalsteadCounts halstead_counts(const Node& node);

/// Total operators plus total operands, i.e. the node count.
inline std::size_t halstead_length(const Program& p) { return halstead_counts(*p.root()).length(); }

std::size_t count_inputs(const Node& node);
std::size_t count_applies(const Node& node);

/// Replaces every InputRef in `node` with `replacement`.
NodePtr substitute_input(const NodePtr& node, const NodePtr& replacement);

}  // namespace cip
