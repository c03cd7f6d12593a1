#pragma once

#include <vector>

#include "cip/value.hpp"

namespace cip {

/// One input -> output example for a single step.
struct Case {
  Value input;
  Value output;

  friend bool operator==(const Case&, const Case&) = default;
};

/// The cases attached to one step of a chain, 1-based.
struct StepCases {
  int chunk_index = 1;
  std::vector<Case> cases;
};

}  // namespace cip
