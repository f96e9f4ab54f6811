#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfoto/transform_analysis.hpp"

namespace dfoto::verify {

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The two-dimensional worked example: first model, second update, step, and
/// model optimality conditions.
std::vector<CheckLine> example21();

/// Model identities under affine transformations of the values and of the base model.
std::vector<CheckLine> identities(std::uint64_t seed, int instances);

/// Membership properties of the model optimality conditions on random convex instances.
std::vector<CheckLine> mop(std::uint64_t seed, int instances);

/// Conditions of the worked example (second set, about x_new).
MopSystem example21_system();

}  // namespace dfoto::verify
