#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfoto/transform_oracle.hpp"

namespace dfoto {

struct TestProblem {
  std::string name;
  Eigen::Index n = 0;
  Objective objective;
  Point x_start;
  std::optional<double> f_best_known;  // analytic optimum when available
};

/// Names of the implemented problems, in suite order.
const std::vector<std::string>& problem_names();

/// Builds a problem in dimension n (2 <= n <= 50). Unknown names or dimensions
/// throw std::invalid_argument.
TestProblem make_problem(const std::string& name, Eigen::Index n);

/// min f(P x) started from P' x_start, where (P x)_i = x_{perm[i]}.
TestProblem permuted(const TestProblem& problem, const std::vector<Eigen::Index>& perm);

/// Uniform random permutation of {0..n-1} from a counter-based stream.
std::vector<Eigen::Index> random_permutation(Eigen::Index n, std::uint64_t seed);

}  // namespace dfoto
