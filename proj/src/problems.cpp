#include "dfoto/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dfoto {

namespace {

double sq(double v) { return v * v; }

// Sums terms in sorted order, so the result is exactly invariant under
// permutations of the coordinates.
double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double quarticsphere(const Point& x) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(x.size()));
  for (double v : x) terms.push_back(sq(sq(v)) + sq(v));
  return sorted_sum(std::move(terms));
}

double arwhead(const Point& x) {
  const Eigen::Index n = x.size();
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) s += -4.0 * x[i] + 3.0 + sq(sq(x[i]) + sq(x[n - 1]));
  return s;
}

double chrosen(const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    s += 4.0 * sq(x[i] - sq(x[i + 1])) + sq(1.0 - x[i + 1]);
  }
  return s;
}

double rosenbrock(const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    s += 100.0 * sq(x[i + 1] - sq(x[i])) + sq(1.0 - x[i]);
  }
  return s;
}

double srosenbr(const Point& x) {
  const Eigen::Index n = x.size();
  double s = 0.0;
  Eigen::Index i = 0;
  for (; i + 1 < n; i += 2) s += 100.0 * sq(x[i + 1] - sq(x[i])) + sq(1.0 - x[i]);
  if (i < n) s += sq(x[i] - 1.0);
  return s;
}

double woods(const Point& x) {
  const Eigen::Index n = x.size();
  double s = 0.0;
  Eigen::Index i = 0;
  for (; i + 3 < n; i += 4) {
    const double a = x[i], b = x[i + 1], c = x[i + 2], d = x[i + 3];
    s += 100.0 * sq(b - sq(a)) + sq(1.0 - a) + 90.0 * sq(d - sq(c)) + sq(1.0 - c) +
         10.0 * sq(b + d - 2.0) + 0.1 * sq(b - d);
  }
  for (; i < n; ++i) s += sq(x[i] - 1.0);
  return s;
}

double powellsg(const Point& x) {
  const Eigen::Index n = x.size();
  double s = 0.0;
  Eigen::Index i = 0;
  for (; i + 3 < n; i += 4) {
    const double a = x[i], b = x[i + 1], c = x[i + 2], d = x[i + 3];
    s += sq(a + 10.0 * b) + 5.0 * sq(c - d) + sq(sq(b - 2.0 * c)) + 10.0 * sq(sq(a - d));
  }
  for (; i < n; ++i) s += sq(x[i]);
  return s;
}

double dqrtic(const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += sq(sq(x[i] - static_cast<double>(i + 1)));
  return s;
}

double engval1(const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    s += sq(sq(x[i]) + sq(x[i + 1])) - 4.0 * x[i] + 3.0;
  }
  return s;
}

double freuroth(const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double y = x[i + 1];
    s += sq(x[i] - 13.0 + ((5.0 - y) * y - 2.0) * y) + sq(x[i] - 29.0 + ((1.0 + y) * y - 14.0) * y);
  }
  return s;
}

double liarwhd(const Point& x) {
  double s = 0.0;
  for (double v : x) s += 4.0 * sq(sq(v) - x[0]) + sq(v - 1.0);
  return s;
}

double nondia(const Point& x) {
  double s = sq(x[0] - 1.0);
  for (Eigen::Index i = 1; i < x.size(); ++i) s += 100.0 * sq(x[0] - sq(x[i - 1]));
  return s;
}

double penalty1(const Point& x) {
  constexpr double a = 1e-5;
  double s = 0.0;
  double norm2 = 0.0;
  for (double v : x) {
    s += a * sq(v - 1.0);
    norm2 += sq(v);
  }
  return s + sq(norm2 - 0.25);
}

double sphere(const Point& x) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(x.size()));
  for (double v : x) terms.push_back(sq(v - 1.0));
  return sorted_sum(std::move(terms));
}

double tointgss(const Point& x) {
  const Eigen::Index n = x.size();
  const double c = 10.0 / static_cast<double>(n + 2);
  double s = 0.0;
  for (Eigen::Index i = 0; i + 2 < n; ++i) {
    const double w = sq(x[i + 2]);
    s += (c + w) * (2.0 - std::exp(-sq(x[i] - x[i + 1]) / (0.1 + w)));
  }
  return s;
}

Point filled(Eigen::Index n, double v) { return Point::Constant(n, v); }

Point cyclic(Eigen::Index n, std::initializer_list<double> pattern) {
  Point x(n);
  const std::vector<double> p(pattern);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = p[static_cast<std::size_t>(i) % p.size()];
  return x;
}

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {
      "QUARTICSPHERE", "ARWHEAD", "CHROSEN",  "ROSENBROCK", "SROSENBR",
      "WOODS",         "POWELLSG", "DQRTIC",  "ENGVAL1",    "FREUROTH",
      "LIARWHD",       "NONDIA",  "PENALTY1", "SPHRPTS",    "TOINTGSS"};
  return names;
}

TestProblem make_problem(const std::string& name, Eigen::Index n) {
  if (n < 2 || n > 50) throw std::invalid_argument("make_problem: n must lie in [2, 50]");
  TestProblem p;
  p.name = name;
  p.n = n;
  if (name == "QUARTICSPHERE") {
    p.objective = quarticsphere;
    p.x_start = filled(n, 10.0);
    p.f_best_known = 0.0;
  } else if (name == "ARWHEAD") {
    p.objective = arwhead;
    p.x_start = filled(n, 1.0);
    p.f_best_known = 0.0;
  } else if (name == "CHROSEN") {
    p.objective = chrosen;
    p.x_start = filled(n, -1.0);
    p.f_best_known = 0.0;
  } else if (name == "ROSENBROCK") {
    p.objective = rosenbrock;
    p.x_start = cyclic(n, {-1.2, 1.0});
    p.f_best_known = 0.0;
  } else if (name == "SROSENBR") {
    p.objective = srosenbr;
    p.x_start = cyclic(n, {-1.2, 1.0});
    p.f_best_known = 0.0;
  } else if (name == "WOODS") {
    p.objective = woods;
    p.x_start = cyclic(n, {-3.0, -1.0, -3.0, -1.0});
    p.f_best_known = 0.0;
  } else if (name == "POWELLSG") {
    p.objective = powellsg;
    p.x_start = cyclic(n, {3.0, -1.0, 0.0, 1.0});
    p.f_best_known = 0.0;
  } else if (name == "DQRTIC") {
    p.objective = dqrtic;
    p.x_start = filled(n, 2.0);
    p.f_best_known = 0.0;
  } else if (name == "ENGVAL1") {
    p.objective = engval1;
    p.x_start = filled(n, 2.0);
  } else if (name == "FREUROTH") {
    p.objective = freuroth;
    p.x_start = Point::Zero(n);
    p.x_start[0] = 0.5;
    p.x_start[1] = -2.0;
  } else if (name == "LIARWHD") {
    p.objective = liarwhd;
    p.x_start = filled(n, 4.0);
    p.f_best_known = 0.0;
  } else if (name == "NONDIA") {
    p.objective = nondia;
    p.x_start = filled(n, -1.0);
    p.f_best_known = 0.0;
  } else if (name == "PENALTY1") {
    p.objective = penalty1;
    p.x_start = Point::LinSpaced(n, 1.0, static_cast<double>(n));
  } else if (name == "SPHRPTS") {
    p.objective = sphere;
    p.x_start = Point::Zero(n);
    p.f_best_known = 0.0;
  } else if (name == "TOINTGSS") {
    p.objective = tointgss;
    p.x_start = filled(n, 3.0);
  } else {
    throw std::invalid_argument("make_problem: unknown problem " + name);
  }
  return p;
}

TestProblem permuted(const TestProblem& problem, const std::vector<Eigen::Index>& perm) {
  const Eigen::Index n = problem.n;
  if (static_cast<Eigen::Index>(perm.size()) != n) {
    throw std::invalid_argument("permuted: permutation length mismatch");
  }
  TestProblem out = problem;
  Objective f = problem.objective;
  out.objective = [f, perm](const Point& x) {
    Point px(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) px[i] = x[perm[static_cast<std::size_t>(i)]];
    return f(px);
  };
  // P' x_start: entry perm[i] receives x_start[i].
  for (Eigen::Index i = 0; i < n; ++i) out.x_start[perm[static_cast<std::size_t>(i)]] = problem.x_start[i];
  return out;
}

std::vector<Eigen::Index> random_permutation(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  CounterRng rng(seed, 0x9e3779b97f4a7c15ULL);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

}  // namespace dfoto
