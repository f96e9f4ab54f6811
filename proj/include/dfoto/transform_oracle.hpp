#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dfoto/quad_model.hpp"

namespace dfoto {

using Objective = std::function<double(const Point&)>;

/// A scalar map T applied to black-box outputs.
class Transformation {
 public:
  enum class Kind { identity, affine, translation, callable };

  static Transformation identity() { return Transformation(Kind::identity, 1.0, 0.0); }
  /// T(y) = a*y + b.
  static Transformation affine(double a, double b) { return Transformation(Kind::affine, a, b); }
  static Transformation translation(double b) {
    return Transformation(Kind::translation, 1.0, b);
  }
  static Transformation callable(std::function<double(double)> fn, std::string label = "callable");

  Kind kind() const { return kind_; }
  /// Multiplication coefficient (1 for identity/translation, NaN for callables).
  double a() const { return a_; }
  /// Offset (0 for identity, NaN for callables).
  double b() const { return b_; }
  const std::string& label() const { return label_; }

  double operator()(double y) const;

  /// True for affine maps with a > 0, identity, and translations. Callables are
  /// not inspected.
  bool known_positive_monotonic() const;

 private:
  Transformation(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
  std::function<double(double)> fn_;
  std::string label_;
};

/// Counter-based uniform generator keyed by (seed, step, draw index). Any draw can
/// be reproduced without replaying earlier ones.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Raw 64-bit output for the current counter, then advances.
  std::uint64_t next_u64();

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// Inverse-CDF Laplace sample for u in (-1/2, 1/2): -b sign(u) ln(1 - 2|u|).
double laplace_from_uniform(double b, double u);
/// Lap(b) sample; b must be positive.
double sample_laplace(double b, CounterRng& rng);
/// U(-u, u) sample; u must lie in (0, 1).
double sample_uniform(double halfwidth, CounterRng& rng);

/// r(k) = coef * k^power. Zero coefficient disables the component it drives.
struct RateFunction {
  double coef = 0.0;
  double power = 0.0;

  double operator()(std::int64_t k) const;
  bool is_zero() const { return coef == 0.0; }
  std::string to_string() const;
};

/// Parses "0", "0.5", "100/k", "1/k^2", "k/1e4", "3*k".
RateFunction parse_rate(const std::string& text);

/// Step -> transformation generator.
class TransformationSchedule {
 public:
  virtual ~TransformationSchedule() = default;
  virtual Transformation at(std::int64_t step) const = 0;
  virtual std::string describe() const = 0;
};

class IdentitySchedule final : public TransformationSchedule {
 public:
  Transformation at(std::int64_t) const override { return Transformation::identity(); }
  std::string describe() const override { return "identity"; }
};

/// The same transformation at every step.
class FixedSchedule final : public TransformationSchedule {
 public:
  explicit FixedSchedule(Transformation t) : t_(std::move(t)) {}
  Transformation at(std::int64_t) const override { return t_; }
  std::string describe() const override { return "fixed"; }

 private:
  Transformation t_;
};

/// f_k = (gamma_k + 1) f + C eta_k with eta_k ~ Lap(b_k), gamma_k ~ U(-u_k, u_k).
/// A zero rate disables that component. Half-widths are capped just below 1 so
/// every step stays positive monotonic.
class StochasticAffineSchedule final : public TransformationSchedule {
 public:
  struct Params {
    double C = 100.0;
    RateFunction laplace_scale{100.0, -1.0};
    RateFunction uniform_halfwidth{1.0, -1.0};
  };

  StochasticAffineSchedule(Params params, std::uint64_t seed);

  /// One (gamma, eta) draw pair per step, reproducible from (seed, step).
  Transformation at(std::int64_t step) const override;
  std::string describe() const override;

  struct Draw {
    double gamma = 0.0;
    double eta = 0.0;
  };
  Draw draw(std::int64_t step) const;

  const Params& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  /// Largest half-width used for gamma.
  static double max_halfwidth();

 private:
  Params params_;
  std::uint64_t seed_;
};

/// Parses "identity" or "affine:C=100,b=100/k,u=1/k" (missing keys keep defaults;
/// "0" disables a component).
std::shared_ptr<const TransformationSchedule> parse_schedule(const std::string& text,
                                                             std::uint64_t seed);

/// Per-step record of one batch query.
struct OracleStep {
  std::int64_t step = 0;
  Matrix points;              // n x batch
  Transformation transform = Transformation::identity();
  Vector true_values;
  Vector transformed_values;
  std::int64_t nf_after = 0;  // cumulative evaluations after this batch
};

struct OracleLog {
  std::vector<OracleStep> steps;

  /// One row per evaluation: step, point index, coordinates, true value,
  /// transformed value, a, b, cumulative NF.
  void write_csv(std::ostream& os) const;
};

/// Batch oracle: each call evaluates a whole batch under a single transformation
/// drawn for that step.
class BatchOracle {
 public:
  BatchOracle(Objective f, std::shared_ptr<const TransformationSchedule> schedule);

  /// Returns T_step(f(z_i)) for each column z_i. Steps must strictly increase.
  Vector query_batch(const Matrix& points, std::int64_t step);

  /// Untransformed f at x; not counted toward NF (the harness owns f).
  double true_value(const Point& x) const { return f_(x); }

  std::int64_t nf() const { return nf_; }
  std::int64_t last_step() const { return last_step_; }
  const OracleLog& log() const { return log_; }
  const TransformationSchedule& schedule() const { return *schedule_; }

  /// Disable per-evaluation logging (NF accounting is kept).
  void set_logging(bool enabled) { logging_ = enabled; }

 private:
  Objective f_;
  std::shared_ptr<const TransformationSchedule> schedule_;
  OracleLog log_;
  std::int64_t nf_ = 0;
  std::int64_t last_step_ = 0;
  bool logging_ = true;
};

}  // namespace dfoto
