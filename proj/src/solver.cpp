#include "dfoto/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "dfoto/errors.hpp"
#include "dfoto/kkt_system.hpp"
#include "dfoto/trust_region.hpp"

namespace dfoto {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

SolverConfig SolverConfig::resolved(Eigen::Index dim) const {
  SolverConfig c = *this;
  if (c.n == 0) c.n = dim;
  if (c.n != dim || c.n < 1) throw std::invalid_argument("SolverConfig: dimension mismatch");
  if (c.m == 0) c.m = 2 * c.n + 1;
  if (!InterpolationSet::size_admissible(c.n, c.m)) {
    throw std::invalid_argument("SolverConfig: m must satisfy n+2 <= m <= (n+1)(n+2)/2");
  }
  if (!(c.rho_end > 0.0) || !(c.rho_end <= c.rho_beg)) {
    throw std::invalid_argument("SolverConfig: need 0 < rho_end <= rho_beg");
  }
  if (c.max_nf < c.m) throw std::invalid_argument("SolverConfig: max_nf below m");
  if (c.sigma < 0.0) throw std::invalid_argument("SolverConfig: sigma must be nonnegative");
  return c;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::rho_converged: return "rho_converged";
    case Termination::max_nf: return "max_nf";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

std::string to_string(UpdateMode mode) {
  return mode == UpdateMode::trans ? "trans" : "plain";
}

std::string to_string(DropRule rule) {
  return rule == DropRule::distance ? "distance" : "value";
}

Matrix initial_points(const Point& x_start, double rho, Eigen::Index m) {
  const Eigen::Index n = x_start.size();
  Matrix pts(n, m);
  pts.col(0) = x_start;
  Eigen::Index j = 1;
  for (Eigen::Index i = 0; i < n && j < m; ++i, ++j) {
    pts.col(j) = x_start;
    pts(i, j) += rho;
  }
  for (Eigen::Index i = 0; i < n && j < m; ++i, ++j) {
    pts.col(j) = x_start;
    pts(i, j) -= rho;
  }
  for (Eigen::Index a = 0; a < n && j < m; ++a) {
    for (Eigen::Index b = a + 1; b < n && j < m; ++b, ++j) {
      pts.col(j) = x_start;
      pts(a, j) += rho;
      pts(b, j) += rho;
    }
  }
  return pts;
}

std::pair<InterpolationSet, QuadraticModel> initialize(const SolverConfig& config,
                                                       BatchOracle& oracle, const Point& x_start) {
  const SolverConfig c = config.resolved(x_start.size());
  const Matrix pts = initial_points(x_start, c.rho_beg, c.m);
  const Vector values = oracle.query_batch(pts, oracle.last_step() + 1);
  InterpolationSet set(pts, x_start, values, oracle.last_step());
  QuadraticModel q = least_frobenius_model(QuadraticModel(Point(x_start)), set, values, c.sigma);
  return {std::move(set), std::move(q)};
}

namespace {

class Loop {
 public:
  Loop(const SolverConfig& config, BatchOracle& oracle) : c_(config), oracle_(oracle) {}

  SolverResult run(const Point& x_start) {
    std::tie(set_, q_) = initialize(c_, oracle_, x_start);
    distinct_nf_ = c_.m;
    state_.rho = c_.rho_beg;
    state_.delta = c_.rho_beg;
    state_.rho_end = c_.rho_end;
    state_.delta_max = c_.delta_max_factor * c_.rho_beg;
    record(StepKind::initial, 0.0, kNaN, false, -1);

    std::optional<Termination> done;
    while (!done) done = iterate();

    SolverResult out;
    out.x_best = set_.opt_point();
    out.f_best_true = oracle_.true_value(out.x_best);
    out.history = std::move(history_);
    out.termination = *done;
    out.nf = oracle_.nf() - nf_offset_;
    out.distinct_nf = distinct_nf_;
    out.iterations = iterations_;
    out.final_delta = state_.delta;
    out.final_rho = state_.rho;
    return out;
  }

  void set_nf_offset(std::int64_t v) { nf_offset_ = v; }

 private:
  std::int64_t nf() const { return oracle_.nf() - nf_offset_; }
  bool budget_exhausted() const { return nf() + c_.m > c_.max_nf; }

  const KktSystem& system() {
    if (!sys_) sys_ = KktSystem::assemble(set_, c_.sigma);
    return *sys_;
  }

  void record(StepKind kind, double step_norm, double ratio, bool accepted, Eigen::Index drop) {
    if (!c_.record_history) return;
    IterationRecord r;
    r.iteration = iterations_;
    r.nf = nf();
    r.delta = state_.delta;
    r.rho = state_.rho;
    r.step_norm = step_norm;
    r.ratio = ratio;
    r.accepted = accepted;
    r.drop_index = drop;
    r.f_best_true = oracle_.true_value(set_.opt_point());
    r.kind = kind;
    history_.push_back(r);
  }

  // Queries `next` (x_opt's slot untouched, slot t new), updates the model, and
  // returns the value vector used for the update.
  Vector query_and_update(InterpolationSet& next, const KktSystem& next_sys, Eigen::Index t) {
    const Vector batch = oracle_.query_batch(next.points(), oracle_.last_step() + 1);
    ++iterations_;
    ++distinct_nf_;
    Vector v;
    if (c_.mode == UpdateMode::trans) {
      v = batch;
    } else {
      v = set_.values();
      v[t] = batch[t];
    }
    const UpdateInputs in{q_, next, v, set_.values(), t, c_.mode};
    q_ = update(in, next_sys);
    next.set_values(v, oracle_.last_step());
    next.set_opt_index(argmin_index(v));
    return v;
  }

  // One geometry-improving replacement. Returns a termination if it cannot proceed.
  std::optional<Termination> geometry_step(GeometryProposal prop) {
    for (int attempt = 0;; ++attempt) {
      if (budget_exhausted()) return Termination::max_nf;
      InterpolationSet next = set_;
      next.replace_point(prop.index, prop.point);
      try {
        KktSystem next_sys = KktSystem::assemble(next, c_.sigma);
        query_and_update(next, next_sys, prop.index);
        set_ = std::move(next);
        sys_ = std::move(next_sys);
        failures_ = 0;
        record(StepKind::geometry, (prop.point - set_.opt_point()).norm(), kNaN,
               set_.opt_index() == prop.index, prop.index);
        maybe_shift_base();
        return std::nullopt;
      } catch (const PoisednessError&) {
        if (++failures_ >= c_.max_consecutive_failures) return Termination::stalled;
        prop = perturbation_proposal(set_, state_.delta, cycle_);
      }
    }
  }

  // Geometry first; when the set is already adequate, the rho logic decides.
  std::optional<Termination> improve_or_reduce(double step_norm) {
    GeometryProposal prop;
    try {
      prop = improve_geometry(set_, system(), state_.delta, c_.geometry);
    } catch (const PoisednessError&) {
      prop = perturbation_proposal(set_, state_.delta, cycle_);
    }
    if (prop.action != GeometryAction::poised) return geometry_step(prop);
    const RhoCheck check = check_rho_termination(state_, step_norm);
    if (check.decision == RhoDecision::terminate) return Termination::rho_converged;
    state_ = check.next;
    return std::nullopt;
  }

  void maybe_shift_base() {
    const Point x_opt = set_.opt_point();
    if ((x_opt - set_.base()).norm() < 10.0 * state_.delta) return;
    set_.set_base(x_opt);
    q_ = q_.rebased(x_opt);
    sys_.reset();
  }

  std::optional<Termination> iterate() {
    const Point x_opt = set_.opt_point();
    const SubproblemResult sub = solve_subproblem(q_, x_opt, state_.delta);
    const double dnorm = sub.d.norm();
    if (check_rho_termination(state_, dnorm).decision != RhoDecision::proceed) {
      return improve_or_reduce(dnorm);
    }

    const Point x_new = x_opt + sub.d;
    Eigen::Index t = -1;
    std::optional<KktSystem> next_sys;
    InterpolationSet next = set_;
    try {
      t = select_drop(set_, system(), x_new, state_.delta, c_.drop_rule);
      next.replace_point(t, x_new);
      next_sys = KktSystem::assemble(next, c_.sigma);
    } catch (const PoisednessError&) {
      if (++failures_ >= c_.max_consecutive_failures) return Termination::stalled;
      return geometry_step(perturbation_proposal(set_, state_.delta, cycle_));
    }
    if (budget_exhausted()) return Termination::max_nf;

    const Eigen::Index opt_old = set_.opt_index();
    const Vector v = query_and_update(next, *next_sys, t);
    const double ratio =
        sub.predicted_reduction > 0.0 ? (v[opt_old] - v[t]) / sub.predicted_reduction
                                      : -std::numeric_limits<double>::infinity();
    set_ = std::move(next);
    sys_ = std::move(next_sys);
    failures_ = 0;

    const double delta_before = state_.delta;
    state_ = update_radius(state_, ratio, dnorm);
    record(StepKind::trial, dnorm, ratio, set_.opt_index() == t, t);
    maybe_shift_base();

    if (ratio >= RadiusPolicy::kShrinkBelow) return std::nullopt;
    if (delta_before <= state_.rho) return improve_or_reduce(0.0);
    // Far points spoil the model long before delta reaches rho.
    if (const auto far = far_point(set_, system(), state_.delta, c_.geometry)) {
      return geometry_step(*far);
    }
    return std::nullopt;
  }

  SolverConfig c_;
  BatchOracle& oracle_;
  InterpolationSet set_;
  QuadraticModel q_;
  std::optional<KktSystem> sys_;
  RadiusState state_;
  std::vector<IterationRecord> history_;
  std::int64_t iterations_ = 0;
  std::int64_t distinct_nf_ = 0;
  std::int64_t nf_offset_ = 0;
  std::int64_t cycle_ = 0;
  int failures_ = 0;
};

}  // namespace

SolverResult minimize(const SolverConfig& config, BatchOracle& oracle, const Point& x_start) {
  if (!x_start.allFinite()) throw std::invalid_argument("minimize: non-finite start point");
  Loop loop(config.resolved(x_start.size()), oracle);
  loop.set_nf_offset(oracle.nf());
  return loop.run(x_start);
}

void write_run_csv(std::ostream& os, const SolverResult& result) {
  os << "iteration,NF,delta,rho,step_norm,ratio,accepted,drop_index,f_best_true\n";
  os << std::setprecision(17);
  for (const IterationRecord& r : result.history) {
    os << r.iteration << ',' << r.nf << ',' << r.delta << ',' << r.rho << ',' << r.step_norm
       << ',' << r.ratio << ',' << (r.accepted ? 1 : 0) << ',' << r.drop_index << ','
       << r.f_best_true << '\n';
  }
}

}  // namespace dfoto
