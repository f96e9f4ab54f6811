#include "dfoto/transform_oracle.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dfoto/errors.hpp"

namespace dfoto {

Transformation Transformation::callable(std::function<double(double)> fn, std::string label) {
  Transformation t(Kind::callable, std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN());
  t.fn_ = std::move(fn);
  t.label_ = std::move(label);
  return t;
}

double Transformation::operator()(double y) const {
  switch (kind_) {
    case Kind::identity:
      return y;
    case Kind::affine:
      return a_ * y + b_;
    case Kind::translation:
      return y + b_;
    case Kind::callable:
      return fn_(y);
  }
  return y;
}

bool Transformation::known_positive_monotonic() const {
  return kind_ == Kind::identity || kind_ == Kind::translation ||
         (kind_ == Kind::affine && a_ > 0.0);
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t CounterRng::hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t x = splitmix(seed);
  x = splitmix(x ^ (stream * 0xD1B54A32D192ED03ULL));
  x = splitmix(x ^ (counter * 0xAEF17502108EF2D9ULL));
  return x;
}

std::uint64_t CounterRng::next_u64() { return hash(seed_, stream_, counter_++); }

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double laplace_from_uniform(double b, double u) {
  if (!(b > 0.0)) throw std::invalid_argument("laplace: scale must be positive");
  if (u == 0.0) return 0.0;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  return -b * sign * std::log1p(-2.0 * std::abs(u));
}

double sample_laplace(double b, CounterRng& rng) {
  if (!(b > 0.0)) throw std::invalid_argument("sample_laplace: scale must be positive");
  return laplace_from_uniform(b, rng.uniform() - 0.5);
}

double sample_uniform(double halfwidth, CounterRng& rng) {
  if (!(halfwidth > 0.0 && halfwidth < 1.0)) {
    throw std::invalid_argument("sample_uniform: half-width must lie in (0, 1)");
  }
  return halfwidth * (2.0 * rng.uniform() - 1.0);
}

double RateFunction::operator()(std::int64_t k) const {
  if (coef == 0.0) return 0.0;
  return coef * std::pow(static_cast<double>(k), power);
}

std::string RateFunction::to_string() const {
  std::ostringstream os;
  os << std::setprecision(17) << coef;
  if (power != 0.0) os << "*k^" << power;
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse number '" + s + "' in '" + context + "'");
  }
  if (used != s.size()) {
    throw std::invalid_argument("trailing characters in '" + s + "' in '" + context + "'");
  }
  return v;
}

}  // namespace

RateFunction parse_rate(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("parse_rate: empty expression");
  if (s == "k") return {1.0, 1.0};
  // coef/k or coef/k^p
  if (auto pos = s.find("/k"); pos != std::string::npos) {
    const double coef = parse_number(s.substr(0, pos), s);
    std::string rest = s.substr(pos + 2);
    double p = 1.0;
    if (!rest.empty()) {
      if (rest[0] != '^') throw std::invalid_argument("parse_rate: bad exponent in '" + s + "'");
      p = parse_number(rest.substr(1), s);
    }
    return {coef, -p};
  }
  // k/denom
  if (s.rfind("k/", 0) == 0) return {1.0 / parse_number(s.substr(2), s), 1.0};
  // coef*k
  if (auto pos = s.find("*k"); pos != std::string::npos && pos + 2 == s.size()) {
    return {parse_number(s.substr(0, pos), s), 1.0};
  }
  return {parse_number(s, s), 0.0};
}

StochasticAffineSchedule::StochasticAffineSchedule(Params params, std::uint64_t seed)
    : params_(params), seed_(seed) {}

double StochasticAffineSchedule::max_halfwidth() { return std::nextafter(1.0, 0.0); }

StochasticAffineSchedule::Draw StochasticAffineSchedule::draw(std::int64_t step) const {
  CounterRng rng(seed_, static_cast<std::uint64_t>(step));
  const double ug = rng.uniform();
  const double ue = rng.uniform();
  Draw d;
  const double u = std::min(params_.uniform_halfwidth(step), max_halfwidth());
  if (u > 0.0) d.gamma = u * (2.0 * ug - 1.0);
  const double b = params_.laplace_scale(step);
  if (b > 0.0) d.eta = laplace_from_uniform(b, ue - 0.5);
  return d;
}

Transformation StochasticAffineSchedule::at(std::int64_t step) const {
  const Draw d = draw(step);
  return Transformation::affine(d.gamma + 1.0, params_.C * d.eta);
}

std::string StochasticAffineSchedule::describe() const {
  std::ostringstream os;
  os << std::setprecision(17) << "affine:C=" << params_.C
     << ",b=" << params_.laplace_scale.to_string() << ",u=" << params_.uniform_halfwidth.to_string();
  return os.str();
}

std::shared_ptr<const TransformationSchedule> parse_schedule(const std::string& text,
                                                             std::uint64_t seed) {
  const std::string s = trim(text);
  if (s == "identity" || s == "none") return std::make_shared<IdentitySchedule>();
  const std::string prefix = "affine:";
  if (s.rfind(prefix, 0) != 0) {
    throw std::invalid_argument("parse_schedule: expected 'identity' or 'affine:...', got '" + s +
                                "'");
  }
  StochasticAffineSchedule::Params params;
  std::stringstream ss(s.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("parse_schedule: bad item '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    if (key == "C") {
      params.C = parse_number(value, item);
    } else if (key == "b") {
      params.laplace_scale = parse_rate(value);
    } else if (key == "u") {
      params.uniform_halfwidth = parse_rate(value);
    } else {
      throw std::invalid_argument("parse_schedule: unknown key '" + key + "'");
    }
  }
  return std::make_shared<StochasticAffineSchedule>(params, seed);
}

void OracleLog::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "step,index";
  const Eigen::Index n = steps.empty() ? 0 : steps.front().points.rows();
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
  os << ",true_value,transformed_value,a,b,nf\n";
  for (const auto& st : steps) {
    std::int64_t nf = st.nf_after - st.points.cols();
    for (Eigen::Index j = 0; j < st.points.cols(); ++j) {
      ++nf;
      os << st.step << ',' << j;
      for (Eigen::Index i = 0; i < st.points.rows(); ++i) os << ',' << st.points(i, j);
      os << ',' << st.true_values[j] << ',' << st.transformed_values[j] << ','
         << st.transform.a() << ',' << st.transform.b() << ',' << nf << '\n';
    }
  }
  os.precision(old);
}

BatchOracle::BatchOracle(Objective f, std::shared_ptr<const TransformationSchedule> schedule)
    : f_(std::move(f)), schedule_(std::move(schedule)) {
  if (!f_) throw std::invalid_argument("BatchOracle: empty objective");
  if (!schedule_) schedule_ = std::make_shared<IdentitySchedule>();
}

Vector BatchOracle::query_batch(const Matrix& points, std::int64_t step) {
  if (points.cols() == 0) throw std::invalid_argument("query_batch: empty batch");
  if (step <= last_step_) {
    throw ProtocolError("query_batch: step " + std::to_string(step) +
                        " does not follow step " + std::to_string(last_step_));
  }
  const Transformation t = schedule_->at(step);
  Vector truth(points.cols());
  Vector out(points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const Point z = points.col(j);
    const double fz = f_(z);
    if (std::isnan(fz)) throw EvaluationError("query_batch: objective returned NaN", z);
    truth[j] = fz;
    out[j] = t(fz);
  }
  last_step_ = step;
  nf_ += points.cols();
  if (logging_) log_.steps.push_back(OracleStep{step, points, t, truth, out, nf_});
  return out;
}

}  // namespace dfoto
