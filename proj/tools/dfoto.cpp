// dfoto: benchmark runner and theory checks for the transformed-objective
// trust-region solver.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfoto/problems.hpp"
#include "dfoto/profiles.hpp"
#include "dfoto/solver.hpp"
#include "dfoto/suite.hpp"
#include "dfoto/transform_analysis.hpp"
#include "verify.hpp"

namespace {

using namespace dfoto;
using nlohmann::json;

std::vector<double> parse_taus(const std::string& text) {
  // "1e-1..1e-6" expands by decades; otherwise a comma-separated list.
  std::vector<double> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const double hi = std::stod(text.substr(0, dots));
    const double lo = std::stod(text.substr(dots + 2));
    for (double t = hi; t >= lo * (1 - 1e-9); t /= 10.0) out.push_back(t);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonOptions {
  double rho_beg = 1e-1;
  double rho_end = 1e-8;
  std::int64_t max_nf = 10000;
  long m = 0;
  std::string drop = "distance";
  double sigma = 0.0;

  void add(CLI::App* app) {
    app->add_option("--rhobeg", rho_beg, "Initial radius lower bound")->capture_default_str();
    app->add_option("--rhoend", rho_end, "Final radius lower bound")->capture_default_str();
    app->add_option("--maxfun", max_nf, "Evaluation budget, re-queried points included")
        ->capture_default_str();
    app->add_option("--npt", m, "Interpolation points (0: 2n+1)")->capture_default_str();
    app->add_option("--drop", drop, "Drop rule")->check(CLI::IsMember({"distance", "value"}))
        ->capture_default_str();
    app->add_option("--sigma", sigma, "Gradient weight in the model update")->capture_default_str();
  }

  SolverConfig config() const {
    SolverConfig c;
    c.rho_beg = rho_beg;
    c.rho_end = rho_end;
    c.max_nf = max_nf;
    c.m = m;
    c.sigma = sigma;
    c.drop_rule = drop == "value" ? DropRule::value : DropRule::distance;
    return c;
  }
};

int print_checks(const std::string& suite, const std::vector<verify::CheckLine>& lines) {
  int failed = 0;
  for (const auto& l : lines) {
    std::cout << (l.passed ? "PASS" : "FAIL") << "  [" << suite << "] " << l.name << "  ("
              << l.detail << ")\n";
    failed += l.passed ? 0 : 1;
  }
  return failed;
}

json mop_json(const MopSystem& sys) {
  const SolutionSpace space = solution_space(sys);
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json rows = json::array();
  for (Eigen::Index i = 0; i < sys.coefficient_matrix.rows(); ++i) {
    rows.push_back(vec(sys.coefficient_matrix.row(i).transpose()));
  }
  json basis = json::array();
  for (Eigen::Index j = 0; j < space.basis.cols(); ++j) basis.push_back(vec(space.basis.col(j)));
  json points = json::array();
  for (Eigen::Index j = 0; j < sys.set.size(); ++j) points.push_back(vec(sys.set.point(j)));
  return {{"points", points},
          {"x_opt", vec(sys.x_opt)},
          {"d_star", vec(sys.d_star)},
          {"delta", sys.delta},
          {"coefficient_matrix", rows},
          {"offset", vec(sys.offset)},
          {"rank", space.rank},
          {"full_row_rank", space.full_row_rank},
          {"particular", vec(space.particular)},
          {"null_space_basis", basis}};
}

MopSystem mop_from_json(const json& in) {
  const auto pts = in.at("points").get<std::vector<std::vector<double>>>();
  std::vector<Point> points;
  for (const auto& p : pts) points.push_back(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
  auto vec = [&](const char* key) {
    const auto v = in.at(key).get<std::vector<double>>();
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  const Point x_opt = vec("x_opt");
  const auto& q = in.at("model");
  const auto qb = q.at("base").get<std::vector<double>>();
  const auto qg = q.at("gradient").get<std::vector<double>>();
  const auto qh = q.at("hessian").get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(qb.size());
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = qh.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
  }
  const QuadraticModel model(Eigen::Map<const Vector>(qb.data(), n), q.at("constant").get<double>(),
                             Eigen::Map<const Vector>(qg.data(), n), h);
  return build_mop_system(InterpolationSet(points, x_opt), model, x_opt, vec("d_star"),
                          in.at("delta").get<double>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free trust-region solver for step-wise transformed objectives"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one test problem");
  std::string problem = "QUARTICSPHERE";
  long n = 10;
  std::string mode = "trans";
  std::string schedule = "affine:C=100,b=100/k,u=1/k";
  std::uint64_t seed = 1;
  std::string out_path;
  std::string log_path;
  CommonOptions common;
  solve->add_option("--problem", problem)->capture_default_str();
  solve->add_option("--n", n)->capture_default_str();
  solve->add_option("--mode", mode)->check(CLI::IsMember({"trans", "plain", "clean"}))->capture_default_str();
  solve->add_option("--schedule", schedule)->capture_default_str();
  solve->add_option("--seed", seed)->capture_default_str();
  solve->add_option("--out", out_path, "Run CSV");
  solve->add_option("--log", log_path, "Per-evaluation oracle log CSV");
  common.add(solve);

  // suite
  auto* suite = app.add_subcommand("suite", "Run problems x modes x seeds and write run CSVs");
  std::string problems = "all";
  std::string dims = "10";
  std::string modes = "clean,trans,plain";
  std::string seeds = "1";
  std::string taus = "1e-1..1e-6";
  std::string out_dir = "runs";
  unsigned threads = 0;
  CommonOptions suite_common;
  suite->add_option("--problems", problems, "Comma-separated names or 'all'")->capture_default_str();
  suite->add_option("--n", dims, "Comma-separated dimensions")->capture_default_str();
  suite->add_option("--modes", modes)->capture_default_str();
  suite->add_option("--schedule", schedule)->capture_default_str();
  suite->add_option("--seeds", seeds)->capture_default_str();
  suite->add_option("--tau", taus)->capture_default_str();
  suite->add_option("--out", out_dir)->capture_default_str();
  suite->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
  suite_common.add(suite);

  // profile
  auto* profile = app.add_subcommand("profile", "Performance profiles from a directory of run CSVs");
  std::string in_dir = "runs";
  std::string profile_out = "profile.csv";
  profile->add_option("--tau", taus)->capture_default_str();
  profile->add_option("--in", in_dir)->capture_default_str();
  profile->add_option("--out", profile_out)->capture_default_str();

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "Sensitivity profile over random coordinate permutations");
  int M = 100;
  double sens_tau = 1e-4;
  std::string sens_out = "sens.csv";
  std::string sens_modes = "clean,trans";
  CommonOptions sens_common;
  sens->add_option("--problem", problem)->capture_default_str();
  sens->add_option("--n", n)->capture_default_str();
  sens->add_option("--M", M)->capture_default_str();
  sens->add_option("--tau", sens_tau)->capture_default_str();
  sens->add_option("--modes", sens_modes)->capture_default_str();
  sens->add_option("--schedule", schedule)->capture_default_str();
  sens->add_option("--seed", seed)->capture_default_str();
  sens->add_option("--threads", threads)->capture_default_str();
  sens->add_option("--out", sens_out)->capture_default_str();
  sens_common.add(sens);

  // verify
  auto* ver = app.add_subcommand("verify", "Run a theory-verification suite");
  std::string which = "example21";
  int instances = 50;
  ver->add_option("--suite", which)->check(CLI::IsMember({"identities", "mop", "example21", "all"}))
      ->capture_default_str();
  ver->add_option("--instances", instances)->capture_default_str();
  ver->add_option("--seed", seed)->capture_default_str();

  // mop
  auto* mop = app.add_subcommand("mop", "Print model optimality conditions as JSON");
  std::string mop_in;
  mop->add_option("--input", mop_in, "JSON with points, x_opt, d_star, delta, model");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const TestProblem p = make_problem(problem, n);
      BatchOracle oracle(p.objective, parse_schedule(mode == "clean" ? "identity" : schedule, seed));
      oracle.set_logging(!log_path.empty());
      SolverConfig cfg = common.config();
      cfg.mode = mode == "plain" ? UpdateMode::plain : UpdateMode::trans;
      cfg.seed = seed;
      const SolverResult r = minimize(cfg, oracle, p.x_start);
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        write_run_csv(f, r);
      }
      if (!log_path.empty()) {
        std::ofstream f(log_path);
        oracle.log().write_csv(f);
      }
      std::cout << std::setprecision(10) << p.name << " n=" << n << " mode=" << mode
                << " termination=" << to_string(r.termination) << " NF=" << r.nf
                << " distinct_NF=" << r.distinct_nf << " iterations=" << r.iterations
                << " f_best_true=" << r.f_best_true << '\n';
      return 0;
    }
    if (*suite) {
      SuiteConfig cfg;
      cfg.problems = problems == "all" ? problem_names() : split(problems);
      for (const auto& d : split(dims)) cfg.dims.push_back(std::stol(d));
      for (const auto& md : split(modes)) cfg.solvers.push_back(solver_spec(md, schedule));
      cfg.seeds.clear();
      for (const auto& s : split(seeds)) cfg.seeds.push_back(std::stoull(s));
      cfg.taus = parse_taus(taus);
      cfg.base = suite_common.config();
      cfg.threads = threads;
      cfg.out_dir = out_dir;
      const SuiteResult r = run_suite(cfg);
      int incomplete = 0;
      for (const auto& run : r.runs) {
        if (!run.completed) {
          ++incomplete;
          std::cerr << "run failed: " << run.problem << " " << run.solver << ": " << run.error << '\n';
        }
      }
      std::cout << r.runs.size() - incomplete << "/" << r.runs.size() << " runs completed; output in "
                << out_dir << '\n';
      return incomplete == 0 ? 0 : 1;
    }
    if (*profile) {
      const auto tables = profile_from_directory(in_dir, parse_taus(taus));
      std::ofstream f(profile_out);
      write_profile_csv(f, tables);
      std::cout << "wrote " << profile_out << '\n';
      return 0;
    }
    if (*sens) {
      std::vector<SolverSpec> specs;
      for (const auto& md : split(sens_modes)) specs.push_back(solver_spec(md, schedule));
      const SensitivityResult r = sensitivity_profile({make_problem(problem, n)}, specs, M, seed,
                                                      sens_tau, sens_common.config(), threads);
      std::ofstream f(sens_out);
      write_profile_csv(f, {r.table});
      for (Eigen::Index s = 0; s < r.table.measure.rows(); ++s) {
        std::cout << r.table.solvers[static_cast<std::size_t>(s)] << " std(NF)=" << r.table.measure(s, 0) << '\n';
      }
      return 0;
    }
    if (*ver) {
      int failed = 0;
      if (which == "example21" || which == "all") failed += print_checks("example21", verify::example21());
      if (which == "identities" || which == "all") failed += print_checks("identities", verify::identities(seed, instances));
      if (which == "mop" || which == "all") failed += print_checks("mop", verify::mop(seed, instances));
      return failed == 0 ? 0 : 1;
    }
    if (*mop) {
      MopSystem sys;
      if (mop_in.empty()) {
        sys = verify::example21_system();
      } else {
        std::ifstream f(mop_in);
        sys = mop_from_json(json::parse(f));
      }
      std::cout << mop_json(sys).dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
