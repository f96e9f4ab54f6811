#include "dfoto/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dfoto/errors.hpp"

namespace dfoto {

SolverSpec solver_spec(const std::string& mode, const std::string& schedule) {
  if (mode == "clean") return {"clean", UpdateMode::trans, "identity"};
  if (mode == "trans") return {"trans", UpdateMode::trans, schedule};
  if (mode == "plain") return {"plain", UpdateMode::plain, schedule};
  throw std::invalid_argument("unknown mode: " + mode);
}

RunOutcome run_one(const TestProblem& problem, const SolverSpec& spec, std::uint64_t seed,
                   const SolverConfig& base) {
  RunOutcome out;
  out.problem = problem.name;
  out.n = problem.n;
  out.solver = spec.name;
  out.seed = seed;
  try {
    out.f_start = problem.objective(problem.x_start);
    BatchOracle oracle(problem.objective, parse_schedule(spec.schedule, seed));
    oracle.set_logging(false);
    SolverConfig cfg = base;
    cfg.n = 0;
    cfg.m = base.m;
    cfg.mode = spec.mode;
    cfg.seed = seed;
    out.result = minimize(cfg, oracle, problem.x_start);
    out.completed = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<RunOutcome> run_parallel(const std::vector<std::function<RunOutcome()>>& jobs,
                                     unsigned threads) {
  std::vector<RunOutcome> results(jobs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = jobs[i]();
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return results;
}

std::string run_file_name(const std::string& problem, Eigen::Index n, const std::string& solver,
                          std::uint64_t seed) {
  std::ostringstream os;
  os << problem << "_n" << n << "__" << solver << "__seed" << seed << ".csv";
  return os.str();
}

std::optional<RunFileKey> parse_run_file_name(const std::string& file_name) {
  const std::string suffix = ".csv";
  if (file_name.size() <= suffix.size() ||
      file_name.compare(file_name.size() - suffix.size(), suffix.size(), suffix) != 0) {
    return std::nullopt;
  }
  const std::string stem = file_name.substr(0, file_name.size() - suffix.size());
  const auto a = stem.find("__");
  const auto b = stem.rfind("__");
  if (a == std::string::npos || a == b) return std::nullopt;
  const std::string head = stem.substr(0, a);
  const std::string solver = stem.substr(a + 2, b - a - 2);
  const std::string tail = stem.substr(b + 2);
  const auto np = head.rfind("_n");
  if (np == std::string::npos || tail.rfind("seed", 0) != 0 || solver.empty()) return std::nullopt;
  try {
    RunFileKey key;
    key.problem = head.substr(0, np);
    std::size_t used = 0;
    key.n = std::stol(head.substr(np + 2), &used);
    if (used != head.size() - np - 2) return std::nullopt;
    key.solver = solver;
    key.seed = std::stoull(tail.substr(4), &used);
    if (used != tail.size() - 4) return std::nullopt;
    return key;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<IterationRecord> read_run_csv(std::istream& is) {
  std::vector<IterationRecord> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw std::runtime_error("read_run_csv: malformed row: " + line);
    IterationRecord r;
    r.iteration = std::stoll(cells[0]);
    r.nf = std::stoll(cells[1]);
    r.delta = std::stod(cells[2]);
    r.rho = std::stod(cells[3]);
    r.step_norm = std::stod(cells[4]);
    r.ratio = cells[5] == "nan" || cells[5] == "-nan" ? std::nan("") : std::stod(cells[5]);
    r.accepted = cells[6] == "1";
    r.drop_index = std::stol(cells[7]);
    r.f_best_true = std::stod(cells[8]);
    out.push_back(r);
  }
  return out;
}

ProfileTable build_profile_table(const std::vector<RunOutcome>& runs, double tau) {
  ProfileTable table;
  table.tau = tau;
  std::map<std::string, std::size_t> solver_index;
  std::map<std::string, std::size_t> problem_index;
  std::map<std::string, double> f_best;
  std::map<std::string, double> f_start;

  auto instance = [](const RunOutcome& r) {
    return r.problem + "_n" + std::to_string(r.n) + "_seed" + std::to_string(r.seed);
  };
  for (const RunOutcome& r : runs) {
    if (!solver_index.count(r.solver)) {
      solver_index[r.solver] = table.solvers.size();
      table.solvers.push_back(r.solver);
    }
    const std::string key = instance(r);
    if (!problem_index.count(key)) {
      problem_index[key] = table.problems.size();
      table.problems.push_back(key);
      const TestProblem p = make_problem(r.problem, r.n);
      f_start[key] = p.objective(p.x_start);
      f_best[key] = p.f_best_known.value_or(kInf);
    }
    if (!make_problem(r.problem, r.n).f_best_known) {
      for (const IterationRecord& rec : r.result.history) {
        f_best[key] = std::min(f_best[key], rec.f_best_true);
      }
    }
  }

  table.measure = Matrix::Constant(static_cast<Eigen::Index>(table.solvers.size()),
                                   static_cast<Eigen::Index>(table.problems.size()), kInf);
  for (const RunOutcome& r : runs) {
    if (!r.completed && r.result.history.empty()) continue;
    const std::string key = instance(r);
    const auto s = static_cast<Eigen::Index>(solver_index[r.solver]);
    const auto p = static_cast<Eigen::Index>(problem_index[key]);
    try {
      const auto nf = evaluations_to_accuracy(r.result.history, f_start[key], f_best[key], tau);
      if (nf) table.measure(s, p) = static_cast<double>(*nf);
    } catch (const DegenerateProblemError&) {
      // The start point is already best known: every solver succeeds immediately.
      table.measure(s, p) = r.result.history.empty() ? kInf : r.result.history.front().nf;
    }
  }
  return table;
}

std::vector<ProfileTable> profile_from_directory(const std::filesystem::path& dir,
                                                 const std::vector<double>& taus) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunOutcome> runs;
  for (const auto& path : files) {
    const auto key = parse_run_file_name(path.filename().string());
    if (!key) continue;
    std::ifstream in(path);
    RunOutcome r;
    r.problem = key->problem;
    r.n = key->n;
    r.solver = key->solver;
    r.seed = key->seed;
    r.result.history = read_run_csv(in);
    r.completed = true;
    runs.push_back(std::move(r));
  }
  if (runs.empty()) throw std::runtime_error("no run files found in " + dir.string());
  std::vector<ProfileTable> tables;
  for (double tau : taus) tables.push_back(build_profile_table(runs, tau));
  return tables;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileTable>& tables) {
  os << "solver,tau,alpha,pi\n" << std::setprecision(17);
  for (const ProfileTable& table : tables) {
    for (const ProfileCurve& c : performance_profile(table)) {
      os << c.solver << ',' << table.tau << ',' << 1 << ',' << c.at(1.0) << '\n';
      for (std::size_t i = 0; i < c.breakpoints.size(); ++i) {
        if (c.breakpoints[i] == 1.0) continue;
        os << c.solver << ',' << table.tau << ',' << c.breakpoints[i] << ',' << c.values[i] << '\n';
      }
      os << c.solver << ',' << table.tau << ",inf," << c.success_fraction << '\n';
    }
  }
}

namespace {

void write_summary_csv(std::ostream& os, const std::vector<RunOutcome>& runs) {
  os << "problem,n,solver,seed,completed,termination,NF,distinct_NF,iterations,f_start,"
        "f_best_true,error\n"
     << std::setprecision(17);
  for (const RunOutcome& r : runs) {
    os << r.problem << ',' << r.n << ',' << r.solver << ',' << r.seed << ','
       << (r.completed ? 1 : 0) << ',' << (r.completed ? to_string(r.result.termination) : "")
       << ',' << r.result.nf << ',' << r.result.distinct_nf << ',' << r.result.iterations << ','
       << r.f_start << ',' << r.result.f_best_true << ',' << r.error << '\n';
  }
}

}  // namespace

SuiteResult run_suite(const SuiteConfig& config) {
  std::vector<std::function<RunOutcome()>> jobs;
  for (const std::string& name : config.problems) {
    for (Eigen::Index n : config.dims) {
      const TestProblem problem = make_problem(name, n);
      for (const SolverSpec& spec : config.solvers) {
        for (std::uint64_t seed : config.seeds) {
          jobs.push_back([problem, spec, seed, &config] {
            return run_one(problem, spec, seed, config.base);
          });
        }
      }
    }
  }
  SuiteResult out;
  out.runs = run_parallel(jobs, config.threads);
  for (double tau : config.taus) out.tables.push_back(build_profile_table(out.runs, tau));

  if (config.out_dir) {
    std::filesystem::create_directories(*config.out_dir);
    for (const RunOutcome& r : out.runs) {
      if (!r.completed) continue;
      std::ofstream f(*config.out_dir / run_file_name(r.problem, r.n, r.solver, r.seed));
      write_run_csv(f, r.result);
    }
    std::ofstream profile(*config.out_dir / "profile.csv");
    write_profile_csv(profile, out.tables);
    std::ofstream summary(*config.out_dir / "summary.csv");
    write_summary_csv(summary, out.runs);
  }
  return out;
}

SensitivityResult sensitivity_profile(const std::vector<TestProblem>& problems,
                                      const std::vector<SolverSpec>& solvers, int M,
                                      std::uint64_t seed, double tau, const SolverConfig& base,
                                      unsigned threads) {
  if (M < 2) throw std::invalid_argument("sensitivity_profile: M must be at least 2");
  if (problems.empty() || solvers.empty()) {
    throw std::invalid_argument("sensitivity_profile: need problems and solvers");
  }
  SensitivityResult out;
  out.table.tau = tau;
  for (const SolverSpec& s : solvers) out.table.solvers.push_back(s.name);
  for (const TestProblem& p : problems) {
    out.table.problems.push_back(p.name + "_n" + std::to_string(p.n));
  }
  out.table.measure = Matrix::Constant(static_cast<Eigen::Index>(solvers.size()),
                                       static_cast<Eigen::Index>(problems.size()), kInf);

  for (std::size_t pi = 0; pi < problems.size(); ++pi) {
    const TestProblem& problem = problems[pi];
    std::vector<std::vector<Eigen::Index>> perms;
    for (int i = 0; i < M; ++i) {
      perms.push_back(random_permutation(problem.n, CounterRng::hash(seed, pi, static_cast<std::uint64_t>(i))));
    }
    if (pi == 0) out.permutations = perms;
    const double f0 = problem.objective(problem.x_start);
    const double fb = problem.f_best_known.value_or(-kInf);

    for (std::size_t si = 0; si < solvers.size(); ++si) {
      std::vector<std::function<RunOutcome()>> jobs;
      for (const auto& perm : perms) {
        jobs.push_back([&, perm] { return run_one(permuted(problem, perm), solvers[si], seed, base); });
      }
      const std::vector<RunOutcome> runs = run_parallel(jobs, threads);
      double best = fb;
      if (!std::isfinite(best)) {
        for (const RunOutcome& r : runs) {
          for (const IterationRecord& rec : r.result.history) best = std::min(best, rec.f_best_true);
        }
      }
      std::vector<double> nf;
      for (const RunOutcome& r : runs) {
        double v = kInf;
        if (r.completed && best < f0) {
          if (auto hit = evaluations_to_accuracy(r.result.history, f0, best, tau)) v = static_cast<double>(*hit);
        }
        nf.push_back(v);
      }
      out.nf[solvers[si].name + "/" + out.table.problems[pi]] = nf;
      const bool all_ok = std::all_of(nf.begin(), nf.end(), [](double v) { return std::isfinite(v); });
      if (all_ok) {
        out.table.measure(static_cast<Eigen::Index>(si), static_cast<Eigen::Index>(pi)) =
            nf_statistics(nf).stddev;
      }
    }
  }
  return out;
}

}  // namespace dfoto
