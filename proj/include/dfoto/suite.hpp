#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfoto/problems.hpp"
#include "dfoto/profiles.hpp"
#include "dfoto/solver.hpp"

namespace dfoto {

/// A named solver variant. "clean" runs trans mode under the identity schedule.
struct SolverSpec {
  std::string name;
  UpdateMode mode = UpdateMode::trans;
  std::string schedule = "identity";
};

/// trans/plain with `schedule`, or clean (identity). Other names throw.
SolverSpec solver_spec(const std::string& mode, const std::string& schedule);

struct RunOutcome {
  std::string problem;
  Eigen::Index n = 0;
  std::string solver;
  std::uint64_t seed = 0;
  double f_start = 0.0;
  bool completed = false;
  std::string error;
  SolverResult result;
};

/// Solves one problem; failures are captured in the outcome, never thrown.
RunOutcome run_one(const TestProblem& problem, const SolverSpec& spec, std::uint64_t seed,
                   const SolverConfig& base);

/// Runs jobs on at most `threads` workers (0: hardware concurrency). Results keep
/// the job order.
std::vector<RunOutcome> run_parallel(const std::vector<std::function<RunOutcome()>>& jobs,
                                     unsigned threads);

struct SuiteConfig {
  std::vector<std::string> problems;
  std::vector<Eigen::Index> dims;
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> taus{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  SolverConfig base;
  unsigned threads = 0;
  std::optional<std::filesystem::path> out_dir;
};

struct SuiteResult {
  std::vector<RunOutcome> runs;
  std::vector<ProfileTable> tables;  // one per tau
};

/// Every (problem, n, solver, seed) run, shared start points, per-run CSVs in
/// out_dir, plus profile.csv and summary.csv there.
SuiteResult run_suite(const SuiteConfig& config);

/// "PROBLEM_nN__SOLVER__seedS.csv".
std::string run_file_name(const std::string& problem, Eigen::Index n, const std::string& solver,
                          std::uint64_t seed);

struct RunFileKey {
  std::string problem;
  Eigen::Index n = 0;
  std::string solver;
  std::uint64_t seed = 0;
};
std::optional<RunFileKey> parse_run_file_name(const std::string& file_name);

/// History rows (NF and f_best_true columns are the ones profiles need).
std::vector<IterationRecord> read_run_csv(std::istream& is);

/// Problem instances are (problem, n, seed); f_start comes from the problem's
/// start point and f_best from its known optimum, else the best value any run found.
ProfileTable build_profile_table(const std::vector<RunOutcome>& runs, double tau);

/// Profile tables from a directory of run CSVs.
std::vector<ProfileTable> profile_from_directory(const std::filesystem::path& dir,
                                                 const std::vector<double>& taus);

/// Columns solver, tau, alpha, pi; one row per breakpoint plus alpha = 1 and the
/// success fraction at alpha = inf.
void write_profile_csv(std::ostream& os, const std::vector<ProfileTable>& tables);

struct SensitivityResult {
  ProfileTable table;                              // std(NF) per solver x problem
  std::map<std::string, std::vector<double>> nf;   // "solver/problem" -> N per permutation
  std::vector<std::vector<Eigen::Index>> permutations;
};

/// M >= 2 permuted copies min f(P_i x) from P_i' x_start; N_i is the NF to accuracy
/// tau (+inf on failure, which makes std infinite).
SensitivityResult sensitivity_profile(const std::vector<TestProblem>& problems,
                                      const std::vector<SolverSpec>& solvers, int M,
                                      std::uint64_t seed, double tau, const SolverConfig& base,
                                      unsigned threads = 0);

}  // namespace dfoto
