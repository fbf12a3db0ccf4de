#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsefw/solvers.hpp"

namespace sparsefw {

// One solver entry in a benchmark run. algo selects the method; name labels
// the CSV column. mode applies to swfw only; epoch_iters to ragd only (0
// picks the heuristic epoch length); s of 0 means "use the instance nnz".
struct SolverSpec {
  std::string name;
  std::string algo;  // swfw | afw | vfista | ragd
  StepMode mode = StepMode::line_search();
  Eigen::Index s = 0;
  int epoch_iters = 0;
};

// Planted recovery benchmark on the spiked quadratic
// f(x) = (a/2) ||x - x*||^2 + (c/2) (1^T (x - x*))^2 over the l1 ball of the
// planted radius. The minimizer x* has nnz_star entries of magnitude
// radius / nnz_star with random support and signs, so f* = 0.
struct ExperimentConfig {
  Eigen::Index n = 1000;
  double radius = 10.0;
  Eigen::Index nnz_star = 10;
  double a = 1.0;
  double c = 3.0;
  int trials = 10;
  std::uint64_t seed = 1;
  int budget = 3000;
  std::vector<SolverSpec> solvers;  // empty: filled with the standard set
};

// The six solvers the synthetic study compares, with constants derived from
// the config (manual eta is alpha2 / (2 beta1 s)).
std::vector<SolverSpec> standard_solver_set(const ExperimentConfig& cfg);

// Reads a config from JSON. Unknown or misspelled keys are an error that
// names the key; absent keys keep their defaults. An empty solver list is
// replaced by standard_solver_set.
ExperimentConfig load_experiment_config(const std::string& path);

// x* for one trial: nnz entries of magnitude radius / nnz, support a uniform
// nnz-subset of [0, n), signs fair coins. Deterministic in the seed.
Eigen::VectorXd generate_instance(Eigen::Index n, Eigen::Index nnz, double radius,
                                  std::uint64_t seed);

// Error curves f(x_t) - f* on a common iteration axis of length budget
// (index 0 is the solver's start point). Early-stopped runs are padded with
// their final value; ragd rows are per epoch and are expanded so iteration j
// shows the error after floor(j / K) epochs.
struct ErrorCurves {
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> mean;                    // per solver, averaged over trials
  std::vector<std::vector<Eigen::VectorXd>> per_trial;  // [solver][trial]
  ExperimentConfig config;
};

// Runs every solver on every trial instance. Throws on any solver failure,
// identifying the trial and solver.
ErrorCurves run_benchmark(const ExperimentConfig& cfg);

// `iter,<name>,...` header, one row per iteration, 17 significant digits, LF
// endings. Writes the averaged curves. Fails without leaving a partial file.
void write_benchmark_csv(const ErrorCurves& curves, const std::string& path);

// Reads a file written by write_benchmark_csv back into columns.
struct BenchmarkTable {
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> columns;
};
BenchmarkTable read_benchmark_csv(const std::string& path);

}  // namespace sparsefw
