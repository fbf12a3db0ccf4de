#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsefw/geometry.hpp"
#include "sparsefw/objectives.hpp"

namespace sparsefw {

// How the main solver picks eta (the prox temperature) and gamma (the convex
// combination weight) each iteration:
//   FixedTheoretical: eta = alpha2 / (4 beta (8s + s*)), gamma = eta.
//   FixedManual:      eta given, gamma = eta.
//   LineSearch:       eta given (or the theoretical value when <= 0), gamma
//                     by exact line search over [0, 1].
//   AutoTuned:        etas 2^i * theoretical for i in grid, each combined
//                     with line search; keep the candidate with the lowest
//                     one-step value, ties to the smallest i.
struct StepMode {
  enum class Kind { FixedTheoretical, FixedManual, LineSearch, AutoTuned };

  Kind kind = Kind::FixedTheoretical;
  double eta = 0.0;
  std::vector<int> grid = {0, 1, 2, 3, 4, 5};

  static StepMode fixed_theoretical();
  static StepMode fixed_manual(double eta);
  static StepMode line_search(double eta = 0.0);
  static StepMode auto_tuned(std::vector<int> grid = {0, 1, 2, 3, 4, 5});
};

struct SwfwParams {
  Eigen::Index s = 1;        // sparsity level, matching the geometry
  double alpha2 = 1.0;       // quadratic growth constant
  double beta = 1.0;         // smoothness w.r.t. the geometry's norm (beta1)
  Eigen::Index s_star = 4;   // extreme point sparsity, 4s (l1) or 8s (nuclear)
  StepMode mode;
  int budget = 1000;
  double tol = 0.0;
  std::optional<double> f_star;  // enables f - f* stopping and trace gaps

  // eta from the contraction analysis, clamped into (0, 1].
  double eta_theoretical() const;
};

// Params whose s and s_star agree with the geometry.
SwfwParams make_swfw_params(const GeometrySpec& geom, double alpha2, double beta,
                            StepMode mode, int budget, double tol,
                            std::optional<double> f_star = std::nullopt);

enum class StopStatus { BudgetExhausted, ToleranceReached };

// One row per iteration. f is the value at the iterate entering the
// iteration; gap is f - f* when f* is known and the surrogate gap
// <x - v, grad f(x)> otherwise; nanos counts wall-clock time since the solve
// started, so successive differences give per-iteration cost.
struct TraceRow {
  int iter;
  double f;
  double gap;
  double eta;
  double gamma;
  std::int64_t nanos;
};

struct SolverTrace {
  std::vector<TraceRow> rows;
  StopStatus status = StopStatus::BudgetExhausted;
  // Largest support (vector case) or factor rank (matrix case) any prox
  // output had, counting singular values above 1e-10 times the largest.
  Eigen::Index max_update_sparsity = 0;
};

// Writes `iter,f,gap,eta,gamma,nanos` rows with 17 significant digits and LF
// line endings. Fails without leaving a partial file behind.
void write_trace_csv(const SolverTrace& trace, const std::string& path);

// Thresholded Frank-Wolfe with the sparse prox oracle. Each iteration
// hard-thresholds the iterate, takes the sparse prox of a gradient step
// scaled by 1/(4 s beta eta), and moves to the convex combination
// (1 - gamma) x + gamma v. Iterates stay feasible; every update direction v
// is s-sparse (low-rank in the matrix case).
SolverTrace solve_swfw(const VectorObjective& obj, const GeometrySpec& geom,
                       const SwfwParams& params, const Eigen::VectorXd& x1,
                       Eigen::VectorXd* x_out = nullptr);
SolverTrace solve_swfw(const MatrixObjective& obj, const GeometrySpec& geom,
                       const SwfwParams& params, const Eigen::MatrixXd& X1,
                       Eigen::MatrixXd* X_out = nullptr);

// Away-step Frank-Wolfe over the l1 ball (vertices +-R e_i), exact line
// search, away steps clamped at gamma_max = w / (1 - w) with drop steps
// removing exhausted vertices. Starts from the vertex R e_1 by default.
struct AfwParams {
  double radius = 1.0;
  int budget = 1000;
  double tol = 0.0;              // on f - f* when known, else on the FW gap
  std::optional<double> f_star;
};
SolverTrace solve_afw(const VectorObjective& obj, const AfwParams& params,
                      Eigen::VectorXd* x_out = nullptr);

// Projected accelerated gradient for strongly convex objectives: gradient
// step 1/beta2 projected onto the l1 ball, momentum
// (sqrt(beta2) - sqrt(alpha2)) / (sqrt(beta2) + sqrt(alpha2)).
struct VFistaParams {
  double radius = 1.0;
  double alpha2 = 1.0;
  double beta2 = 1.0;
  int budget = 1000;
  double tol = 0.0;
  std::optional<double> f_star;
};
SolverTrace solve_vfista(const VectorObjective& obj, const VFistaParams& params,
                         const Eigen::VectorXd& x0, Eigen::VectorXd* x_out = nullptr);

// One accelerated-gradient run over the l1 ball with the l1 geometry
// (estimate sequence with the p-norm prox function anchored at x0). Records
// f(y_k) for k = 0..K and returns y_K. Exposed mainly for the restarted
// solver and its bound tests.
struct AgdResult {
  Eigen::VectorXd y;
  std::vector<double> f_y;  // f(y_k), k = 0..K
};
AgdResult solve_agd_nesterov(const VectorObjective& obj, double radius, double beta1,
                             const Eigen::VectorXd& x0, int K);

// Inner subproblem solvers of the accelerated run, exposed for oracle tests.
// argmin over the l1 ball of <g, y - x> + (beta/2) ||y - x||_1^2:
Eigen::VectorXd agd_primary_step(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                 double beta, double radius);
// argmin over the l1 ball of A ||z - x0||_p^2 + <G, z> with p in (1, 2).
// warm, when given, carries the dual bracket between related calls.
struct EstimateStepWarm {
  double lambda = -1.0;
  double nu = -1.0;
};
Eigen::VectorXd agd_estimate_step(const Eigen::VectorXd& x0, const Eigen::VectorXd& G,
                                  double A, double p, double radius,
                                  EstimateStepWarm* warm = nullptr);

// Epoch lengths for the restarted solver: the analysis value
// ceil(sqrt(64 s beta1 e^2 ln(n) / alpha2)) and the empirically tuned
// ceil(25 sqrt(beta1 s / alpha2)).
int restart_epoch_length(Eigen::Index s, double beta1, double alpha2, Eigen::Index n);
int restart_epoch_length_heuristic(Eigen::Index s, double beta1, double alpha2);

// Restarted accelerated gradient: epoch t hard-thresholds the iterate to s
// entries, re-anchors the prox function there, runs K accelerated iterations
// and keeps y_K. Trace rows hold f at the epoch starts (row 1 is the initial
// point, row t+1 the result of epoch t).
struct RestartedAgdParams {
  double radius = 1.0;
  Eigen::Index s = 1;
  double beta1 = 1.0;
  double alpha2 = 1.0;
  int inner_iters = 0;  // K; 0 picks restart_epoch_length for the objective
  int epochs = 10;
  double tol = 0.0;
  std::optional<double> f_star;
};
SolverTrace solve_restarted_agd(const VectorObjective& obj, const RestartedAgdParams& params,
                                const Eigen::VectorXd& x0, Eigen::VectorXd* x_out = nullptr);

}  // namespace sparsefw
