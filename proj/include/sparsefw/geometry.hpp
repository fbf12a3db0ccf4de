#pragma once

#include <Eigen/Dense>

#include "sparsefw/kernels.hpp"

namespace sparsefw {

// Constraint set for the solvers: an l1 ball over vectors or a nuclear-norm
// ball over matrices, with the sparsity level s used by the thresholded
// oracle steps.
struct GeometrySpec {
  enum class Kind { L1Ball, NuclearBall };

  Kind kind = Kind::L1Ball;
  double radius = 1.0;
  Eigen::Index s = 1;
  Eigen::Index rows = 0;  // matrix shape; rows == dim for vectors
  Eigen::Index cols = 1;

  static GeometrySpec l1(double radius, Eigen::Index s, Eigen::Index dim);
  static GeometrySpec nuclear(double radius, Eigen::Index s, Eigen::Index rows,
                              Eigen::Index cols);

  // Sparsity of the extreme points the prox oracle can touch: 4s for the l1
  // ball, 8s for the nuclear ball.
  Eigen::Index s_star() const { return (kind == Kind::L1Ball ? 4 : 8) * s; }
};

// Euclidean projection onto {x : ||x||_1 <= radius}.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& z, double radius);

// Euclidean projection onto {y : y >= 0, sum(y) <= radius}.
Eigen::VectorXd project_simplex_leq(const Eigen::VectorXd& y, double radius);

// Keep the s largest-magnitude entries (ties to the lower index), zero the
// rest. This is the Euclidean projection onto the set of s-sparse vectors.
Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, Eigen::Index s);

// Euclidean projection onto {x : ||x||_1 <= radius, nnz(x) <= s}: restrict z
// to its top-s support, then project that restriction onto the l1 ball.
Eigen::VectorXd sparse_l1_prox(const Eigen::VectorXd& z, double radius, Eigen::Index s);

// Best rank-s approximation of X, with the factors it was built from.
struct RankThreshold {
  Eigen::MatrixXd matrix;
  TruncatedSvd svd;
};
RankThreshold rank_threshold(const Eigen::MatrixXd& X, Eigen::Index s);

// Projection onto {X : ||X||_nuc <= radius, rank(X) <= s}: top-s SVD, then
// project the singular value vector onto {sigma >= 0, sum <= radius} and
// rebuild with the same singular vectors.
Eigen::MatrixXd sparse_nuclear_prox(const Eigen::MatrixXd& Z, double radius, Eigen::Index s);

// Distance generating function for the l1 setup: with p = 1 + 1/log(n) and
//   d(x) = (e log(n) n^{(p-1)(2-p)/p} / 2) * ||x - x0||_p^2,
// d is 1-strongly convex w.r.t. ||.||_1 over the l1 ball and satisfies
// d(x) <= (e^2 log(n)/2) ||x - x0||_1^2. Requires n >= 3.
double prox_d_exponent(double n);     // p
double prox_d_coefficient(double n);  // the multiplier on ||x - x0||_p^2

struct ValueGrad {
  double value;
  Eigen::VectorXd grad;
};
ValueGrad prox_d_value_grad(const Eigen::VectorXd& x, const Eigen::VectorXd& x0);

// Norms used for feasibility checks.
double nuclear_norm(const Eigen::MatrixXd& X);

}  // namespace sparsefw
