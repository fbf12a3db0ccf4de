#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sparsefw {

// Indices of the k largest-magnitude entries of v, ascending index order.
// Ties go to the lower index. O(n log k) via a bounded heap.
std::vector<Eigen::Index> top_k_indices(const Eigen::VectorXd& v, Eigen::Index k);

// Rank-k factors U (m x k), singular values s (descending, nonnegative),
// V (n x k). Columns of U and V are orthonormal; the largest-magnitude entry
// of each U column is nonnegative.
struct TruncatedSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;
  Eigen::MatrixXd V;

  Eigen::MatrixXd reconstruct() const { return U * s.asDiagonal() * V.transpose(); }
};

// Best rank-k approximation factors of M. For min(m, n) <= 512 this runs a
// full dense SVD and truncates; larger shapes use block subspace iteration
// (see truncated_svd_subspace). Requires 1 <= k <= min(m, n).
TruncatedSvd truncated_svd(const Eigen::MatrixXd& M, Eigen::Index k);

// Block subspace iteration with a fixed internal seed: deterministic for a
// given input. Stops when the factors satisfy both SVD residual equations to
// rel_tol times the leading singular value; throws std::runtime_error if
// sweep_cap sweeps do not converge.
TruncatedSvd truncated_svd_subspace(const Eigen::MatrixXd& M, Eigen::Index k,
                                    double rel_tol = 1e-10, int sweep_cap = 10000);

}  // namespace sparsefw
