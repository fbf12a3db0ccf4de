#include "sparsefw/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsefw/rng.hpp"

namespace sparsefw {

std::vector<Eigen::Index> top_k_indices(const Eigen::VectorXd& v, Eigen::Index k) {
  const Eigen::Index n = v.size();
  if (k < 0) throw std::invalid_argument("top_k_indices: k must be nonnegative");
  if (k > n) k = n;
  if (k == 0) return {};

  // Min-heap of the k best entries seen so far; the weakest sits on top.
  // Scanning in index order means an equal-magnitude later entry never
  // displaces an earlier one, which gives the lowest-index tie rule.
  struct Entry {
    double mag;
    Eigen::Index idx;
  };
  auto weaker = [](const Entry& a, const Entry& b) {
    if (a.mag != b.mag) return a.mag > b.mag;  // heap top = smallest magnitude
    return a.idx < b.idx;                      // among equals, largest index
  };
  std::vector<Entry> heap;
  heap.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(v[i]);
    if (static_cast<Eigen::Index>(heap.size()) < k) {
      heap.push_back({m, i});
      std::push_heap(heap.begin(), heap.end(), weaker);
    } else if (m > heap.front().mag) {
      std::pop_heap(heap.begin(), heap.end(), weaker);
      heap.back() = {m, i};
      std::push_heap(heap.begin(), heap.end(), weaker);
    }
  }
  std::vector<Eigen::Index> out;
  out.reserve(heap.size());
  for (const Entry& e : heap) out.push_back(e.idx);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Flip factor signs so the largest-magnitude entry of each U column is
// nonnegative. Ties inside a column resolve to the lowest row, matching the
// deterministic ordering used everywhere else.
void fix_signs(Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index row = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      const double m = std::abs(U(i, j));
      if (m > best) {
        best = m;
        row = i;
      }
    }
    if (U(row, j) < 0.0) {
      U.col(j) = -U.col(j);
      V.col(j) = -V.col(j);
    }
  }
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::MatrixXd& M, Eigen::Index k) {
  const Eigen::Index r = std::min(M.rows(), M.cols());
  if (k < 1 || k > r) throw std::invalid_argument("truncated_svd: need 1 <= k <= min(m, n)");
  if (r > 512) return truncated_svd_subspace(M, k);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.U = svd.matrixU().leftCols(k);
  out.s = svd.singularValues().head(k);
  out.V = svd.matrixV().leftCols(k);
  fix_signs(out.U, out.V);
  return out;
}

TruncatedSvd truncated_svd_subspace(const Eigen::MatrixXd& M, Eigen::Index k,
                                    double rel_tol, int sweep_cap) {
  const Eigen::Index m = M.rows();
  const Eigen::Index n = M.cols();
  if (k < 1 || k > std::min(m, n)) {
    throw std::invalid_argument("truncated_svd_subspace: need 1 <= k <= min(m, n)");
  }

  // Deterministic Gaussian start block (Box-Muller over SplitMix64).
  SplitMix64 rng(0x5eedb10c5eedb10cULL);
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double u1 = rng.next_double();
      while (u1 <= 0.0) u1 = rng.next_double();
      const double u2 = rng.next_double();
      V(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }
  }
  V = Eigen::HouseholderQR<Eigen::MatrixXd>(V).householderQ() * Eigen::MatrixXd::Identity(n, k);

  for (int sweep = 0; sweep < sweep_cap; ++sweep) {
    Eigen::MatrixXd W = M.transpose() * (M * V);
    V = Eigen::HouseholderQR<Eigen::MatrixXd>(W).householderQ() * Eigen::MatrixXd::Identity(n, k);

    // Candidate factors from the thin QR of M V.
    Eigen::MatrixXd B = M * V;  // m x k
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> small(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = small.singularValues();
    Eigen::MatrixXd U = qr.householderQ() * Eigen::MatrixXd::Identity(m, k) * small.matrixU();
    Eigen::MatrixXd Vh = V * small.matrixV();

    // Converged when (U, sv, Vh) satisfies both SVD residual equations; the
    // singular values alone settle long before the subspace does.
    const double scale = std::max(sv[0], 1e-300);
    const double r1 = (B * small.matrixV() - U * sv.asDiagonal()).norm();
    const double r2 = (M.transpose() * U - Vh * sv.asDiagonal()).norm();
    if (std::max(r1, r2) <= rel_tol * scale) {
      TruncatedSvd out;
      out.U = std::move(U);
      out.s = sv;
      out.V = std::move(Vh);
      fix_signs(out.U, out.V);
      return out;
    }
  }
  throw std::runtime_error("truncated_svd_subspace: no convergence within sweep cap");
}

}  // namespace sparsefw
