#include "sparsefw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsefw {

GeometrySpec GeometrySpec::l1(double radius, Eigen::Index s, Eigen::Index dim) {
  if (radius <= 0.0) throw std::invalid_argument("GeometrySpec: radius must be positive");
  if (s < 1 || s > dim) throw std::invalid_argument("GeometrySpec: need 1 <= s <= dim");
  GeometrySpec g;
  g.kind = Kind::L1Ball;
  g.radius = radius;
  g.s = s;
  g.rows = dim;
  g.cols = 1;
  return g;
}

GeometrySpec GeometrySpec::nuclear(double radius, Eigen::Index s, Eigen::Index rows,
                                   Eigen::Index cols) {
  if (radius <= 0.0) throw std::invalid_argument("GeometrySpec: radius must be positive");
  if (s < 1 || s > std::min(rows, cols)) {
    throw std::invalid_argument("GeometrySpec: need 1 <= s <= min(rows, cols)");
  }
  GeometrySpec g;
  g.kind = Kind::NuclearBall;
  g.radius = radius;
  g.s = s;
  g.rows = rows;
  g.cols = cols;
  return g;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& z, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("project_l1_ball: radius must be positive");
  if (z.lpNorm<1>() <= radius) return z;

  // Sort |z| descending and find the soft-threshold level theta with
  // sum(max(|z| - theta, 0)) = radius.
  const Eigen::Index n = z.size();
  std::vector<double> u(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = std::abs(z[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());

  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double cand = (cum - radius) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) {
      theta = cand;
    } else {
      break;
    }
  }

  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(z[i]) - theta;
    out[i] = m > 0.0 ? (z[i] > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

Eigen::VectorXd project_simplex_leq(const Eigen::VectorXd& y, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("project_simplex_leq: radius must be positive");
  Eigen::VectorXd w = y.cwiseMax(0.0);
  if (w.sum() <= radius) return w;

  // Sum constraint active: classic sorted simplex projection on the clipped
  // vector (negative entries cannot survive, so clipping first is harmless).
  std::vector<double> u(w.data(), w.data() + w.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double cand = (cum - radius) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) {
      theta = cand;
    } else {
      break;
    }
  }
  return (w.array() - theta).cwiseMax(0.0).matrix();
}

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, Eigen::Index s) {
  if (s < 0) throw std::invalid_argument("hard_threshold: s must be nonnegative");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i : top_k_indices(x, s)) out[i] = x[i];
  return out;
}

Eigen::VectorXd sparse_l1_prox(const Eigen::VectorXd& z, double radius, Eigen::Index s) {
  if (s < 1) throw std::invalid_argument("sparse_l1_prox: s must be positive");
  const std::vector<Eigen::Index> support = top_k_indices(z, s);
  Eigen::VectorXd restricted(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    restricted[static_cast<Eigen::Index>(j)] = z[support[j]];
  }
  const Eigen::VectorXd proj = project_l1_ball(restricted, radius);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(z.size());
  for (std::size_t j = 0; j < support.size(); ++j) {
    out[support[j]] = proj[static_cast<Eigen::Index>(j)];
  }
  return out;
}

RankThreshold rank_threshold(const Eigen::MatrixXd& X, Eigen::Index s) {
  RankThreshold out;
  out.svd = truncated_svd(X, s);
  out.matrix = out.svd.reconstruct();
  return out;
}

Eigen::MatrixXd sparse_nuclear_prox(const Eigen::MatrixXd& Z, double radius, Eigen::Index s) {
  TruncatedSvd svd = truncated_svd(Z, s);
  svd.s = project_simplex_leq(svd.s, radius);
  return svd.reconstruct();
}

double prox_d_exponent(double n) {
  if (n < 3.0) throw std::invalid_argument("prox_d_exponent: need n >= 3");
  return 1.0 + 1.0 / std::log(n);
}

double prox_d_coefficient(double n) {
  if (n < 3.0) throw std::invalid_argument("prox_d_coefficient: need n >= 3");
  const double p = prox_d_exponent(n);
  const double expo = (p - 1.0) * (2.0 - p) / p;
  const double e = 2.718281828459045235;
  return 0.5 * e * std::log(n) * std::pow(n, expo);
}

ValueGrad prox_d_value_grad(const Eigen::VectorXd& x, const Eigen::VectorXd& x0) {
  if (x.size() != x0.size()) throw std::invalid_argument("prox_d_value_grad: size mismatch");
  const double n = static_cast<double>(x.size());
  if (n < 3.0) throw std::invalid_argument("prox_d_value_grad: need n >= 3");
  const double p = prox_d_exponent(n);
  const double kappa = prox_d_coefficient(n);

  const Eigen::VectorXd u = x - x0;
  // ||u||_p with underflow guard: entries below 1e-300 are treated as zero so
  // |u|^(p-1) cannot denormal-underflow inside pow.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a >= 1e-300) sum += std::pow(a, p);
  }
  const double norm = std::pow(sum, 1.0 / p);

  ValueGrad out;
  out.value = kappa * norm * norm;
  out.grad = Eigen::VectorXd::Zero(u.size());
  if (norm > 0.0) {
    const double scale = 2.0 * kappa * std::pow(norm, 2.0 - p);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      if (a >= 1e-300) {
        out.grad[i] = scale * (u[i] > 0.0 ? 1.0 : -1.0) * std::pow(a, p - 1.0);
      }
    }
  }
  return out;
}

double nuclear_norm(const Eigen::MatrixXd& X) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(X).singularValues().sum();
}

}  // namespace sparsefw
