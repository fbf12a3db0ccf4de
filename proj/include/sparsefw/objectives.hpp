#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

namespace sparsefw {

// Lipschitz / growth constants of a quadratic objective:
//   beta1: smoothness w.r.t. ||.||_1 (max |Hessian entry| for quadratics),
//   beta2: smoothness w.r.t. ||.||_2 (largest Hessian eigenvalue),
//   alpha2: quadratic growth w.r.t. ||.||_2 (smallest Hessian eigenvalue).
struct SmoothnessConstants {
  double beta1;
  double beta2;
  double alpha2;
};

// Quadratic objective over vectors. All implementations have a constant
// Hessian, which is what makes exact line search a closed form.
class VectorObjective {
public:
  virtual ~VectorObjective() = default;
  virtual Eigen::Index dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  // Returns f(x) and writes the gradient.
  virtual double value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const = 0;
  // d' H d for the constant Hessian H.
  virtual double curvature_along(const Eigen::VectorXd& d) const = 0;
};

class MatrixObjective {
public:
  virtual ~MatrixObjective() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual double value(const Eigen::MatrixXd& X) const = 0;
  virtual double value_grad(const Eigen::MatrixXd& X, Eigen::MatrixXd& grad) const = 0;
  virtual double curvature_along(const Eigen::MatrixXd& D) const = 0;
};

// f(x) = x'Ax/2 + b'x with A symmetric positive semidefinite. Construction
// rejects asymmetric A (tolerance 1e-10) and eigenvalues below -1e-8.
class QuadraticObjective final : public VectorObjective {
public:
  QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b);

  Eigen::Index dim() const override { return b_.size(); }
  double value(const Eigen::VectorXd& x) const override;
  double value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const override;
  double curvature_along(const Eigen::VectorXd& d) const override;

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  SmoothnessConstants constants() const;

private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
};

// f(x) = (x - x*)' (a I + c 11') (x - x*) / 2 without materializing the
// Hessian: gradient is a(x - x*) + c (1'(x - x*)) 1, all O(n).
class SpikedQuadratic final : public VectorObjective {
public:
  SpikedQuadratic(double a, double c, Eigen::VectorXd x_star);

  Eigen::Index dim() const override { return x_star_.size(); }
  double value(const Eigen::VectorXd& x) const override;
  double value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const override;
  double curvature_along(const Eigen::VectorXd& d) const override;

  double a() const { return a_; }
  double c() const { return c_; }
  const Eigen::VectorXd& x_star() const { return x_star_; }
  // beta1 = a + c, beta2 = a + c n, alpha2 = a.
  SmoothnessConstants constants() const;

private:
  double a_;
  double c_;
  Eigen::VectorXd x_star_;
};

// f(X) = a ||X - X*||_F^2 / 2 + tr(X - X*)^2 / 2 over square matrices.
// beta1 = a + 1 (w.r.t. the nuclear norm), beta2 = a + n, alpha2 = a.
class TraceSpikedObjective final : public MatrixObjective {
public:
  TraceSpikedObjective(double a, Eigen::MatrixXd X_star);

  Eigen::Index rows() const override { return X_star_.rows(); }
  Eigen::Index cols() const override { return X_star_.cols(); }
  double value(const Eigen::MatrixXd& X) const override;
  double value_grad(const Eigen::MatrixXd& X, Eigen::MatrixXd& grad) const override;
  double curvature_along(const Eigen::MatrixXd& D) const override;

  double a() const { return a_; }
  const Eigen::MatrixXd& X_star() const { return X_star_; }
  SmoothnessConstants constants() const;

private:
  double a_;
  Eigen::MatrixXd X_star_;
};

// Minimizer of gamma -> f(x + gamma (v - x)) over [0, 1]. With curvature
// q = d'Hd and slope g'd: gamma = clamp(-g'd / q, 0, 1); when q == 0 the
// result is 0 for nonnegative slope and 1 otherwise, and v == x gives 0.
double exact_linesearch(const VectorObjective& obj, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& v);
double exact_linesearch(const MatrixObjective& obj, const Eigen::MatrixXd& X,
                        const Eigen::MatrixXd& V);

// JSON instance files. Families:
//   {"family": "spiked", "a": .., "c": .., "x_star": [..]}
//   {"family": "dense_quadratic", "A": [[..], ..], "b": [..]}
// The spiked family has a known minimum value of 0 at x_star.
struct LoadedObjective {
  std::unique_ptr<VectorObjective> objective;
  std::optional<double> f_star;
  std::optional<Eigen::VectorXd> x_star;
};
LoadedObjective load_objective_json(const std::string& path);
void save_objective_json(const SpikedQuadratic& obj, const std::string& path);
void save_objective_json(const QuadraticObjective& obj, const std::string& path);

}  // namespace sparsefw
