#include "sparsefw/objectives.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sparsefw {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": entries must be finite");
}

}  // namespace

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size()) {
    throw std::invalid_argument("QuadraticObjective: A must be square and match b");
  }
  if (!A_.allFinite()) throw std::invalid_argument("QuadraticObjective: A must be finite");
  require_finite(b_, "QuadraticObjective");
  const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("QuadraticObjective: A must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A_, Eigen::EigenvaluesOnly);
  eig_min_ = eig.eigenvalues().minCoeff();
  eig_max_ = eig.eigenvalues().maxCoeff();
  if (eig_min_ < -1e-8) {
    throw std::invalid_argument("QuadraticObjective: A must be positive semidefinite");
  }
}

double QuadraticObjective::value(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(A_ * x) + b_.dot(x);
}

double QuadraticObjective::value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  const Eigen::VectorXd Ax = A_ * x;
  grad = Ax + b_;
  return 0.5 * x.dot(Ax) + b_.dot(x);
}

double QuadraticObjective::curvature_along(const Eigen::VectorXd& d) const {
  return d.dot(A_ * d);
}

SmoothnessConstants QuadraticObjective::constants() const {
  return {A_.cwiseAbs().maxCoeff(), eig_max_, eig_min_};
}

SpikedQuadratic::SpikedQuadratic(double a, double c, Eigen::VectorXd x_star)
    : a_(a), c_(c), x_star_(std::move(x_star)) {
  if (!(a > 0.0) || c < 0.0) {
    throw std::invalid_argument("SpikedQuadratic: need a > 0 and c >= 0");
  }
  require_finite(x_star_, "SpikedQuadratic");
}

double SpikedQuadratic::value(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd u = x - x_star_;
  const double t = u.sum();
  return 0.5 * (a_ * u.squaredNorm() + c_ * t * t);
}

double SpikedQuadratic::value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  const Eigen::VectorXd u = x - x_star_;
  const double t = u.sum();
  grad = a_ * u;
  grad.array() += c_ * t;
  return 0.5 * (a_ * u.squaredNorm() + c_ * t * t);
}

double SpikedQuadratic::curvature_along(const Eigen::VectorXd& d) const {
  const double t = d.sum();
  return a_ * d.squaredNorm() + c_ * t * t;
}

SmoothnessConstants SpikedQuadratic::constants() const {
  return {a_ + c_, a_ + c_ * static_cast<double>(dim()), a_};
}

TraceSpikedObjective::TraceSpikedObjective(double a, Eigen::MatrixXd X_star)
    : a_(a), X_star_(std::move(X_star)) {
  if (!(a > 0.0)) throw std::invalid_argument("TraceSpikedObjective: need a > 0");
  if (X_star_.rows() != X_star_.cols()) {
    throw std::invalid_argument("TraceSpikedObjective: X_star must be square");
  }
  if (!X_star_.allFinite()) {
    throw std::invalid_argument("TraceSpikedObjective: X_star must be finite");
  }
}

double TraceSpikedObjective::value(const Eigen::MatrixXd& X) const {
  if (X.rows() != rows() || X.cols() != cols()) {
    throw std::invalid_argument("TraceSpikedObjective: shape mismatch");
  }
  const Eigen::MatrixXd U = X - X_star_;
  const double t = U.trace();
  return 0.5 * (a_ * U.squaredNorm() + t * t);
}

double TraceSpikedObjective::value_grad(const Eigen::MatrixXd& X, Eigen::MatrixXd& grad) const {
  if (X.rows() != rows() || X.cols() != cols()) {
    throw std::invalid_argument("TraceSpikedObjective: shape mismatch");
  }
  const Eigen::MatrixXd U = X - X_star_;
  const double t = U.trace();
  grad = a_ * U;
  grad.diagonal().array() += t;
  return 0.5 * (a_ * U.squaredNorm() + t * t);
}

double TraceSpikedObjective::curvature_along(const Eigen::MatrixXd& D) const {
  const double t = D.trace();
  return a_ * D.squaredNorm() + t * t;
}

SmoothnessConstants TraceSpikedObjective::constants() const {
  return {a_ + 1.0, a_ + static_cast<double>(rows()), a_};
}

namespace {

template <class Obj, class Point>
double linesearch_impl(const Obj& obj, const Point& x, const Point& v) {
  const Point d = v - x;
  Point grad;
  obj.value_grad(x, grad);
  const double slope = (grad.array() * d.array()).sum();
  const double q = obj.curvature_along(d);
  if (q <= 0.0) return slope >= 0.0 ? 0.0 : 1.0;
  return std::clamp(-slope / q, 0.0, 1.0);
}

}  // namespace

double exact_linesearch(const VectorObjective& obj, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& v) {
  return linesearch_impl(obj, x, v);
}

double exact_linesearch(const MatrixObjective& obj, const Eigen::MatrixXd& X,
                        const Eigen::MatrixXd& V) {
  return linesearch_impl(obj, X, V);
}

namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw std::runtime_error(std::string("objective json: ") + field +
                                                 " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) throw std::runtime_error(std::string("objective json: ") + field +
                                                    " must hold numbers");
    v[i++] = e.get<double>();
  }
  return v;
}

}  // namespace

LoadedObjective load_objective_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("objective json: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("objective json: parse error in " + path + ": " + e.what());
  }
  if (!j.contains("family") || !j["family"].is_string()) {
    throw std::runtime_error("objective json: missing string field 'family'");
  }
  const std::string family = j["family"].get<std::string>();

  LoadedObjective out;
  if (family == "spiked") {
    for (const char* k : {"a", "c"}) {
      if (!j.contains(k) || !j[k].is_number()) {
        throw std::runtime_error(std::string("objective json: spiked needs number field '") +
                                    k + "'");
      }
    }
    if (!j.contains("x_star")) {
      throw std::runtime_error("objective json: spiked needs field 'x_star'");
    }
    Eigen::VectorXd x_star = vector_from_json(j["x_star"], "x_star");
    out.f_star = 0.0;
    out.x_star = x_star;
    out.objective = std::make_unique<SpikedQuadratic>(j["a"].get<double>(), j["c"].get<double>(),
                                                      std::move(x_star));
  } else if (family == "dense_quadratic") {
    if (!j.contains("A") || !j["A"].is_array()) {
      throw std::runtime_error("objective json: dense_quadratic needs array field 'A'");
    }
    if (!j.contains("b")) {
      throw std::runtime_error("objective json: dense_quadratic needs field 'b'");
    }
    const auto& rows = j["A"];
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd A(n, n);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
      Eigen::VectorXd v = vector_from_json(row, "A");
      if (v.size() != n) throw std::runtime_error("objective json: A must be square");
      A.row(r++) = v.transpose();
    }
    out.objective = std::make_unique<QuadraticObjective>(std::move(A), vector_from_json(j["b"], "b"));
  } else {
    throw std::runtime_error("objective json: unknown family '" + family + "'");
  }
  return out;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("objective json: cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

void save_objective_json(const SpikedQuadratic& obj, const std::string& path) {
  nlohmann::json j;
  j["family"] = "spiked";
  j["a"] = obj.a();
  j["c"] = obj.c();
  j["x_star"] = vector_to_json(obj.x_star());
  write_json(j, path);
}

void save_objective_json(const QuadraticObjective& obj, const std::string& path) {
  nlohmann::json j;
  j["family"] = "dense_quadratic";
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < obj.A().rows(); ++r) {
    rows.push_back(vector_to_json(obj.A().row(r).transpose()));
  }
  j["A"] = rows;
  j["b"] = vector_to_json(obj.b());
  write_json(j, path);
}

}  // namespace sparsefw
