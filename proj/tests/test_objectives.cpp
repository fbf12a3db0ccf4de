#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sparsefw/objectives.hpp"
#include "sparsefw/rng.hpp"

using namespace sparsefw;

namespace {

Eigen::VectorXd random_vector(SplitMix64& rng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * (2.0 * rng.next_double() - 1.0);
  return v;
}

Eigen::MatrixXd random_psd(SplitMix64& rng, Eigen::Index n) {
  Eigen::MatrixXd B(n, n);
  for (Eigen::Index j = 0; j < n; ++j) B.col(j) = random_vector(rng, n);
  return B * B.transpose();
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void check_gradient(const VectorObjective& obj, const Eigen::VectorXd& x) {
  Eigen::VectorXd grad;
  const double f = obj.value_grad(x, grad);
  CHECK(f == doctest::Approx(obj.value(x)));

  const double h = 1e-6;
  for (Eigen::Index i = 0; i < x.size(); i += 3) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (obj.value(xp) - obj.value(xm)) / (2.0 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-4));
  }
}

}  // namespace

TEST_CASE("spiked quadratic gradient and curvature") {
  SplitMix64 rng(51);
  const Eigen::VectorXd x_star = random_vector(rng, 30);
  const SpikedQuadratic obj(1.5, 2.5, x_star);

  CHECK(obj.value(x_star) == 0.0);
  check_gradient(obj, random_vector(rng, 30, 2.0));

  // For a quadratic, the symmetric second difference recovers d'Hd exactly.
  const Eigen::VectorXd x = random_vector(rng, 30);
  const Eigen::VectorXd d = random_vector(rng, 30);
  const double second = obj.value(x + d) - 2.0 * obj.value(x) + obj.value(x - d);
  CHECK(obj.curvature_along(d) == doctest::Approx(second).epsilon(1e-9));
}

TEST_CASE("spiked quadratic agrees with its dense form") {
  SplitMix64 rng(52);
  const Eigen::Index n = 12;
  const double a = 1.0, c = 3.0;
  const Eigen::VectorXd x_star = random_vector(rng, n);
  const SpikedQuadratic spiked(a, c, x_star);

  const Eigen::MatrixXd A = a * Eigen::MatrixXd::Identity(n, n) +
                            c * Eigen::MatrixXd::Ones(n, n);
  const QuadraticObjective dense(A, -A * x_star);
  const double shift = 0.5 * x_star.dot(A * x_star);

  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd x = random_vector(rng, n, 3.0);
    CHECK(spiked.value(x) == doctest::Approx(dense.value(x) + shift).epsilon(1e-12));

    Eigen::VectorXd gs, gd;
    spiked.value_grad(x, gs);
    dense.value_grad(x, gd);
    CHECK((gs - gd).norm() <= 1e-10 * (1.0 + gd.norm()));
  }
}

TEST_CASE("smoothness constants of the structured objectives") {
  SplitMix64 rng(53);
  const Eigen::Index n = 40;
  const SpikedQuadratic spiked(1.0, 3.0, random_vector(rng, n));
  const SmoothnessConstants ks = spiked.constants();
  CHECK(ks.beta1 == doctest::Approx(4.0));
  CHECK(ks.beta2 == doctest::Approx(1.0 + 3.0 * n));
  CHECK(ks.alpha2 == doctest::Approx(1.0));

  Eigen::MatrixXd Xs(3, 3);
  Xs.setZero();
  const TraceSpikedObjective trace(2.0, Xs);
  const SmoothnessConstants kt = trace.constants();
  CHECK(kt.beta1 == doctest::Approx(3.0));
  CHECK(kt.beta2 == doctest::Approx(5.0));
  CHECK(kt.alpha2 == doctest::Approx(2.0));
}

TEST_CASE("quadratic objective constants match its spectrum") {
  SplitMix64 rng(54);
  const Eigen::Index n = 10;
  const Eigen::MatrixXd A = random_psd(rng, n);
  const QuadraticObjective obj(A, random_vector(rng, n));

  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
  const SmoothnessConstants k = obj.constants();
  CHECK(k.beta1 == doctest::Approx(A.cwiseAbs().maxCoeff()));
  CHECK(k.beta2 == doctest::Approx(eig[n - 1]).epsilon(1e-10));
  CHECK(k.alpha2 == doctest::Approx(eig[0]).epsilon(1e-8));

  check_gradient(obj, random_vector(rng, n, 2.0));
}

TEST_CASE("quadratic objective rejects bad Hessians") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(QuadraticObjective(asym, Eigen::VectorXd::Zero(2)), std::invalid_argument);

  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(QuadraticObjective(indef, Eigen::VectorXd::Zero(2)), std::invalid_argument);

  CHECK_THROWS_AS(QuadraticObjective(Eigen::MatrixXd::Identity(2, 3), Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);

  CHECK_THROWS_AS(SpikedQuadratic(0.0, 1.0, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(SpikedQuadratic(1.0, -0.5, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(TraceSpikedObjective(1.0, Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("trace spiked objective gradient") {
  SplitMix64 rng(55);
  const Eigen::Index n = 6;
  Eigen::MatrixXd X_star(n, n);
  for (Eigen::Index j = 0; j < n; ++j) X_star.col(j) = random_vector(rng, n);
  const TraceSpikedObjective obj(1.25, X_star);

  CHECK(obj.value(X_star) == 0.0);

  Eigen::MatrixXd X(n, n), grad;
  for (Eigen::Index j = 0; j < n; ++j) X.col(j) = random_vector(rng, n, 2.0);
  const double f = obj.value_grad(X, grad);
  CHECK(f == doctest::Approx(obj.value(X)));

  const double h = 1e-6;
  for (Eigen::Index r = 0; r < n; r += 2) {
    for (Eigen::Index c = 0; c < n; c += 3) {
      Eigen::MatrixXd Xp = X, Xm = X;
      Xp(r, c) += h;
      Xm(r, c) -= h;
      const double fd = (obj.value(Xp) - obj.value(Xm)) / (2.0 * h);
      CHECK(grad(r, c) == doctest::Approx(fd).epsilon(1e-4));
    }
  }

  Eigen::MatrixXd D(n, n);
  for (Eigen::Index j = 0; j < n; ++j) D.col(j) = random_vector(rng, n);
  const double second = obj.value(X + D) - 2.0 * obj.value(X) + obj.value(X - D);
  CHECK(obj.curvature_along(D) == doctest::Approx(second).epsilon(1e-9));
}

TEST_CASE("exact line search dominates a fine grid") {
  SplitMix64 rng(56);
  const Eigen::Index n = 15;
  const SpikedQuadratic obj(1.0, 2.0, random_vector(rng, n));

  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::VectorXd x = random_vector(rng, n, 2.0);
    const Eigen::VectorXd v = random_vector(rng, n, 2.0);
    const double gamma = exact_linesearch(obj, x, v);
    REQUIRE(gamma >= 0.0);
    REQUIRE(gamma <= 1.0);

    const double best = obj.value(x + gamma * (v - x));
    for (int g = 0; g <= 1000; ++g) {
      const double t = static_cast<double>(g) / 1000.0;
      CHECK(best <= obj.value(x + t * (v - x)) + 1e-10);
    }
  }
}

TEST_CASE("exact line search edge cases") {
  SplitMix64 rng(57);
  const Eigen::Index n = 8;
  const SpikedQuadratic obj(1.0, 0.0, Eigen::VectorXd::Zero(n));
  const Eigen::VectorXd x = random_vector(rng, n);
  CHECK(exact_linesearch(obj, x, x) == 0.0);

  // Flat quadratic part: the decision is by slope sign alone.
  const QuadraticObjective linear(Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Ones(n));
  const Eigen::VectorXd up = Eigen::VectorXd::Ones(n);
  CHECK(exact_linesearch(linear, Eigen::VectorXd::Zero(n), up) == 0.0);
  CHECK(exact_linesearch(linear, Eigen::VectorXd::Zero(n), -up) == 1.0);
}

TEST_CASE("objective json round trips") {
  SplitMix64 rng(58);
  TempFile spiked_file("sparsefw_spiked.json");
  TempFile dense_file("sparsefw_dense.json");

  const Eigen::VectorXd x_star = random_vector(rng, 7);
  const SpikedQuadratic spiked(1.0, 3.0, x_star);
  save_objective_json(spiked, spiked_file.path);
  const LoadedObjective ls = load_objective_json(spiked_file.path);
  REQUIRE(ls.objective != nullptr);
  REQUIRE(ls.f_star.has_value());
  CHECK(*ls.f_star == 0.0);
  REQUIRE(ls.x_star.has_value());
  CHECK((*ls.x_star - x_star).norm() == 0.0);
  const Eigen::VectorXd probe = random_vector(rng, 7, 2.0);
  CHECK(ls.objective->value(probe) == doctest::Approx(spiked.value(probe)).epsilon(1e-15));

  const Eigen::MatrixXd A = random_psd(rng, 5);
  const QuadraticObjective dense(A, random_vector(rng, 5));
  save_objective_json(dense, dense_file.path);
  const LoadedObjective ld = load_objective_json(dense_file.path);
  REQUIRE(ld.objective != nullptr);
  CHECK(!ld.f_star.has_value());
  const Eigen::VectorXd probe5 = random_vector(rng, 5, 2.0);
  CHECK(ld.objective->value(probe5) == doctest::Approx(dense.value(probe5)).epsilon(1e-12));
}

TEST_CASE("objective json diagnostics name the problem") {
  TempFile file("sparsefw_bad_objective.json");
  auto write = [&](const char* text) {
    std::ofstream out(file.path);
    out << text;
  };

  CHECK_THROWS_WITH_AS(load_objective_json("/nonexistent/objective.json"),
                       doctest::Contains("cannot open"), std::runtime_error);

  write("{\"family\": \"spiked\", \"a\": 1.0, \"c\": 3.0}");
  CHECK_THROWS_WITH_AS(load_objective_json(file.path), doctest::Contains("x_star"),
                       std::runtime_error);

  write("{\"family\": \"spiked\", \"a\": \"one\", \"c\": 3.0, \"x_star\": [1.0]}");
  CHECK_THROWS_WITH_AS(load_objective_json(file.path), doctest::Contains("a"),
                       std::runtime_error);

  write("{\"family\": \"mystery\"}");
  CHECK_THROWS_WITH_AS(load_objective_json(file.path), doctest::Contains("family"),
                       std::runtime_error);

  write("not json at all");
  CHECK_THROWS_AS(load_objective_json(file.path), std::runtime_error);
}
