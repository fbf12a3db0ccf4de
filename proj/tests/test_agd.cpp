#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "sparsefw/geometry.hpp"
#include "sparsefw/objectives.hpp"
#include "sparsefw/rng.hpp"
#include "sparsefw/solvers.hpp"

using namespace sparsefw;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Eigen::VectorXd random_vector(SplitMix64& rng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * (2.0 * rng.next_double() - 1.0);
  return v;
}

Eigen::VectorXd random_in_ball(SplitMix64& rng, Eigen::Index n, double radius) {
  Eigen::VectorXd v = random_vector(rng, n);
  const double norm1 = v.lpNorm<1>();
  return v * (radius * rng.next_double() / norm1);
}

Eigen::VectorXd planted(SplitMix64& rng, Eigen::Index n, Eigen::Index nnz, double radius) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < nnz; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double mag = radius / static_cast<double>(nnz);
  for (Eigen::Index i = 0; i < nnz; ++i) {
    x[idx[static_cast<std::size_t>(i)]] = static_cast<double>(rng.next_sign()) * mag;
  }
  return x;
}

// Objectives the two inner subproblems minimize, evaluated directly.
double primary_value(const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& g, double beta) {
  const double d1 = (y - x).lpNorm<1>();
  return g.dot(y - x) + 0.5 * beta * d1 * d1;
}

double estimate_value(const Eigen::VectorXd& z, const Eigen::VectorXd& x0,
                      const Eigen::VectorXd& G, double A, double p) {
  const double dp = (z - x0).array().abs().pow(p).sum();
  return A * std::pow(dp, 2.0 / p) + G.dot(z);
}

}  // namespace

TEST_CASE("greedy step solves the worked example exactly") {
  const Eigen::VectorXd y = agd_primary_step(vec({0.0, 0.0, 0.0}), vec({3.0, -1.0, 0.0}), 1.0, 2.0);
  CHECK((y - vec({-2.0, 0.0, 0.0})).lpNorm<1>() <= 1e-14);
}

TEST_CASE("greedy step beats every grid point in two dimensions") {
  SplitMix64 rng(201);
  const int grid = 320;
  for (int rep = 0; rep < 25; ++rep) {
    const double R = 0.5 + 2.0 * rng.next_double();
    const double beta = 0.2 + 3.0 * rng.next_double();
    const Eigen::VectorXd x = random_in_ball(rng, 2, R);
    const Eigen::VectorXd g = random_vector(rng, 2, 4.0);

    const Eigen::VectorXd y = agd_primary_step(x, g, beta, R);
    CHECK(y.lpNorm<1>() <= R * (1.0 + 1e-12));
    const double fy = primary_value(y, x, g, beta);

    double best = primary_value(x, x, g, beta);
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        Eigen::VectorXd c(2);
        c << -R + 2.0 * R * i / grid, -R + 2.0 * R * j / grid;
        if (c.lpNorm<1>() > R) continue;
        best = std::min(best, primary_value(c, x, g, beta));
      }
    }
    CHECK(fy <= best + 1e-10 * (1.0 + std::abs(best)));
  }
}

TEST_CASE("greedy step dominates random candidates in higher dimensions") {
  SplitMix64 rng(202);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_below(9));
    const double R = 0.5 + 2.0 * rng.next_double();
    const double beta = 0.2 + 3.0 * rng.next_double();
    const Eigen::VectorXd x = random_in_ball(rng, n, R);
    const Eigen::VectorXd g = random_vector(rng, n, 4.0);

    const Eigen::VectorXd y = agd_primary_step(x, g, beta, R);
    CHECK(y.lpNorm<1>() <= R * (1.0 + 1e-12));
    const double fy = primary_value(y, x, g, beta);
    CHECK(fy <= primary_value(x, x, g, beta) + 1e-12);
    for (int c = 0; c < 60; ++c) {
      const Eigen::VectorXd cand = random_in_ball(rng, n, R);
      CHECK(fy <= primary_value(cand, x, g, beta) + 1e-10);
    }
  }
}

TEST_CASE("greedy step with a zero gradient stays put") {
  SplitMix64 rng(203);
  const Eigen::VectorXd x = random_in_ball(rng, 6, 3.0);
  const Eigen::VectorXd y = agd_primary_step(x, Eigen::VectorXd::Zero(6), 1.0, 3.0);
  CHECK((y - x).lpNorm<1>() == 0.0);
}

TEST_CASE("estimate step beats every grid point in two dimensions") {
  SplitMix64 rng(204);
  const int grid = 320;
  for (int rep = 0; rep < 20; ++rep) {
    const double R = 0.5 + 2.0 * rng.next_double();
    const double A = 0.5 + 4.0 * rng.next_double();
    const double p = 1.1 + 0.8 * rng.next_double();
    const Eigen::VectorXd x0 = random_in_ball(rng, 2, R);
    const Eigen::VectorXd G = random_vector(rng, 2, 5.0);

    const Eigen::VectorXd z = agd_estimate_step(x0, G, A, p, R);
    CHECK(z.lpNorm<1>() <= R * (1.0 + 1e-12));
    const double fz = estimate_value(z, x0, G, A, p);

    double best = estimate_value(x0, x0, G, A, p);
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        Eigen::VectorXd c(2);
        c << -R + 2.0 * R * i / grid, -R + 2.0 * R * j / grid;
        if (c.lpNorm<1>() > R) continue;
        best = std::min(best, estimate_value(c, x0, G, A, p));
      }
    }
    CHECK(fz <= best + 1e-8 * (1.0 + std::abs(best)));
  }
}

TEST_CASE("estimate step dominates random candidates with the solver's own constants") {
  SplitMix64 rng(205);
  const Eigen::Index n = 10;
  const double p = prox_d_exponent(static_cast<double>(n));
  for (int rep = 0; rep < 100; ++rep) {
    const double R = 0.5 + 2.0 * rng.next_double();
    const double A = 4.0 * prox_d_coefficient(static_cast<double>(n));
    const Eigen::VectorXd x0 = random_in_ball(rng, n, R);
    const Eigen::VectorXd G = random_vector(rng, n, 6.0);

    const Eigen::VectorXd z = agd_estimate_step(x0, G, A, p, R);
    CHECK(z.lpNorm<1>() <= R * (1.0 + 1e-12));
    const double fz = estimate_value(z, x0, G, A, p);
    for (int c = 0; c < 50; ++c) {
      const Eigen::VectorXd cand = random_in_ball(rng, n, R);
      CHECK(fz <= estimate_value(cand, x0, G, A, p) + 1e-9);
    }
  }
}

TEST_CASE("estimate step with a warm bracket matches the cold solve") {
  SplitMix64 rng(206);
  const Eigen::Index n = 20;
  const double p = prox_d_exponent(static_cast<double>(n));
  const double A = 4.0 * prox_d_coefficient(static_cast<double>(n));
  const double R = 2.0;
  const Eigen::VectorXd x0 = random_in_ball(rng, n, R);

  EstimateStepWarm warm;
  Eigen::VectorXd G = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < 12; ++k) {
    G += random_vector(rng, n, 2.0);
    const Eigen::VectorXd z_warm = agd_estimate_step(x0, G, A, p, R, &warm);
    const Eigen::VectorXd z_cold = agd_estimate_step(x0, G, A, p, R);
    CHECK((z_warm - z_cold).lpNorm<1>() <= 1e-9 * (1.0 + z_cold.lpNorm<1>()));
  }
}

TEST_CASE("estimate step validates its inputs") {
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
  const Eigen::VectorXd G = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(agd_estimate_step(x0, G, 0.0, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(agd_estimate_step(x0, G, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(agd_estimate_step(x0, G, 1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(agd_estimate_step(x0, G, 1.0, 1.5, 0.0), std::invalid_argument);
}

TEST_CASE("accelerated run meets the smooth convergence bound") {
  SplitMix64 rng(207);
  const Eigen::Index n = 40;
  const double R = 5.0;
  const SpikedQuadratic obj(1.0, 3.0, planted(rng, n, 3, R));
  const double beta1 = obj.constants().beta1;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  const double d_star = prox_d_value_grad(obj.x_star(), x0).value;

  for (int K : {10, 50}) {
    const AgdResult res = solve_agd_nesterov(obj, R, beta1, x0, K);
    REQUIRE(res.f_y.size() == static_cast<std::size_t>(K) + 1);
    CHECK(res.y.lpNorm<1>() <= R * (1.0 + 1e-10));
    CHECK(res.f_y.back() == obj.value(res.y));
    const double bound =
        4.0 * beta1 * d_star / (static_cast<double>(K + 1) * static_cast<double>(K + 2));
    CHECK(res.f_y.back() <= bound);
  }
}

TEST_CASE("accelerated run started at the optimum never moves") {
  SplitMix64 rng(208);
  const Eigen::Index n = 30;
  const double R = 4.0;
  const SpikedQuadratic obj(1.0, 3.0, planted(rng, n, 3, R));
  const AgdResult res = solve_agd_nesterov(obj, R, obj.constants().beta1, obj.x_star(), 15);
  // The iterate recombination is not bit-exact, so allow rounding-level drift.
  for (double f : res.f_y) CHECK(f <= 1e-25);
  CHECK((res.y - obj.x_star()).lpNorm<1>() <= 1e-12);
}

TEST_CASE("accelerated run validates its inputs") {
  const SpikedQuadratic obj(1.0, 1.0, Eigen::VectorXd::Zero(5));
  CHECK_THROWS_AS(solve_agd_nesterov(obj, 1.0, 1.0, Eigen::VectorXd::Zero(5), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_agd_nesterov(obj, 1.0, 1.0, Eigen::VectorXd::Zero(4), 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_agd_nesterov(obj, 1.0, 1.0, Eigen::VectorXd::Constant(5, 1.0), 5),
                  std::invalid_argument);
}

TEST_CASE("epoch lengths match their closed forms") {
  CHECK(restart_epoch_length(3, 4.0, 1.0, 100) == 162);
  CHECK(restart_epoch_length_heuristic(10, 4.0, 1.0) == 159);
  CHECK_THROWS_AS(restart_epoch_length(0, 4.0, 1.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(restart_epoch_length(3, 4.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(restart_epoch_length_heuristic(3, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("restarting with the analysis epoch length halves the error each epoch") {
  SplitMix64 rng(209);
  const Eigen::Index n = 60;
  const Eigen::Index s = 3;
  const double R = 5.0;
  const SpikedQuadratic obj(1.0, 3.0, planted(rng, n, s, R));
  const auto k = obj.constants();

  RestartedAgdParams params;
  params.radius = R;
  params.s = s;
  params.beta1 = k.beta1;
  params.alpha2 = k.alpha2;
  params.inner_iters = restart_epoch_length(s, k.beta1, k.alpha2, n);
  params.epochs = 7;
  params.f_star = 0.0;

  const SolverTrace trace = solve_restarted_agd(obj, params, Eigen::VectorXd::Zero(n));
  REQUIRE(trace.rows.size() == 8);
  const double scale = k.alpha2 * R * R / static_cast<double>(s);
  for (int t = 0; t < 7; ++t) {
    CHECK(trace.rows[static_cast<std::size_t>(t) + 1].f <= scale * std::ldexp(1.0, -(t + 3)));
  }
}
