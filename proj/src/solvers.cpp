#include "sparsefw/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace sparsefw {

StepMode StepMode::fixed_theoretical() { return StepMode{Kind::FixedTheoretical, 0.0, {}}; }

StepMode StepMode::fixed_manual(double eta) {
  if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("StepMode: eta must be in (0, 1]");
  return StepMode{Kind::FixedManual, eta, {}};
}

StepMode StepMode::line_search(double eta) {
  if (eta > 1.0) throw std::invalid_argument("StepMode: eta must be in (0, 1]");
  return StepMode{Kind::LineSearch, eta, {}};
}

StepMode StepMode::auto_tuned(std::vector<int> grid) {
  if (grid.empty()) throw std::invalid_argument("StepMode: grid must be nonempty");
  return StepMode{Kind::AutoTuned, 0.0, std::move(grid)};
}

double SwfwParams::eta_theoretical() const {
  const double eta = alpha2 / (4.0 * beta * static_cast<double>(8 * s + s_star));
  return std::min(eta, 1.0);
}

SwfwParams make_swfw_params(const GeometrySpec& geom, double alpha2, double beta,
                            StepMode mode, int budget, double tol,
                            std::optional<double> f_star) {
  if (!(alpha2 > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("make_swfw_params: alpha2 and beta must be positive");
  }
  if (budget < 1) throw std::invalid_argument("make_swfw_params: budget must be positive");
  SwfwParams p;
  p.s = geom.s;
  p.alpha2 = alpha2;
  p.beta = beta;
  p.s_star = geom.s_star();
  p.mode = std::move(mode);
  p.budget = budget;
  p.tol = tol;
  p.f_star = f_star;
  return p;
}

namespace {

std::int64_t nanos_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                              start)
      .count();
}

// Shared loop for the vector and matrix variants; Ops supplies the geometry
// specific pieces.
template <class Ops>
SolverTrace swfw_loop(const Ops& ops, const SwfwParams& params, typename Ops::Point x,
                      typename Ops::Point* x_out) {
  using Point = typename Ops::Point;
  if (params.s < 1) throw std::invalid_argument("solve_swfw: s must be positive");
  const double eta_theory = params.eta_theoretical();
  if (!(eta_theory > 0.0)) throw std::invalid_argument("solve_swfw: constants give eta <= 0");

  std::vector<double> etas;
  switch (params.mode.kind) {
    case StepMode::Kind::FixedTheoretical:
      etas = {eta_theory};
      break;
    case StepMode::Kind::FixedManual:
    case StepMode::Kind::LineSearch:
      etas = {params.mode.eta > 0.0 ? params.mode.eta : eta_theory};
      break;
    case StepMode::Kind::AutoTuned:
      for (int i : params.mode.grid) etas.push_back(std::ldexp(eta_theory, i));
      break;
  }
  const bool fixed_gamma = params.mode.kind == StepMode::Kind::FixedTheoretical ||
                           params.mode.kind == StepMode::Kind::FixedManual;

  SolverTrace trace;
  trace.rows.reserve(static_cast<std::size_t>(params.budget));
  const auto start = std::chrono::steady_clock::now();
  const double prox_scale = 4.0 * static_cast<double>(params.s) * params.beta;

  Point grad;
  for (int t = 1; t <= params.budget; ++t) {
    const double f = ops.value_grad(x, grad);
    if (!std::isfinite(f)) throw std::runtime_error("solve_swfw: non-finite objective value");

    if (params.f_star) {
      const double gap = f - *params.f_star;
      if (gap <= params.tol) {
        trace.rows.push_back({t, f, gap, etas.front(), 0.0, nanos_since(start)});
        trace.status = StopStatus::ToleranceReached;
        break;
      }
    }

    const Point xh = ops.hard_thresh(x);

    // Evaluate the candidate set (a single eta outside AutoTuned).
    double best_f = 0.0;
    double best_eta = 0.0;
    double best_gamma = 0.0;
    Point best_v;
    bool have_best = false;
    for (double eta : etas) {
      Point v = ops.prox(xh - grad / (prox_scale * eta));
      double gamma;
      if (fixed_gamma) {
        gamma = eta;
      } else {
        gamma = ops.linesearch(x, v);
      }
      if (!have_best && fixed_gamma) {
        best_eta = eta;
        best_gamma = gamma;
        best_v = std::move(v);
        have_best = true;
        break;
      }
      const double f_next = ops.value(x + gamma * (v - x));
      if (!have_best || f_next < best_f) {
        best_f = f_next;
        best_eta = eta;
        best_gamma = gamma;
        best_v = std::move(v);
        have_best = true;
      }
    }
    trace.max_update_sparsity = std::max(trace.max_update_sparsity, ops.sparsity(best_v));

    double gap;
    if (params.f_star) {
      gap = f - *params.f_star;
    } else {
      gap = ops.inner(x - best_v, grad);
      if (gap <= params.tol) {
        trace.rows.push_back({t, f, gap, best_eta, 0.0, nanos_since(start)});
        trace.status = StopStatus::ToleranceReached;
        break;
      }
    }

    trace.rows.push_back({t, f, gap, best_eta, best_gamma, nanos_since(start)});
    if (t == params.budget) break;
    x = x + best_gamma * (best_v - x);
  }

  if (x_out) *x_out = std::move(x);
  return trace;
}

struct VectorOps {
  using Point = Eigen::VectorXd;
  const VectorObjective& obj;
  const GeometrySpec& geom;

  double value(const Point& x) const { return obj.value(x); }
  double value_grad(const Point& x, Point& g) const { return obj.value_grad(x, g); }
  Point hard_thresh(const Point& x) const { return hard_threshold(x, geom.s); }
  Point prox(const Point& z) const { return sparse_l1_prox(z, geom.radius, geom.s); }
  double linesearch(const Point& x, const Point& v) const { return exact_linesearch(obj, x, v); }
  double inner(const Point& a, const Point& b) const { return a.dot(b); }
  Eigen::Index sparsity(const Point& v) const {
    return (v.array() != 0.0).count();
  }
};

struct MatrixOps {
  using Point = Eigen::MatrixXd;
  const MatrixObjective& obj;
  const GeometrySpec& geom;

  double value(const Point& X) const { return obj.value(X); }
  double value_grad(const Point& X, Point& G) const { return obj.value_grad(X, G); }
  Point hard_thresh(const Point& X) const { return rank_threshold(X, geom.s).matrix; }
  Point prox(const Point& Z) const { return sparse_nuclear_prox(Z, geom.radius, geom.s); }
  double linesearch(const Point& X, const Point& V) const { return exact_linesearch(obj, X, V); }
  double inner(const Point& A, const Point& B) const { return (A.array() * B.array()).sum(); }
  Eigen::Index sparsity(const Point& V) const {
    const Eigen::VectorXd sv =
        Eigen::BDCSVD<Eigen::MatrixXd>(V).singularValues();
    if (sv.size() == 0) return 0;
    return (sv.array() > 1e-10 * sv[0]).count();
  }
};

}  // namespace

SolverTrace solve_swfw(const VectorObjective& obj, const GeometrySpec& geom,
                       const SwfwParams& params, const Eigen::VectorXd& x1,
                       Eigen::VectorXd* x_out) {
  if (geom.kind != GeometrySpec::Kind::L1Ball) {
    throw std::invalid_argument("solve_swfw: vector variant needs an l1 geometry");
  }
  if (params.s != geom.s || params.s_star != geom.s_star()) {
    throw std::invalid_argument("solve_swfw: params disagree with geometry");
  }
  if (x1.size() != obj.dim() || x1.size() != geom.rows) {
    throw std::invalid_argument("solve_swfw: start point dimension mismatch");
  }
  if (x1.lpNorm<1>() > geom.radius * (1.0 + 1e-10)) {
    throw std::invalid_argument("solve_swfw: start point infeasible");
  }
  return swfw_loop(VectorOps{obj, geom}, params, x1, x_out);
}

SolverTrace solve_swfw(const MatrixObjective& obj, const GeometrySpec& geom,
                       const SwfwParams& params, const Eigen::MatrixXd& X1,
                       Eigen::MatrixXd* X_out) {
  if (geom.kind != GeometrySpec::Kind::NuclearBall) {
    throw std::invalid_argument("solve_swfw: matrix variant needs a nuclear geometry");
  }
  if (params.s != geom.s || params.s_star != geom.s_star()) {
    throw std::invalid_argument("solve_swfw: params disagree with geometry");
  }
  if (X1.rows() != geom.rows || X1.cols() != geom.cols || X1.rows() != obj.rows() ||
      X1.cols() != obj.cols()) {
    throw std::invalid_argument("solve_swfw: start point shape mismatch");
  }
  if (nuclear_norm(X1) > geom.radius * (1.0 + 1e-10)) {
    throw std::invalid_argument("solve_swfw: start point infeasible");
  }
  return swfw_loop(MatrixOps{obj, geom}, params, X1, X_out);
}

SolverTrace solve_afw(const VectorObjective& obj, const AfwParams& params,
                      Eigen::VectorXd* x_out) {
  const Eigen::Index n = obj.dim();
  if (n < 1) throw std::invalid_argument("solve_afw: empty objective");
  if (!(params.radius > 0.0)) throw std::invalid_argument("solve_afw: radius must be positive");
  const double R = params.radius;

  // Active vertices R * sign * e_idx with their convex weights.
  struct Vertex {
    Eigen::Index idx;
    int sign;
    double weight;
  };
  std::vector<Vertex> active{{0, 1, 1.0}};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x[0] = R;

  SolverTrace trace;
  const auto start = std::chrono::steady_clock::now();
  Eigen::VectorXd g;

  for (int t = 1; t <= params.budget; ++t) {
    const double f = obj.value_grad(x, g);

    // Frank-Wolfe vertex: minimize <v, g> over +-R e_i.
    Eigen::Index fw_idx = 0;
    double fw_mag = std::abs(g[0]);
    for (Eigen::Index i = 1; i < n; ++i) {
      const double m = std::abs(g[i]);
      if (m > fw_mag) {
        fw_mag = m;
        fw_idx = i;
      }
    }
    const int fw_sign = g[fw_idx] > 0.0 ? -1 : 1;
    const double gap_fw = g.dot(x) + R * fw_mag;  // <g, x - v_fw>

    const double gap = params.f_star ? f - *params.f_star : gap_fw;
    if (gap <= params.tol) {
      trace.rows.push_back({t, f, gap, 0.0, 0.0, nanos_since(start)});
      trace.status = StopStatus::ToleranceReached;
      break;
    }
    if (t == params.budget) {
      trace.rows.push_back({t, f, gap, 0.0, 0.0, nanos_since(start)});
      break;
    }

    // Away vertex: maximize <v, g> over the active set.
    std::size_t away_pos = 0;
    double away_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < active.size(); ++j) {
      const double score = static_cast<double>(active[j].sign) * R * g[active[j].idx];
      if (score > away_score) {
        away_score = score;
        away_pos = j;
      }
    }
    const double gap_away = away_score - g.dot(x);  // <g, v_away - x>

    double gamma;
    if (gap_fw >= gap_away) {
      // Toward step.
      Eigen::VectorXd d = -x;
      d[fw_idx] += static_cast<double>(fw_sign) * R;
      const double slope = g.dot(d);
      const double q = obj.curvature_along(d);
      gamma = q > 0.0 ? std::clamp(-slope / q, 0.0, 1.0) : (slope < 0.0 ? 1.0 : 0.0);
      x += gamma * d;
      if (gamma >= 1.0) {
        active.assign(1, {fw_idx, fw_sign, 1.0});
      } else {
        for (Vertex& v : active) v.weight *= 1.0 - gamma;
        bool found = false;
        for (Vertex& v : active) {
          if (v.idx == fw_idx && v.sign == fw_sign) {
            v.weight += gamma;
            found = true;
            break;
          }
        }
        if (!found) active.push_back({fw_idx, fw_sign, gamma});
      }
    } else {
      // Away step, clamped so the away vertex weight stays nonnegative.
      const Vertex va = active[away_pos];
      Eigen::VectorXd d = x;
      d[va.idx] -= static_cast<double>(va.sign) * R;
      const double gamma_max = va.weight / (1.0 - va.weight);
      const double slope = g.dot(d);
      const double q = obj.curvature_along(d);
      gamma = q > 0.0 ? std::clamp(-slope / q, 0.0, gamma_max)
                      : (slope < 0.0 ? gamma_max : 0.0);
      x += gamma * d;
      const bool drop = gamma >= gamma_max;
      for (Vertex& v : active) v.weight *= 1.0 + gamma;
      active[away_pos].weight -= gamma;
      if (drop) active.erase(active.begin() + static_cast<std::ptrdiff_t>(away_pos));
    }

    // Weight bookkeeping: failures here are internal bugs, not bad input.
    double wsum = 0.0;
    for (const Vertex& v : active) {
      if (v.weight < -1e-12 || v.weight > 1.0 + 1e-9) {
        throw std::logic_error("solve_afw: vertex weight left [0, 1]");
      }
      wsum += v.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw std::logic_error("solve_afw: weights do not sum to 1");
    Eigen::VectorXd recon = Eigen::VectorXd::Zero(n);
    for (const Vertex& v : active) recon[v.idx] += v.weight * static_cast<double>(v.sign) * R;
    if ((recon - x).cwiseAbs().maxCoeff() > 1e-9) {
      throw std::logic_error("solve_afw: active set does not reconstruct the iterate");
    }

    trace.rows.push_back({t, f, gap, 0.0, gamma, nanos_since(start)});
  }

  if (x_out) *x_out = std::move(x);
  return trace;
}

SolverTrace solve_vfista(const VectorObjective& obj, const VFistaParams& params,
                         const Eigen::VectorXd& x0, Eigen::VectorXd* x_out) {
  if (!(params.radius > 0.0)) throw std::invalid_argument("solve_vfista: radius must be positive");
  if (!(params.beta2 >= params.alpha2) || !(params.alpha2 > 0.0)) {
    throw std::invalid_argument("solve_vfista: need beta2 >= alpha2 > 0");
  }
  if (x0.size() != obj.dim()) throw std::invalid_argument("solve_vfista: dimension mismatch");

  const double R = params.radius;
  const double sb = std::sqrt(params.beta2);
  const double sa = std::sqrt(params.alpha2);
  const double momentum = (sb - sa) / (sb + sa);

  Eigen::VectorXd x = project_l1_ball(x0, R);
  Eigen::VectorXd y = x;
  Eigen::VectorXd g;

  SolverTrace trace;
  trace.rows.reserve(static_cast<std::size_t>(params.budget));
  const auto start = std::chrono::steady_clock::now();

  for (int t = 1; t <= params.budget; ++t) {
    const double f = obj.value(x);
    double gap;
    if (params.f_star) {
      gap = f - *params.f_star;
    } else {
      // Projected-gradient stationarity residual at x.
      obj.value_grad(x, g);
      gap = params.beta2 * (x - project_l1_ball(x - g / params.beta2, R)).norm();
    }
    if (gap <= params.tol) {
      trace.rows.push_back({t, f, gap, 1.0 / params.beta2, 0.0, nanos_since(start)});
      trace.status = StopStatus::ToleranceReached;
      break;
    }
    trace.rows.push_back({t, f, gap, 1.0 / params.beta2, 0.0, nanos_since(start)});
    if (t == params.budget) break;

    obj.value_grad(y, g);
    Eigen::VectorXd x_next = project_l1_ball(y - g / params.beta2, R);
    y = x_next + momentum * (x_next - x);
    x = std::move(x_next);
  }

  if (x_out) *x_out = std::move(x);
  return trace;
}

SolverTrace solve_restarted_agd(const VectorObjective& obj, const RestartedAgdParams& params,
                                const Eigen::VectorXd& x0, Eigen::VectorXd* x_out) {
  if (!(params.radius > 0.0)) {
    throw std::invalid_argument("solve_restarted_agd: radius must be positive");
  }
  if (params.s < 1) throw std::invalid_argument("solve_restarted_agd: s must be positive");
  if (!(params.alpha2 > 0.0) || !(params.beta1 > 0.0)) {
    throw std::invalid_argument("solve_restarted_agd: constants must be positive");
  }
  if (params.inner_iters < 0 || params.epochs < 1) {
    throw std::invalid_argument("solve_restarted_agd: iteration counts must be positive");
  }
  if (x0.size() != obj.dim()) throw std::invalid_argument("solve_restarted_agd: dim mismatch");
  if (x0.lpNorm<1>() > params.radius * (1.0 + 1e-10)) {
    throw std::invalid_argument("solve_restarted_agd: start point infeasible");
  }
  const int K = params.inner_iters > 0
                    ? params.inner_iters
                    : restart_epoch_length(params.s, params.beta1, params.alpha2, obj.dim());

  Eigen::VectorXd x = x0;
  SolverTrace trace;
  const auto start = std::chrono::steady_clock::now();

  for (int t = 1; t <= params.epochs + 1; ++t) {
    const double f = obj.value(x);
    const double gap = params.f_star ? f - *params.f_star : f;
    trace.rows.push_back({t, f, gap, 0.0, 0.0, nanos_since(start)});
    if (params.f_star && gap <= params.tol) {
      trace.status = StopStatus::ToleranceReached;
      break;
    }
    if (t == params.epochs + 1) break;

    const Eigen::VectorXd anchor = hard_threshold(x, params.s);
    x = solve_agd_nesterov(obj, params.radius, params.beta1, anchor, K).y;
  }

  if (x_out) *x_out = std::move(x);
  return trace;
}

void write_trace_csv(const SolverTrace& trace, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw std::runtime_error("write_trace_csv: cannot open " + tmp);
    bool ok = std::fputs("iter,f,gap,eta,gamma,nanos\n", f) >= 0;
    for (const TraceRow& r : trace.rows) {
      ok = ok && std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%lld\n", r.iter, r.f, r.gap, r.eta,
                              r.gamma, static_cast<long long>(r.nanos)) > 0;
    }
    ok = std::fclose(f) == 0 && ok;
    if (!ok) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write_trace_csv: failed writing " + tmp);
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace sparsefw
