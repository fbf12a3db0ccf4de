#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsefw/solvers.hpp"

namespace sparsefw {

namespace {

constexpr double kEulerSq = 7.389056098930650227;  // e^2

// Root bracketing helper: f is decreasing with f(lo) > 0 > f(hi). Illinois
// variant of regula falsi; falls back to bisection on degenerate secants.
template <class Fn>
double illinois(Fn&& f, double lo, double flo, double hi, double fhi, double xtol_rel,
                int cap, const char* what) {
  int side = 0;
  for (int it = 0; it < cap; ++it) {
    if (hi - lo <= xtol_rel * std::max(std::abs(hi), 1e-300)) break;
    double x;
    if (std::isfinite(flo) && std::isfinite(fhi) && fhi != flo) {
      x = (lo * fhi - hi * flo) / (fhi - flo);
    } else {
      x = 0.5 * (lo + hi);
    }
    if (!(x > lo) || !(x < hi)) x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) {
      lo = x;
      flo = fx;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = x;
      fhi = fx;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }
  if (hi - lo > 1e-6 * std::max(std::abs(hi), 1.0)) {
    throw std::runtime_error(std::string(what) + ": root finder failed to converge");
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// The subproblem min <g, y - x> + (beta/2) ||y - x||_1^2 over the l1 ball is
// solved exactly. Writing t = ||y - x||_1, the best objective for a given t
// is psi(t) + (beta/2) t^2 where psi is piecewise linear and convex, and the
// pieces come from a greedy exchange: per unit of l1 movement one can
//   - shrink a coordinate whose sign agrees with its gradient (gain |g_i|,
//     frees ball slack),
//   - grow the best-gradient coordinate against its gradient sign (gain
//     |g_i|, consumes slack),
//   - at zero slack, pair a grow with the cheapest shrink (half speed each).
// Rates are nonincreasing along the greedy, so the quadratic term picks the
// stopping point t* = rate/beta within the active piece.
Eigen::VectorXd agd_primary_step(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                 double beta, double radius) {
  if (!(beta > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("agd_primary_step: beta and radius must be positive");
  }
  if (x.size() != g.size()) throw std::invalid_argument("agd_primary_step: size mismatch");
  const Eigen::Index n = x.size();

  Eigen::VectorXd y = x;
  double sigma = std::max(radius - y.lpNorm<1>(), 0.0);
  double spent = 0.0;
  const double inf = std::numeric_limits<double>::infinity();

  const int stage_cap = static_cast<int>(4 * n + 8);
  for (int stage = 0; stage < stage_cap; ++stage) {
    // Classify coordinates. shrink value: gain for sign-agreeing coordinates,
    // cost otherwise.
    Eigen::Index a_idx = -1;
    double a_rate = -inf;
    Eigen::Index b1 = -1, b2 = -1;
    double b1_rate = -inf, b2_rate = -inf;
    Eigen::Index s1 = -1, s2 = -1;
    double s1_val = -inf, s2_val = -inf;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double gi = g[i];
      const double yi = y[i];
      const double mag = std::abs(gi);
      const bool agree = yi * gi > 0.0;  // pay direction shrinks |y_i|
      if (agree) {
        if (mag > a_rate) {
          a_rate = mag;
          a_idx = i;
        }
      } else if (gi != 0.0) {
        if (mag > b1_rate) {
          b2_rate = b1_rate;
          b2 = b1;
          b1_rate = mag;
          b1 = i;
        } else if (mag > b2_rate) {
          b2_rate = mag;
          b2 = i;
        }
      }
      if (yi != 0.0) {
        const double val = agree ? mag : -mag;
        if (val > s1_val) {
          s2_val = s1_val;
          s2 = s1;
          s1_val = val;
          s1 = i;
        } else if (val > s2_val) {
          s2_val = val;
          s2 = i;
        }
      }
    }

    // Candidate actions for this stage.
    enum class Act { None, Shrink, Grow, Pair } act = Act::None;
    double rate = 0.0;
    double cap = 0.0;
    Eigen::Index grow_idx = -1, shrink_idx = -1;
    if (sigma > 0.0) {
      if (a_idx >= 0 && a_rate >= b1_rate) {
        act = Act::Shrink;
        rate = a_rate;
        cap = std::abs(y[a_idx]);
        shrink_idx = a_idx;
      } else if (b1 >= 0) {
        act = Act::Grow;
        rate = b1_rate;
        cap = sigma;
        grow_idx = b1;
      }
    } else {
      double pair_rate = -inf;
      Eigen::Index pg = -1, ps = -1;
      if (b1 >= 0 && s1 >= 0) {
        if (s1 != b1) {
          pair_rate = 0.5 * (b1_rate + s1_val);
          pg = b1;
          ps = s1;
        } else {
          const double opt1 = s2 >= 0 ? 0.5 * (b1_rate + s2_val) : -inf;
          const double opt2 = b2 >= 0 ? 0.5 * (b2_rate + s1_val) : -inf;
          if (opt1 >= opt2 && s2 >= 0) {
            pair_rate = opt1;
            pg = b1;
            ps = s2;
          } else if (b2 >= 0) {
            pair_rate = opt2;
            pg = b2;
            ps = s1;
          }
        }
      }
      if (a_idx >= 0 && a_rate >= pair_rate) {
        act = Act::Shrink;
        rate = a_rate;
        cap = std::abs(y[a_idx]);
        shrink_idx = a_idx;
      } else if (pg >= 0) {
        act = Act::Pair;
        rate = pair_rate;
        cap = 2.0 * std::abs(y[ps]);
        grow_idx = pg;
        shrink_idx = ps;
      }
    }

    if (act == Act::None || rate <= 0.0 || rate <= beta * spent) break;
    const double len = std::min(cap, rate / beta - spent);
    if (!(len > 0.0)) break;

    switch (act) {
      case Act::Shrink: {
        const double yi = y[shrink_idx];
        y[shrink_idx] = len == cap ? 0.0 : yi - (yi > 0.0 ? len : -len);
        sigma += len;
        break;
      }
      case Act::Grow:
        y[grow_idx] -= (g[grow_idx] > 0.0 ? len : -len);
        sigma = len == cap ? 0.0 : sigma - len;
        break;
      case Act::Pair: {
        const double half = 0.5 * len;
        y[grow_idx] -= (g[grow_idx] > 0.0 ? half : -half);
        const double yc = y[shrink_idx];
        y[shrink_idx] = len == cap ? 0.0 : yc - (yc > 0.0 ? half : -half);
        break;
      }
      case Act::None:
        break;
    }
    spent += len;
    if (len < cap) break;  // stopped inside the piece: t* reached
  }
  return y;
}

namespace {

// Coordinatewise minimizer of A ||u||_p^2 + <G, u> + lambda ||x0 + u||_1 for
// a fixed norm weight omega = 2 A ||u||_p^{2-p}, evaluated self-consistently
// below. Returns ||u||_p given omega; fills u when requested.
struct PenalizedEval {
  const Eigen::VectorXd& x0;
  const Eigen::VectorXd& G;
  double p;
  double lambda;

  // log |lambda +- G_i| are reused across omega evaluations.
  Eigen::VectorXd log_wp, log_wm;
  Eigen::VectorXd abs_x0_p;  // |x0_i|^p

  void prepare() {
    const Eigen::Index n = x0.size();
    log_wp.resize(n);
    log_wm.resize(n);
    abs_x0_p.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      log_wp[i] = std::log(std::max(std::abs(G[i] + lambda), 1e-300));
      log_wm[i] = std::log(std::max(std::abs(G[i] - lambda), 1e-300));
      const double a = std::abs(x0[i]);
      abs_x0_p[i] = a >= 1e-300 ? std::pow(a, p) : 0.0;
    }
  }

  double norm_p(double omega, Eigen::VectorXd* u_out) const {
    const Eigen::Index n = x0.size();
    const double e1 = 1.0 / (p - 1.0);
    const double log_omega = std::log(omega);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Candidate with x0_i + u_i > 0: omega sign(u)|u|^{p-1} = -(G_i+lambda).
      const double wp = -(G[i] + lambda);
      double u;
      bool done = false;
      if (wp != 0.0) {
        const double lu = e1 * (log_wp[i] - log_omega);
        const double mag = lu > 690.0 ? std::numeric_limits<double>::infinity() : std::exp(lu);
        u = wp > 0.0 ? mag : -mag;
        if (x0[i] + u > 0.0) {
          sum += lu > 690.0 ? mag : std::exp(p * lu);
          done = true;
        }
      }
      if (!done) {
        const double wm = -(G[i] - lambda);
        if (wm != 0.0) {
          const double lu = e1 * (log_wm[i] - log_omega);
          const double mag = lu > 690.0 ? std::numeric_limits<double>::infinity() : std::exp(lu);
          u = wm > 0.0 ? mag : -mag;
          if (x0[i] + u < 0.0) {
            sum += lu > 690.0 ? mag : std::exp(p * lu);
            done = true;
          }
        }
      }
      if (!done) {
        if (lambda == 0.0 && G[i] == 0.0) {
          u = 0.0;  // no kink without the l1 term; the smooth part wants u = 0
        } else {
          u = -x0[i];
          sum += abs_x0_p[i];
        }
      }
      if (u_out) (*u_out)[i] = u;
    }
    return std::isfinite(sum) ? std::pow(sum, 1.0 / p) : sum;
  }
};

// Solves min over u of A ||u||_p^2 + <G, u> + lambda ||x0 + u||_1 by finding
// the self-consistent norm nu = ||u||_p (omega = 2 A nu^{2-p} is the weight
// the p-norm square contributes at that norm). F(nu) = ||u(omega(nu))||_p -
// nu is decreasing.
Eigen::VectorXd penalized_min(const Eigen::VectorXd& x0, const Eigen::VectorXd& G, double A,
                              double p, double lambda, double* nu_warm) {
  PenalizedEval eval{x0, G, p, lambda, {}, {}, {}};
  eval.prepare();
  auto F = [&](double nu) {
    const double omega = 2.0 * A * std::pow(nu, 2.0 - p);
    return eval.norm_p(omega, nullptr) - nu;
  };

  double hi = (nu_warm && *nu_warm > 0.0) ? *nu_warm : std::max(x0.lpNorm<1>(), 1.0);
  double lo = hi;
  double flo = F(lo);
  int guard = 0;
  while (flo <= 0.0) {
    hi = lo;
    lo *= 0.125;
    if (lo < 1e-280) {
      // Solution is u = 0 (or numerically indistinguishable from it).
      if (nu_warm) *nu_warm = -1.0;
      return x0;
    }
    flo = F(lo);
    if (++guard > 400) throw std::runtime_error("agd_estimate_step: norm bracket failed");
  }
  double fhi = lo == hi ? flo : F(hi);
  guard = 0;
  while (fhi > 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 8.0;
    fhi = F(hi);
    if (++guard > 400) throw std::runtime_error("agd_estimate_step: norm bracket failed");
  }

  const double nu = illinois(F, lo, flo, hi, fhi, 1e-15, 300, "agd_estimate_step");
  if (nu_warm) *nu_warm = nu;
  Eigen::VectorXd u(x0.size());
  eval.norm_p(2.0 * A * std::pow(nu, 2.0 - p), &u);
  return x0 + u;
}

}  // namespace

Eigen::VectorXd agd_estimate_step(const Eigen::VectorXd& x0, const Eigen::VectorXd& G,
                                  double A, double p, double radius, EstimateStepWarm* warm) {
  if (!(A > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("agd_estimate_step: A and radius must be positive");
  }
  if (!(p > 1.0) || !(p < 2.0)) throw std::invalid_argument("agd_estimate_step: need 1 < p < 2");
  if (x0.size() != G.size()) throw std::invalid_argument("agd_estimate_step: size mismatch");

  double nu_local = warm ? warm->nu : -1.0;
  Eigen::VectorXd z = penalized_min(x0, G, A, p, 0.0, &nu_local);
  if (z.lpNorm<1>() <= radius * (1.0 + 1e-14)) {
    if (warm) {
      warm->lambda = 0.0;
      warm->nu = nu_local;
    }
    const double norm1 = z.lpNorm<1>();
    if (norm1 > radius) z *= radius / norm1;
    return z;
  }

  auto D = [&](double lambda) {
    z = penalized_min(x0, G, A, p, lambda, &nu_local);
    return z.lpNorm<1>() - radius;
  };

  // Bracket the ball multiplier; warm lambda from the previous call usually
  // lands inside or near the bracket already.
  double lo = 0.0;
  double flo = z.lpNorm<1>() - radius;  // > 0 from the check above
  double hi = (warm && warm->lambda > 0.0) ? warm->lambda : 1.0;
  double fhi = D(hi);
  int guard = 0;
  while (fhi > 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 8.0;
    fhi = D(hi);
    if (++guard > 400) throw std::runtime_error("agd_estimate_step: lambda bracket failed");
  }
  const double lambda =
      illinois([&](double l) { return D(l); }, lo, flo, hi, fhi, 1e-14, 300, "agd_estimate_step");

  z = penalized_min(x0, G, A, p, lambda, &nu_local);
  if (warm) {
    warm->lambda = lambda;
    warm->nu = nu_local;
  }
  const double norm1 = z.lpNorm<1>();
  if (norm1 > radius) z *= radius / norm1;
  return z;
}

AgdResult solve_agd_nesterov(const VectorObjective& obj, double radius, double beta1,
                             const Eigen::VectorXd& x0, int K) {
  if (K < 1) throw std::invalid_argument("solve_agd_nesterov: need K >= 1");
  if (!(beta1 > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("solve_agd_nesterov: constants must be positive");
  }
  const Eigen::Index n = obj.dim();
  if (x0.size() != n) throw std::invalid_argument("solve_agd_nesterov: dim mismatch");
  if (x0.lpNorm<1>() > radius * (1.0 + 1e-10)) {
    throw std::invalid_argument("solve_agd_nesterov: start point infeasible");
  }

  const double nd = static_cast<double>(n);
  const double p = prox_d_exponent(nd);
  const double A = beta1 * prox_d_coefficient(nd);

  AgdResult out;
  out.f_y.reserve(static_cast<std::size_t>(K) + 1);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd G = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g;
  EstimateStepWarm warm;

  for (int k = 0; k <= K; ++k) {
    obj.value_grad(x, g);
    Eigen::VectorXd y = agd_primary_step(x, g, beta1, radius);
    out.f_y.push_back(obj.value(y));
    if (k == K) {
      out.y = std::move(y);
      break;
    }
    G += (0.5 * (k + 1)) * g;
    const Eigen::VectorXd z = agd_estimate_step(x0, G, A, p, radius, &warm);
    const double kk = static_cast<double>(k);
    x = (2.0 / (kk + 3.0)) * z + ((kk + 1.0) / (kk + 3.0)) * y;
  }
  return out;
}

int restart_epoch_length(Eigen::Index s, double beta1, double alpha2, Eigen::Index n) {
  if (s < 1 || n < 3 || !(beta1 > 0.0) || !(alpha2 > 0.0)) {
    throw std::invalid_argument("restart_epoch_length: bad constants");
  }
  const double v = 64.0 * static_cast<double>(s) * beta1 * kEulerSq *
                   std::log(static_cast<double>(n)) / alpha2;
  return static_cast<int>(std::ceil(std::sqrt(v)));
}

int restart_epoch_length_heuristic(Eigen::Index s, double beta1, double alpha2) {
  if (s < 1 || !(beta1 > 0.0) || !(alpha2 > 0.0)) {
    throw std::invalid_argument("restart_epoch_length_heuristic: bad constants");
  }
  return static_cast<int>(std::ceil(25.0 * std::sqrt(beta1 * static_cast<double>(s) / alpha2)));
}

}  // namespace sparsefw
