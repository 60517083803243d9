// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pricer/analysis.hpp"
#include "pricer/mat.hpp"
#include "pricer/network.hpp"
#include "pricer/rng.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

enum class BiasNorm { kL1, kL2 };

inline const char* to_string(BiasNorm b) {
  return b == BiasNorm::kL1 ? "l1" : "l2";
}

inline double bias_term(const Vec& s, BiasNorm norm) {
  return norm == BiasNorm::kL1 ? bias_l1(s) : bias_l2(s);
}

// Regularized objective: worst-case variance bound plus lambda times the
// total deviation from unbiased contributions.
inline double objective(const NetworkModel& model,
                        const CollaborationScheme& scheme, double R,
                        std::size_t d, double lambda, BiasNorm norm) {
  const Vec s = s_vector(model, scheme);
  return tiv(model, scheme, R) + piv(model, scheme, d) +
         lambda * bias_term(s, norm);
}

// Analytic partials of the objective with respect to every weight and noise
// entry. For the L1 bias the subgradient convention is sign(S_i - 1) with 0
// exactly at the kink.
inline std::pair<Mat, Mat> gradient(const NetworkModel& model,
                                    const CollaborationScheme& scheme, double R,
                                    std::size_t d, double lambda,
                                    BiasNorm norm) {
  const std::size_t n = model.n;
  if (scheme.n() != n)
    throw std::invalid_argument("gradient: model/scheme size mismatch");
  Mat dA(n, n), dSigma(n, n);

  const Vec s = s_vector(model, scheme);
  double total_bias = 0.0;  // sum_i (S_i - 1)
  for (double v : s) total_bias += v - 1.0;

  Vec carried(n, 0.0);  // carried[j] = sum_l p_lj * alpha_lj
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l)
      carried[j] += model.P(l, j) * scheme.A(l, j);

  const double nn = static_cast<double>(n);
  const double scale = R * R / (nn * nn);

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double pab = model.P(a, b);
      const double pb = model.p[b];
      double g = 2.0 * pb * pab * (1.0 - pab) * scheme.A(a, b);
      g += 2.0 * pb * (1.0 - pb) * carried[b] * pab;
      const double cov = model.E(a, b) - pab * model.P(b, a);
      g += 2.0 * model.p[a] * pb * cov * scheme.A(b, a);
      g += 2.0 * total_bias * pb * pab;
      g *= scale;
      if (lambda != 0.0) {
        const double dev = s[a] - 1.0;
        const double db = norm == BiasNorm::kL2
                              ? 2.0 * dev * pb * pab
                              : (dev > 0.0 ? 1.0 : (dev < 0.0 ? -1.0 : 0.0)) *
                                    pb * pab;
        g += lambda * db;
      }
      dA(a, b) = g;
      dSigma(a, b) = 2.0 * static_cast<double>(d) / (nn * nn) * pb * pab *
                     scheme.Sigma(a, b);
    }
  return {dA, dSigma};
}

// Exact Euclidean projection of one (alpha, sigma) pair onto the feasibility
// cone {alpha >= 0, sigma >= slope * alpha}. Reprojecting the output returns
// it bitwise unchanged: the boundary case stores sigma as the literal
// product slope * alpha, which the membership test recomputes identically.
inline std::pair<double, double> project_cone(double alpha, double sigma,
                                              double slope) {
  if (!(slope >= 0.0) || std::isinf(slope))
    throw std::invalid_argument("project_cone: slope must be finite and >= 0");
  if (alpha >= 0.0 && sigma >= slope * alpha) return {alpha, sigma};
  if (alpha < 0.0 && sigma >= 0.0) return {0.0, sigma};
  const double t = (alpha + slope * sigma) / (1.0 + slope * slope);
  if (t <= 0.0) return {0.0, 0.0};
  return {t, slope * t};
}

struct OptimizerConfig {
  double eta_alpha = 0.01;
  double eta_sigma = 0.01;
  double lambda = 0.0;
  BiasNorm bias_norm = BiasNorm::kL2;
  std::size_t max_iters = 2000;
  double tol = 1e-8;           // objective-change threshold
  std::size_t tol_window = 10; // consecutive small changes required to stop
  std::size_t trace_stride = 1;  // record every k-th iterate (plus first/last)
  std::uint64_t seed = 0;
  bool randomize_init = false; // scale the base init per entry by U(0.5, 1.5)
  bool keep_best = false;      // return the best iterate instead of the last
  double init_cap = 1.0;
  double init_prob_floor = 1e-3;
};

struct TraceRow {
  std::size_t iter = 0;
  double objective = 0.0;
  double tiv = 0.0;
  double piv = 0.0;
  double bias = 0.0;
  bool feasible = true;
};

struct OptimizerTrace {
  std::vector<TraceRow> rows;
  CollaborationScheme scheme;
  bool converged = false;
  bool aborted_nan = false;
  std::size_t iterations = 0;
};

// Boundary-feasible starting point: weights sized like inverse expected
// reach (floored and capped), noise exactly on the cone boundary. Dead links
// start and stay at zero; the diagonal carries no noise.
inline CollaborationScheme initial_scheme(const NetworkModel& model,
                                          const TrustMatrix& trust, double R,
                                          const OptimizerConfig& cfg) {
  const std::size_t n = model.n;
  if (trust.n() != n)
    throw std::invalid_argument("optimize: model/trust size mismatch");
  CollaborationScheme s{Mat(n, n), Mat(n, n)};
  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (model.P(i, j) == 0.0) continue;
      const double reach = std::max(model.p[j] * model.P(i, j), cfg.init_prob_floor);
      double a = std::min(1.0 / (static_cast<double>(n) * reach), cfg.init_cap);
      if (cfg.randomize_init) a = std::min(a * rng.uniform(0.5, 1.5), cfg.init_cap);
      s.A(i, j) = a;
      if (i != j) s.Sigma(i, j) = cone_slope(trust, R, i, j) * a;
    }
  return s;
}

// Projected gradient descent on the regularized objective, starting from a
// caller-supplied point. Every iterate is projected entrywise onto its link's
// cone, so the whole trace is feasible whenever the start is. With keep_best
// the returned scheme is the lowest-objective iterate seen, which makes the
// result no worse than the start.
inline OptimizerTrace optimize_from(const NetworkModel& model,
                                    const TrustMatrix& trust, double R,
                                    std::size_t d, const OptimizerConfig& cfg,
                                    CollaborationScheme start) {
  if (!(cfg.eta_alpha > 0.0) || !(cfg.eta_sigma > 0.0))
    throw std::invalid_argument("optimize: step sizes must be positive");
  if (!(cfg.lambda >= 0.0))
    throw std::invalid_argument("optimize: lambda must be nonnegative");
  if (cfg.max_iters == 0)
    throw std::invalid_argument("optimize: max_iters must be positive");
  const std::size_t n = model.n;
  if (trust.n() != n)
    throw std::invalid_argument("optimize: model/trust size mismatch");
  if (start.A.rows() != n || !start.A.same_shape(start.Sigma))
    throw std::invalid_argument("optimize: start scheme has the wrong shape");

  Mat slope(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) slope(i, j) = cone_slope(trust, R, i, j);

  OptimizerTrace trace;
  trace.scheme = std::move(start);

  auto record = [&](std::size_t iter) {
    TraceRow row;
    row.iter = iter;
    const MseBreakdown b = bound(model, trace.scheme, R, d);
    row.tiv = b.tiv;
    row.piv = b.piv;
    row.bias = cfg.bias_norm == BiasNorm::kL1 ? b.bias_l1 : b.bias_l2;
    row.objective = b.bound + cfg.lambda * row.bias;
    row.feasible = is_feasible(trace.scheme, trust, R).feasible;
    trace.rows.push_back(row);
    return row.objective;
  };

  double prev_obj = record(0);
  double best_obj = prev_obj;
  CollaborationScheme best = trace.scheme;
  std::size_t small_changes = 0;
  const std::size_t stride = std::max<std::size_t>(1, cfg.trace_stride);

  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    const auto [dA, dSigma] =
        gradient(model, trace.scheme, R, d, cfg.lambda, cfg.bias_norm);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (model.P(i, j) == 0.0) continue;  // frozen dead link
        double a = trace.scheme.A(i, j) - cfg.eta_alpha * dA(i, j);
        if (i == j) {
          trace.scheme.A(i, j) = std::max(a, 0.0);  // sigma stays pinned at 0
          continue;
        }
        double s = trace.scheme.Sigma(i, j) - cfg.eta_sigma * dSigma(i, j);
        const auto [ak, sk] = project_cone(a, s, slope(i, j));
        trace.scheme.A(i, j) = ak;
        trace.scheme.Sigma(i, j) = sk;
      }

    const double obj =
        objective(model, trace.scheme, R, d, cfg.lambda, cfg.bias_norm);
    trace.iterations = t;
    if (std::isnan(obj)) {
      record(t);
      trace.aborted_nan = true;
      if (cfg.keep_best) trace.scheme = best;
      return trace;
    }
    if (cfg.keep_best && obj < best_obj) {
      best_obj = obj;
      best = trace.scheme;
    }
    bool stop = false;
    if (std::abs(obj - prev_obj) < cfg.tol) {
      if (++small_changes >= cfg.tol_window) {
        trace.converged = true;
        stop = true;
      }
    } else {
      small_changes = 0;
    }
    if (t % stride == 0 || t == cfg.max_iters || stop) record(t);
    if (stop) break;
    prev_obj = obj;
  }
  if (cfg.keep_best) trace.scheme = best;
  return trace;
}

// Same descent, started from the default boundary-feasible point.
inline OptimizerTrace optimize(const NetworkModel& model,
                               const TrustMatrix& trust, double R,
                               std::size_t d, const OptimizerConfig& cfg) {
  return optimize_from(model, trust, R, d, cfg,
                       initial_scheme(model, trust, R, cfg));
}

}  // namespace pricer
