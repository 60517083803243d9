// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "pricer/mat.hpp"
#include "pricer/network.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

// Symmetric two-tier setting: nodes 0..m-1 ("bridges") reach the parameter
// server with probability q, the remaining n-m nodes have no direct link and
// relay through the bridges; every node-node link succeeds with probability
// p. All peer links carry the same (eps, delta) requirement, so by symmetry
// the optimal scheme has one relay weight alpha, one self weight gamma and
// one noise level sigma.
struct ErConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  double p = 1.0;
  double q = 1.0;
  double eps = 1.0;
  double delta = 1e-3;
  double R = 1.0;
  std::size_t d = 1;
  double lambda = 0.0;  // bias regularization; +infinity selects the
                        // exactly-unbiased limit
};

inline void validate_er_config(const ErConfig& c) {
  if (c.m == 0 || c.m > c.n)
    throw std::invalid_argument("er: need 1 <= m <= n");
  if (!(c.p > 0.0) || c.p > 1.0 || !(c.q > 0.0) || c.q > 1.0)
    throw std::invalid_argument("er: p and q must be in (0,1]");
  if (!(c.eps > 0.0)) throw std::invalid_argument("er: eps must be positive");
  if (!(c.delta > 0.0) || c.delta > 1.0)
    throw std::invalid_argument("er: delta must be in (0,1]");
  if (!(c.lambda >= 0.0)) throw std::invalid_argument("er: negative lambda");
}

// Combined cone factor: sigma = xi * R * alpha / eps on the active
// constraint, with xi = 2 sqrt(2 log(1.25 / delta)).
inline double er_xi(double delta) {
  return 2.0 * std::sqrt(2.0 * std::log(1.25 / delta));
}

struct ErSolution {
  double alpha = 0.0;  // relay weight, outer node -> bridge
  double gamma = 0.0;  // self weight of every node
  double sigma = 0.0;  // noise std on relay links
};

// Stationary point of the reduced three-variable problem (convex once the
// noise constraint is substituted). The lambda = +infinity branch is the
// exactly-unbiased scheme alpha = 1/(mpq), gamma = 1/q.
inline ErSolution closed_form(const ErConfig& c) {
  validate_er_config(c);
  const double n = static_cast<double>(c.n);
  const double m = static_cast<double>(c.m);
  const double xi = er_xi(c.delta);
  ErSolution sol;
  if (std::isinf(c.lambda)) {
    if (m * c.p * c.q == 0.0)
      throw std::domain_error("closed_form: degenerate m*p*q");
    sol.alpha = 1.0 / (m * c.p * c.q);
    sol.gamma = 1.0 / c.q;
  } else {
    if (!(c.lambda > 0.0))
      throw std::domain_error("closed_form: lambda must be positive or infinite");
    const double w =
        (1.0 - c.p) + static_cast<double>(c.d) * xi * xi / (c.eps * c.eps);
    const double k = 1.0 + (m - 1.0) * c.q;
    const double c_nn = c.R * c.R / (c.lambda * n * n);
    const double denom = c_nn * w * (c_nn * k + c.q) +
                         m * c.p * c.q *
                             (c.R * c.R / (c.lambda * m * n) * k + c.q);
    sol.alpha = c.q * (c.R * c.R / (c.lambda * n) + 1.0) / denom;
    const double rn2 = c.R * c.R / (n * n);
    sol.gamma = (rn2 * (n - k * (n - m) * c.p * sol.alpha) + c.lambda) /
                (rn2 * k + c.lambda * c.q);
  }
  sol.sigma = xi * c.R * sol.alpha / c.eps;
  return sol;
}

// Exact error of the exactly-unbiased scheme: variance from link failures
// plus the privacy noise needed to keep every relay weight on the cone.
inline double mse_at_lambda_inf(const ErConfig& c) {
  validate_er_config(c);
  const double n = static_cast<double>(c.n);
  const double m = static_cast<double>(c.m);
  const double xi = er_xi(c.delta);
  const double relayed =
      (n - m) / (n * n * m * c.p * c.q) *
      (1.0 - c.p + xi * xi * static_cast<double>(c.d) / (c.eps * c.eps));
  return c.R * c.R * (relayed + (1.0 - c.q) / (m * c.q));
}

// Baseline without collaboration: every node inverse-probability-weights its
// own transmission. Outer nodes would need server probability q_prime; the
// cost diverges as q_prime -> 0 while the collaborative error stays finite.
inline double no_collab_mse(const ErConfig& c, double q_prime) {
  validate_er_config(c);
  if (!(q_prime >= 0.0) || q_prime > 1.0)
    throw std::invalid_argument("no_collab_mse: q_prime must be in [0,1]");
  if (q_prime == 0.0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(c.n);
  const double m = static_cast<double>(c.m);
  return c.R * c.R / (n * n) * (m / c.q + (n - m) / q_prime - n);
}

inline NetworkModel er_network(const ErConfig& c) {
  validate_er_config(c);
  NetworkModel net;
  net.n = c.n;
  net.p.assign(c.n, 0.0);
  for (std::size_t i = 0; i < c.m; ++i) net.p[i] = c.q;
  net.P = Mat(c.n, c.n, c.p);
  for (std::size_t i = 0; i < c.n; ++i) net.P(i, i) = 1.0;
  net.E = independent_correlations(net.P);
  return net;
}

inline TrustMatrix er_trust(const ErConfig& c) {
  validate_er_config(c);
  TrustMatrix t;
  t.eps = Mat(c.n, c.n, c.eps);
  t.delta = Mat(c.n, c.n, c.delta);
  for (std::size_t i = 0; i < c.n; ++i) t.eps(i, i) = kFullTrust;
  return t;
}

// Expands the three symmetric values to full matrices: every node keeps self
// weight gamma (noiseless), every outer node relays to every bridge with
// weight alpha and noise sigma, all other links are unused.
inline CollaborationScheme expand_scheme(const ErConfig& c,
                                         const ErSolution& sol) {
  validate_er_config(c);
  CollaborationScheme s{Mat(c.n, c.n), Mat(c.n, c.n)};
  for (std::size_t j = 0; j < c.n; ++j) s.A(j, j) = sol.gamma;
  for (std::size_t i = c.m; i < c.n; ++i)
    for (std::size_t j = 0; j < c.m; ++j) {
      s.A(i, j) = sol.alpha;
      s.Sigma(i, j) = sol.sigma;
    }
  return s;
}

}  // namespace pricer
