// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT
//
// Independent solver for the symmetric two-tier problem. The noise level is
// always pinned to its constraint floor at any optimum (the noise term of
// the objective strictly increases in sigma), so the search runs over the
// two free weights with sigma substituted out; nonnegativity clamps are then
// the exact projection. Gradients come from central differences of the full
// matrix objective on the expanded scheme, with a backtracking line search,
// so no algebra is shared with the closed-form solution this cross-checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pricer/erdos_renyi.hpp"
#include "pricer/optimizer.hpp"

namespace oracle {

inline double er_objective(const pricer::ErConfig& c, double alpha,
                           double gamma, double sigma) {
  const pricer::CollaborationScheme s =
      pricer::expand_scheme(c, {alpha, gamma, sigma});
  return pricer::objective(pricer::er_network(c), s, c.R, c.d, c.lambda,
                           pricer::BiasNorm::kL2);
}

struct ErDescentResult {
  double alpha = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
};

inline ErDescentResult er_descent(const pricer::ErConfig& c,
                                  std::size_t max_iters = 100000,
                                  double tol = 1e-16) {
  const double slope = pricer::er_xi(c.delta) * c.R / c.eps;
  const pricer::NetworkModel net = pricer::er_network(c);
  auto eval = [&](double alpha, double gamma) {
    const pricer::CollaborationScheme s =
        pricer::expand_scheme(c, {alpha, gamma, slope * alpha});
    return pricer::objective(net, s, c.R, c.d, c.lambda, pricer::BiasNorm::kL2);
  };

  double alpha = 1.0 / (static_cast<double>(c.m) * c.p * c.q);
  double gamma = 1.0 / c.q;
  double f = eval(alpha, gamma);

  ErDescentResult out;
  double step = 0.1;
  std::size_t tiny_drops = 0;
  for (std::size_t t = 1; t <= max_iters; ++t) {
    out.iterations = t;
    const double ha = 1e-7 * std::max(1.0, alpha);
    const double hg = 1e-7 * std::max(1.0, gamma);
    const double ga = (eval(alpha + ha, gamma) - eval(alpha - ha, gamma)) / (2 * ha);
    const double gg = (eval(alpha, gamma + hg) - eval(alpha, gamma - hg)) / (2 * hg);

    bool moved = false;
    while (step > 1e-18) {
      const double na = std::max(alpha - step * ga, 0.0);
      const double ng = std::max(gamma - step * gg, 0.0);
      const double nf = eval(na, ng);
      if (nf < f) {
        const double drop = f - nf;
        alpha = na;
        gamma = ng;
        f = nf;
        moved = true;
        step *= 2.0;
        tiny_drops = drop < tol ? tiny_drops + 1 : 0;
        break;
      }
      step *= 0.5;
    }
    if (!moved || tiny_drops >= 8) break;
    if (step < 1e-16) step = 1e-12;  // give the next iterate a fresh chance
  }
  out.alpha = alpha;
  out.gamma = gamma;
  out.sigma = slope * alpha;
  out.objective = f;
  return out;
}

}  // namespace oracle
