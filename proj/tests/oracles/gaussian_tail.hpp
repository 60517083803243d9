// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT
//
// Analytic tail check for a claimed (eps, delta) pair of the additive
// Gaussian release with sensitivity at most `sens` and noise std `sigma`.
// For one-dimensional Gaussians the worst-case event is a half line, and the
// worst threshold solves phi((t-s)/sigma) = e^eps * phi(t/sigma) in closed
// form, so the supremum of P(M(x) in S) - e^eps * P(M(x') in S) over all
// threshold events is evaluated exactly (up to erfc accuracy) and then
// re-scanned on a grid as a belt-and-braces measure.

#pragma once

#include <algorithm>
#include <cmath>

namespace oracle {

inline double gauss_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Largest privacy-inequality violation over shift s (both directions) and
// threshold events. Nonpositive means the claimed pair really holds for this
// shift; delta enters the caller's comparison, not this function.
inline double tail_gap(double s, double sigma, double eps) {
  double worst = -1.0;
  auto probe = [&](double t) {
    // P(s + Z >= t) vs P(Z >= t), and the mirrored pair which by symmetry
    // equals swapping the roles of the two inputs.
    const double p_shift = gauss_upper_tail((t - s) / sigma);
    const double p_zero = gauss_upper_tail(t / sigma);
    worst = std::max(worst, p_shift - std::exp(eps) * p_zero);
    worst = std::max(worst, p_zero - std::exp(eps) * p_shift);
    // Complement events (lower tails).
    worst = std::max(worst, (1.0 - p_shift) - std::exp(eps) * (1.0 - p_zero));
    worst = std::max(worst, (1.0 - p_zero) - std::exp(eps) * (1.0 - p_shift));
  };
  // Stationary points of the two orderings.
  if (s != 0.0) {
    probe(sigma * sigma * eps / s + s / 2.0);
    probe(-(sigma * sigma * eps / s) + s / 2.0);
  }
  const double lo = std::min(0.0, s) - 12.0 * sigma;
  const double hi = std::max(0.0, s) + 12.0 * sigma;
  for (int k = 0; k <= 4000; ++k) probe(lo + (hi - lo) * k / 4000.0);
  return worst;
}

// Supremum of the violation over a grid of shifts up to the sensitivity.
inline double worst_tail_gap(double sens, double sigma, double eps,
                             int shift_steps = 16) {
  double worst = -1.0;
  for (int k = 1; k <= shift_steps; ++k)
    worst = std::max(worst, tail_gap(sens * k / shift_steps, sigma, eps));
  return worst;
}

}  // namespace oracle
