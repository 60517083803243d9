// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pricer/mat.hpp"
#include "pricer/network.hpp"
#include "pricer/rng.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

struct RoundOutcome {
  LinkRealization links;
  Mat node_aggregates;  // n x d, row i holds the signal node i sends upward
  Vec ps_estimate;      // length d
  Vec true_mean;        // length d
  double squared_error = 0.0;
};

// One protocol round. Stage one: every node j sends every reachable node i
// the scaled and perturbed signal alpha_ji * x_j + noise, and each node sums
// what it received (its own contribution always goes through). Stage two:
// the parameter server averages whatever node aggregates arrive.
inline RoundOutcome run_round(const Dataset& data, const NetworkModel& model,
                              const CollaborationScheme& scheme, Rng& rng) {
  const std::size_t n = model.n;
  const std::size_t d = data.d();
  if (data.n() != n || scheme.n() != n)
    throw std::invalid_argument("run_round: size mismatch");

  RoundOutcome out;
  out.links = sample_links(model, rng);
  out.node_aggregates = Mat(n, d);
  out.true_mean = data.mean();

  for (std::size_t i = 0; i < n; ++i) {      // receiving node
    for (std::size_t j = 0; j < n; ++j) {    // sending node
      if (!out.links.link(j, i, n)) continue;
      const double a = scheme.A(j, i);
      const double sd = scheme.Sigma(j, i);
      if (a == 0.0 && sd == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) {
        double v = a * data.X(j, k);
        if (sd > 0.0) v += sd * rng.gaussian();
        out.node_aggregates(i, k) += v;
      }
    }
  }

  out.ps_estimate.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.links.ps(i)) continue;
    for (std::size_t k = 0; k < d; ++k)
      out.ps_estimate[k] += out.node_aggregates(i, k);
  }
  for (std::size_t k = 0; k < d; ++k)
    out.ps_estimate[k] /= static_cast<double>(n);

  out.squared_error = squared_distance(out.ps_estimate, out.true_mean);
  return out;
}

struct MonteCarloResult {
  double mse = 0.0;
  double se = 0.0;  // standard error of the mse estimate
  std::size_t trials = 0;
  Vec mean_estimate;     // average ps_estimate, length d
  Vec mean_se;           // per-coordinate standard error of mean_estimate
};

// Repeats run_round over independent per-trial random streams and averages
// the squared error. Trial t draws from a stream derived from (seed, t), so
// the estimate does not depend on evaluation order and any prefix of trials
// is itself reproducible.
inline MonteCarloResult monte_carlo_mse(const Dataset& data,
                                        const NetworkModel& model,
                                        const CollaborationScheme& scheme,
                                        std::size_t trials, std::uint64_t seed) {
  if (trials == 0)
    throw std::invalid_argument("monte_carlo_mse: trials must be positive");
  const std::size_t d = data.d();
  KahanSum sum, sum_sq;
  std::vector<KahanSum> coord_sum(d), coord_sq(d);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const RoundOutcome r = run_round(data, model, scheme, rng);
    sum.add(r.squared_error);
    sum_sq.add(r.squared_error * r.squared_error);
    for (std::size_t k = 0; k < d; ++k) {
      coord_sum[k].add(r.ps_estimate[k]);
      coord_sq[k].add(r.ps_estimate[k] * r.ps_estimate[k]);
    }
  }
  const double m = static_cast<double>(trials);
  MonteCarloResult res;
  res.trials = trials;
  res.mse = sum.value() / m;
  const double var = std::max(0.0, sum_sq.value() / m - res.mse * res.mse);
  res.se = trials > 1 ? std::sqrt(var / (m - 1.0)) : 0.0;
  res.mean_estimate.resize(d);
  res.mean_se.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    res.mean_estimate[k] = coord_sum[k].value() / m;
    const double cv = std::max(
        0.0, coord_sq[k].value() / m - res.mean_estimate[k] * res.mean_estimate[k]);
    res.mean_se[k] = trials > 1 ? std::sqrt(cv / (m - 1.0)) : 0.0;
  }
  return res;
}

}  // namespace pricer
