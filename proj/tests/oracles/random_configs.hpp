// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT
//
// Deterministic generators for small random problem instances shared by the
// test suites: networks with feasible pairwise correlations, schemes with
// live-link support, and datasets inside a radius-R ball. Everything is a
// pure function of the passed-in rng state.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pricer/network.hpp"
#include "pricer/rng.hpp"
#include "pricer/scheme.hpp"

namespace oracle {

inline pricer::NetworkModel random_network(pricer::Rng& rng, std::size_t n,
                                           double dead_link_rate = 0.2) {
  pricer::NetworkModel m;
  m.n = n;
  m.p.resize(n);
  for (auto& v : m.p) v = rng.uniform(0.05, 1.0);
  m.P = pricer::Mat(n, n);
  m.E = pricer::Mat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m.P(i, i) = 1.0;
    m.E(i, i) = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool dead = rng.uniform() < dead_link_rate;
      const double pij = dead ? 0.0 : rng.uniform(0.05, 1.0);
      const double pji = dead ? 0.0 : rng.uniform(0.05, 1.0);
      m.P(i, j) = pij;
      m.P(j, i) = pji;
      // Anywhere between independent and maximally aligned keeps the joint
      // two-link table a probability distribution.
      const double lo = pij * pji;
      const double hi = std::min(pij, pji);
      const double e = lo + rng.uniform() * (hi - lo);
      m.E(i, j) = e;
      m.E(j, i) = e;
    }
  pricer::validate_network(m);
  return m;
}

inline pricer::CollaborationScheme random_scheme(pricer::Rng& rng,
                                                 const pricer::NetworkModel& m,
                                                 double alpha_hi = 2.0,
                                                 double sigma_hi = 1.0) {
  const std::size_t n = m.n;
  pricer::CollaborationScheme s{pricer::Mat(n, n), pricer::Mat(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (m.P(i, j) == 0.0) continue;
      s.A(i, j) = rng.uniform(0.0, alpha_hi);
      if (i != j) s.Sigma(i, j) = rng.uniform(0.0, sigma_hi);
    }
  return s;
}

inline pricer::Dataset random_dataset(pricer::Rng& rng, std::size_t n,
                                      std::size_t d, double R) {
  pricer::Dataset data;
  data.R = R;
  data.X = pricer::Mat(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm_sq = 0.0;
    std::vector<double> row(d);
    for (auto& v : row) {
      v = rng.gaussian();
      norm_sq += v * v;
    }
    // Scale to a point strictly inside the ball with a random radius.
    const double target = R * std::pow(rng.uniform(), 1.0 / d);
    const double scale = norm_sq > 0.0 ? target / std::sqrt(norm_sq) : 0.0;
    for (std::size_t k = 0; k < d; ++k) data.X(i, k) = row[k] * scale;
  }
  return data;
}

}  // namespace oracle
