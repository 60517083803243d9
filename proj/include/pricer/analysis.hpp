// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pricer/mat.hpp"
#include "pricer/network.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

// Expected total weight with which node i's data reaches the parameter
// server: S(i) = sum_j p_j * p_ij * alpha_ij. S(i) = 1 means node i
// contributes unbiasedly to the estimate.
inline Vec s_vector(const NetworkModel& model, const CollaborationScheme& scheme) {
  const std::size_t n = model.n;
  if (scheme.n() != n)
    throw std::invalid_argument("s_vector: model/scheme size mismatch");
  Vec s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s[i] += model.p[j] * model.P(i, j) * scheme.A(i, j);
  return s;
}

inline double bias_l1(const Vec& s) {
  double b = 0.0;
  for (double v : s) b += std::abs(v - 1.0);
  return b;
}

inline double bias_l2(const Vec& s) {
  double b = 0.0;
  for (double v : s) b += (v - 1.0) * (v - 1.0);
  return b;
}

// Topology-induced variance: worst-case (over data in the radius-R ball)
// expected squared error caused by random link failures alone. Four pieces:
// per-link weight variance, per-destination PS-link variance of the carried
// mass, the covariance of the two directions of each node pair, and the
// squared total bias.
inline double tiv(const NetworkModel& model, const CollaborationScheme& scheme,
                  double R) {
  const std::size_t n = model.n;
  if (scheme.n() != n)
    throw std::invalid_argument("tiv: model/scheme size mismatch");
  double t1 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = model.P(i, j);
      const double a = scheme.A(i, j);
      t1 += model.p[j] * pij * (1.0 - pij) * a * a;
    }
  double t2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double carried = 0.0;  // sum_i p_ij * alpha_ij
    for (std::size_t i = 0; i < n; ++i) carried += model.P(i, j) * scheme.A(i, j);
    t2 += model.p[j] * (1.0 - model.p[j]) * carried * carried;
  }
  double t3 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double cov = model.E(i, j) - model.P(i, j) * model.P(j, i);
      t3 += model.p[i] * model.p[j] * cov * scheme.A(i, j) * scheme.A(j, i);
    }
  const Vec s = s_vector(model, scheme);
  double total_bias = 0.0;
  for (double v : s) total_bias += v - 1.0;
  const double t4 = total_bias * total_bias;
  const double nn = static_cast<double>(n);
  return R * R / (nn * nn) * (t1 + t2 + t3 + t4);
}

// Privacy-induced variance: expected squared error contributed by the
// Gaussian perturbations that actually reach the parameter server.
inline double piv(const NetworkModel& model, const CollaborationScheme& scheme,
                  std::size_t d) {
  const std::size_t n = model.n;
  if (scheme.n() != n)
    throw std::invalid_argument("piv: model/scheme size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double sd = scheme.Sigma(i, j);
      acc += model.p[j] * model.P(i, j) * sd * sd;
    }
  const double nn = static_cast<double>(n);
  return static_cast<double>(d) / (nn * nn) * acc;
}

struct MseBreakdown {
  double tiv = 0.0;
  double piv = 0.0;
  double bias_l1 = 0.0;
  double bias_l2 = 0.0;
  double bound = 0.0;  // tiv + piv
  Vec s;
};

inline MseBreakdown bound(const NetworkModel& model,
                          const CollaborationScheme& scheme, double R,
                          std::size_t d) {
  MseBreakdown b;
  b.s = s_vector(model, scheme);
  b.tiv = tiv(model, scheme, R);
  b.piv = piv(model, scheme, d);
  b.bias_l1 = pricer::bias_l1(b.s);
  b.bias_l2 = pricer::bias_l2(b.s);
  b.bound = b.tiv + b.piv;
  return b;
}

struct ExactMse {
  double topology_term = 0.0;  // expectation of the deterministic error part
  double noise_term = 0.0;     // expectation of the injected-noise part
  double total = 0.0;
};

// Brute-force expected squared error for small n: enumerates every link
// realization with its exact probability. Node pairs are enumerated as joint
// four-outcome events so correlated reverse directions are handled exactly;
// the Gaussian noise contribution is added analytically per realization
// (variances sum), so the result is deterministic, not sampled.
inline ExactMse exact_mse_parts(const Dataset& data, const NetworkModel& model,
                                const CollaborationScheme& scheme) {
  const std::size_t n = model.n;
  if (n > 5) throw std::invalid_argument("exact_mse: n must be at most 5");
  if (data.n() != n || scheme.n() != n)
    throw std::invalid_argument("exact_mse: size mismatch");
  const std::size_t d = data.d();

  struct PairIdx {
    std::size_t i, j;
  };
  std::vector<PairIdx> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});

  const Vec xbar = data.mean();

  // Joint outcomes per pair: (tau_ij, tau_ji) in {(1,1),(1,0),(0,1),(0,0)}.
  const int kOutcomes[4][2] = {{1, 1}, {1, 0}, {0, 1}, {0, 0}};

  std::vector<std::size_t> digit(pairs.size(), 0);
  std::vector<std::uint8_t> tau(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) tau[i * n + i] = 1;

  KahanSum topo_acc, noise_acc;
  // Mixed-radix counter over all pair outcomes; a single pass when n == 1.
  bool more = true;
  while (more) {
    double w_pairs = 1.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      const double pij = model.P(i, j);
      const double pji = model.P(j, i);
      const double e = model.E(i, j);
      const double cell[4] = {e, pij - e, pji - e, 1.0 - pij - pji + e};
      const double w = cell[digit[k]];
      w_pairs *= w;
      tau[i * n + j] = static_cast<std::uint8_t>(kOutcomes[digit[k]][0]);
      tau[j * n + i] = static_cast<std::uint8_t>(kOutcomes[digit[k]][1]);
    }

    if (w_pairs > 0.0) {
      // Per-node aggregates given this node-node realization.
      Mat g(n, d);          // g.row(i) = sum_j tau_ji * alpha_ji * x_j
      Vec noise_sum(n, 0);  // sum_j tau_ji * sigma_ji^2
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (!tau[j * n + i]) continue;
          const double a = scheme.A(j, i);
          for (std::size_t k = 0; k < d; ++k) g(i, k) += a * data.X(j, k);
          noise_sum[i] += scheme.Sigma(j, i) * scheme.Sigma(j, i);
        }

      // Enumerate the node-PS outcomes as a bitmask.
      const std::size_t masks = std::size_t{1} << n;
      for (std::size_t mask = 0; mask < masks; ++mask) {
        double w_ps = 1.0;
        for (std::size_t i = 0; i < n; ++i)
          w_ps *= (mask >> i) & 1 ? model.p[i] : 1.0 - model.p[i];
        if (w_ps == 0.0) continue;
        const double w = w_pairs * w_ps;
        double err = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          double est = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1) est += g(i, k);
          const double diff = est / static_cast<double>(n) - xbar[k];
          err += diff * diff;
        }
        double noise = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if ((mask >> i) & 1) noise += noise_sum[i];
        noise *= static_cast<double>(d) / static_cast<double>(n * n);
        topo_acc.add(w * err);
        noise_acc.add(w * noise);
      }
    }

    // Advance the mixed-radix counter.
    more = false;
    for (std::size_t k = 0; k < digit.size(); ++k) {
      if (++digit[k] < 4) {
        more = true;
        break;
      }
      digit[k] = 0;
    }
  }

  ExactMse out;
  out.topology_term = topo_acc.value();
  out.noise_term = noise_acc.value();
  out.total = out.topology_term + out.noise_term;
  return out;
}

inline double exact_mse(const Dataset& data, const NetworkModel& model,
                        const CollaborationScheme& scheme) {
  return exact_mse_parts(data, model, scheme).total;
}

}  // namespace pricer
