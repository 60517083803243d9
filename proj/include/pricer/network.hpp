// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pricer/mat.hpp"
#include "pricer/rng.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

// Stochastic topology: every link is an independent Bernoulli success per
// round, except that the two directions of a node pair may be correlated
// through their joint success probability E(i,j) = P(tau_ij = 1, tau_ji = 1).
struct NetworkModel {
  std::size_t n = 0;
  Vec p;   // node -> parameter-server success probabilities
  Mat P;   // P(i,j): node i -> node j success probability, P(i,i) = 1
  Mat E;   // symmetric pairwise joint success probabilities, E(i,i) = 1

  bool shapes_ok() const {
    return p.size() == n && P.rows() == n && P.cols() == n && E.rows() == n &&
           E.cols() == n;
  }
};

// Independence default: E(i,j) = P(i,j) * P(j,i).
inline Mat independent_correlations(const Mat& P) {
  Mat E(P.rows(), P.cols());
  for (std::size_t i = 0; i < P.rows(); ++i)
    for (std::size_t j = 0; j < P.cols(); ++j) E(i, j) = P(i, j) * P(j, i);
  return E;
}

inline void validate_network(const NetworkModel& m) {
  if (!m.shapes_ok()) throw std::invalid_argument("network: shape mismatch");
  constexpr double tol = 1e-12;
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m.p[i] < -tol || m.p[i] > 1.0 + tol)
      throw std::invalid_argument("network: p out of [0,1]");
    if (std::abs(m.P(i, i) - 1.0) > tol)
      throw std::invalid_argument("network: self links must be certain");
    if (std::abs(m.E(i, i) - 1.0) > tol)
      throw std::invalid_argument("network: E(i,i) must be 1");
  }
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      const double pij = m.P(i, j);
      if (pij < -tol || pij > 1.0 + tol)
        throw std::invalid_argument("network: P out of [0,1]");
      if (j <= i) continue;
      const double pji = m.P(j, i);
      const double e = m.E(i, j);
      if (std::abs(e - m.E(j, i)) > tol)
        throw std::invalid_argument("network: E must be symmetric");
      // Joint-law feasibility: all four cell probabilities nonnegative.
      if (e < std::max(0.0, pij + pji - 1.0) - tol ||
          e > std::min(pij, pji) + tol)
        throw std::invalid_argument("network: E outside the feasible joint range");
      // Nonnegative correlation between the two directions of a pair.
      if (e < pij * pji - tol)
        throw std::invalid_argument("network: E below the independence product");
    }
}

// One sampled round of connectivity.
struct LinkRealization {
  std::vector<std::uint8_t> tau_ps;  // length n
  std::vector<std::uint8_t> tau;     // n x n row-major, tau[i*n+j] = tau_ij

  std::uint8_t ps(std::size_t i) const { return tau_ps[i]; }
  std::uint8_t link(std::size_t i, std::size_t j, std::size_t n) const {
    return tau[i * n + j];
  }
};

// Draws one connectivity realization. Unordered node pairs are drawn from
// their joint two-by-two law so correlated reverse links are exact; distinct
// pairs and all node-PS links are independent. Self links always succeed.
inline LinkRealization sample_links(const NetworkModel& model, Rng& rng) {
  const std::size_t n = model.n;
  LinkRealization out;
  out.tau_ps.assign(n, 0);
  out.tau.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) out.tau[i * n + i] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto [tij, tji] =
          rng.correlated_pair(model.P(i, j), model.P(j, i), model.E(i, j));
      out.tau[i * n + j] = static_cast<std::uint8_t>(tij);
      out.tau[j * n + i] = static_cast<std::uint8_t>(tji);
    }
  for (std::size_t i = 0; i < n; ++i)
    out.tau_ps[i] = rng.bernoulli(model.p[i]) ? 1 : 0;
  return out;
}

struct Topology {
  NetworkModel model;
  TrustMatrix trust;
};

struct RingTopologyParams {
  std::size_t n = 10;
  std::size_t k_hops = 1;       // trusted ring distance, self included
  double p_node_node = 0.9;     // uniform node-node connectivity
  Vec p_ps;                     // explicit node-PS vector; empty = sole-good rule
  bool sole_good = false;
  double p_good = 0.9;
  double p_other = 0.1;
  double eps_neighbor = 1e3;
  double eps_other = 1.0;
  double delta = 1e-3;
};

// Ring with k-hop trust: node i fully relaxes the privacy requirement for
// nodes within k_hops ring distance (itself included), and keeps the strict
// requirement for everyone else. Node-node connectivity is uniform.
inline Topology ring_topology(const RingTopologyParams& prm) {
  const std::size_t n = prm.n;
  if (n == 0) throw std::invalid_argument("ring_topology: n must be positive");
  if (prm.k_hops > n / 2)
    throw std::invalid_argument("ring_topology: k_hops must be at most n/2");
  Topology t;
  t.model.n = n;
  if (!prm.p_ps.empty()) {
    if (prm.p_ps.size() != n)
      throw std::invalid_argument("ring_topology: p_ps size mismatch");
    t.model.p = prm.p_ps;
  } else if (prm.sole_good) {
    t.model.p.assign(n, prm.p_other);
    t.model.p[0] = prm.p_good;
  } else {
    t.model.p.assign(n, prm.p_good);
  }
  t.model.P = Mat(n, n, prm.p_node_node);
  for (std::size_t i = 0; i < n; ++i) t.model.P(i, i) = 1.0;
  t.model.E = independent_correlations(t.model.P);
  t.trust.eps = Mat(n, n);
  t.trust.delta = Mat(n, n, prm.delta);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t fwd = (j + n - i) % n;
      const std::size_t ring_dist = std::min(fwd, n - fwd);
      t.trust.eps(i, j) = ring_dist <= prm.k_hops ? prm.eps_neighbor : prm.eps_other;
    }
  validate_network(t.model);
  return t;
}

struct ScatteredTopologyParams {
  std::vector<std::array<double, 2>> positions;  // node coordinates
  std::array<double, 2> ps_position = {0.0, 0.0};
  double scale = 30.0;
  double offset = 5.2;
};

// Distance-driven outage model: a link over distance dist succeeds with
// probability min(1, exp(offset - dist/scale)). With the defaults the
// probability hits 1 at dist = 156 and 0.5 near dist = 176.8.
inline double outage_link_probability(double dist, double scale = 30.0,
                                      double offset = 5.2) {
  return std::min(1.0, std::exp(offset - dist / scale));
}

inline NetworkModel scattered_topology(const ScatteredTopologyParams& prm) {
  const std::size_t n = prm.positions.size();
  NetworkModel m;
  m.n = n;
  m.p.assign(n, 0.0);
  m.P = Mat(n, n, 1.0);
  auto dist = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    m.p[i] = outage_link_probability(dist(prm.positions[i], prm.ps_position),
                                     prm.scale, prm.offset);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      m.P(i, j) = outage_link_probability(
          dist(prm.positions[i], prm.positions[j]), prm.scale, prm.offset);
    }
  }
  m.E = independent_correlations(m.P);
  validate_network(m);
  return m;
}

// Mutual-trust rule for scattered deployments: i and j relax each other's
// requirement exactly when their link is better than a coin flip.
inline TrustMatrix scattered_trust(const NetworkModel& model,
                                   double eps_trusted, double eps_untrusted,
                                   double delta) {
  const std::size_t n = model.n;
  TrustMatrix t;
  t.eps = Mat(n, n, eps_untrusted);
  t.delta = Mat(n, n, delta);
  for (std::size_t i = 0; i < n; ++i) {
    t.eps(i, i) = eps_trusted;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && model.P(i, j) > 0.5) t.eps(i, j) = eps_trusted;
  }
  return t;
}

}  // namespace pricer
