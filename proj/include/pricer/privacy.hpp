// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pricer/mat.hpp"
#include "pricer/network.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

// Privacy guarantees carry a status so that "no finite guarantee" is an
// explicit state rather than a floating-point infinity: kInfinite means the
// mechanism reveals the value outright (no noise on a live link), kNone
// means the stated preconditions fail and the bound says nothing.
enum class Guarantee { kOk, kInfinite, kNone };

inline const char* to_string(Guarantee g) {
  switch (g) {
    case Guarantee::kOk: return "ok";
    case Guarantee::kInfinite: return "infinite";
    case Guarantee::kNone: return "none";
  }
  return "unknown";
}

struct EpsDelta {
  Guarantee status = Guarantee::kOk;
  double eps = 0.0;
  double delta = 0.0;
};

// Additive-Gaussian release: for sensitivity bounded by `sensitivity` and
// noise standard deviation `sigma`, the mechanism is (eps, delta) private
// with eps = (sensitivity / sigma) * sqrt(2 log(1.25 / delta)).
inline EpsDelta gaussian_mechanism_eps(double sensitivity, double sigma,
                                       double delta) {
  if (!(sensitivity >= 0.0))
    throw std::invalid_argument("gaussian_mechanism_eps: negative sensitivity");
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("gaussian_mechanism_eps: delta must be in (0,1]");
  if (!(sigma >= 0.0))
    throw std::invalid_argument("gaussian_mechanism_eps: negative sigma");
  EpsDelta out;
  out.delta = delta;
  if (sensitivity == 0.0) return out;  // constant mechanism, eps = 0
  if (sigma == 0.0) {
    out.status = Guarantee::kInfinite;
    return out;
  }
  out.eps = sensitivity / sigma * std::sqrt(2.0 * std::log(1.25 / delta));
  return out;
}

// Per-link guarantee of a single transmission from node i to node j: the
// sensitivity of alpha_ij * x + noise over the radius-R ball is 2 alpha_ij R,
// and the link only materializes with probability p_ij, which discounts the
// reported delta. A dead link reveals nothing.
inline std::vector<EpsDelta> local_link_dp(const NetworkModel& model,
                                           const CollaborationScheme& scheme,
                                           double R, const Mat& delta) {
  const std::size_t n = model.n;
  if (scheme.n() != n || delta.rows() != n || delta.cols() != n)
    throw std::invalid_argument("local_link_dp: size mismatch");
  std::vector<EpsDelta> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = model.P(i, j);
      EpsDelta& e = out[i * n + j];
      if (pij == 0.0) {
        e = {Guarantee::kOk, 0.0, 0.0};
        continue;
      }
      e = gaussian_mechanism_eps(2.0 * scheme.A(i, j) * R, scheme.Sigma(i, j),
                                 delta(i, j));
      e.delta = pij * delta(i, j);
    }
  return out;
}

// Smallest deviation r with P(|zeta - zeta_bar| >= r) <= delta_prime for the
// randomly-thinned variance sum zeta = sum_k tau_k * sigma_k^2, obtained by
// solving the Bernstein tail bound 2 exp(-r^2 / (V + M r / 3)) = delta_prime
// as a quadratic in r. M bounds each summand, V is the sum of variances.
inline double bernstein_r(const Vec& sigmas_sq, const Vec& probs,
                          double delta_prime) {
  if (sigmas_sq.size() != probs.size())
    throw std::invalid_argument("bernstein_r: size mismatch");
  if (!(delta_prime > 0.0) || delta_prime > 1.0)
    throw std::invalid_argument("bernstein_r: delta_prime must be in (0,1]");
  double m = 0.0;
  double v = 0.0;
  for (std::size_t k = 0; k < sigmas_sq.size(); ++k) {
    const double s2 = sigmas_sq[k];
    if (!(s2 >= 0.0)) throw std::invalid_argument("bernstein_r: negative variance");
    m = std::max(m, s2);
    v += probs[k] * (1.0 - probs[k]) * s2 * s2;
  }
  const double lg = std::log(2.0 / delta_prime);
  return lg / 2.0 * (m / 3.0 + std::sqrt(m * m / 9.0 + 4.0 * v / lg));
}

// Guarantee at one relay j, per potentially participating node i.
struct RelayDp {
  std::size_t relay = 0;
  Guarantee status = Guarantee::kOk;  // kNone when the noise floor fails
  double zeta_bar = 0.0;              // expected aggregated noise variance
  double r = 0.0;                     // Bernstein deviation allowance
  double delta_prime = 0.0;
  std::vector<EpsDelta> per_node;     // entry i: guarantee for node i at relay j
};

namespace detail {

// Shared body of the relay-level guarantees; `prefactor` is 1 for identity
// protection and 2 for data protection (the sensitivity doubles when a
// neighboring value can change rather than drop out).
inline RelayDp relay_dp_impl(const NetworkModel& model,
                             const CollaborationScheme& scheme, double R,
                             std::size_t j, double delta_j, double delta_prime,
                             double prefactor) {
  const std::size_t n = model.n;
  if (scheme.n() != n) throw std::invalid_argument("relay_dp: size mismatch");
  if (j >= n) throw std::invalid_argument("relay_dp: relay index out of range");
  if (!(delta_j > 0.0) || delta_j > 1.0)
    throw std::invalid_argument("relay_dp: delta must be in (0,1]");

  RelayDp out;
  out.relay = j;
  out.delta_prime = delta_prime;

  Vec sig_sq, probs;
  sig_sq.reserve(n - 1);
  probs.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == j) continue;
    sig_sq.push_back(scheme.Sigma(k, j) * scheme.Sigma(k, j));
    probs.push_back(model.P(k, j));
    out.zeta_bar += model.P(k, j) * scheme.Sigma(k, j) * scheme.Sigma(k, j);
  }
  out.r = bernstein_r(sig_sq, probs, delta_prime);

  const double floor = out.zeta_bar - out.r;
  if (!(floor > 0.0)) {
    // The conditioning event leaves no guaranteed noise floor, so no bound
    // can be claimed. Callers must raise delta_prime or the noise levels.
    out.status = Guarantee::kNone;
    out.per_node.assign(n, {Guarantee::kNone, 0.0, 0.0});
    out.per_node[j] = {Guarantee::kOk, 0.0, 0.0};
    return out;
  }

  const double root = std::sqrt(2.0 * std::log(1.25 / delta_j));
  out.per_node.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    EpsDelta& e = out.per_node[i];
    if (i == j) {
      // The observed aggregate excludes the relay's own contribution.
      e = {Guarantee::kOk, 0.0, 0.0};
      continue;
    }
    const double pij = model.P(i, j);
    if (pij == 0.0) {
      e = {Guarantee::kOk, 0.0, 0.0};
      continue;
    }
    e.status = Guarantee::kOk;
    e.eps = root * prefactor * scheme.A(i, j) * R / std::sqrt(floor);
    e.delta = pij * (delta_j + delta_prime);
  }
  return out;
}

}  // namespace detail

// Protection of the fact that node i participated in relay j's aggregate:
// the aggregate of the other participants' noise (at least zeta_bar - r with
// probability 1 - delta_prime) masks the addition or removal of node i's
// scaled contribution.
inline RelayDp relay_identity_dp(const NetworkModel& model,
                                 const CollaborationScheme& scheme, double R,
                                 std::size_t j, double delta_p,
                                 double delta_prime) {
  return detail::relay_dp_impl(model, scheme, R, j, delta_p, delta_prime, 1.0);
}

// Protection of the value of node i's data at relay j: swapping one value
// for another moves the aggregate by up to twice the radius, so the leakage
// is exactly double the identity-protection one at equal deltas.
inline RelayDp relay_data_dp(const NetworkModel& model,
                             const CollaborationScheme& scheme, double R,
                             std::size_t j, double delta_d,
                             double delta_prime) {
  return detail::relay_dp_impl(model, scheme, R, j, delta_d, delta_prime, 2.0);
}

struct PsRelayTerm {
  std::size_t relay = 0;
  Guarantee status = Guarantee::kOk;
  double eps_identity = 0.0;
  double eps_data = 0.0;
  double noise_floor = 0.0;   // zeta_bar + sigma_jj^2 - r, must stay positive
  double delta_slack = 0.0;   // delta - p_ij * delta_prime_j, must stay positive
  std::string failure;        // empty when usable
};

// Composed guarantee at the parameter server, which sees every relay's
// upward transmission. Per-relay terms add up (basic composition).
struct PsDp {
  Guarantee status = Guarantee::kOk;
  double eps_identity = 0.0;
  double delta_identity = 0.0;
  double eps_data = 0.0;
  double delta_data = 0.0;
  std::vector<PsRelayTerm> relays;
  std::vector<std::string> failures;
};

// Composition over all relays j that node i can reach (p_ij > 0). Relays
// receiving zero weight from i contribute nothing and are skipped; for the
// rest each failing precondition is surfaced per relay, never clamped.
inline PsDp ps_composed_dp(const NetworkModel& model,
                           const CollaborationScheme& scheme, double R,
                           std::size_t i, double delta,
                           const Vec& delta_primes) {
  const std::size_t n = model.n;
  if (scheme.n() != n || delta_primes.size() != n)
    throw std::invalid_argument("ps_composed_dp: size mismatch");
  if (i >= n) throw std::invalid_argument("ps_composed_dp: node out of range");

  PsDp out;
  double p_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) p_sum += model.p[j];
  out.delta_identity = delta * p_sum;
  out.delta_data = delta * p_sum;

  double min_pij = 1.0;
  bool any_reachable = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (model.P(i, j) > 0.0) {
      any_reachable = true;
      min_pij = std::min(min_pij, model.P(i, j));
    }
  }
  if (!any_reachable) return out;  // isolated node: empty composition

  if (!(delta > 0.0) || delta > min_pij) {
    out.status = Guarantee::kNone;
    out.failures.push_back(
        "delta must lie in (0, min reachable p_ij]; got delta above the "
        "smallest reachable link probability");
    return out;
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double pij = model.P(i, j);
    if (pij == 0.0) continue;
    if (scheme.A(i, j) == 0.0) continue;  // no contribution through this relay

    PsRelayTerm term;
    term.relay = j;

    Vec sig_sq, probs;
    double zeta_bar = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      sig_sq.push_back(scheme.Sigma(k, j) * scheme.Sigma(k, j));
      probs.push_back(model.P(k, j));
      zeta_bar += model.P(k, j) * scheme.Sigma(k, j) * scheme.Sigma(k, j);
    }
    const double r_j = bernstein_r(sig_sq, probs, delta_primes[j]);
    term.noise_floor = zeta_bar + scheme.Sigma(j, j) * scheme.Sigma(j, j) - r_j;
    term.delta_slack = delta - pij * delta_primes[j];

    if (!(term.delta_slack > 0.0)) {
      term.status = Guarantee::kNone;
      term.failure = "delta - p_ij * delta_prime_j is not positive";
    } else if (!(term.noise_floor > 0.0)) {
      term.status = Guarantee::kNone;
      term.failure = "noise floor zeta_bar + sigma_jj^2 - r_j is not positive";
    } else {
      const double root =
          std::sqrt(2.0 * std::log(1.25 * pij / term.delta_slack));
      const double base = scheme.A(i, j) * R / std::sqrt(term.noise_floor);
      term.eps_identity = root * base;
      term.eps_data = 2.0 * root * base;
      out.eps_identity += term.eps_identity;
      out.eps_data += term.eps_data;
    }
    out.relays.push_back(term);
    if (term.status != Guarantee::kOk) {
      out.status = Guarantee::kNone;
      out.failures.push_back("relay " + std::to_string(j) + ": " + term.failure);
    }
  }
  return out;
}

// Closed-form identity-protection leakage for the symmetric two-tier random
// graph of the collaboration analysis: m bridge nodes with server link q,
// n - m outer nodes relaying through them, all peer links with probability
// p, uniform peer privacy (eps, delta). Valid only in a high-connectivity
// window where the chosen tail budget keeps the noise floor positive.
struct ErCentralPrivacy {
  bool valid = false;
  std::vector<std::string> reasons;
  double xi = 0.0;
  double sigma_star = 0.0;
  double delta_prime = 0.0;
  double noise_floor = 0.0;  // zeta_bar - r
  double eps_p = 0.0;        // per-relay identity leakage
  double eps_window_lo = 0.0;
  double eps_window_hi = 0.0;
};

inline ErCentralPrivacy er_central_privacy_scaling(std::size_t n, std::size_t m,
                                                   double p, double q, double R,
                                                   double eps, double delta) {
  if (m == 0 || m >= n)
    throw std::invalid_argument("er_central_privacy_scaling: need 0 < m < n");
  if (!(p > 0.0) || p > 1.0 || !(q > 0.0) || q > 1.0)
    throw std::invalid_argument("er_central_privacy_scaling: p, q must be in (0,1]");
  if (!(eps > 0.0) || !(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("er_central_privacy_scaling: bad privacy pair");

  ErCentralPrivacy out;
  out.xi = 2.0 * std::sqrt(2.0 * std::log(1.25 / delta));
  const double md = static_cast<double>(m);
  const double nm = static_cast<double>(n - m);
  out.sigma_star = out.xi * R / (md * p * q * eps);
  out.eps_window_lo =
      out.xi * R / (md * p * q) * (std::sqrt(1.0 / (2.0 * (1.0 - p))) - 2.0);
  out.eps_window_hi = out.xi * R / (md * q) *
                      std::sqrt((1.0 - p) / p * 12.0 * nm / std::log(2.0));

  if (!(p > 7.0 / 8.0)) {
    out.reasons.push_back("requires p > 7/8");
  }
  if (eps > out.eps_window_hi) {
    out.reasons.push_back("eps above the admissible window (noise too small "
                          "for the tail budget)");
  }
  if (eps < out.eps_window_lo) {
    out.reasons.push_back("eps below the admissible window (noise floor "
                          "would go negative)");
  }
  out.delta_prime =
      2.0 * std::exp(-12.0 * nm * p * (1.0 - p) * out.sigma_star *
                     out.sigma_star);
  out.noise_floor =
      nm * p * out.sigma_star * out.sigma_star *
      (1.0 - 2.0 * out.sigma_star * (out.sigma_star + 2.0) * (1.0 - p));
  if (out.reasons.empty() && !(out.noise_floor > 0.0)) {
    out.reasons.push_back("noise floor zeta_bar - r is not positive");
  }
  if (!out.reasons.empty()) return out;

  out.valid = true;
  out.eps_p = out.xi * R / (2.0 * md * p * q) / std::sqrt(out.noise_floor);
  return out;
}

// Everything the accounting stack can say about one (model, scheme) pair.
struct PrivacyReport {
  std::size_t n = 0;
  std::vector<EpsDelta> local;        // n x n row-major
  std::vector<RelayDp> relay_identity;  // per relay j
  std::vector<RelayDp> relay_data;
  std::vector<PsDp> ps;               // per protected node i
};

struct PrivacyReportParams {
  Mat delta_local;        // per-link delta for the local guarantee
  double delta_relay = 1e-3;
  double delta_prime = 1e-3;
  double delta_ps = 0.0;  // 0 = use the largest admissible value per node
  Vec delta_primes_ps;    // per-relay; empty = uniform delta_prime
};

inline PrivacyReportParams default_privacy_params(const NetworkModel& model,
                                                  double delta_bar) {
  PrivacyReportParams prm;
  prm.delta_local = Mat(model.n, model.n, delta_bar);
  prm.delta_relay = delta_bar;
  prm.delta_prime = delta_bar;
  prm.delta_primes_ps.assign(model.n, delta_bar);
  return prm;
}

inline PrivacyReport make_privacy_report(const NetworkModel& model,
                                         const CollaborationScheme& scheme,
                                         double R,
                                         const PrivacyReportParams& prm) {
  PrivacyReport rep;
  rep.n = model.n;
  rep.local = local_link_dp(model, scheme, R, prm.delta_local);
  Vec dps = prm.delta_primes_ps;
  if (dps.empty()) dps.assign(model.n, prm.delta_prime);
  for (std::size_t j = 0; j < model.n; ++j) {
    rep.relay_identity.push_back(relay_identity_dp(model, scheme, R, j,
                                                   prm.delta_relay,
                                                   prm.delta_prime));
    rep.relay_data.push_back(
        relay_data_dp(model, scheme, R, j, prm.delta_relay, prm.delta_prime));
  }
  for (std::size_t i = 0; i < model.n; ++i) {
    double delta = prm.delta_ps;
    if (delta == 0.0) {
      // Largest admissible composition delta for this node.
      delta = 1.0;
      for (std::size_t j = 0; j < model.n; ++j)
        if (model.P(i, j) > 0.0) delta = std::min(delta, model.P(i, j));
    }
    rep.ps.push_back(ps_composed_dp(model, scheme, R, i, delta, dps));
  }
  return rep;
}

}  // namespace pricer
