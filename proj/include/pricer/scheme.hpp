// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pricer/mat.hpp"

namespace pricer {

// Decision variables of the collaboration: A(i,j) is the nonnegative weight
// node i applies to its own data when transmitting to node j, Sigma(i,j) the
// standard deviation of the Gaussian perturbation added on that link.
struct CollaborationScheme {
  Mat A;
  Mat Sigma;

  std::size_t n() const { return A.rows(); }
};

// Per-directed-link privacy requirements. eps(i,j) is how much node i trusts
// node j: larger means weaker required protection. +infinity marks a fully
// trusted link (in particular a node's own diagonal).
struct TrustMatrix {
  Mat eps;
  Mat delta;

  std::size_t n() const { return eps.rows(); }
};

inline constexpr double kFullTrust = std::numeric_limits<double>::infinity();

// Local data: one length-d vector per node, all inside the ball of radius R.
struct Dataset {
  Mat X;  // n x d
  double R = 0.0;

  std::size_t n() const { return X.rows(); }
  std::size_t d() const { return X.cols(); }

  Vec mean() const {
    Vec m(d(), 0.0);
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t k = 0; k < d(); ++k) m[k] += X(i, k);
    for (std::size_t k = 0; k < d(); ++k) m[k] /= static_cast<double>(n());
    return m;
  }
};

inline void validate_scheme(const CollaborationScheme& s) {
  if (!s.A.same_shape(s.Sigma) || s.A.rows() != s.A.cols())
    throw std::invalid_argument("scheme: A and Sigma must be square and same shape");
  for (std::size_t i = 0; i < s.n(); ++i)
    for (std::size_t j = 0; j < s.n(); ++j) {
      if (!(s.A(i, j) >= 0.0))
        throw std::invalid_argument("scheme: negative weight");
      if (!(s.Sigma(i, j) >= 0.0))
        throw std::invalid_argument("scheme: negative noise std");
    }
}

inline void validate_trust(const TrustMatrix& t) {
  if (!t.eps.same_shape(t.delta) || t.eps.rows() != t.eps.cols())
    throw std::invalid_argument("trust: eps and delta must be square and same shape");
  for (std::size_t i = 0; i < t.n(); ++i)
    for (std::size_t j = 0; j < t.n(); ++j) {
      if (!(t.eps(i, j) > 0.0))
        throw std::invalid_argument("trust: eps entries must be positive");
      const double d = t.delta(i, j);
      if (!(d > 0.0) || d > 1.0)
        throw std::invalid_argument("trust: delta entries must lie in (0,1]");
    }
}

inline void validate_dataset(const Dataset& ds) {
  if (!(ds.R >= 0.0)) throw std::invalid_argument("dataset: negative radius");
  const double r2 = ds.R * ds.R;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < ds.d(); ++k) s += ds.X(i, k) * ds.X(i, k);
    // Tiny slack so radii computed as max row norm round-trip through text.
    if (s > r2 * (1.0 + 1e-12) + 1e-300)
      throw std::invalid_argument("dataset: row norm exceeds radius");
  }
}

// Slope of the per-link feasibility cone sigma >= slope * alpha. A link from
// a node to itself is always fully trusted, so its slope is zero regardless
// of the stored trust entry.
inline double cone_slope(const TrustMatrix& trust, double R, std::size_t i,
                         std::size_t j) {
  if (i == j) return 0.0;
  const double e = trust.eps(i, j);
  if (std::isinf(e)) return 0.0;
  const double d = trust.delta(i, j);
  if (!(e > 0.0)) throw std::domain_error("cone_slope: eps must be positive");
  if (!(d > 0.0) || d > 1.0)
    throw std::domain_error("cone_slope: delta must lie in (0,1]");
  return (2.0 * R / e) * std::sqrt(2.0 * std::log(1.25 / d));
}

struct FeasibilityResult {
  bool feasible = true;
  // (i, j) pairs violating sigma >= slope * alpha (or a sign constraint).
  std::vector<std::pair<std::size_t, std::size_t>> violations;
};

// Division-free feasibility check of the whole scheme against the trust
// cone. The boundary sigma == slope * alpha is feasible, and so is the apex
// alpha == sigma == 0.
inline FeasibilityResult is_feasible(const CollaborationScheme& scheme,
                                     const TrustMatrix& trust, double R) {
  FeasibilityResult res;
  const std::size_t n = scheme.n();
  if (trust.n() != n)
    throw std::invalid_argument("is_feasible: trust/scheme size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = scheme.A(i, j);
      const double s = scheme.Sigma(i, j);
      const double beta = cone_slope(trust, R, i, j);
      if (!(a >= 0.0) || !(s >= 0.0) || s < beta * a) {
        res.feasible = false;
        res.violations.emplace_back(i, j);
      }
    }
  return res;
}

// Loads a dataset from CSV: one row per node, d numeric columns. If no
// radius is supplied it is set to the maximum row norm.
inline Dataset load_dataset_csv(const std::string& path,
                                std::optional<double> radius = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::vector<Vec> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vec row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged dataset file: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty dataset file: " + path);
  Dataset ds;
  ds.X = Mat(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) ds.X.set_row(i, rows[i]);
  if (radius) {
    ds.R = *radius;
  } else {
    double max_norm2 = 0.0;
    for (const auto& r : rows) max_norm2 = std::max(max_norm2, squared_norm(r));
    ds.R = std::sqrt(max_norm2);
  }
  validate_dataset(ds);
  return ds;
}

}  // namespace pricer
