// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pricer/mat.hpp"
#include "pricer/network.hpp"
#include "pricer/protocol.hpp"
#include "pricer/rng.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

inline std::size_t nearest_centroid(const Mat& centroids, const Mat& data,
                                    std::size_t row) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    double dist = 0.0;
    for (std::size_t k = 0; k < centroids.cols(); ++k) {
      const double diff = data(row, k) - centroids(c, k);
      dist += diff * diff;
    }
    if (dist < best_d) {
      best_d = dist;
      best = c;
    }
  }
  return best;
}

// Sum of squared distances of every point to its nearest centroid.
inline double inertia(const Mat& data, const Mat& centroids) {
  double total = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const std::size_t c = nearest_centroid(centroids, data, r);
    for (std::size_t k = 0; k < data.cols(); ++k) {
      const double diff = data(r, k) - centroids(c, k);
      total += diff * diff;
    }
  }
  return total;
}

// Standard distance-weighted seeding: the first centroid is uniform, each
// further one is a data point drawn with probability proportional to its
// squared distance from the nearest centroid chosen so far.
inline Mat kmeanspp_init(const Mat& data, std::size_t K, Rng& rng) {
  const std::size_t npts = data.rows();
  if (npts == 0) throw std::invalid_argument("kmeanspp_init: empty data");
  Mat centroids(K, data.cols());
  std::vector<double> dist2(npts, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(rng.uniform() * npts);
  if (first >= npts) first = npts - 1;
  centroids.set_row(0, data.row(first));
  for (std::size_t c = 1; c < K; ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < npts; ++r) {
      double d = 0.0;
      for (std::size_t k = 0; k < data.cols(); ++k) {
        const double diff = data(r, k) - centroids(c - 1, k);
        d += diff * diff;
      }
      dist2[r] = std::min(dist2[r], d);
      total += dist2[r];
    }
    std::size_t pick = npts - 1;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t r = 0; r < npts; ++r) {
        acc += dist2[r];
        if (u < acc) {
          pick = r;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.uniform() * npts);
      if (pick >= npts) pick = npts - 1;
    }
    centroids.set_row(c, data.row(pick));
  }
  return centroids;
}

// One or more Lloyd iterations. A cluster that loses all its points is
// reseeded from a uniformly random data point.
inline Mat lloyd_iterate(const Mat& data, Mat centroids, std::size_t iters,
                         Rng& rng) {
  const std::size_t npts = data.rows();
  const std::size_t K = centroids.rows();
  const std::size_t d = data.cols();
  for (std::size_t it = 0; it < iters; ++it) {
    Mat sums(K, d);
    std::vector<std::size_t> counts(K, 0);
    for (std::size_t r = 0; r < npts; ++r) {
      const std::size_t c = nearest_centroid(centroids, data, r);
      ++counts[c];
      for (std::size_t k = 0; k < d; ++k) sums(c, k) += data(r, k);
    }
    for (std::size_t c = 0; c < K; ++c) {
      if (counts[c] == 0) {
        std::size_t pick = static_cast<std::size_t>(rng.uniform() * npts);
        if (pick >= npts) pick = npts - 1;
        centroids.set_row(c, data.row(pick));
        continue;
      }
      for (std::size_t k = 0; k < d; ++k)
        centroids(c, k) = sums(c, k) / static_cast<double>(counts[c]);
    }
  }
  return centroids;
}

// Lloyd to convergence from distance-weighted seeding, best of `restarts`.
inline Mat centralized_kmeans(const Mat& data, std::size_t K,
                              std::size_t restarts, std::uint64_t seed,
                              std::size_t max_iters = 200) {
  Mat best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < restarts; ++s) {
    Rng rng(derive_seed(seed, s));
    Mat c = kmeanspp_init(data, K, rng);
    for (std::size_t it = 0; it < max_iters; ++it) {
      const Mat next = lloyd_iterate(data, c, 1, rng);
      double moved = 0.0;
      for (std::size_t r = 0; r < K; ++r)
        moved += squared_distance(next.row(r), c.row(r));
      c = next;
      if (moved < 1e-24) break;
    }
    const double in = inertia(data, c);
    if (in < best_inertia) {
      best_inertia = in;
      best = c;
    }
  }
  return best;
}

struct KmeansState {
  std::size_t K = 0;
  Mat global;               // K x d global centroids; empty before round one
  std::vector<Mat> local;   // per-node local centroids
  std::size_t round = 0;
  double radius = 0.0;          // aggregation radius; fixed after round one
  double radius_safety = 1.5;   // margin over the first observed block norm
  std::vector<double> inertia_history;  // pooled inertia of global per round
};

inline Mat pool_rows(const std::vector<Mat>& node_data) {
  std::size_t total = 0;
  for (const auto& m : node_data) total += m.rows();
  if (total == 0) throw std::invalid_argument("pool_rows: no data");
  Mat pooled(total, node_data.front().cols());
  std::size_t r = 0;
  for (const auto& m : node_data)
    for (std::size_t i = 0; i < m.rows(); ++i) pooled.set_row(r++, m.row(i));
  return pooled;
}

// One federated clustering round: every node refines centroids locally, the
// stacked K*d centroid block travels through the relayed-aggregation round,
// and the server's estimate becomes the next shared centroids.
inline KmeansState kmeans_round(KmeansState state,
                                const std::vector<Mat>& node_data,
                                const NetworkModel& model,
                                const CollaborationScheme& scheme,
                                std::size_t local_iters, Rng& rng) {
  const std::size_t n = model.n;
  if (node_data.size() != n)
    throw std::invalid_argument("kmeans_round: node count mismatch");
  if (state.K == 0) throw std::invalid_argument("kmeans_round: K not set");
  const std::size_t d = node_data.front().cols();
  const std::size_t K = state.K;

  state.local.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (node_data[i].rows() == 0)
      throw std::invalid_argument("kmeans_round: empty node data");
    Mat init = state.global.empty() ? kmeanspp_init(node_data[i], K, rng)
                                    : state.global;
    state.local[i] = lloyd_iterate(node_data[i], init, local_iters, rng);
  }

  // Stack each node's centroids into one vector and aggregate.
  Dataset blocks;
  blocks.X = Mat(n, K * d);
  double max_norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < K; ++c)
      for (std::size_t k = 0; k < d; ++k)
        blocks.X(i, c * d + k) = state.local[i](c, k);
    max_norm2 = std::max(max_norm2, squared_norm(blocks.X.row(i)));
  }
  if (state.radius == 0.0)
    state.radius = state.radius_safety * std::sqrt(max_norm2);
  blocks.R = state.radius;

  const RoundOutcome out = run_round(blocks, model, scheme, rng);
  state.global = Mat(K, d);
  for (std::size_t c = 0; c < K; ++c)
    for (std::size_t k = 0; k < d; ++k)
      state.global(c, k) = out.ps_estimate[c * d + k];

  state.round += 1;
  state.inertia_history.push_back(inertia(pool_rows(node_data), state.global));
  return state;
}

// Ratio of the distributed run's pooled inertia to the centralized
// baseline's. Values near one mean the relayed aggregation cost nothing.
inline double relative_inertia(const Mat& pooled_data, const Mat& distributed,
                               const Mat& centralized) {
  const double base = inertia(pooled_data, centralized);
  if (base == 0.0)
    throw std::domain_error("relative_inertia: zero baseline inertia");
  return inertia(pooled_data, distributed) / base;
}

struct BlobsParams {
  std::size_t nodes = 10;
  std::size_t points_per_node = 100;
  std::size_t d = 2;
  std::size_t n_blobs = 4;
  double blob_std = 0.5;
  double center_box = 10.0;  // blob centers drawn uniformly in [-box, box]^d
  double skew = 0.7;         // fraction of a node's points from its home blob
  std::uint64_t seed = 0;
};

// Synthetic mixture-of-Gaussians data, mildly heterogeneous: each node draws
// `skew` of its points from its home blob and the rest from the mixture.
inline std::vector<Mat> make_blobs(const BlobsParams& prm) {
  Rng center_rng(derive_seed(prm.seed, 0));
  Mat centers(prm.n_blobs, prm.d);
  for (std::size_t b = 0; b < prm.n_blobs; ++b)
    for (std::size_t k = 0; k < prm.d; ++k)
      centers(b, k) = center_rng.uniform(-prm.center_box, prm.center_box);

  std::vector<Mat> data(prm.nodes);
  for (std::size_t i = 0; i < prm.nodes; ++i) {
    Rng rng(derive_seed(prm.seed, 1 + i));
    data[i] = Mat(prm.points_per_node, prm.d);
    for (std::size_t r = 0; r < prm.points_per_node; ++r) {
      std::size_t blob = i % prm.n_blobs;
      if (rng.uniform() >= prm.skew) {
        blob = static_cast<std::size_t>(rng.uniform() * prm.n_blobs);
        if (blob >= prm.n_blobs) blob = prm.n_blobs - 1;
      }
      for (std::size_t k = 0; k < prm.d; ++k)
        data[i](r, k) = centers(blob, k) + prm.blob_std * rng.gaussian();
    }
  }
  return data;
}

}  // namespace pricer
