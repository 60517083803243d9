// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#include <catch2/catch_amalgamated.hpp>

#include <cstddef>
#include <vector>

#include "pricer/kmeans.hpp"
#include "pricer/network.hpp"
#include "pricer/scheme.hpp"

using Catch::Matchers::WithinAbs;
using namespace pricer;

namespace {

Mat from_rows(const std::vector<Vec>& rows) {
  Mat m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
  return m;
}

// Two nodes, every link always up, no weighting and no noise.
NetworkModel perfect_pair() {
  NetworkModel net;
  net.n = 2;
  net.p = {1.0, 1.0};
  net.P = Mat::constant(2, 2, 1.0);
  net.E = Mat::constant(2, 2, 1.0);
  return net;
}

}  // namespace

TEST_CASE("nearest centroid picks the closest row, first on ties",
          "[kmeans]") {
  const Mat centroids = from_rows({{0.0}, {5.0}});
  const Mat data = from_rows({{2.0}, {3.0}, {2.5}});
  REQUIRE(nearest_centroid(centroids, data, 0) == 0);
  REQUIRE(nearest_centroid(centroids, data, 1) == 1);
  REQUIRE(nearest_centroid(centroids, data, 2) == 0);
}

TEST_CASE("inertia on a hand-worked line", "[kmeans]") {
  const Mat data = from_rows({{0.0}, {1.0}, {10.0}, {11.0}});
  const Mat centroids = from_rows({{0.5}, {10.5}});
  REQUIRE(inertia(data, centroids) == 1.0);
  REQUIRE(inertia(data, data) == 0.0);
}

TEST_CASE("one Lloyd step moves centroids to exact cluster means",
          "[kmeans]") {
  const Mat data = from_rows({{0.0}, {2.0}, {10.0}});
  Rng rng(3);
  const Mat next = lloyd_iterate(data, from_rows({{1.0}, {9.0}}), 1, rng);
  REQUIRE(next(0, 0) == 1.0);
  REQUIRE(next(1, 0) == 10.0);
}

TEST_CASE("emptied clusters are reseeded from the data", "[kmeans]") {
  const Mat data = from_rows({{0.0}, {1.0}});
  Rng rng(11);
  const Mat next = lloyd_iterate(data, from_rows({{0.5}, {100.0}}), 1, rng);
  REQUIRE(next(0, 0) == 0.5);
  REQUIRE((next(1, 0) == 0.0 || next(1, 0) == 1.0));
}

TEST_CASE("seeding returns actual data rows", "[kmeans]") {
  const Mat data = from_rows({{0.0, 0.0}, {1.0, 2.0}, {4.0, -1.0}, {3.0, 3.0}});
  Rng rng(7);
  const Mat init = kmeanspp_init(data, 3, rng);
  for (std::size_t c = 0; c < 3; ++c) {
    bool found = false;
    for (std::size_t r = 0; r < data.rows(); ++r)
      if (init.row(c) == data.row(r)) found = true;
    REQUIRE(found);
  }
  REQUIRE_THROWS_AS(kmeanspp_init(Mat(0, 2), 2, rng), std::invalid_argument);
}

TEST_CASE("restarted Lloyd finds the separable optimum", "[kmeans]") {
  const Mat data = from_rows({{0.0}, {1.0}, {10.0}, {11.0}});
  const Mat best = centralized_kmeans(data, 2, 8, 123);
  REQUIRE(inertia(data, best) == 1.0);
  // Same seed, same answer.
  REQUIRE(best == centralized_kmeans(data, 2, 8, 123));
}

TEST_CASE("row pooling stacks nodes in order", "[kmeans]") {
  const std::vector<Mat> nodes = {from_rows({{1.0}, {2.0}}),
                                  from_rows({{3.0}})};
  const Mat pooled = pool_rows(nodes);
  REQUIRE(pooled.rows() == 3);
  REQUIRE(pooled(2, 0) == 3.0);
  REQUIRE_THROWS_AS(pool_rows({}), std::invalid_argument);
}

TEST_CASE("relative inertia is one against itself and rejects a zero base",
          "[kmeans]") {
  const Mat data = from_rows({{0.0}, {4.0}});
  const Mat c = from_rows({{2.0}});
  REQUIRE(relative_inertia(data, c, c) == 1.0);
  const Mat single = from_rows({{2.0}});
  REQUIRE_THROWS_AS(relative_inertia(single, c, single), std::domain_error);
}

TEST_CASE("federated round over perfect links averages local centroids",
          "[kmeans]") {
  const std::vector<Mat> nodes = {from_rows({{0.0}}), from_rows({{2.0}})};
  const NetworkModel net = perfect_pair();
  CollaborationScheme scheme{Mat::identity(2), Mat(2, 2)};

  KmeansState state;
  state.K = 1;
  Rng rng(5);
  state = kmeans_round(state, nodes, net, scheme, 2, rng);

  // Each node's single point is its centroid; the server halves their sum.
  REQUIRE(state.global(0, 0) == 1.0);
  REQUIRE(state.round == 1);
  REQUIRE(state.radius == 1.5 * 2.0);  // safety margin over the widest block
  REQUIRE(state.inertia_history == std::vector<double>{2.0});

  // A second round starts Lloyd from the shared centroids and, with one
  // point per node, snaps straight back to them; the radius stays frozen.
  state = kmeans_round(state, nodes, net, scheme, 1, rng);
  REQUIRE(state.global(0, 0) == 1.0);
  REQUIRE(state.radius == 3.0);
  REQUIRE(state.local[0](0, 0) == 0.0);
  REQUIRE(state.local[1](0, 0) == 2.0);

  KmeansState bad;
  REQUIRE_THROWS_AS(kmeans_round(bad, nodes, net, scheme, 1, rng),
                    std::invalid_argument);
}

TEST_CASE("blob generator is deterministic with the documented shape",
          "[kmeans]") {
  BlobsParams prm;
  prm.nodes = 3;
  prm.points_per_node = 20;
  prm.d = 2;
  prm.seed = 99;
  const auto a = make_blobs(prm);
  const auto b = make_blobs(prm);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(a[i].rows() == 20);
    REQUIRE(a[i].cols() == 2);
    REQUIRE(a[i] == b[i]);
  }
  prm.seed = 100;
  REQUIRE_FALSE(make_blobs(prm)[0] == a[0]);
}
