// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT
//
// Three nodes, one of them nearly cut off from the aggregator. Compares the
// analytic error bound, the exact small-network error, and a Monte Carlo
// estimate for two collaboration schemes: everyone sends only their own data,
// and the weak node additionally relays through its well-connected neighbor.

#include <cstdio>

#include "pricer/analysis.hpp"
#include "pricer/network.hpp"
#include "pricer/protocol.hpp"
#include "pricer/scheme.hpp"

using namespace pricer;

namespace {

void report(const char* name, const Dataset& data, const NetworkModel& model,
            const CollaborationScheme& scheme) {
  const MseBreakdown b = bound(model, scheme, data.R, data.d());
  const ExactMse exact = exact_mse_parts(data, model, scheme);
  const MonteCarloResult mc = monte_carlo_mse(data, model, scheme, 20000, 7);
  std::printf("%-22s bound %.5f   exact %.5f   mc %.5f (se %.5f)\n", name,
              b.bound, exact.total, mc.mse, mc.se);
}

}  // namespace

int main() {
  // Node 2 reaches the aggregator only one time in ten, but reaches node 0
  // almost always.
  NetworkModel model;
  model.n = 3;
  model.p = {0.9, 0.9, 0.1};
  model.P = Mat::identity(3);
  model.P(2, 0) = 0.95;
  model.P(0, 2) = 0.95;
  model.E = independent_correlations(model.P);
  validate_network(model);

  Dataset data;
  data.R = 1.0;
  data.X = Mat(3, 2);
  data.X.set_row(0, {0.6, -0.3});
  data.X.set_row(1, {-0.2, 0.9});
  data.X.set_row(2, {0.7, 0.7});

  CollaborationScheme direct{Mat(3, 3), Mat(3, 3)};
  for (std::size_t i = 0; i < 3; ++i) direct.A(i, i) = 1.0 / model.p[i];

  // The relay weight compensates for both link and aggregator outages; noise
  // stays at zero because this demo treats node 0 as fully trusted.
  CollaborationScheme relayed = direct;
  relayed.A(2, 2) = 1.0;
  relayed.A(2, 0) = (1.0 - model.p[2]) / (model.p[0] * model.P(2, 0));

  report("direct only", data, model, direct);
  report("relay via node 0", data, model, relayed);
  return 0;
}
