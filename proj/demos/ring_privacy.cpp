// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT
//
// Tunes a collaboration scheme on a small trust ring, then certifies what
// each node actually leaks: per-link guarantees, what a curious relay learns,
// and the composed view of the aggregator.

#include <cstdio>

#include "pricer/analysis.hpp"
#include "pricer/network.hpp"
#include "pricer/optimizer.hpp"
#include "pricer/privacy.hpp"

using namespace pricer;

int main() {
  RingTopologyParams params;
  params.n = 6;
  params.k_hops = 1;
  params.sole_good = true;
  const Topology topo = ring_topology(params);

  OptimizerConfig cfg;
  cfg.max_iters = 50000;
  cfg.trace_stride = 5000;
  const double R = 1.0;
  const std::size_t d = 4;
  const OptimizerTrace tr = optimize(topo.model, topo.trust, R, d, cfg);
  const MseBreakdown b = bound(topo.model, tr.scheme, R, d);
  std::printf("optimized over %zu steps: mse bound %.4f (topology %.4f, noise %.4f)\n",
              tr.iterations, b.bound, b.tiv, b.piv);

  const PrivacyReport rep = make_privacy_report(
      topo.model, tr.scheme, R, default_privacy_params(topo.model, 1e-3));

  std::printf("\n%-6s %-28s %-28s\n", "node", "strongest outgoing link",
              "aggregator view (data)");
  for (std::size_t i = 0; i < params.n; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < params.n; ++j) {
      const EpsDelta& g = rep.local[i * params.n + j];
      if (i != j && g.status == Guarantee::kOk && g.eps > worst) worst = g.eps;
    }
    const PsDp& ps = rep.ps[i];
    if (ps.status == Guarantee::kOk)
      std::printf("%-6zu eps %-24.4f eps %.4f (delta %.0e)\n", i, worst,
                  ps.eps_data, ps.delta_data);
    else
      std::printf("%-6zu eps %-24.4f %s (%zu of %zu relay terms fail)\n", i,
                  worst, to_string(ps.status), ps.failures.size(),
                  ps.relays.size());
  }
  return 0;
}
