// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pricer/analysis.hpp"
#include "pricer/csvio.hpp"
#include "pricer/erdos_renyi.hpp"
#include "pricer/kmeans.hpp"
#include "pricer/network.hpp"
#include "pricer/optimizer.hpp"
#include "pricer/privacy.hpp"
#include "pricer/protocol.hpp"
#include "pricer/rng.hpp"
#include "pricer/scheme.hpp"
#include "pricer/serialize.hpp"

namespace pricer {

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

inline RingTopologyParams ring_params_from_json(const json& j) {
  RingTopologyParams prm;
  prm.n = j.value("n", prm.n);
  prm.k_hops = j.value("k_hops", prm.k_hops);
  prm.p_node_node = j.value("p_node_node", prm.p_node_node);
  if (j.contains("p_ps")) prm.p_ps = j.at("p_ps").get<Vec>();
  prm.sole_good = j.value("sole_good", prm.sole_good);
  prm.p_good = j.value("p_good", prm.p_good);
  prm.p_other = j.value("p_other", prm.p_other);
  prm.eps_neighbor = j.value("eps_neighbor", prm.eps_neighbor);
  prm.eps_other = j.value("eps_other", prm.eps_other);
  prm.delta = j.value("delta", prm.delta);
  return prm;
}

// Ten fixed sites used by the scattered examples: a cluster near the server,
// two remote clusters with good internal links, and one stray node between.
inline std::vector<std::array<double, 2>> default_scatter_positions() {
  return {{50, 10},   {80, 40},  {30, 60},  {250, 20}, {270, 50},
          {235, 60},  {20, 250}, {60, 270}, {10, 280}, {150, 150}};
}

struct ScatterConfig {
  ScatteredTopologyParams geometry;
  double eps_trusted = 10.0;
  double eps_untrusted = 0.01;
  double delta = 1e-3;
};

inline ScatterConfig scatter_from_json(const json& j) {
  ScatterConfig cfg;
  if (j.contains("positions")) {
    for (const auto& pos : j.at("positions"))
      cfg.geometry.positions.push_back({pos.at(0).get<double>(),
                                        pos.at(1).get<double>()});
  } else {
    cfg.geometry.positions = default_scatter_positions();
  }
  if (j.contains("ps_position")) {
    cfg.geometry.ps_position = {j.at("ps_position").at(0).get<double>(),
                                j.at("ps_position").at(1).get<double>()};
  }
  cfg.geometry.scale = j.value("scale", cfg.geometry.scale);
  cfg.geometry.offset = j.value("offset", cfg.geometry.offset);
  cfg.eps_trusted = j.value("eps_trusted", cfg.eps_trusted);
  cfg.eps_untrusted = j.value("eps_untrusted", cfg.eps_untrusted);
  cfg.delta = j.value("delta", cfg.delta);
  return cfg;
}

// A topology block is one of:
//   {"kind": "ring", ...ring params...}
//   {"kind": "scattered", ...scatter params...}
//   {"kind": "explicit", "network": {...}, "trust": {...}}
inline Topology topology_from_config(const json& cfg) {
  const json j = cfg.value("topology", json::object());
  const std::string kind = j.value("kind", std::string("ring"));
  if (kind == "ring") return ring_topology(ring_params_from_json(j));
  if (kind == "scattered") {
    const ScatterConfig sc = scatter_from_json(j);
    Topology t;
    t.model = scattered_topology(sc.geometry);
    t.trust = scattered_trust(t.model, sc.eps_trusted, sc.eps_untrusted,
                              sc.delta);
    return t;
  }
  if (kind == "explicit") {
    Topology t;
    t.model = network_from_json(j.at("network"));
    t.trust = trust_from_json(j.at("trust"));
    if (t.trust.n() != t.model.n)
      throw std::invalid_argument("topology: trust size mismatch");
    return t;
  }
  throw std::invalid_argument("topology: unknown kind '" + kind + "'");
}

inline OptimizerConfig optimizer_from_json(const json& cfg,
                                           std::uint64_t seed) {
  OptimizerConfig oc;
  oc.seed = seed;
  if (!cfg.contains("optimizer")) return oc;
  const json& j = cfg.at("optimizer");
  oc.eta_alpha = j.value("eta", oc.eta_alpha);
  oc.eta_alpha = j.value("eta_alpha", oc.eta_alpha);
  oc.eta_sigma = j.value("eta_sigma", oc.eta_alpha);
  oc.lambda = j.value("lambda", oc.lambda);
  const std::string norm = j.value("bias_norm", std::string("l2"));
  if (norm == "l1")
    oc.bias_norm = BiasNorm::kL1;
  else if (norm == "l2")
    oc.bias_norm = BiasNorm::kL2;
  else
    throw std::invalid_argument("optimizer: bias_norm must be l1 or l2");
  oc.max_iters = j.value("max_iters", oc.max_iters);
  oc.tol = j.value("tol", oc.tol);
  oc.randomize_init = j.value("randomize_init", oc.randomize_init);
  oc.init_cap = j.value("init_cap", oc.init_cap);
  return oc;
}

// Experiment runs want near-converged schemes; the plain library default of
// a few thousand steps is meant for interactive probing. Configs can still
// override. The trace is thinned so long runs keep about a thousand rows.
inline OptimizerConfig deep_optimizer_defaults(const json& cfg,
                                               std::uint64_t seed) {
  OptimizerConfig oc = optimizer_from_json(cfg, seed);
  if (!cfg.contains("optimizer") || !cfg.at("optimizer").contains("max_iters"))
    oc.max_iters = 1000000;
  oc.trace_stride = std::max<std::size_t>(1, oc.max_iters / 1000);
  return oc;
}

inline std::string trace_csv(const OptimizerTrace& trace) {
  CsvWriter csv({"iter", "objective", "tiv", "piv", "bias"});
  for (const auto& row : trace.rows)
    csv.append_row({std::to_string(row.iter), fmt_double(row.objective),
                    fmt_double(row.tiv), fmt_double(row.piv),
                    fmt_double(row.bias)});
  return csv.str();
}

// ---------------------------------------------------------------------------
// optimize: tune one collaboration scheme and dump its trace
// ---------------------------------------------------------------------------

inline json run_optimize(const json& cfg, const std::filesystem::path& out,
                         std::uint64_t seed) {
  const Topology topo = topology_from_config(cfg);
  const double R = cfg.value("R", 1.0);
  const std::size_t d = cfg.value("d", std::size_t{1});
  const OptimizerConfig oc = deep_optimizer_defaults(cfg, seed);

  const OptimizerTrace trace = optimize(topo.model, topo.trust, R, d, oc);
  write_file_atomic(out / "trace.csv", trace_csv(trace));

  json scheme_doc = scheme_to_json(trace.scheme);
  scheme_doc["R"] = R;
  write_file_atomic(out / "scheme.json", scheme_doc.dump(2) + "\n");

  const MseBreakdown fin = bound(topo.model, trace.scheme, R, d);
  const FeasibilityResult feas = is_feasible(trace.scheme, topo.trust, R);
  return json{{"converged", trace.converged},
              {"aborted_nan", trace.aborted_nan},
              {"iterations", trace.iterations},
              {"objective", trace.rows.back().objective},
              {"tiv", fin.tiv},
              {"piv", fin.piv},
              {"bias_l1", fin.bias_l1},
              {"bias_l2", fin.bias_l2},
              {"mse_bound", fin.bound},
              {"feasible", feas.feasible}};
}

// ---------------------------------------------------------------------------
// simulate: Monte-Carlo rounds against the analytic bound
// ---------------------------------------------------------------------------

inline Dataset dataset_from_config(const json& cfg, std::size_t n,
                                   std::uint64_t seed) {
  if (!cfg.contains("dataset"))
    throw std::invalid_argument("simulate: missing dataset block");
  const json& j = cfg.at("dataset");
  if (j.contains("csv"))
    return load_dataset_csv(j.at("csv").get<std::string>(),
                            j.contains("R") ? std::optional<double>(
                                                  j.at("R").get<double>())
                                            : std::nullopt);
  const double R = j.value("R", 1.0);
  const std::size_t d = j.value("d", std::size_t{1});
  Dataset ds;
  ds.R = R;
  ds.X = Mat(n, d);
  if (j.value("aligned", false)) {
    for (std::size_t i = 0; i < n; ++i) ds.X(i, 0) = R;
    return ds;
  }
  // Random points on the radius-R sphere.
  Rng rng(derive_seed(seed, 0x64617461));
  for (std::size_t i = 0; i < n; ++i) {
    Vec v(d);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      v[k] = rng.gaussian();
      norm2 += v[k] * v[k];
    }
    const double scale = norm2 > 0.0 ? R / std::sqrt(norm2) : 0.0;
    for (std::size_t k = 0; k < d; ++k) v[k] *= scale;
    ds.X.set_row(i, v);
  }
  return ds;
}

inline CollaborationScheme scheme_from_config(const json& cfg,
                                              const Topology& topo, double R,
                                              std::size_t d,
                                              std::uint64_t seed) {
  if (cfg.contains("scheme")) return scheme_from_json(cfg.at("scheme"));
  const OptimizerConfig oc = deep_optimizer_defaults(cfg, seed);
  return optimize(topo.model, topo.trust, R, d, oc).scheme;
}

inline json run_simulate(const json& cfg, const std::filesystem::path& out,
                         std::uint64_t seed) {
  const Topology topo = topology_from_config(cfg);
  const std::size_t trials = cfg.value("trials", std::size_t{100000});
  const Dataset ds = dataset_from_config(cfg, topo.model.n, seed);
  validate_dataset(ds);
  const CollaborationScheme scheme =
      scheme_from_config(cfg, topo, ds.R, ds.d(), seed);

  const MonteCarloResult mc =
      monte_carlo_mse(ds, topo.model, scheme, trials, derive_seed(seed, 1));
  const MseBreakdown b = bound(topo.model, scheme, ds.R, ds.d());

  CsvWriter csv({"trials", "mse_mc", "se", "tiv", "piv", "bound",
                 "exact_total", "exact_topology", "exact_noise"});
  json summary{{"trials", trials}, {"mse_mc", mc.mse}, {"se", mc.se},
               {"tiv", b.tiv},     {"piv", b.piv},     {"bound", b.bound}};
  std::string ex_total, ex_topo, ex_noise;
  if (topo.model.n <= 5) {
    const ExactMse ex = exact_mse_parts(ds, topo.model, scheme);
    ex_total = fmt_double(ex.total);
    ex_topo = fmt_double(ex.topology_term);
    ex_noise = fmt_double(ex.noise_term);
    summary["exact_mse"] = ex.total;
  }
  csv.append_row({std::to_string(trials), fmt_double(mc.mse),
                  fmt_double(mc.se), fmt_double(b.tiv), fmt_double(b.piv),
                  fmt_double(b.bound), ex_total, ex_topo, ex_noise});
  write_file_atomic(out / "simulate.csv", csv.str());
  return summary;
}

// ---------------------------------------------------------------------------
// privacy-report: full accounting for one (network, scheme) pair
// ---------------------------------------------------------------------------

inline json run_privacy_report(const json& cfg,
                               const std::filesystem::path& out,
                               std::uint64_t seed) {
  const Topology topo = topology_from_config(cfg);
  const double R = cfg.value("R", 1.0);
  const std::size_t d = cfg.value("d", std::size_t{1});
  const CollaborationScheme scheme =
      scheme_from_config(cfg, topo, R, d, seed);

  PrivacyReportParams prm =
      default_privacy_params(topo.model, cfg.value("delta", 1e-3));
  prm.delta_relay = cfg.value("delta_relay", prm.delta_relay);
  prm.delta_prime = cfg.value("delta_prime", prm.delta_prime);
  prm.delta_ps = cfg.value("delta_ps", prm.delta_ps);

  const PrivacyReport rep = make_privacy_report(topo.model, scheme, R, prm);
  write_file_atomic(out / "privacy.csv", privacy_report_csv(rep));
  write_file_atomic(out / "privacy.json",
                    privacy_report_to_json(rep).dump(2) + "\n");

  double max_local = 0.0;
  std::size_t infinite = 0, none = 0;
  for (const auto& e : rep.local) {
    if (e.status == Guarantee::kOk) max_local = std::max(max_local, e.eps);
    if (e.status == Guarantee::kInfinite) ++infinite;
    if (e.status == Guarantee::kNone) ++none;
  }
  double max_ps_data = 0.0;
  for (const auto& p : rep.ps)
    if (p.status == Guarantee::kOk) max_ps_data = std::max(max_ps_data, p.eps_data);
  return json{{"n", rep.n},
              {"max_local_eps", max_local},
              {"local_infinite", infinite},
              {"local_none", none},
              {"max_ps_eps_data", max_ps_data}};
}

// ---------------------------------------------------------------------------
// tradeoff: bias vs MSE across the regularization weight
// ---------------------------------------------------------------------------

inline json run_tradeoff(const json& cfg, const std::filesystem::path& out,
                         std::uint64_t seed) {
  const std::size_t n = cfg.value("n", std::size_t{10});
  Vec p_ps = {0.1, 0.1, 0.8, 0.1, 0.1, 0.9, 0.1, 0.1, 0.9, 0.1};
  if (cfg.contains("p")) p_ps = cfg.at("p").get<Vec>();
  if (p_ps.size() != n)
    throw std::invalid_argument("tradeoff: p vector size mismatch");
  std::vector<double> pc_list = {0.1, 0.5};
  if (cfg.contains("p_c")) pc_list = cfg.at("p_c").get<std::vector<double>>();
  std::vector<double> lambdas = {0.0, 0.1, 0.5};
  if (cfg.contains("lambda"))
    lambdas = cfg.at("lambda").get<std::vector<double>>();
  const std::size_t seeds = cfg.value("seeds", std::size_t{4});
  const double R = cfg.value("R", 1.0);
  const std::size_t d = cfg.value("d", std::size_t{1});

  RingTopologyParams ring;
  ring.n = n;
  ring.k_hops = cfg.value("k_hops", std::size_t{1});
  ring.p_ps = p_ps;
  ring.eps_neighbor = cfg.value("eps_neighbor", 1e3);
  ring.eps_other = cfg.value("eps_other", 1.0);
  ring.delta = cfg.value("delta", 1e-3);

  OptimizerConfig base = deep_optimizer_defaults(cfg, seed);
  base.randomize_init = true;

  CsvWriter rows({"p_c", "lambda", "seed", "objective", "tiv", "piv", "mse",
                  "bias_l1", "bias_l2", "converged"});
  CsvWriter means({"p_c", "lambda", "mse_mean", "bias_l1_mean",
                   "bias_l2_mean", "tiv_mean", "piv_mean"});
  json table = json::array();

  std::size_t run_idx = 0;
  for (double pc : pc_list) {
    ring.p_node_node = pc;
    const Topology topo = ring_topology(ring);
    for (double lambda : lambdas) {
      OptimizerConfig oc = base;
      oc.lambda = lambda;
      double mse_sum = 0.0, b1_sum = 0.0, b2_sum = 0.0;
      double tiv_sum = 0.0, piv_sum = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        oc.seed = derive_seed(seed, run_idx++);
        const OptimizerTrace tr = optimize(topo.model, topo.trust, R, d, oc);
        const MseBreakdown b = bound(topo.model, tr.scheme, R, d);
        rows.append_row({fmt_double(pc), fmt_double(lambda),
                         std::to_string(s),
                         fmt_double(tr.rows.back().objective),
                         fmt_double(b.tiv), fmt_double(b.piv),
                         fmt_double(b.bound), fmt_double(b.bias_l1),
                         fmt_double(b.bias_l2),
                         tr.converged ? "1" : "0"});
        mse_sum += b.bound;
        b1_sum += b.bias_l1;
        b2_sum += b.bias_l2;
        tiv_sum += b.tiv;
        piv_sum += b.piv;
      }
      const double ns = static_cast<double>(seeds);
      means.append_numeric_row({pc, lambda, mse_sum / ns, b1_sum / ns,
                                b2_sum / ns, tiv_sum / ns, piv_sum / ns});
      table.push_back(json{{"p_c", pc},
                           {"lambda", lambda},
                           {"mse_mean", mse_sum / ns},
                           {"bias_l1_mean", b1_sum / ns},
                           {"bias_l2_mean", b2_sum / ns}});
    }
  }
  write_file_atomic(out / "tradeoff.csv", rows.str());
  write_file_atomic(out / "tradeoff_mean.csv", means.str());
  return json{{"rows", table}};
}

// ---------------------------------------------------------------------------
// neighbor-sweep: MSE and noise cost vs trusted ring distance
// ---------------------------------------------------------------------------

inline json run_neighbor_sweep(const json& cfg,
                               const std::filesystem::path& out,
                               std::uint64_t seed) {
  const std::size_t k_max = cfg.value("k_max", std::size_t{5});
  const std::size_t seeds = cfg.value("seeds", std::size_t{4});
  const double R = cfg.value("R", 1.0);
  const std::size_t d = cfg.value("d", std::size_t{1});

  RingTopologyParams ring;
  ring.n = cfg.value("n", std::size_t{10});
  ring.p_node_node = cfg.value("p_node_node", 0.9);
  ring.sole_good = true;
  ring.p_good = cfg.value("p_good", 0.9);
  ring.p_other = cfg.value("p_other", 0.1);
  ring.eps_neighbor = cfg.value("eps_neighbor", 1e3);
  ring.eps_other = cfg.value("eps_other", 1.0);
  ring.delta = cfg.value("delta", 1e-3);

  OptimizerConfig base = deep_optimizer_defaults(cfg, seed);
  base.randomize_init = true;
  base.keep_best = true;

  // Widening the trusted radius only relaxes cone constraints, so each seed
  // re-optimizes from its previous solution. Together with keep_best this
  // makes every per-seed curve non-increasing in k instead of hostage to
  // where independent restarts happen to stop.
  std::vector<Topology> topos;
  for (std::size_t k = 0; k <= k_max; ++k) {
    ring.k_hops = k;
    topos.push_back(ring_topology(ring));
  }
  const NetworkModel& model = topos.front().model;

  struct Cell {
    MseBreakdown b;
    double obj = 0.0;
    bool converged = false;
  };
  std::vector<std::vector<Cell>> grid(k_max + 1, std::vector<Cell>(seeds));
  for (std::size_t s = 0; s < seeds; ++s) {
    OptimizerConfig oc = base;
    oc.seed = derive_seed(seed, s);
    CollaborationScheme warm =
        initial_scheme(model, topos[0].trust, R, oc);
    for (std::size_t k = 0; k <= k_max; ++k) {
      const OptimizerTrace tr =
          optimize_from(model, topos[k].trust, R, d, oc, std::move(warm));
      warm = tr.scheme;
      grid[k][s] = {bound(model, tr.scheme, R, d),
                    objective(model, tr.scheme, R, d, oc.lambda, oc.bias_norm),
                    tr.converged};
    }
  }

  CsvWriter rows({"k", "seed", "objective", "tiv", "piv", "mse", "bias_l2",
                  "converged"});
  CsvWriter means({"k", "mse_mean", "piv_mean", "tiv_mean"});
  json table = json::array();
  for (std::size_t k = 0; k <= k_max; ++k) {
    double mse_sum = 0.0, piv_sum = 0.0, tiv_sum = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto& [b, obj, converged] = grid[k][s];
      rows.append_row({std::to_string(k), std::to_string(s), fmt_double(obj),
                       fmt_double(b.tiv), fmt_double(b.piv),
                       fmt_double(b.bound), fmt_double(b.bias_l2),
                       converged ? "1" : "0"});
      mse_sum += b.bound;
      piv_sum += b.piv;
      tiv_sum += b.tiv;
    }
    const double ns = static_cast<double>(seeds);
    means.append_row({std::to_string(k), fmt_double(mse_sum / ns),
                      fmt_double(piv_sum / ns), fmt_double(tiv_sum / ns)});
    table.push_back(json{{"k", k},
                         {"mse_mean", mse_sum / ns},
                         {"piv_mean", piv_sum / ns}});
  }
  write_file_atomic(out / "neighbor_sweep.csv", rows.str());
  write_file_atomic(out / "neighbor_sweep_mean.csv", means.str());
  return json{{"rows", table}};
}

// ---------------------------------------------------------------------------
// er-analytic: closed-form solutions over a parameter grid
// ---------------------------------------------------------------------------

inline json run_er_analytic(const json& cfg, const std::filesystem::path& out,
                            std::uint64_t /*seed*/) {
  std::vector<std::size_t> n_list = {100};
  std::vector<std::size_t> m_list = {20};
  std::vector<double> p_list = {0.9};
  std::vector<double> q_list = {0.9};
  std::vector<double> lambda_list = {0.1,
                                     std::numeric_limits<double>::infinity()};
  if (cfg.contains("n")) n_list = cfg.at("n").get<std::vector<std::size_t>>();
  if (cfg.contains("m")) m_list = cfg.at("m").get<std::vector<std::size_t>>();
  if (cfg.contains("p")) p_list = cfg.at("p").get<std::vector<double>>();
  if (cfg.contains("q")) q_list = cfg.at("q").get<std::vector<double>>();
  if (cfg.contains("lambda")) {
    lambda_list.clear();
    for (const auto& v : cfg.at("lambda")) {
      if (v.is_string() && v.get<std::string>() == "inf")
        lambda_list.push_back(std::numeric_limits<double>::infinity());
      else
        lambda_list.push_back(v.get<double>());
    }
  }

  ErConfig base;
  base.eps = cfg.value("eps", 1.0);
  base.delta = cfg.value("delta", 1e-3);
  base.R = cfg.value("R", 1.0);
  base.d = cfg.value("d", std::size_t{1});

  CsvWriter csv({"n", "m", "p", "q", "lambda", "alpha", "gamma", "sigma",
                 "tiv", "piv", "bias_l2", "mse_bound", "mse_lambda_inf",
                 "no_collab_mse"});
  std::size_t rows = 0;
  for (std::size_t n : n_list)
    for (std::size_t m : m_list) {
      if (m == 0 || m >= n) continue;
      for (double p : p_list)
        for (double q : q_list)
          for (double lambda : lambda_list) {
            ErConfig c = base;
            c.n = n;
            c.m = m;
            c.p = p;
            c.q = q;
            c.lambda = lambda;
            validate_er_config(c);
            const ErSolution sol = closed_form(c);
            const NetworkModel net = er_network(c);
            const CollaborationScheme scheme = expand_scheme(c, sol);
            const MseBreakdown b = bound(net, scheme, c.R, c.d);
            csv.append_row(
                {std::to_string(n), std::to_string(m), fmt_double(p),
                 fmt_double(q),
                 std::isinf(lambda) ? "inf" : fmt_double(lambda),
                 fmt_double(sol.alpha), fmt_double(sol.gamma),
                 fmt_double(sol.sigma), fmt_double(b.tiv), fmt_double(b.piv),
                 fmt_double(b.bias_l2), fmt_double(b.bound),
                 fmt_double(mse_at_lambda_inf(c)),
                 fmt_double(no_collab_mse(c, q))});
            ++rows;
          }
    }
  write_file_atomic(out / "er.csv", csv.str());
  return json{{"rows", rows}};
}

// ---------------------------------------------------------------------------
// kmeans: distributed clustering with and without collaboration
// ---------------------------------------------------------------------------

inline CollaborationScheme no_collab_scheme(const NetworkModel& model) {
  CollaborationScheme s;
  s.A = Mat(model.n, model.n);
  s.Sigma = Mat(model.n, model.n);
  // Inverse-probability weighting keeps each node's expected contribution at
  // one; a node the server never hears simply stays silent.
  for (std::size_t i = 0; i < model.n; ++i)
    if (model.p[i] > 0.0) s.A(i, i) = 1.0 / model.p[i];
  return s;
}

inline json run_kmeans(const json& cfg, const std::filesystem::path& out,
                       std::uint64_t seed) {
  const ScatterConfig sc =
      scatter_from_json(cfg.contains("topology") ? cfg.at("topology") : json::object());
  Topology topo;
  topo.model = scattered_topology(sc.geometry);
  topo.trust = scattered_trust(topo.model, sc.eps_trusted, sc.eps_untrusted,
                               sc.delta);

  BlobsParams blobs;
  blobs.nodes = topo.model.n;
  if (cfg.contains("blobs")) {
    const json& b = cfg.at("blobs");
    blobs.points_per_node = b.value("points_per_node", blobs.points_per_node);
    blobs.d = b.value("d", blobs.d);
    blobs.n_blobs = b.value("n_blobs", blobs.n_blobs);
    blobs.blob_std = b.value("blob_std", blobs.blob_std);
    blobs.center_box = b.value("center_box", blobs.center_box);
    blobs.skew = b.value("skew", blobs.skew);
  }

  const std::size_t K = cfg.value("K", std::size_t{10});
  const std::size_t rounds = cfg.value("rounds", std::size_t{10});
  const std::size_t local_iters = cfg.value("local_iters", std::size_t{5});
  const std::size_t seeds = cfg.value("seeds", std::size_t{5});
  const std::size_t restarts = cfg.value("baseline_restarts", std::size_t{20});
  const double radius_safety = cfg.value("radius_safety", 1.5);
  OptimizerConfig oc = deep_optimizer_defaults(cfg, seed);

  CsvWriter csv({"seed", "variant", "inertia", "baseline_inertia",
                 "relative_inertia"});
  double rel_pricer_sum = 0.0, rel_nc_sum = 0.0;

  for (std::size_t s = 0; s < seeds; ++s) {
    blobs.seed = derive_seed(seed, 1000 + s);
    const std::vector<Mat> data = make_blobs(blobs);
    const Mat pooled = pool_rows(data);
    const Mat central =
        centralized_kmeans(pooled, K, restarts, derive_seed(seed, 2000 + s));
    const double base_inertia = inertia(pooled, central);

    // Fix the aggregation radius from the round-one local centroids so the
    // scheme can be tuned before any aggregation happens. The actual rounds
    // below replay the same draws, so the radius matches what they see.
    const std::uint64_t round_seed = derive_seed(seed, 3000 + s);
    double max_norm2 = 0.0;
    {
      Rng dry(round_seed);
      for (std::size_t i = 0; i < topo.model.n; ++i) {
        Mat init = kmeanspp_init(data[i], K, dry);
        Mat local = lloyd_iterate(data[i], init, local_iters, dry);
        double norm2 = 0.0;
        for (std::size_t c = 0; c < K; ++c)
          norm2 += squared_norm(local.row(c));
        max_norm2 = std::max(max_norm2, norm2);
      }
    }
    const double radius = radius_safety * std::sqrt(max_norm2);

    oc.seed = derive_seed(seed, 4000 + s);
    const CollaborationScheme tuned =
        optimize(topo.model, topo.trust, radius, K * blobs.d, oc).scheme;
    const CollaborationScheme direct = no_collab_scheme(topo.model);

    const auto run_variant = [&](const CollaborationScheme& scheme) {
      KmeansState st;
      st.K = K;
      st.radius = radius;
      st.radius_safety = radius_safety;
      Rng rng(round_seed);
      for (std::size_t r = 0; r < rounds; ++r)
        st = kmeans_round(st, data, topo.model, scheme, local_iters, rng);
      return relative_inertia(pooled, st.global, central);
    };

    const double rel_pricer = run_variant(tuned);
    const double rel_nc = run_variant(direct);
    rel_pricer_sum += rel_pricer;
    rel_nc_sum += rel_nc;
    csv.append_row({std::to_string(s), "pricer",
                    fmt_double(rel_pricer * base_inertia),
                    fmt_double(base_inertia), fmt_double(rel_pricer)});
    csv.append_row({std::to_string(s), "no_collab",
                    fmt_double(rel_nc * base_inertia),
                    fmt_double(base_inertia), fmt_double(rel_nc)});
  }
  write_file_atomic(out / "kmeans.csv", csv.str());
  const double ns = static_cast<double>(seeds);
  return json{{"seeds", seeds},
              {"relative_inertia_pricer", rel_pricer_sum / ns},
              {"relative_inertia_no_collab", rel_nc_sum / ns}};
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline json run_experiment(const std::string& kind, const json& cfg,
                           const std::filesystem::path& out,
                           std::uint64_t seed) {
  std::filesystem::create_directories(out);
  json summary;
  if (kind == "optimize")
    summary = run_optimize(cfg, out, seed);
  else if (kind == "simulate")
    summary = run_simulate(cfg, out, seed);
  else if (kind == "privacy-report")
    summary = run_privacy_report(cfg, out, seed);
  else if (kind == "tradeoff")
    summary = run_tradeoff(cfg, out, seed);
  else if (kind == "neighbor-sweep")
    summary = run_neighbor_sweep(cfg, out, seed);
  else if (kind == "er-analytic")
    summary = run_er_analytic(cfg, out, seed);
  else if (kind == "kmeans")
    summary = run_kmeans(cfg, out, seed);
  else
    throw std::invalid_argument("unknown experiment kind: " + kind);
  summary["kind"] = kind;
  summary["seed"] = seed;
  write_file_atomic(out / "summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace pricer
