// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pricer/csvio.hpp"
#include "pricer/mat.hpp"
#include "pricer/network.hpp"
#include "pricer/privacy.hpp"
#include "pricer/scheme.hpp"

namespace pricer {

using json = nlohmann::json;

inline json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat mat_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(what + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || row.size() != cols)
      throw std::invalid_argument(what + ": ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      const json& cell = row.at(k);
      // Plain JSON has no infinity literal; the string "inf" stands in for
      // a fully relaxed (untrusted-by-nobody) entry in trust matrices.
      if (cell.is_string() && cell.get<std::string>() == "inf")
        m(i, k) = std::numeric_limits<double>::infinity();
      else
        m(i, k) = cell.get<double>();
    }
  }
  return m;
}

inline json mat_to_json_inf(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (std::isinf(m(i, j)))
        row.push_back("inf");
      else
        row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json network_to_json(const NetworkModel& m) {
  return json{{"n", m.n}, {"p", m.p}, {"P", mat_to_json(m.P)},
              {"E", mat_to_json(m.E)}};
}

inline NetworkModel network_from_json(const json& j) {
  NetworkModel m;
  m.n = j.at("n").get<std::size_t>();
  m.p = j.at("p").get<Vec>();
  m.P = mat_from_json(j.at("P"), "network P");
  m.E = j.contains("E") ? mat_from_json(j.at("E"), "network E")
                        : independent_correlations(m.P);
  validate_network(m);
  return m;
}

inline json scheme_to_json(const CollaborationScheme& s) {
  return json{{"A", mat_to_json(s.A)}, {"Sigma", mat_to_json(s.Sigma)}};
}

inline CollaborationScheme scheme_from_json(const json& j) {
  CollaborationScheme s;
  s.A = mat_from_json(j.at("A"), "scheme A");
  s.Sigma = mat_from_json(j.at("Sigma"), "scheme Sigma");
  validate_scheme(s);
  return s;
}

inline json trust_to_json(const TrustMatrix& t) {
  return json{{"eps", mat_to_json_inf(t.eps)},
              {"delta", mat_to_json(t.delta)}};
}

inline TrustMatrix trust_from_json(const json& j) {
  TrustMatrix t;
  t.eps = mat_from_json(j.at("eps"), "trust eps");
  t.delta = mat_from_json(j.at("delta"), "trust delta");
  validate_trust(t);
  return t;
}

inline json eps_delta_to_json(const EpsDelta& e) {
  return json{{"status", to_string(e.status)},
              {"eps", e.eps},
              {"delta", e.delta}};
}

inline json relay_dp_to_json(const RelayDp& r) {
  json per_node = json::array();
  for (const auto& e : r.per_node) per_node.push_back(eps_delta_to_json(e));
  return json{{"relay", r.relay},
              {"status", to_string(r.status)},
              {"zeta_bar", r.zeta_bar},
              {"r", r.r},
              {"delta_prime", r.delta_prime},
              {"per_node", std::move(per_node)}};
}

inline json ps_dp_to_json(const PsDp& p) {
  json relays = json::array();
  for (const auto& t : p.relays) {
    relays.push_back(json{{"relay", t.relay},
                          {"status", to_string(t.status)},
                          {"eps_identity", t.eps_identity},
                          {"eps_data", t.eps_data},
                          {"noise_floor", t.noise_floor},
                          {"delta_slack", t.delta_slack},
                          {"failure", t.failure}});
  }
  return json{{"status", to_string(p.status)},
              {"eps_identity", p.eps_identity},
              {"delta_identity", p.delta_identity},
              {"eps_data", p.eps_data},
              {"delta_data", p.delta_data},
              {"relays", std::move(relays)},
              {"failures", p.failures}};
}

inline json privacy_report_to_json(const PrivacyReport& rep) {
  json local = json::array();
  for (const auto& e : rep.local) local.push_back(eps_delta_to_json(e));
  json rid = json::array();
  for (const auto& r : rep.relay_identity) rid.push_back(relay_dp_to_json(r));
  json rdd = json::array();
  for (const auto& r : rep.relay_data) rdd.push_back(relay_dp_to_json(r));
  json ps = json::array();
  for (const auto& p : rep.ps) ps.push_back(ps_dp_to_json(p));
  return json{{"n", rep.n},
              {"local", std::move(local)},
              {"relay_identity", std::move(rid)},
              {"relay_data", std::move(rdd)},
              {"ps", std::move(ps)}};
}

// Flat tabular view: one row per (level, i, j). Node-level rows (the server
// composition) leave j empty. The eps column is blank when no finite value
// exists; the status column says why.
inline std::string privacy_report_csv(const PrivacyReport& rep) {
  CsvWriter csv({"level", "i", "j", "status", "eps", "delta"});
  const std::size_t n = rep.n;
  auto row = [&csv](const std::string& level, const std::string& i,
                    const std::string& j, const EpsDelta& e) {
    csv.append_row({level, i, j, to_string(e.status),
                    e.status == Guarantee::kOk ? fmt_double(e.eps) : "",
                    fmt_double(e.delta)});
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      row("local", std::to_string(i), std::to_string(j),
          rep.local[i * n + j]);
  for (const auto& r : rep.relay_identity)
    for (std::size_t i = 0; i < r.per_node.size(); ++i)
      row("relay_identity", std::to_string(i), std::to_string(r.relay),
          r.per_node[i]);
  for (const auto& r : rep.relay_data)
    for (std::size_t i = 0; i < r.per_node.size(); ++i)
      row("relay_data", std::to_string(i), std::to_string(r.relay),
          r.per_node[i]);
  for (std::size_t i = 0; i < rep.ps.size(); ++i) {
    const PsDp& p = rep.ps[i];
    row("ps_identity", std::to_string(i), "",
        {p.status, p.eps_identity, p.delta_identity});
    row("ps_data", std::to_string(i), "", {p.status, p.eps_data, p.delta_data});
  }
  return csv.str();
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace pricer
