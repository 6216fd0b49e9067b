// Copyright 2026 The xsetspir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "xspir/harness.hpp"

namespace xspir {
namespace {

using Json = nlohmann::ordered_json;

// Prime-field elements print as integers, extension elements as coefficient
// arrays (lowest degree first).
Json element(const FieldElement& e) {
  if (e.field().degree() == 1) return e.index();
  return e.coeffs();
}

Json elements(const FieldVector& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(element(e));
  return out;
}

Json index_list(const std::optional<std::vector<std::uint32_t>>& v) {
  if (!v) return nullptr;
  return *v;
}

Json field_json(const FieldSpec& f) {
  Json out;
  out["p"] = f.p;
  out["r"] = f.r;
  out["modulus"] = f.modulus;
  out["q"] = f.order();
  return out;
}

Json scenario_json(const Scenario& s) {
  Json out;
  out["mode"] = to_string(s.mode);
  out["field"] = field_json(s.field);
  out["N"] = s.n;
  out["K"] = s.k;
  out["X"] = s.x;
  out["T"] = s.t;
  out["E"] = s.e;
  out["theta"] = s.theta ? Json(*s.theta) : Json("sweep");
  out["seed"] = s.seed;
  if (s.audit_every_kind) {
    out["audits"] = "all";
  } else {
    Json a = Json::array();
    for (auto k : s.audits) a.push_back(to_string(k));
    out["audits"] = a;
  }
  out["audit_method"] = to_string(s.audit_method);
  Json taps = Json::array();
  for (const auto& t : s.taps) taps.push_back(t.to_string());
  out["taps"] = taps;
  out["sabotage"] = s.sabotage.to_string();
  out["allow_over_threshold"] = s.allow_over_threshold;
  Json overrides;
  overrides["alpha"] = index_list(s.alpha);
  overrides["f"] = index_list(s.f);
  overrides["u"] = index_list(s.u);
  overrides["v"] = index_list(s.v);
  out["overrides"] = overrides;
  return out;
}

Json observations(const std::vector<Observation>& obs) {
  Json out = Json::array();
  for (const auto& o : obs) out.push_back({{"label", o.label}, {"value", element(o.value)}});
  return out;
}

Json leakage_json(const LeakageReport& r) {
  Json out;
  out["kind"] = to_string(r.kind);
  out["constraint"] = to_string(r.constraint);
  out["tapped"] = r.tapped.to_string();
  out["method"] = to_string(r.method);
  out["verdict"] = r.leaks ? "leaks" : "zero-leakage";
  out["work"] = r.work;
  out["sabotage"] = r.sabotage;
  if (r.mi_bits) {
    out["mi_bits"] = std::round(*r.mi_bits * 1e9) / 1e9;
  } else {
    out["mi_bits"] = nullptr;
  }
  if (r.witness) {
    const auto& w = *r.witness;
    Json wj;
    wj["secret_a"] = w.secret_a;
    wj["secret_b"] = w.secret_b;
    wj["cell"] = w.cell;
    wj["observation"] = observations(w.observation);
    wj["count_a"] = w.count_a ? Json(*w.count_a) : Json(nullptr);
    wj["count_b"] = w.count_b ? Json(*w.count_b) : Json(nullptr);
    out["witness"] = wj;
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

Json header(const char* report) {
  Json out;
  out["version"] = kReportVersion;
  out["report"] = report;
  return out;
}

}  // namespace

std::string to_json(const RunReport& r) {
  Json out = header(r.retrievals.empty() ? "audit" : "run");
  out["scenario"] = scenario_json(r.scenario);
  Json params;
  params["N_effective"] = r.n_effective;
  params["L"] = r.l;
  params["alpha"] = elements(r.alpha);
  params["f"] = elements(r.f);
  params["u"] = elements(r.u);
  params["v"] = elements(r.v);
  out["parameters"] = params;

  Json retrievals = Json::array();
  for (const auto& x : r.retrievals) {
    retrievals.push_back({{"theta", x.theta},
                          {"verified", x.verified},
                          {"decoded", elements(x.decoded)},
                          {"expected", elements(x.expected)}});
  }
  out["verified"] = r.retrievals.empty() ? Json(nullptr) : Json(r.verified);
  out["retrievals"] = retrievals;
  Json rate;
  rate["achieved"] = r.retrievals.empty() ? Json(nullptr) : Json(r.achieved_rate.to_string());
  rate["theorem"] = r.theorem_rate.to_string();
  rate["match"] = r.retrievals.empty() ? Json(nullptr) : Json(r.rate_matches());
  out["rate"] = rate;

  Json dl;
  dl["query_symbols"] = r.download.query_symbols;
  dl["mask_symbols"] = r.download.mask_symbols;
  dl["uplink_symbols"] = r.download.query_symbols + r.download.mask_symbols;
  dl["downlink_symbols"] = r.download.downlink_symbols;
  dl["message_symbols"] = r.download.message_symbols;
  dl["storage_symbols"] = r.download.storage_symbols;
  dl["common_symbols"] = r.download.common_symbols;
  out["download"] = dl;
  Json transport = Json::object();
  for (const auto& [type, count] : r.transport) transport[type] = count;
  out["transport"] = transport;

  Json audits = Json::array();
  std::size_t leaks = 0;
  for (const auto& a : r.audits) {
    audits.push_back(leakage_json(a));
    leaks += a.leaks ? 1 : 0;
  }
  out["audit_summary"] = {{"reports", r.audits.size()}, {"leaks", leaks}};
  out["audits"] = audits;
  if (r.timing_ms) out["timing_ms"] = *r.timing_ms;
  out["exit_code"] = r.exit_code();
  return out.dump(2) + "\n";
}

std::string to_json(const RateTable& t) {
  Json out = header("rate-table");
  out["K"] = t.k;
  out["seed"] = t.seed;
  Json rows = Json::array();
  for (const auto& c : t.cells) {
    Json row;
    row["N"] = c.n;
    row["X"] = c.x;
    row["T"] = c.t;
    row["E"] = c.e;
    row["status"] = !c.feasible ? "infeasible" : c.q == 0 ? "no-field" : c.verified ? "verified" : "failed";
    if (c.feasible && c.q != 0) {
      row["q"] = c.q;
      row["R"] = c.rate.to_string();
      row["R_Q"] = c.quantum_rate.to_string();
      row["N_effective"] = c.n_effective;
      row["doubling"] = c.doubling.to_string();
    }
    rows.push_back(row);
  }
  out["rows"] = rows;
  out["exit_code"] = t.exit_code();
  return out.dump(2) + "\n";
}

std::string to_json(const MatrixReport& m) {
  Json out = header("matrix-check");
  out["scenario"] = scenario_json(m.scenario);
  Json checks = Json::array();
  for (const auto& c : m.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  out["checks"] = checks;
  out["exit_code"] = m.exit_code();
  return out.dump(2) + "\n";
}

std::string to_text(const RateTable& t) {
  std::ostringstream ss;
  ss << std::left << std::setw(4) << "N" << std::setw(4) << "X" << std::setw(4) << "T"
     << std::setw(4) << "E" << std::setw(6) << "q" << std::setw(8) << "R" << std::setw(8) << "R_Q"
     << std::setw(5) << "N'" << std::setw(10) << "doubling" << "status\n";
  for (const auto& c : t.cells) {
    ss << std::setw(4) << c.n << std::setw(4) << c.x << std::setw(4) << c.t << std::setw(4) << c.e;
    if (!c.feasible || c.q == 0) {
      ss << std::setw(37) << "-" << (c.feasible ? "no-field" : "infeasible") << "\n";
      continue;
    }
    ss << std::setw(6) << c.q << std::setw(8) << c.rate.to_string() << std::setw(8)
       << c.quantum_rate.to_string() << std::setw(5) << c.n_effective << std::setw(10)
       << c.doubling.to_string() << (c.verified ? "verified" : "FAILED") << "\n";
  }
  return ss.str();
}

}  // namespace xspir
