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

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "xspir/errors.hpp"
#include "xspir/harness.hpp"

namespace {

using namespace xspir;

constexpr int kConfigExit = 4;

void emit(const std::string& json, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << json;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("output.file", "cannot write '" + path + "'");
  out << json;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("grid.file", "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

void summarize(const RunReport& r) {
  const auto& s = r.scenario;
  std::cout << to_string(s.mode) << " N=" << s.n << " K=" << s.k << " X=" << s.x << " T=" << s.t
            << " E=" << s.e << " q=" << s.field.order() << " seed=" << s.seed << "\n";
  if (!r.retrievals.empty()) {
    std::cout << "N'=" << r.n_effective << " L=" << r.l << " verified=" << (r.verified ? "true" : "false")
              << " rate=" << r.achieved_rate.to_string() << " theorem=" << r.theorem_rate.to_string()
              << "\n";
    std::cout << "uplink query=" << r.download.query_symbols << " mask=" << r.download.mask_symbols
              << " downlink=" << r.download.downlink_symbols << "\n";
  }
  std::size_t leaks = 0;
  for (const auto& a : r.audits) {
    if (!a.leaks) continue;
    ++leaks;
    std::cout << "LEAK " << to_string(a.kind) << " " << to_string(a.constraint) << " "
              << a.tapped.to_string() << "\n";
  }
  if (!r.audits.empty()) {
    std::cout << "audits " << r.audits.size() << " reports, " << leaks << " leaking\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure private information retrieval simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the scenario seed");

  std::string scenario_path, json_path, grid_path, constraint = "all", method;
  bool timing = false;

  auto* run_cmd = app.add_subcommand("run", "Retrieve, verify and run the scenario's audits");
  run_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
  run_cmd->add_option("--json", json_path, "Write the JSON report here ('-' for stdout)");
  run_cmd->add_flag("--timing", timing, "Include wall-clock timing in the report");

  auto* audit_cmd = app.add_subcommand("audit", "Run leakage audits only");
  audit_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
  audit_cmd->add_option("--constraint", constraint, "Adversary kind or 'all'");
  audit_cmd->add_option("--method", method, "exact or rank (default: scenario)")
      ->check(CLI::IsMember({"exact", "rank"}));
  audit_cmd->add_option("--json", json_path, "Write the JSON report here ('-' for stdout)");

  auto* rate_cmd = app.add_subcommand("rate-table", "Verify rates over a parameter grid");
  rate_cmd->add_option("--grid", grid_path, "Grid file")->required();
  rate_cmd->add_option("--json", json_path, "Write the JSON report here ('-' for stdout)");

  auto* matrix_cmd = app.add_subcommand("matrix-check", "Check the quantum scheme's matrices");
  matrix_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
  matrix_cmd->add_option("--json", json_path, "Write the JSON report here ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    auto load = [&] {
      auto s = load_scenario(scenario_path);
      if (seed) s.seed = *seed;
      return s;
    };

    if (run_cmd->parsed()) {
      const auto start = std::chrono::steady_clock::now();
      auto report = run(load());
      if (timing) {
        report.timing_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
      if (json_path.empty() || json_path != "-") summarize(report);
      if (!json_path.empty()) emit(to_json(report), json_path);
      return report.exit_code();
    }

    if (audit_cmd->parsed()) {
      auto s = load();
      if (!method.empty()) s.audit_method = method == "exact" ? Method::kExact : Method::kRank;
      std::optional<std::vector<AdversaryKind>> kinds;
      if (constraint == "all") {
        kinds = kinds_for(build_instance(s));
      } else if (auto k = parse_adversary_kind(constraint)) {
        kinds = std::vector<AdversaryKind>{*k};
      } else {
        throw ConfigError("audit.kind",
                          "unknown kind '" + constraint +
                              "'; use all, x-storage, t-collusion, symmetric-privacy, "
                              "eavesdropper-classical or eavesdropper-quantum");
      }
      const auto report = run_audits(s, kinds);
      if (json_path.empty() || json_path != "-") summarize(report);
      if (!json_path.empty()) emit(to_json(report), json_path);
      return report.exit_code();
    }

    if (rate_cmd->parsed()) {
      auto text = read_file(grid_path);
      if (seed) text += "\nseed = " + std::to_string(*seed) + "\n";
      const auto table = rate_table(text);
      if (json_path.empty() || json_path != "-") std::cout << to_text(table);
      if (!json_path.empty()) emit(to_json(table), json_path);
      return table.exit_code();
    }

    if (matrix_cmd->parsed()) {
      const auto report = matrix_check(load());
      if (json_path.empty() || json_path != "-") {
        for (const auto& c : report.checks) {
          std::cout << (c.pass ? "pass " : "FAIL ") << c.name << ": " << c.detail << "\n";
        }
      }
      if (!json_path.empty()) emit(to_json(report), json_path);
      return report.exit_code();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.invariant() << "]: " << e.what() << "\n";
    return kConfigExit;
  } catch (const BudgetExceeded& e) {
    std::cerr << "config error [budget]: " << e.what() << "\n";
    return kConfigExit;
  } catch (const NotLinearError& e) {
    std::cerr << "config error [rank-method]: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
