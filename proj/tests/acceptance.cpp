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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "xspir/errors.hpp"
#include "xspir/harness.hpp"

namespace {

using namespace xspir;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  std::vector<std::string> failures;

  void fail(const std::string& why) {
    pass = false;
    if (failures.size() < 5) failures.push_back(why);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const GaloisField& F(std::uint32_t p) { return GaloisField::get(FieldSpec::prime(p)); }

std::string cell_name(std::size_t n, std::size_t x, std::size_t t, std::size_t e, std::uint32_t q,
                      std::size_t k) {
  return "(N=" + std::to_string(n) + ",X=" + std::to_string(x) + ",T=" + std::to_string(t) +
         ",E=" + std::to_string(e) + ",q=" + std::to_string(q) + ",K=" + std::to_string(k) + ")";
}

// Runs every theta through the actors; returns the achieved rate or nullopt
// when the field is too small for the instance.
std::optional<Rational> retrieve_all(const std::function<Instance()>& make, std::size_t k,
                                     Outcome& out, const std::string& name) {
  std::optional<Instance> inst;
  try {
    inst.emplace(make());
  } catch (const ConfigError& e) {
    const auto& inv = e.invariant();
    if (inv.rfind("field.", 0) == 0 || inv.rfind("points.", 0) == 0) return std::nullopt;
    out.fail(name + " " + e.what());
    return Rational(0);
  }
  Rational rate;
  for (std::size_t theta = 1; theta <= k; ++theta) {
    const auto run = run_actors(*inst, theta, 1000 + theta);
    if (run.transcript.decoded != run.expected) out.fail(name + " theta=" + std::to_string(theta));
    const std::size_t down =
        inst->is_quantum() ? run.transcript.channel_output.size() : run.transcript.answers.size();
    rate = Rational(static_cast<std::int64_t>(run.transcript.decoded.size()),
                    static_cast<std::int64_t>(down));
  }
  if (!(rate == theorem_rate(*inst))) {
    out.fail(name + " rate " + rate.to_string() + " vs " + theorem_rate(*inst).to_string());
  }
  return rate;
}

Outcome criterion1() {
  Outcome out;
  std::size_t ran = 0, skipped = 0;
  for (std::uint32_t q : {7u, 11u})
    for (std::size_t k : {2u, 3u})
      for (std::size_t n = 3; n <= 5; ++n)
        for (std::size_t x = 0; x <= 2; ++x)
          for (std::size_t t = 0; t <= 2; ++t)
            for (std::size_t e = 0; e <= 2; ++e) {
              if (x + std::max(t, e) >= n) continue;
              const auto r = retrieve_all(
                  [&] { return Instance::classical(SchemeParams::classical(F(q), n, k, x, t, e)); },
                  k, out, cell_name(n, x, t, e, q, k));
              r ? ++ran : ++skipped;
            }
  out.note << ran << " instances decoded for every theta with rate L/N exact";
  if (skipped) out.note << "; " << skipped << " skipped where q < N + L leaves too few distinct points";
  return out;
}

Outcome criterion2() {
  Outcome out;
  std::size_t ran = 0, skipped = 0;
  for (std::uint32_t q : {7u, 11u})
    for (std::size_t k : {2u, 3u})
      for (std::size_t n = 4; n <= 6; ++n)
        for (std::size_t x = 0; x <= 2; ++x)
          for (std::size_t t = 0; t <= 2; ++t)
            for (std::size_t e = 0; e <= 2; ++e) {
              if (x + std::max(t, e) >= n) continue;
              const auto r = retrieve_all(
                  [&] { return Instance::quantum(effective_params(F(q), n, k, x, t, e)); }, k, out,
                  cell_name(n, x, t, e, q, k));
              r ? ++ran : ++skipped;
            }
  const auto classical = Instance::classical(SchemeParams::classical(F(7), 4, 2, 1, 1, 1));
  const auto quantum = Instance::quantum(effective_params(F(7), 4, 2, 1, 1, 1));
  const auto c = run_actors(classical, 1, 5);
  const auto qr = run_actors(quantum, 1, 5);
  const Rational rc(static_cast<std::int64_t>(c.transcript.decoded.size()),
                    static_cast<std::int64_t>(c.transcript.answers.size()));
  const Rational rq(static_cast<std::int64_t>(qr.transcript.decoded.size()),
                    static_cast<std::int64_t>(qr.transcript.channel_output.size()));
  if (!(rq / rc == Rational(2))) out.fail("(4,1,1,1) ratio " + (rq / rc).to_string());
  out.note << ran << " instances decoded all 2L symbols with rate 2L/N' exact";
  if (skipped) out.note << "; " << skipped << " skipped where q is too small for N' + L points";
  out.note << "; (4,1,1,1) ratio " << (rq / rc).to_string();
  return out;
}

Outcome criterion3() {
  Outcome out;
  std::size_t matrices = 0, pairs = 0;
  // B and D over the retrieval sweep
  for (std::uint32_t q : {7u, 11u})
    for (std::size_t n = 2; n <= 6; ++n)
      for (std::size_t l = 1; l < n; ++l) {
        if (q < n + l) continue;
        const auto points = EvalPoints::defaults(F(q), n, l);
        const FieldVector ones(n, F(q).one());
        if (rank(build_B(points)) != n) out.fail("B singular N=" + std::to_string(n));
        ++matrices;
        // the QCSA matrix only arises with L <= floor(N/2)
        if (l > n / 2) continue;
        if (rank(build_D(points, ones, l)) != n) out.fail("D singular N=" + std::to_string(n));
        ++matrices;
      }
  // dual pairs from seeded u
  for (std::uint32_t q : {7u, 11u, 13u})
    for (std::size_t n = 2; n <= 6; ++n)
      for (std::size_t l = 1; l <= n / 2; ++l) {
        if (q < n + l || q - 1 < n) continue;
        const auto& field = F(q);
        const auto points = EvalPoints::defaults(field, n, l);
        RandomStream rng(7, "acceptance-u-" + std::to_string(q) + "-" + std::to_string(n) + "-" +
                                std::to_string(l));
        for (int trial = 0; trial < 50; ++trial) {
          std::vector<std::uint32_t> pool;
          for (std::uint32_t i = 1; i < q; ++i) pool.push_back(i);
          FieldVector u;
          for (std::size_t j = 0; j < n; ++j) {
            const auto pick = rng.below(pool.size());
            u.push_back(field.element(pool[pick]));
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
          }
          const auto pair = DualPair::from_u(u, points.alpha());
          const auto g = build_transfer(points, pair, l);
          if (check_feasibility(g.matrix()) != Feasibility::kFeasible) {
            out.fail("infeasible G at q=" + std::to_string(q) + " N=" + std::to_string(n));
          }
          const auto blk = block_diag(build_D(points, pair.u, l), build_D(points, pair.v, l));
          if (!(mat_mul(g.matrix(), blk) == build_GN(field, n, l))) {
            out.fail("G blkdiag identity at q=" + std::to_string(q) + " N=" + std::to_string(n));
          }
          ++pairs;
        }
      }
  out.note << matrices << " B/D matrices invertible; " << pairs
           << " seeded dual pairs feasible with G*blkdiag(Hu,Hv) = G_N";
  return out;
}

Instance criterion4_instance() {
  return Instance::classical(SchemeParams::classical(F(5), 3, 2, 1, 1, 1));
}

std::vector<LeakageReport> exact_reports;  // kept for criterion 5

Outcome criterion4() {
  Outcome out;
  const auto start = Clock::now();
  const auto inst = criterion4_instance();
  AuditOptions opts;
  opts.budget = 10000000;
  exact_reports = audit_all(inst, Method::kExact, opts);
  std::set<Constraint> seen;
  std::uint64_t work = 0, max_work = 0;
  for (const auto& r : exact_reports) {
    seen.insert(r.constraint);
    work += r.work;
    max_work = std::max(max_work, r.work);
    if (r.leaks) out.fail(to_string(r.constraint) + " " + r.tapped.to_string() + " leaks");
  }
  if (seen.size() != 5) out.fail("only " + std::to_string(seen.size()) + " constraints audited");
  if (max_work > 10000000) out.fail("enumeration over 10^7 cells");
  const double secs = seconds_since(start);
  if (secs > 60) out.fail("took " + std::to_string(secs) + " s");
  out.note << exact_reports.size() << " reports over " << seen.size()
           << " constraints all zero-leakage; largest enumeration " << max_work << " cells, total "
           << work << ", " << static_cast<int>(secs * 10) / 10.0 << " s";
  return out;
}

void compare(const std::vector<LeakageReport>& exact, const std::vector<LeakageReport>& rank,
             const std::string& label, Outcome& out, std::size_t& compared, std::size_t& leaking) {
  if (exact.size() != rank.size()) {
    out.fail(label + ": report counts differ");
    return;
  }
  for (std::size_t i = 0; i < exact.size(); ++i) {
    ++compared;
    leaking += exact[i].leaks ? 1 : 0;
    if (exact[i].constraint != rank[i].constraint || !(exact[i].tapped == rank[i].tapped) ||
        exact[i].leaks != rank[i].leaks) {
      out.fail(label + ": " + to_string(exact[i].constraint) + " " + exact[i].tapped.to_string());
    }
  }
}

Outcome criterion5() {
  Outcome out;
  const auto inst = criterion4_instance();
  std::size_t compared = 0, leaking = 0;
  compare(exact_reports, audit_all(inst, Method::kRank), "clean", out, compared, leaking);

  std::vector<std::pair<std::string, Sabotage>> variants;
  {
    Sabotage s;
    s.drop_storage_noise = true;
    variants.emplace_back("drop R", s);
  }
  {
    Sabotage s;
    s.drop_query_noise = true;
    variants.emplace_back("drop Z", s);
  }
  for (std::size_t i = 0; i < inst.scheme().noise_dim(); ++i) {
    Sabotage s;
    s.drop_common = {i};
    variants.emplace_back("drop Z'_" + std::to_string(i), s);
  }
  for (const auto& [label, sab] : variants) {
    AuditOptions opts;
    opts.sabotage = sab;
    compare(audit_all(inst, Method::kExact, opts), audit_all(inst, Method::kRank, opts), label, out,
            compared, leaking);
  }
  // beyond the design thresholds
  AuditOptions over;
  over.allow_over_threshold = true;
  const std::vector<std::pair<AdversaryKind, TapSet>> over_taps = {
      {AdversaryKind::kXStorage, {{0, 1}, {}, {}, {}, false}},
      {AdversaryKind::kTCollusion, {{}, {0, 1}, {}, {}, false}},
      {AdversaryKind::kEavesdropperClassical, {{}, {0, 1}, {0, 1}, {}, false}},
  };
  for (const auto& [kind, taps] : over_taps) {
    compare(audit(inst, kind, {&taps, 1}, Method::kExact, over),
            audit(inst, kind, {&taps, 1}, Method::kRank, over), "over-threshold", out, compared,
            leaking);
  }

  const auto quantum = Instance::quantum(effective_params(F(7), 4, 2, 1, 1, 1));
  const auto qreports = audit_all(quantum, Method::kRank);
  std::set<Constraint> seen;
  for (const auto& r : qreports) {
    seen.insert(r.constraint);
    if (r.leaks) out.fail("quantum " + to_string(r.constraint) + " " + r.tapped.to_string());
  }
  if (quantum.scheme().n() != 4) out.fail("quantum instance has N' != 4");
  if (seen.size() != 5) out.fail("quantum audit covered " + std::to_string(seen.size()) + " constraints");
  out.note << compared << " exact/rank verdict pairs agree (" << leaking
           << " leaking under sabotage); quantum N'=4 q=7: " << qreports.size()
           << " rank reports zero-leakage over " << seen.size() << " constraints";
  return out;
}

// One negative control: some report must leak and every leaking report must
// carry a witness.
void expect_leak(const std::vector<LeakageReport>& rs, const std::string& label, Outcome& out,
                 std::vector<std::string>& shown) {
  bool any = false;
  for (const auto& r : rs) {
    if (!r.leaks) continue;
    any = true;
    if (!r.witness || r.witness->observation.empty()) out.fail(label + ": leak without witness");
  }
  if (!any) out.fail(label + ": no leak");
  else shown.push_back(label);
}

Outcome criterion6() {
  Outcome out;
  std::vector<std::string> shown;

  // Z'_i on an X = 0 instance
  const auto zinst = Instance::classical(SchemeParams::classical(F(5), 3, 2, 0, 2, 0));
  const auto sp_taps = admissible_taps(zinst, AdversaryKind::kSymmetricPrivacy);
  for (std::size_t i = 0; i < zinst.scheme().noise_dim(); ++i) {
    AuditOptions opts;
    opts.sabotage.drop_common = {i};
    expect_leak(audit(zinst, AdversaryKind::kSymmetricPrivacy, sp_taps, Method::kExact, opts),
                "drop Z'_" + std::to_string(i), out, shown);
  }
  // with X >= 1 the storage noise still hides the interference
  std::size_t masked = 0;
  const auto xinst = criterion4_instance();
  for (std::size_t i = 0; i < xinst.scheme().noise_dim(); ++i) {
    AuditOptions opts;
    opts.sabotage.drop_common = {i};
    const auto rs = audit(xinst, AdversaryKind::kSymmetricPrivacy,
                          admissible_taps(xinst, AdversaryKind::kSymmetricPrivacy), Method::kExact, opts);
    if (std::none_of(rs.begin(), rs.end(), [](const auto& r) { return r.leaks; })) ++masked;
  }

  // zero masks, E >= 1
  {
    const auto q = Instance::quantum(effective_params(F(7), 4, 2, 1, 1, 1));
    AuditOptions opts;
    opts.sabotage.zero_masks = true;
    auto rs = audit(q, AdversaryKind::kEavesdropperQuantum,
                    admissible_taps(q, AdversaryKind::kEavesdropperQuantum), Method::kRank, opts);
    std::erase_if(rs, [](const auto& r) { return r.constraint != Constraint::kEavesdropperMessage; });
    expect_leak(rs, "zero masks (rank, q=7)", out, shown);
    const auto tiny = Instance::quantum(effective_params(F(3), 2, 2, 0, 1, 1));
    const TapSet tap{{}, {}, {0}, {}, false};
    auto ex = audit(tiny, AdversaryKind::kEavesdropperQuantum, {&tap, 1}, Method::kExact, opts);
    std::erase_if(ex, [](const auto& r) { return r.constraint != Constraint::kEavesdropperMessage; });
    expect_leak(ex, "zero masks (exact, q=3)", out, shown);
  }

  // one tap past each threshold
  AuditOptions over;
  over.allow_over_threshold = true;
  const auto inst = criterion4_instance();
  const TapSet storage{{0, 1}, {}, {}, {}, false};
  const TapSet queries{{}, {0, 1}, {}, {}, false};
  expect_leak(audit(inst, AdversaryKind::kXStorage, {&storage, 1}, Method::kExact, over),
              "X+1 storage taps", out, shown);
  expect_leak(audit(inst, AdversaryKind::kTCollusion, {&queries, 1}, Method::kExact, over),
              "max(T,E)+1 query taps", out, shown);
  expect_leak(audit(inst, AdversaryKind::kEavesdropperClassical, {&queries, 1}, Method::kExact, over),
              "max(T,E)+1 eavesdropper taps", out, shown);

  out.note << "leaks with witnesses: ";
  for (std::size_t i = 0; i < shown.size(); ++i) out.note << (i ? ", " : "") << shown[i];
  out.note << " (note: dropping one Z'_i at X=1 leaks nothing in " << masked << "/"
           << xinst.scheme().noise_dim() << " cases, storage noise masks the interference)";
  return out;
}

Outcome criterion7(const std::string& scenario_dir) {
  Outcome out;
  std::size_t checked = 0;
  auto twice = [&](const std::string& label, const std::function<std::string()>& fn) {
    const auto a = fn();
    if (a != fn()) out.fail(label);
    ++checked;
  };
  std::vector<Scenario> scenarios;
  if (!scenario_dir.empty()) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(scenario_dir)) {
      if (entry.path().extension() == ".conf") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto s = load_scenario(f.string());
      if (s.mode == Mode::kQuantum && (s.v || s.u)) {
        twice(f.filename().string(), [&] { return to_json(matrix_check(s)); });
        continue;
      }
      scenarios.push_back(s);
    }
  }
  for (auto mode : {Mode::kClassical, Mode::kQuantum}) {
    Scenario s;
    s.mode = mode;
    s.n = 5, s.k = 3, s.x = 1, s.t = 1, s.e = 1, s.seed = 123456789;
    s.field = FieldSpec::prime(11);
    s.audit_every_kind = true;
    scenarios.push_back(s);
  }
  for (const auto& s : scenarios) {
    twice("run " + to_string(s.mode) + " N=" + std::to_string(s.n), [&] { return to_json(run(s)); });
  }
  twice("rate table", [] { return to_json(rate_table("N = 3,4,5\nX = 0,1\nT = 0,1,2\nE = 1\n")); });
  out.note << checked << " reports byte-identical across repeated runs";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string scenario_dir = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"classical correctness and rate", criterion1},
      {"quantum correctness and rate doubling", criterion2},
      {"matrix suite", criterion3},
      {"exact zero leakage", criterion4},
      {"rank criterion cross-validation", criterion5},
      {"negative controls", criterion6},
      {"determinism", [&] { return criterion7(scenario_dir); }},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " "
              << criteria[i].first << ": " << o.note.str() << "\n";
    for (const auto& f : o.failures) std::cout << "    failed: " << f << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
