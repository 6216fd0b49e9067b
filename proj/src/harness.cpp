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

#include "xspir/harness.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "xspir/errors.hpp"

namespace xspir {

std::string to_string(MessageType t) {
  switch (t) {
    case MessageType::kStorageShare:
      return "storage-share";
    case MessageType::kCommonRandomness:
      return "common-randomness";
    case MessageType::kQuery:
      return "query";
    case MessageType::kMask:
      return "mask";
    case MessageType::kAnswer:
      return "answer";
  }
  return "unknown";
}

std::string ActorId::name() const {
  switch (role) {
    case ActorRole::kDealer:
      return "dealer";
    case ActorRole::kCommonSource:
      return "common-source-" + std::to_string(index + 1);
    case ActorRole::kUser:
      return "user";
    case ActorRole::kDatabase:
      return "db-" + std::to_string(index + 1);
  }
  return "unknown";
}

namespace {

std::size_t blocks_symbols(const std::vector<FieldVector>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  return n;
}

bool payload_matches(MessageType type, const Payload& p) {
  switch (type) {
    case MessageType::kStorageShare:
      return std::holds_alternative<StorageShare>(p) || std::holds_alternative<QuantumShare>(p);
    case MessageType::kCommonRandomness:
      return std::holds_alternative<CommonShare>(p);
    case MessageType::kQuery:
      return std::holds_alternative<QueryVector>(p);
    case MessageType::kMask:
      return std::holds_alternative<MaskShare>(p);
    case MessageType::kAnswer:
      return std::holds_alternative<AnswerSymbol>(p) || std::holds_alternative<AnswerInstancePair>(p);
  }
  return false;
}

// Database the payload concerns, where it names one.
std::optional<std::size_t> payload_db(const Payload& p) {
  return std::visit(
      [](const auto& v) -> std::optional<std::size_t> {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, CommonShare>) {
          return std::nullopt;
        } else {
          return v.db;
        }
      },
      p);
}

}  // namespace

std::size_t symbol_count(const Payload& p) {
  struct Visitor {
    std::size_t operator()(const StorageShare& s) const { return blocks_symbols(s.blocks); }
    std::size_t operator()(const QuantumShare& s) const {
      return blocks_symbols(s.half[0].blocks) + blocks_symbols(s.half[1].blocks);
    }
    std::size_t operator()(const CommonShare& s) const { return s.symbols.symbols.size(); }
    std::size_t operator()(const QueryVector& q) const { return blocks_symbols(q.blocks); }
    std::size_t operator()(const MaskShare&) const { return 2; }
    std::size_t operator()(const AnswerSymbol&) const { return 1; }
    std::size_t operator()(const AnswerInstancePair&) const { return 2; }
  };
  return std::visit(Visitor{}, p);
}

bool Transport::allowed(const ActorId& from, const ActorId& to, MessageType type) {
  using R = ActorRole;
  if (to.role == R::kDatabase) {
    switch (from.role) {
      case R::kDealer:
        return type == MessageType::kStorageShare;
      case R::kCommonSource:
        return type == MessageType::kCommonRandomness;
      case R::kUser:
        return type == MessageType::kQuery || type == MessageType::kMask;
      default:
        return false;
    }
  }
  return from.role == R::kDatabase && to.role == R::kUser && type == MessageType::kAnswer;
}

void Transport::send(Envelope env) {
  if (!allowed(env.from, env.to, env.type)) {
    throw Error("transport: " + env.from.name() + " may not send " + to_string(env.type) + " to " +
                env.to.name());
  }
  if (!payload_matches(env.type, env.payload)) {
    throw Error("transport: payload does not match message type " + to_string(env.type));
  }
  const ActorId& db_end = env.to.role == ActorRole::kDatabase ? env.to : env.from;
  if (const auto db = payload_db(env.payload); db && *db != db_end.index) {
    throw Error("transport: payload for db-" + std::to_string(*db + 1) + " routed via " +
                db_end.name());
  }
  log_.push_back({env.from, env.to, env.type, symbol_count(env.payload)});
  pending_.push_back(std::move(env));
}

std::vector<Envelope> Transport::receive(const ActorId& to) {
  std::vector<Envelope> out;
  auto it = std::stable_partition(pending_.begin(), pending_.end(),
                                  [&](const Envelope& e) { return !(e.to == to); });
  std::move(it, pending_.end(), std::back_inserter(out));
  pending_.erase(it, pending_.end());
  return out;
}

// ---------------------------------------------------------------------------
// Actors. Each one owns its substreams; the draw order matches
// draw_randomness so both paths see the same symbols.

namespace {

const ActorId kDealer{ActorRole::kDealer, 0};
const ActorId kUser{ActorRole::kUser, 0};
ActorId database(std::size_t n) { return {ActorRole::kDatabase, n}; }

class Dealer {
 public:
  Dealer(const Instance& inst, std::uint64_t seed) : inst_(inst) {
    const auto& s = inst.scheme();
    RandomStream msg_rng(seed, "messages");
    messages_.emplace(MessageSet::random(s.field(), s.k(), inst.message_len(), msg_rng));
    RandomStream storage_rng(seed, "storage-noise");
    for (std::size_t h = 0; h < inst.halves(); ++h) {
      noise_.push_back(NoiseBlocks::random(s.field(), s.l(), s.x(), s.k(), storage_rng));
    }
  }

  void distribute(Transport& tr) const {
    const auto& s = inst_.scheme();
    if (inst_.is_quantum()) {
      for (auto& share : encode_storage_double(inst_.quantum(), *messages_, {noise_[0], noise_[1]})) {
        tr.send({kDealer, database(share.db), MessageType::kStorageShare, std::move(share)});
      }
    } else {
      for (auto& share : encode_storage(s, *messages_, noise_[0])) {
        tr.send({kDealer, database(share.db), MessageType::kStorageShare, std::move(share)});
      }
    }
  }

  FieldVector message(std::size_t theta) const { return messages_->message(theta); }

 private:
  const Instance& inst_;
  std::optional<MessageSet> messages_;
  std::vector<NoiseBlocks> noise_;
};

void run_common_source(const Instance& inst, std::size_t half, std::uint64_t seed, Transport& tr) {
  const auto& s = inst.scheme();
  RandomStream rng(seed, "common-randomness-" + std::to_string(half + 1));
  const auto cr = gen_common_randomness(s, rng);
  const ActorId me{ActorRole::kCommonSource, half};
  for (std::size_t n = 0; n < s.n(); ++n) {
    tr.send({me, database(n), MessageType::kCommonRandomness, CommonShare{half, cr}});
  }
}

class User {
 public:
  User(const Instance& inst, std::size_t theta, std::uint64_t seed) : inst_(inst), theta_(theta) {
    const auto& s = inst.scheme();
    RandomStream query_rng(seed, "user-query");
    noise_.emplace(NoiseBlocks::random(s.field(), s.l(), s.m(), s.k(), query_rng));
    if (inst.is_quantum()) {
      RandomStream mask_rng(seed, "masks");
      lambda_ = {mask_rng.uniform_vector(s.field(), s.n()), mask_rng.uniform_vector(s.field(), s.n())};
    }
  }

  void send_queries(Transport& tr, Transcript& t) const {
    const auto& s = inst_.scheme();
    t.queries = gen_queries(s, theta_, *noise_);
    for (const auto& q : t.queries) tr.send({kUser, database(q.db), MessageType::kQuery, q});
    if (inst_.is_quantum()) {
      const auto masks = masks_from_lambda(inst_.quantum(), lambda_);
      for (std::size_t n = 0; n < s.n(); ++n) {
        t.masks.push_back(masks.share_for(n));
        tr.send({kUser, database(n), MessageType::kMask, t.masks.back()});
      }
    }
  }

  void decode_answers(Transport& tr, Transcript& t) const {
    for (auto& env : tr.receive(kUser)) {
      if (auto* a = std::get_if<AnswerSymbol>(&env.payload)) t.answers.push_back(*a);
      if (auto* p = std::get_if<AnswerInstancePair>(&env.payload)) t.answer_pairs.push_back(*p);
    }
    auto by_db = [](const auto& a, const auto& b) { return a.db < b.db; };
    if (inst_.is_quantum()) {
      std::sort(t.answer_pairs.begin(), t.answer_pairs.end(), by_db);
      t.channel_output = over_the_air(t.answer_pairs, inst_.quantum());
      t.decoded = transmit_and_decode(t.answer_pairs, inst_.quantum(), {theta_, lambda_});
    } else {
      std::sort(t.answers.begin(), t.answers.end(), by_db);
      t.decoded = decode(t.answers, inst_.scheme());
    }
  }

 private:
  const Instance& inst_;
  std::size_t theta_;
  std::optional<NoiseBlocks> noise_;
  std::array<FieldVector, 2> lambda_;
};

// A database sees only what the transport delivers to it.
void run_database(const Instance& inst, std::size_t n, Transport& tr, Transcript& t) {
  std::optional<StorageShare> share;
  std::optional<QuantumShare> qshare;
  std::optional<QueryVector> query;
  std::optional<MaskShare> mask;
  std::array<std::optional<CommonRandomness>, 2> common;
  for (auto& env : tr.receive(database(n))) {
    std::visit(
        [&](auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, StorageShare>) share = p;
          else if constexpr (std::is_same_v<P, QuantumShare>) qshare = p;
          else if constexpr (std::is_same_v<P, QueryVector>) query = p;
          else if constexpr (std::is_same_v<P, MaskShare>) mask = p;
          else if constexpr (std::is_same_v<P, CommonShare>) common.at(p.half) = p.symbols;
        },
        env.payload);
  }
  if (!query || !common[0]) throw Error(database(n).name() + " is missing its inputs");
  if (inst.is_quantum()) {
    if (!qshare || !mask || !common[1]) throw Error(database(n).name() + " is missing its inputs");
    t.quantum_storage.push_back(*qshare);
    tr.send({database(n), kUser, MessageType::kAnswer,
             gen_answer_instances(*qshare, *query, *common[0], *common[1], *mask, inst.quantum())});
  } else {
    if (!share) throw Error(database(n).name() + " is missing its storage");
    t.storage.push_back(*share);
    tr.send({database(n), kUser, MessageType::kAnswer,
             answer(*share, *query, *common[0], inst.scheme())});
  }
}

}  // namespace

ActorRun run_actors(const Instance& inst, std::size_t theta, std::uint64_t seed) {
  const auto& s = inst.scheme();
  if (theta < 1 || theta > s.k()) {
    throw ConfigError("scenario.theta-range", "theta must lie in [1.." + std::to_string(s.k()) + "]");
  }
  ActorRun out;
  out.transcript.theta = theta;
  const Dealer dealer(inst, seed);
  const User user(inst, theta, seed);
  dealer.distribute(out.transport);
  for (std::size_t h = 0; h < inst.halves(); ++h) run_common_source(inst, h, seed, out.transport);
  // happens-before: queries, then answers, then decode
  user.send_queries(out.transport, out.transcript);
  for (std::size_t n = 0; n < s.n(); ++n) run_database(inst, n, out.transport, out.transcript);
  user.decode_answers(out.transport, out.transcript);
  out.expected = dealer.message(theta);
  return out;
}

// ---------------------------------------------------------------------------

Rational theorem_rate(const Instance& inst) {
  const auto& s = inst.scheme();
  const std::size_t n = inst.is_quantum() ? inst.quantum().n_original() : s.n();
  const Rational classical =
      Rational(1) - Rational(static_cast<std::int64_t>(s.x() + s.m()), static_cast<std::int64_t>(n));
  if (!inst.is_quantum()) return classical;
  return min(Rational(1), Rational(2) * classical);
}

int RunReport::exit_code() const {
  if (!retrievals.empty() && (!verified || !rate_matches())) return 2;
  for (const auto& a : audits) {
    if (a.leaks) return 3;
  }
  return 0;
}

namespace {

RunReport skeleton(const Scenario& s, const Instance& inst) {
  RunReport r;
  r.scenario = s;
  const auto& sp = inst.scheme();
  r.n_effective = sp.n();
  r.l = sp.l();
  r.alpha = sp.points().alpha();
  r.f = sp.points().f();
  if (inst.is_quantum()) {
    r.u = inst.quantum().pair().u;
    r.v = inst.quantum().pair().v;
  }
  r.theorem_rate = theorem_rate(inst);
  return r;
}

void fill_audits(RunReport& r, const Scenario& s, const Instance& inst,
                 const std::vector<AdversaryKind>& kinds) {
  AuditOptions opts;
  opts.sabotage = s.sabotage;
  opts.budget = budget_from_env();
  opts.allow_over_threshold = s.allow_over_threshold;
  opts.seed = s.seed;
  for (auto kind : kinds) {
    const auto taps = s.taps.empty() ? admissible_taps(inst, kind) : s.taps;
    auto reports = audit(inst, kind, taps, s.audit_method, opts);
    r.audits.insert(r.audits.end(), reports.begin(), reports.end());
  }
}

std::vector<AdversaryKind> requested_kinds(const Scenario& s, const Instance& inst) {
  return s.audit_every_kind ? kinds_for(inst) : s.audits;
}

}  // namespace

RunReport run(const Scenario& s) {
  const auto inst = build_instance(s);
  auto r = skeleton(s, inst);
  std::vector<std::size_t> thetas;
  if (s.theta) {
    thetas.push_back(*s.theta);
  } else {
    for (std::size_t k = 1; k <= s.k; ++k) thetas.push_back(k);
  }
  r.verified = true;
  for (auto theta : thetas) {
    auto actors = run_actors(inst, theta, s.seed);
    RetrievalResult res{theta, actors.transcript.decoded == actors.expected,
                        actors.transcript.decoded, actors.expected};
    r.verified = r.verified && res.verified;
    if (r.retrievals.empty()) {
      // every retrieval moves the same traffic; report one
      std::map<MessageType, std::size_t> counts;
      for (const auto& e : actors.transport.log()) {
        ++counts[e.type];
        switch (e.type) {
          case MessageType::kStorageShare:
            r.download.storage_symbols += e.symbols;
            break;
          case MessageType::kCommonRandomness:
            r.download.common_symbols += e.symbols;
            break;
          case MessageType::kQuery:
            r.download.query_symbols += e.symbols;
            break;
          case MessageType::kMask:
            r.download.mask_symbols += e.symbols;
            break;
          case MessageType::kAnswer:
            // classical answers reach the user directly; quantum answer
            // instances enter the N-sum box, which emits one symbol per
            // database
            r.download.downlink_symbols += inst.is_quantum() ? 1 : e.symbols;
            break;
        }
      }
      for (const auto& [type, count] : counts) r.transport.emplace_back(to_string(type), count);
      r.download.message_symbols = res.decoded.size();
    }
    r.retrievals.push_back(std::move(res));
  }
  r.achieved_rate = Rational(static_cast<std::int64_t>(r.download.message_symbols),
                             static_cast<std::int64_t>(r.download.downlink_symbols));
  fill_audits(r, s, inst, requested_kinds(s, inst));
  return r;
}

RunReport run_audits(const Scenario& s, std::optional<std::vector<AdversaryKind>> kinds) {
  const auto inst = build_instance(s);
  auto r = skeleton(s, inst);
  fill_audits(r, s, inst, kinds ? *kinds : requested_kinds(s, inst));
  return r;
}

// ---------------------------------------------------------------------------
// Rate table

namespace {

std::vector<std::size_t> size_list(std::string_view key, const std::string& v) {
  std::vector<std::size_t> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t value = 0;
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    const char* first = b == std::string::npos ? item.data() : item.data() + b;
    const char* last = b == std::string::npos ? first : item.data() + e + 1;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (first == last || ec != std::errc() || ptr != last) {
      throw ConfigError("grid.value", std::string(key) + " expects integers, got '" + v + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw ConfigError("grid.value", std::string(key) + " is empty");
  return out;
}

struct CellRun {
  bool ok = false;
  Rational rate;
  std::size_t n_effective = 0;
};

CellRun run_cell(const Scenario& s) {
  const auto inst = build_instance(s);
  CellRun out{true, {}, inst.scheme().n()};
  std::size_t down = 0, msg = 0;
  for (std::size_t theta = 1; theta <= s.k; ++theta) {
    auto a = run_actors(inst, theta, s.seed);
    out.ok = out.ok && a.transcript.decoded == a.expected;
    msg = a.transcript.decoded.size();
    down = inst.is_quantum() ? a.transcript.channel_output.size() : a.transcript.answers.size();
  }
  out.rate = Rational(static_cast<std::int64_t>(msg), static_cast<std::int64_t>(down));
  out.ok = out.ok && out.rate == theorem_rate(inst);
  return out;
}

bool is_field_shortage(const ConfigError& e) {
  const auto& inv = e.invariant();
  return inv.rfind("field.", 0) == 0 || inv.rfind("points.", 0) == 0 || inv.rfind("dual.", 0) == 0;
}

}  // namespace

int RateTable::exit_code() const {
  for (const auto& c : cells) {
    if (c.feasible && !c.verified) return 2;
  }
  return 0;
}

RateTable rate_table(std::string_view grid_text) {
  std::map<std::string, std::string, std::less<>> kv;
  for (const auto& [key, value] : [&] {
         std::vector<std::pair<std::string, std::string>> out;
         std::istringstream in{std::string(grid_text)};
         std::string line;
         while (std::getline(in, line)) {
           if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
           const auto eq = line.find('=');
           if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
           if (eq == std::string::npos) throw ConfigError("grid.syntax", "expected key = value");
           auto trim = [](std::string x) {
             x.erase(0, x.find_first_not_of(" \t\r"));
             x.erase(x.find_last_not_of(" \t\r") + 1);
             return x;
           };
           out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
         }
         return out;
       }()) {
    if (!kv.emplace(key, value).second) throw ConfigError("grid.duplicate-key", key);
  }

  RateTable table;
  std::vector<std::array<std::size_t, 4>> cells;
  std::array<std::vector<std::size_t>, 4> axes{{{}, {0}, {0}, {0}}};
  const char* axis_names[4] = {"N", "X", "T", "E"};
  for (const auto& [key, value] : kv) {
    if (key == "K") {
      table.k = size_list(key, value).front();
    } else if (key == "seed") {
      table.seed = size_list(key, value).front();
    } else if (key == "cells") {
      std::istringstream in(value);
      std::string cell;
      while (std::getline(in, cell, ';')) {
        const auto v = size_list(key, cell);
        if (v.size() != 4) throw ConfigError("grid.value", "cells need N,X,T,E");
        cells.push_back({v[0], v[1], v[2], v[3]});
      }
    } else {
      const auto* it = std::find(std::begin(axis_names), std::end(axis_names), key);
      if (it == std::end(axis_names)) throw ConfigError("grid.unknown-key", key);
      axes[static_cast<std::size_t>(it - std::begin(axis_names))] = size_list(key, value);
    }
  }
  if (cells.empty()) {
    if (axes[0].empty()) throw ConfigError("grid.required", "give N or cells");
    for (auto n : axes[0])
      for (auto x : axes[1])
        for (auto t : axes[2])
          for (auto e : axes[3]) cells.push_back({n, x, t, e});
  } else if (kv.count("N") || kv.count("X") || kv.count("T") || kv.count("E")) {
    throw ConfigError("grid.syntax", "cells and axis lists are exclusive");
  }
  if (table.k < 1) throw ConfigError("grid.value", "K must be >= 1");

  for (const auto& [n, x, t, e] : cells) {
    GridCell c;
    c.n = n, c.x = x, c.t = t, c.e = e;
    const std::size_t m = std::max(t, e);
    c.feasible = x + m < n;
    if (c.feasible) {
      for (std::uint32_t q = 2; q < 1024 && !c.verified && c.q == 0; ++q) {
        if (!is_prime(q)) continue;
        Scenario s;
        s.field = FieldSpec::prime(q);
        s.n = n, s.k = table.k, s.x = x, s.t = t, s.e = e, s.seed = table.seed;
        try {
          s.mode = Mode::kClassical;
          const auto classical = run_cell(s);
          s.mode = Mode::kQuantum;
          const auto quantum = run_cell(s);
          c.q = q;
          c.rate = classical.rate;
          c.quantum_rate = quantum.rate;
          c.n_effective = quantum.n_effective;
          c.doubling = min(Rational(2), Rational(1) / c.rate);
          c.verified = classical.ok && quantum.ok && c.quantum_rate / c.rate == c.doubling;
        } catch (const ConfigError& err) {
          if (!is_field_shortage(err)) throw;
        }
      }
    }
    table.cells.push_back(c);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Matrix check

int MatrixReport::exit_code() const {
  for (const auto& c : checks) {
    if (!c.pass) return 3;
  }
  return 0;
}

MatrixReport matrix_check(const Scenario& s) {
  if (s.mode != Mode::kQuantum) {
    throw ConfigError("mode.quantum", "matrix_check requires quantum mode");
  }
  MatrixReport out{s, {}};
  Scenario base = s;
  base.v.reset();
  const auto inst = build_instance(base);
  const auto& qp = inst.quantum();
  const auto& points = qp.scheme().points();
  const auto& field = qp.scheme().field();
  const std::size_t n = qp.n_effective();
  const std::size_t l = qp.l();

  FieldVector u = qp.pair().u;
  FieldVector v = qp.pair().v;
  if (s.v) {
    if (s.v->size() != n) {
      throw ConfigError("dual.v-length", "v needs N' = " + std::to_string(n) + " entries");
    }
    v.clear();
    for (auto i : *s.v) {
      if (i >= field.order()) throw ConfigError("scenario.element-range", "v entry out of range");
      v.push_back(field.element(i));
    }
  }

  auto full_rank = [&](const std::string& name, const FieldMatrix& m) {
    const auto r = rank(m);
    out.checks.push_back({name, r == m.rows(),
                          "rank " + std::to_string(r) + " of " + std::to_string(m.rows())});
    return r == m.rows();
  };
  full_rank("B-invertible", build_B(points));
  const FieldVector ones(n, field.one());
  full_rank("D-invertible", build_D(points, ones, l));
  const auto hu = build_D(points, u, l);
  const auto hv = build_D(points, v, l);
  const bool hu_ok = full_rank("Hu-invertible", hu);
  const bool hv_ok = full_rank("Hv-invertible", hv);

  const DualPair pair{u, v};
  const bool dual = pair.is_dual(points.alpha());
  out.checks.push_back({"dual-pair", dual, dual ? "v matches the derived dual of u"
                                                : "v differs from the derived dual of u"});

  if (hu_ok && hv_ok) {
    const auto transfer = build_transfer(points, pair, l);
    const auto verdict = check_feasibility(transfer.matrix());
    out.checks.push_back({"feasibility", verdict == Feasibility::kFeasible, to_string(verdict)});
    const auto gn = build_GN(field, n, l);
    const bool identity = mat_mul(transfer.matrix(), block_diag(hu, hv)) == gn;
    out.checks.push_back({"transfer-identity", identity,
                          identity ? "G * blkdiag(Hu, Hv) = G_N" : "G * blkdiag(Hu, Hv) != G_N"});
  } else {
    out.checks.push_back({"feasibility", false, "transfer matrix undefined"});
    out.checks.push_back({"transfer-identity", false, "transfer matrix undefined"});
  }
  return out;
}

}  // namespace xspir
