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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xspir/auditor.hpp"
#include "xspir/protocol.hpp"
#include "xspir/rational.hpp"

namespace xspir {

// ---------------------------------------------------------------------------
// Scenario files: one `key = value` per line, `#` starts a comment.

struct Scenario {
  Mode mode = Mode::kClassical;
  FieldSpec field = FieldSpec::prime(7);
  std::size_t n = 0, k = 0, x = 0, t = 0, e = 0;
  std::optional<std::size_t> theta;  // nullopt: sweep every theta
  std::uint64_t seed = 1;
  bool audit_every_kind = false;
  std::vector<AdversaryKind> audits;
  Method audit_method = Method::kRank;
  std::vector<TapSet> taps;  // explicit tap sets; empty means all admissible
  Sabotage sabotage;
  bool allow_over_threshold = false;
  // Element indices (base-p digits are the coefficients).
  std::optional<std::vector<std::uint32_t>> alpha, f, u, v;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Parses "Q{1,2} A{3}" (1-based); "user" selects the user view.
TapSet parse_tap_set(std::string_view text);

Instance build_instance(const Scenario& s);

// ---------------------------------------------------------------------------
// In-process transport between actors.

enum class MessageType { kStorageShare, kCommonRandomness, kQuery, kMask, kAnswer };
std::string to_string(MessageType t);

enum class ActorRole { kDealer, kCommonSource, kUser, kDatabase };

struct ActorId {
  ActorRole role;
  std::size_t index = 0;  // database index, or half for the common source
  std::string name() const;
  friend bool operator==(const ActorId&, const ActorId&) = default;
};

struct CommonShare {
  std::size_t half = 0;
  CommonRandomness symbols;
};

using Payload = std::variant<StorageShare, QuantumShare, CommonShare, QueryVector, MaskShare,
                             AnswerSymbol, AnswerInstancePair>;

struct Envelope {
  ActorId from;
  ActorId to;
  MessageType type;
  Payload payload;
};

/// Delivers messages in send order and rejects any (sender, recipient, type)
/// outside the protocol's whitelist. Every delivery is logged.
class Transport {
 public:
  void send(Envelope env);
  /// Removes and returns the pending messages addressed to `to`.
  std::vector<Envelope> receive(const ActorId& to);

  struct LogEntry {
    ActorId from;
    ActorId to;
    MessageType type;
    std::size_t symbols;
  };
  const std::vector<LogEntry>& log() const { return log_; }

  static bool allowed(const ActorId& from, const ActorId& to, MessageType type);

 private:
  std::vector<Envelope> pending_;
  std::vector<LogEntry> log_;
};

/// Field symbols carried by one payload.
std::size_t symbol_count(const Payload& p);

// ---------------------------------------------------------------------------
// Runs and reports

struct RetrievalResult {
  std::size_t theta = 1;
  bool verified = false;
  FieldVector decoded;
  FieldVector expected;
};

struct DownloadCounts {
  std::size_t query_symbols = 0;     // user -> databases
  std::size_t mask_symbols = 0;      // user -> databases
  std::size_t downlink_symbols = 0;  // answers or channel uses reaching the user
  std::size_t message_symbols = 0;   // retrieved per retrieval
  std::size_t storage_symbols = 0;   // dealer -> databases
  std::size_t common_symbols = 0;    // common source -> databases
};

struct RunReport {
  Scenario scenario;
  std::size_t n_effective = 0;
  std::size_t l = 0;
  FieldVector alpha, f, u, v;
  std::vector<RetrievalResult> retrievals;
  bool verified = false;
  Rational achieved_rate;
  Rational theorem_rate;
  DownloadCounts download;
  std::vector<std::pair<std::string, std::size_t>> transport;  // message type -> count
  std::vector<LeakageReport> audits;
  std::optional<double> timing_ms;

  bool rate_matches() const { return achieved_rate == theorem_rate; }
  int exit_code() const;
};

/// One retrieval of message `theta` as message passing between the dealer,
/// the common-randomness source, the user and the databases. Randomness comes
/// from the scenario seed's labeled substreams, so the transcript equals
/// execute(inst, theta, draw_randomness(inst, seed)).
struct ActorRun {
  Transcript transcript;
  Transport transport;
  FieldVector expected;
};
ActorRun run_actors(const Instance& inst, std::size_t theta, std::uint64_t seed);

Rational theorem_rate(const Instance& inst);

/// Retrievals for the scenario's theta (or all), then its audits.
RunReport run(const Scenario& s);

/// Audits only; `kinds` overrides the scenario's list when given.
RunReport run_audits(const Scenario& s, std::optional<std::vector<AdversaryKind>> kinds);

struct GridCell {
  std::size_t n = 0, x = 0, t = 0, e = 0;
  bool feasible = false;
  std::uint32_t q = 0;  // smallest prime at which both schemes ran
  Rational rate, quantum_rate, doubling;
  std::size_t n_effective = 0;
  bool verified = false;
};

struct RateTable {
  std::vector<GridCell> cells;
  std::size_t k = 2;
  std::uint64_t seed = 1;
  int exit_code() const;
};

/// Grid file keys: N, X, T, E (comma lists, crossed) or `cells` as
/// "N,X,T,E; N,X,T,E"; optional K and seed.
RateTable rate_table(std::string_view grid_text);

struct MatrixCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct MatrixReport {
  Scenario scenario;
  std::vector<MatrixCheck> checks;
  int exit_code() const;
};

/// Throws ConfigError("matrix_check requires quantum mode") for classical.
MatrixReport matrix_check(const Scenario& s);

std::string to_json(const RunReport& r);
std::string to_json(const RateTable& t);
std::string to_json(const MatrixReport& m);
std::string to_text(const RateTable& t);

constexpr const char* kReportVersion = "xsetspir-report/1";

}  // namespace xspir
