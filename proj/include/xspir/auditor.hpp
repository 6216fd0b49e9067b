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
#include <span>
#include <string>
#include <vector>

#include "xspir/protocol.hpp"

namespace xspir {

enum class AdversaryKind {
  kXStorage,
  kTCollusion,
  kSymmetricPrivacy,
  kEavesdropperClassical,
  kEavesdropperQuantum,
};

/// "x-storage", "t-collusion", "symmetric-privacy", "eavesdropper-classical",
/// "eavesdropper-quantum".
std::string to_string(AdversaryKind k);
std::optional<AdversaryKind> parse_adversary_kind(std::string_view s);

/// The independence statement an audit checks.
enum class Constraint {
  kStorageSecrecy,     // I(W; S_X) = 0
  kQueryPrivacy,       // I(theta; Q_T [, Lambda_T]) = 0
  kSymmetricPrivacy,   // I(W_other; user view | theta, Z, W_theta, lambda) = 0
  kEavesdropperIndex,  // I(theta; tapped queries, answers, masks) = 0
  kEavesdropperMessage,  // I(W; tapped queries, answers, masks | theta) = 0
};
std::string to_string(Constraint c);

/// Databases (0-based) whose artifacts an adversary sees. Tapping an answer
/// of a quantum database yields its two channel inputs and the over-the-air
/// output symbol at the same position. `user` selects the retrieving user's
/// view: all queries plus all answers (classical) or all of y (quantum).
struct TapSet {
  std::vector<std::size_t> storage;
  std::vector<std::size_t> queries;
  std::vector<std::size_t> answers;
  std::vector<std::size_t> masks;
  bool user = false;

  /// 1-based, e.g. "Q{1} A{2,3}" or "user".
  std::string to_string() const;
  friend bool operator==(const TapSet&, const TapSet&) = default;
};

struct Observation {
  std::string label;
  FieldElement value;
};

struct AdversaryView {
  AdversaryKind kind;
  TapSet tapped;
  std::vector<Observation> observed;
};

/// Fixed ordering of every symbol an adversary could observe in one
/// retrieval.
class ObservableLayout {
 public:
  explicit ObservableLayout(const Instance& inst);

  std::size_t size() const { return rows_.size(); }
  const std::string& label(std::size_t row) const { return rows_[row].label; }
  /// Rows visible to the given taps, ascending.
  std::vector<std::size_t> rows_for(const TapSet& taps) const;
  /// Element indices of every observable, in row order.
  std::vector<std::uint32_t> flatten(const Transcript& t) const;

 private:
  enum class Source { kStorage, kQuery, kMask, kAnswer, kChannel };
  struct Row {
    Source source;
    std::size_t db;
    std::string label;
  };
  bool quantum_;
  std::vector<Row> rows_;
};

/// Throws ConfigError when the taps exceed the kind's threshold (unless
/// allowed), name a database out of range, or include artifacts the kind
/// never observes.
void validate_taps(const Instance& inst, AdversaryKind kind, const TapSet& taps,
                   bool allow_over_threshold = false);

AdversaryView build_view(const Instance& inst, AdversaryKind kind, const TapSet& taps,
                         const Transcript& transcript, bool allow_over_threshold = false);

/// Deliberate weakenings used as negative controls. Dropped randomness is
/// held at zero.
struct Sabotage {
  bool drop_storage_noise = false;
  bool drop_query_noise = false;
  std::vector<std::size_t> drop_common;  // Z'_i indices, both halves
  bool zero_masks = false;

  bool any() const;
  std::string to_string() const;
};

enum class Method { kExact, kRank };
std::string to_string(Method m);

struct Witness {
  std::string secret_a;
  std::string secret_b;
  std::string cell;  // values of the conditioned randomness
  std::vector<Observation> observation;
  // Exact counts of the observation under each secret; absent for the rank
  // method, whose witness is possible under a and impossible under b.
  std::optional<std::uint64_t> count_a;
  std::optional<std::uint64_t> count_b;
};

struct LeakageReport {
  AdversaryKind kind;
  Constraint constraint;
  TapSet tapped;
  Method method;
  bool leaks = false;
  std::optional<Witness> witness;
  std::optional<double> mi_bits;  // exact method only
  std::uint64_t work = 0;         // protocol executions or rank cells
  std::string sabotage;
};

struct AuditOptions {
  Sabotage sabotage;
  std::uint64_t budget = 100000000;
  bool allow_over_threshold = false;
  std::uint64_t seed = 1;  // probe points of the rank method
};

/// Reads XSETSPIR_BUDGET, falling back to `fallback` when unset.
std::uint64_t budget_from_env(std::uint64_t fallback = 100000000);

std::vector<Constraint> constraints_for(AdversaryKind kind);
std::vector<AdversaryKind> kinds_for(const Instance& inst);

/// Every tap configuration up to the kind's thresholds; requires N <= 6.
std::vector<TapSet> admissible_taps(const Instance& inst, AdversaryKind kind);

/// One report per (constraint of `kind`, tap set), tap sets in the given
/// order. Enumerates every relevant random symbol; throws BudgetExceeded when
/// executions times variables would pass the budget.
std::vector<LeakageReport> audit_exact(const Instance& inst, AdversaryKind kind,
                                       std::span<const TapSet> taps,
                                       const AuditOptions& opts = {});

/// Same reports by the rank criterion. Throws NotLinearError if a view keeps
/// a product of two unconditioned random symbols after mask reduction.
std::vector<LeakageReport> audit_rank(const Instance& inst, AdversaryKind kind,
                                      std::span<const TapSet> taps,
                                      const AuditOptions& opts = {});

std::vector<LeakageReport> audit(const Instance& inst, AdversaryKind kind,
                                 std::span<const TapSet> taps, Method method,
                                 const AuditOptions& opts = {});

/// Every applicable kind over its admissible taps.
std::vector<LeakageReport> audit_all(const Instance& inst, Method method,
                                     const AuditOptions& opts = {});

}  // namespace xspir
