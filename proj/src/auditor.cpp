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

#include "xspir/auditor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <unordered_map>

#include "xspir/errors.hpp"

namespace xspir {
namespace {

std::string index_set(std::span<const std::size_t> s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i] + 1);
  return out + "}";
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::kXStorage:
      return "x-storage";
    case AdversaryKind::kTCollusion:
      return "t-collusion";
    case AdversaryKind::kSymmetricPrivacy:
      return "symmetric-privacy";
    case AdversaryKind::kEavesdropperClassical:
      return "eavesdropper-classical";
    case AdversaryKind::kEavesdropperQuantum:
      return "eavesdropper-quantum";
  }
  return "unknown";
}

std::optional<AdversaryKind> parse_adversary_kind(std::string_view s) {
  for (auto k : {AdversaryKind::kXStorage, AdversaryKind::kTCollusion,
                 AdversaryKind::kSymmetricPrivacy, AdversaryKind::kEavesdropperClassical,
                 AdversaryKind::kEavesdropperQuantum}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::kStorageSecrecy:
      return "storage-secrecy";
    case Constraint::kQueryPrivacy:
      return "query-privacy";
    case Constraint::kSymmetricPrivacy:
      return "symmetric-privacy";
    case Constraint::kEavesdropperIndex:
      return "eavesdropper-index-privacy";
    case Constraint::kEavesdropperMessage:
      return "eavesdropper-message-secrecy";
  }
  return "unknown";
}

std::string to_string(Method m) { return m == Method::kExact ? "exact-enumeration" : "rank-criterion"; }

std::string TapSet::to_string() const {
  if (user) return "user";
  std::string out;
  auto part = [&](const char* tag, const std::vector<std::size_t>& v) {
    if (v.empty()) return;
    if (!out.empty()) out += ' ';
    out += tag + index_set(v);
  };
  part("S", storage);
  part("Q", queries);
  part("A", answers);
  part("L", masks);
  return out.empty() ? "none" : out;
}

// ---------------------------------------------------------------------------
// Observable layout

ObservableLayout::ObservableLayout(const Instance& inst) : quantum_(inst.is_quantum()) {
  const auto& s = inst.scheme();
  const auto num = [](std::size_t i) { return std::to_string(i + 1); };
  for (std::size_t n = 0; n < s.n(); ++n) {
    for (std::size_t h = 0; h < inst.halves(); ++h) {
      const std::string half = quantum_ ? "(" + num(h) + ")" : "";
      for (std::size_t j = 0; j < s.l(); ++j) {
        for (std::size_t k = 0; k < s.k(); ++k) {
          rows_.push_back({Source::kStorage, n, "S" + num(n) + half + "." + num(j) + "." + num(k)});
        }
      }
    }
  }
  for (std::size_t n = 0; n < s.n(); ++n) {
    for (std::size_t j = 0; j < s.l(); ++j) {
      for (std::size_t k = 0; k < s.k(); ++k) {
        rows_.push_back({Source::kQuery, n, "Q" + num(n) + "." + num(j) + "." + num(k)});
      }
    }
  }
  if (quantum_) {
    for (std::size_t n = 0; n < s.n(); ++n) {
      for (std::size_t h = 0; h < 2; ++h) {
        rows_.push_back({Source::kMask, n, "Lambda" + num(n) + "(" + num(h) + ")"});
      }
    }
    for (std::size_t n = 0; n < s.n(); ++n) {
      for (std::size_t h = 0; h < 2; ++h) {
        rows_.push_back({Source::kAnswer, n, "At" + num(n) + "(" + num(h) + ")"});
      }
    }
    for (std::size_t n = 0; n < s.n(); ++n) rows_.push_back({Source::kChannel, n, "y" + num(n)});
  } else {
    for (std::size_t n = 0; n < s.n(); ++n) rows_.push_back({Source::kAnswer, n, "A" + num(n)});
  }
}

std::vector<std::size_t> ObservableLayout::rows_for(const TapSet& taps) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    bool seen = false;
    switch (row.source) {
      case Source::kStorage:
        seen = contains(taps.storage, row.db);
        break;
      case Source::kQuery:
        seen = taps.user || contains(taps.queries, row.db);
        break;
      case Source::kMask:
        seen = contains(taps.masks, row.db);
        break;
      case Source::kAnswer:
        seen = (taps.user && !quantum_) || contains(taps.answers, row.db);
        break;
      case Source::kChannel:
        seen = taps.user || contains(taps.answers, row.db);
        break;
    }
    if (seen) out.push_back(r);
  }
  return out;
}

std::vector<std::uint32_t> ObservableLayout::flatten(const Transcript& t) const {
  std::vector<std::uint32_t> out;
  out.reserve(rows_.size());
  const std::size_t n_db = t.queries.size();
  const std::size_t halves = quantum_ ? 2 : 1;
  for (std::size_t n = 0; n < n_db; ++n) {
    for (std::size_t h = 0; h < halves; ++h) {
      for (const auto& block : storage_half(t, n, h).blocks) {
        for (const auto& x : block) out.push_back(x.index());
      }
    }
  }
  for (const auto& q : t.queries) {
    for (const auto& block : q.blocks) {
      for (const auto& x : block) out.push_back(x.index());
    }
  }
  if (quantum_) {
    for (const auto& m : t.masks) {
      for (const auto& x : m.value) out.push_back(x.index());
    }
    for (const auto& a : t.answer_pairs) {
      for (const auto& x : a.scaled) out.push_back(x.index());
    }
    for (const auto& y : t.channel_output) out.push_back(y.index());
  } else {
    for (const auto& a : t.answers) out.push_back(a.value.index());
  }
  if (out.size() != rows_.size()) throw Error("transcript does not match the observable layout");
  return out;
}

// ---------------------------------------------------------------------------
// Views

void validate_taps(const Instance& inst, AdversaryKind kind, const TapSet& taps,
                   bool allow_over_threshold) {
  const auto& s = inst.scheme();
  for (const auto* v : {&taps.storage, &taps.queries, &taps.answers, &taps.masks}) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      if ((*v)[i] >= s.n()) {
        throw ConfigError("audit.tap-range", "database " + std::to_string((*v)[i] + 1) +
                                                 " outside [1.." + std::to_string(s.n()) + "]");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if ((*v)[j] == (*v)[i]) throw ConfigError("audit.tap-duplicate", "repeated database");
      }
    }
  }
  auto bound = [&](const std::vector<std::size_t>& v, std::size_t limit, const char* what) {
    if (!allow_over_threshold && v.size() > limit) {
      throw ConfigError("audit.threshold", std::string(what) + " taps " + index_set(v) +
                                               " exceed the threshold " + std::to_string(limit));
    }
  };
  auto forbid = [&](bool present, const char* what) {
    if (present) {
      throw ConfigError("audit.view-kind",
                        to_string(kind) + " adversaries do not observe " + what);
    }
  };
  switch (kind) {
    case AdversaryKind::kXStorage:
      forbid(taps.user || !taps.queries.empty() || !taps.answers.empty() || !taps.masks.empty(),
             "queries, answers or masks");
      forbid(taps.storage.empty(), "an empty storage set");
      bound(taps.storage, s.x(), "storage");
      break;
    case AdversaryKind::kTCollusion:
      forbid(taps.user || !taps.storage.empty() || !taps.answers.empty(), "storage or answers");
      forbid(!inst.is_quantum() && !taps.masks.empty(), "masks in the classical scheme");
      forbid(taps.queries.empty() && taps.masks.empty(), "an empty query set");
      bound(taps.queries, s.t(), "query");
      bound(taps.masks, s.t(), "mask");
      break;
    case AdversaryKind::kSymmetricPrivacy:
      forbid(!taps.user, "database artifacts; use the user view");
      forbid(!taps.storage.empty() || !taps.queries.empty() || !taps.answers.empty() ||
                 !taps.masks.empty(),
             "database artifacts beyond the user view");
      break;
    case AdversaryKind::kEavesdropperClassical:
      if (inst.is_quantum()) {
        throw ConfigError("audit.view-kind", "quantum instances use eavesdropper-quantum");
      }
      forbid(taps.user || !taps.storage.empty() || !taps.masks.empty(), "storage or masks");
      forbid(taps.queries.empty() && taps.answers.empty(), "an empty tap set");
      bound(taps.queries, s.e(), "query");
      bound(taps.answers, s.e(), "answer");
      break;
    case AdversaryKind::kEavesdropperQuantum:
      if (!inst.is_quantum()) {
        throw ConfigError("audit.view-kind", "classical instances use eavesdropper-classical");
      }
      forbid(taps.user || !taps.storage.empty(), "storage");
      forbid(taps.queries.empty() && taps.answers.empty() && taps.masks.empty(),
             "an empty tap set");
      bound(taps.queries, s.e(), "query");
      bound(taps.answers, s.e(), "answer");
      bound(taps.masks, s.e(), "mask");
      break;
  }
}

AdversaryView build_view(const Instance& inst, AdversaryKind kind, const TapSet& taps,
                         const Transcript& transcript, bool allow_over_threshold) {
  validate_taps(inst, kind, taps, allow_over_threshold);
  const ObservableLayout layout(inst);
  const auto flat = layout.flatten(transcript);
  const auto& field = inst.scheme().field();
  AdversaryView view{kind, taps, {}};
  for (auto r : layout.rows_for(taps)) view.observed.push_back({layout.label(r), FieldElement(field, flat[r])});
  return view;
}

// ---------------------------------------------------------------------------
// Sabotage, constraints, tap enumeration

bool Sabotage::any() const {
  return drop_storage_noise || drop_query_noise || !drop_common.empty() || zero_masks;
}

std::string Sabotage::to_string() const {
  std::vector<std::string> parts;
  if (drop_storage_noise) parts.push_back("drop-storage-noise");
  if (drop_query_noise) parts.push_back("drop-query-noise");
  for (auto i : drop_common) parts.push_back("drop-common-" + std::to_string(i));
  if (zero_masks) parts.push_back("zero-masks");
  if (parts.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

std::uint64_t budget_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("XSETSPIR_BUDGET");
  if (env == nullptr || *env == '\0') return fallback;
  const std::string s(env);
  if (s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("budget.env", "XSETSPIR_BUDGET must be a positive integer, got '" + s + "'");
  }
  try {
    const auto v = std::stoull(s);
    if (v == 0) throw ConfigError("budget.env", "XSETSPIR_BUDGET must be positive");
    return v;
  } catch (const std::out_of_range&) {
    throw ConfigError("budget.env", "XSETSPIR_BUDGET out of range");
  }
}

std::vector<Constraint> constraints_for(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kXStorage:
      return {Constraint::kStorageSecrecy};
    case AdversaryKind::kTCollusion:
      return {Constraint::kQueryPrivacy};
    case AdversaryKind::kSymmetricPrivacy:
      return {Constraint::kSymmetricPrivacy};
    case AdversaryKind::kEavesdropperClassical:
    case AdversaryKind::kEavesdropperQuantum:
      return {Constraint::kEavesdropperIndex, Constraint::kEavesdropperMessage};
  }
  return {};
}

std::vector<AdversaryKind> kinds_for(const Instance& inst) {
  return {AdversaryKind::kXStorage, AdversaryKind::kTCollusion, AdversaryKind::kSymmetricPrivacy,
          inst.is_quantum() ? AdversaryKind::kEavesdropperQuantum
                            : AdversaryKind::kEavesdropperClassical};
}

namespace {

// All subsets of [0, n) with at most `limit` elements, by size then
// lexicographically; the empty set first.
std::vector<std::vector<std::size_t>> subsets_up_to(std::size_t n, std::size_t limit) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t size = 1; size <= std::min(n, limit); ++size) {
    std::vector<std::size_t> cur(size);
    for (std::size_t i = 0; i < size; ++i) cur[i] = i;
    while (true) {
      out.push_back(cur);
      std::size_t i = size;
      while (i > 0 && cur[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++cur[i - 1];
      for (std::size_t j = i; j < size; ++j) cur[j] = cur[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<TapSet> admissible_taps(const Instance& inst, AdversaryKind kind) {
  const auto& s = inst.scheme();
  if (s.n() > 6) {
    throw ConfigError("audit.subset-limit",
                      "exhaustive tap enumeration supports N <= 6; list subsets explicitly");
  }
  std::vector<TapSet> out;
  switch (kind) {
    case AdversaryKind::kXStorage:
      for (const auto& a : subsets_up_to(s.n(), s.x())) {
        if (!a.empty()) out.push_back({a, {}, {}, {}, false});
      }
      break;
    case AdversaryKind::kTCollusion:
      for (const auto& a : subsets_up_to(s.n(), s.t())) {
        if (!a.empty()) out.push_back({{}, a, {}, inst.is_quantum() ? a : std::vector<std::size_t>{}, false});
      }
      break;
    case AdversaryKind::kSymmetricPrivacy:
      out.push_back({{}, {}, {}, {}, true});
      break;
    case AdversaryKind::kEavesdropperClassical: {
      validate_taps(inst, kind, {{}, {0}, {}, {}, false}, true);
      const auto sets = subsets_up_to(s.n(), s.e());
      for (const auto& a : sets) {
        for (const auto& b : sets) {
          if (!a.empty() || !b.empty()) out.push_back({{}, a, b, {}, false});
        }
      }
      break;
    }
    case AdversaryKind::kEavesdropperQuantum: {
      validate_taps(inst, kind, {{}, {0}, {}, {}, false}, true);
      const auto sets = subsets_up_to(s.n(), s.e());
      for (const auto& a : sets) {
        for (const auto& b : sets) {
          for (const auto& c : sets) {
            if (!a.empty() || !b.empty() || !c.empty()) out.push_back({{}, a, b, c, false});
          }
        }
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random-variable model shared by both audit methods

namespace {

enum class VarGroup { kMessage, kStorageNoise, kQueryNoise, kCommon, kLambda };
enum class Role { kFixed, kSecret, kConditioned, kNoise };

struct Variable {
  VarGroup group;
  std::size_t msg;    // message index for kMessage
  std::size_t index;  // Z'_i index for kCommon
  std::string label;
};

// Every random symbol of one retrieval, with a writable slot in a scratch
// Randomness so assignments can be applied without rebuilding it.
class VariableSpace {
 public:
  explicit VariableSpace(const Instance& inst)
      : inst_(&inst), field_(&inst.scheme().field()), work_(Randomness::zeros(inst)) {
    const auto& s = inst.scheme();
    const auto num = [](std::size_t i) { return std::to_string(i + 1); };
    const bool q = inst.is_quantum();
    for (std::size_t k = 0; k < s.k(); ++k) {
      for (std::size_t j = 0; j < inst.message_len(); ++j) {
        add({VarGroup::kMessage, k, 0, "W[" + num(k) + "," + num(j) + "]"}, &work_.messages.at(k, j));
      }
    }
    for (std::size_t h = 0; h < inst.halves(); ++h) {
      const std::string half = q ? "(" + num(h) + ")" : "";
      for (std::size_t j = 0; j < s.l(); ++j) {
        for (std::size_t i = 0; i < s.x(); ++i) {
          for (std::size_t k = 0; k < s.k(); ++k) {
            add({VarGroup::kStorageNoise, 0, 0, "R" + half + "[" + num(j) + "," + num(i) + "," + num(k) + "]"},
                &work_.storage_noise[h].vectors[j * s.x() + i][k]);
          }
        }
      }
    }
    for (std::size_t j = 0; j < s.l(); ++j) {
      for (std::size_t i = 0; i < s.m(); ++i) {
        for (std::size_t k = 0; k < s.k(); ++k) {
          add({VarGroup::kQueryNoise, 0, 0, "Z[" + num(j) + "," + num(i) + "," + num(k) + "]"},
              &work_.query_noise.vectors[j * s.m() + i][k]);
        }
      }
    }
    for (std::size_t h = 0; h < inst.halves(); ++h) {
      const std::string half = q ? "(" + num(h) + ")" : "";
      for (std::size_t i = 0; i < s.noise_dim(); ++i) {
        add({VarGroup::kCommon, 0, i, "Z'" + half + "[" + std::to_string(i) + "]"},
            &work_.common[h].symbols[i]);
      }
    }
    if (q) {
      for (std::size_t h = 0; h < 2; ++h) {
        for (std::size_t n = 0; n < s.n(); ++n) {
          add({VarGroup::kLambda, 0, 0, "lambda(" + num(h) + ")[" + num(n) + "]"}, &work_.lambda[h][n]);
        }
      }
    }
  }
  VariableSpace(const VariableSpace&) = delete;
  VariableSpace& operator=(const VariableSpace&) = delete;

  std::size_t size() const { return vars_.size(); }
  const Variable& var(std::size_t i) const { return vars_[i]; }
  const GaloisField& field() const { return *field_; }
  void set(std::size_t i, std::uint32_t value) { *slots_[i] = FieldElement(*field_, value); }
  void clear() {
    for (auto* s : slots_) *s = field_->zero();
  }
  Transcript run(std::size_t theta) const { return execute(*inst_, theta, work_); }

 private:
  void add(Variable v, FieldElement* slot) {
    vars_.push_back(std::move(v));
    slots_.push_back(slot);
  }

  const Instance* inst_;
  const GaloisField* field_;
  Randomness work_;
  std::vector<Variable> vars_;
  std::vector<FieldElement*> slots_;
};

bool theta_is_secret(Constraint c) {
  return c == Constraint::kQueryPrivacy || c == Constraint::kEavesdropperIndex;
}

std::vector<std::size_t> thetas_for(Constraint c, const Instance& inst) {
  // Storage does not depend on theta.
  if (c == Constraint::kStorageSecrecy) return {1};
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= inst.scheme().k(); ++t) out.push_back(t);
  return out;
}

Role role_of(Constraint c, const Variable& v, std::size_t theta, const Sabotage& sab) {
  switch (v.group) {
    case VarGroup::kStorageNoise:
      if (sab.drop_storage_noise) return Role::kFixed;
      break;
    case VarGroup::kQueryNoise:
      if (sab.drop_query_noise) return Role::kFixed;
      break;
    case VarGroup::kCommon:
      if (contains(sab.drop_common, v.index)) return Role::kFixed;
      break;
    case VarGroup::kLambda:
      if (sab.zero_masks) return Role::kFixed;
      break;
    case VarGroup::kMessage:
      break;
  }
  switch (c) {
    case Constraint::kStorageSecrecy:
      if (v.group == VarGroup::kMessage) return Role::kSecret;
      return v.group == VarGroup::kStorageNoise ? Role::kNoise : Role::kFixed;
    case Constraint::kQueryPrivacy:
      return v.group == VarGroup::kQueryNoise || v.group == VarGroup::kLambda ? Role::kNoise
                                                                               : Role::kFixed;
    case Constraint::kSymmetricPrivacy:
      switch (v.group) {
        case VarGroup::kMessage:
          return v.msg + 1 == theta ? Role::kConditioned : Role::kSecret;
        case VarGroup::kQueryNoise:
        case VarGroup::kLambda:
          return Role::kConditioned;
        default:
          return Role::kNoise;
      }
    case Constraint::kEavesdropperIndex:
      return Role::kNoise;
    case Constraint::kEavesdropperMessage:
      return v.group == VarGroup::kMessage ? Role::kSecret : Role::kNoise;
  }
  return Role::kFixed;
}

struct Partition {
  std::vector<Role> roles;
  std::vector<std::size_t> secret, cond, noise;
};

Partition partition(const VariableSpace& space, Constraint c, std::size_t theta, const Sabotage& sab) {
  Partition p;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Role r = role_of(c, space.var(i), theta, sab);
    p.roles.push_back(r);
    if (r == Role::kSecret) p.secret.push_back(i);
    if (r == Role::kConditioned) p.cond.push_back(i);
    if (r == Role::kNoise) p.noise.push_back(i);
  }
  return p;
}

void check_sabotage(const Instance& inst, const Sabotage& sab) {
  for (auto i : sab.drop_common) {
    if (i >= inst.scheme().noise_dim()) {
      throw ConfigError("audit.sabotage", "no common-randomness symbol Z'_" + std::to_string(i));
    }
  }
  if (sab.zero_masks && !inst.is_quantum()) {
    throw ConfigError("audit.sabotage", "zero-masks applies to the quantum scheme only");
  }
}

// Little-endian odometer over q-ary digits; false once it wraps.
bool advance(std::vector<std::uint32_t>& digits, std::uint32_t q) {
  for (auto& d : digits) {
    if (++d < q) return true;
    d = 0;
  }
  return false;
}

// q^e saturating at UINT64_MAX.
std::uint64_t power(std::uint64_t q, std::size_t e) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (out > UINT64_MAX / q) return UINT64_MAX;
    out *= q;
  }
  return out;
}

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

std::string assignment(const VariableSpace& space, std::span<const std::size_t> vars,
                       std::span<const std::uint32_t> values) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ", ";
    out += space.var(vars[i]).label + "=" + FieldElement(space.field(), values[i]).to_string();
  }
  return out;
}

std::string cell_label(std::size_t theta, bool with_theta, const std::string& rest) {
  std::string out = with_theta ? "theta=" + std::to_string(theta) : "";
  if (!rest.empty()) out += (out.empty() ? "" : "; ") + rest;
  return out.empty() ? "none" : out;
}

std::vector<Observation> observe(const VariableSpace& space, const ObservableLayout& layout,
                                 std::span<const std::size_t> rows, std::size_t theta) {
  const auto flat = layout.flatten(space.run(theta));
  std::vector<Observation> out;
  for (auto r : rows) out.push_back({layout.label(r), FieldElement(space.field(), flat[r])});
  return out;
}

LeakageReport base_report(AdversaryKind kind, Constraint c, const TapSet& taps, Method m,
                          const AuditOptions& opts) {
  LeakageReport r;
  r.kind = kind;
  r.constraint = c;
  r.tapped = taps;
  r.method = m;
  r.sabotage = opts.sabotage.to_string();
  return r;
}

// ---------------------------------------------------------------------------
// Exact enumeration

using Histogram = std::unordered_map<std::uint64_t, std::uint64_t>;

struct ExactConfig {
  std::vector<std::size_t> rows;
  bool leaks = false;
  std::optional<Witness> witness;
  double mi_sum = 0;
};

double cell_mutual_information(const std::vector<Histogram>& hist) {
  const double secrets = static_cast<double>(hist.size());
  std::map<std::uint64_t, std::uint64_t> total;
  std::uint64_t per_secret = 0;
  for (const auto& [k, c] : hist.front()) per_secret += c;
  for (const auto& h : hist) {
    for (const auto& [k, c] : h) total[k] += c;
  }
  double mi = 0;
  for (const auto& h : hist) {
    std::map<std::uint64_t, std::uint64_t> sorted(h.begin(), h.end());
    for (const auto& [k, c] : sorted) {
      const double p = static_cast<double>(c) / (secrets * static_cast<double>(per_secret));
      mi += p * std::log2(static_cast<double>(c) * secrets / static_cast<double>(total[k]));
    }
  }
  return mi;
}

std::vector<LeakageReport> exact_constraint(const Instance& inst, AdversaryKind kind,
                                            Constraint c, std::span<const TapSet> taps,
                                            const AuditOptions& opts) {
  VariableSpace space(inst);
  const ObservableLayout layout(inst);
  const std::uint32_t q = space.field().order();
  const auto thetas = thetas_for(c, inst);
  const bool theta_secret = theta_is_secret(c);

  std::vector<Partition> parts;
  for (auto t : thetas) parts.push_back(partition(space, c, t, opts.sabotage));

  // Executions: theta-secret problems enumerate cond x (theta, noise); the
  // others enumerate, per theta, cond x secret x noise.
  std::uint64_t executions = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const auto& p = parts[i];
    std::uint64_t e = mul_sat(power(q, p.cond.size()), power(q, p.noise.size()));
    e = mul_sat(e, theta_secret ? 1 : power(q, p.secret.size()));
    executions = std::min<std::uint64_t>(UINT64_MAX - e, executions) + e;
  }
  const std::uint64_t work = mul_sat(executions, space.size());
  if (work > opts.budget) {
    throw BudgetExceeded("exact enumeration of " + to_string(c) + " needs " +
                         std::to_string(executions) + " executions over " +
                         std::to_string(space.size()) + " variables, beyond the budget of " +
                         std::to_string(opts.budget) +
                         "; use the rank method or raise XSETSPIR_BUDGET");
  }

  std::vector<ExactConfig> configs;
  for (const auto& t : taps) {
    ExactConfig cfg;
    cfg.rows = layout.rows_for(t);
    if (power(q, cfg.rows.size()) == UINT64_MAX) {
      throw BudgetExceeded("observation of " + t.to_string() + " too wide for exact enumeration");
    }
    configs.push_back(std::move(cfg));
  }

  std::uint64_t cells = 0;
  auto run_group = [&](std::size_t group_theta, const Partition& p) {
    // Secrets: thetas for theta-secret problems, else assignments of p.secret.
    const std::uint64_t n_secrets = theta_secret ? thetas.size() : power(q, p.secret.size());
    std::vector<std::uint32_t> cond(p.cond.size(), 0);
    do {
      ++cells;
      space.clear();
      for (std::size_t i = 0; i < cond.size(); ++i) space.set(p.cond[i], cond[i]);
      std::vector<std::vector<Histogram>> hist(configs.size(), std::vector<Histogram>(n_secrets));
      std::vector<std::uint32_t> secret(theta_secret ? 0 : p.secret.size(), 0);
      for (std::uint64_t si = 0; si < n_secrets; ++si) {
        const std::size_t theta = theta_secret ? thetas[si] : group_theta;
        const auto& noise = theta_secret ? parts[si].noise : p.noise;
        for (std::size_t i = 0; i < secret.size(); ++i) space.set(p.secret[i], secret[i]);
        std::vector<std::uint32_t> nv(noise.size(), 0);
        do {
          for (std::size_t i = 0; i < nv.size(); ++i) space.set(noise[i], nv[i]);
          const auto flat = layout.flatten(space.run(theta));
          for (std::size_t ci = 0; ci < configs.size(); ++ci) {
            std::uint64_t key = 0;
            const auto& rows = configs[ci].rows;
            for (std::size_t r = rows.size(); r-- > 0;) key = key * q + flat[rows[r]];
            ++hist[ci][si][key];
          }
        } while (advance(nv, q));
        advance(secret, q);
      }

      auto secret_label = [&](std::uint64_t si) {
        if (theta_secret) return "theta=" + std::to_string(thetas[si]);
        std::vector<std::uint32_t> digits(p.secret.size());
        for (auto& d : digits) {
          d = static_cast<std::uint32_t>(si % q);
          si /= q;
        }
        return p.secret.empty() ? std::string("none") : assignment(space, p.secret, digits);
      };

      for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        auto& cfg = configs[ci];
        cfg.mi_sum += cell_mutual_information(hist[ci]);
        if (cfg.witness) continue;
        for (std::uint64_t si = 1; si < n_secrets && !cfg.leaks; ++si) {
          if (hist[ci][si] == hist[ci][0]) continue;
          cfg.leaks = true;
          std::vector<std::uint64_t> keys;
          for (const auto& [k, n] : hist[ci][0]) keys.push_back(k);
          for (const auto& [k, n] : hist[ci][si]) keys.push_back(k);
          std::sort(keys.begin(), keys.end());
          for (auto k : keys) {
            const auto a = hist[ci][0].count(k) ? hist[ci][0].at(k) : 0;
            const auto b = hist[ci][si].count(k) ? hist[ci][si].at(k) : 0;
            if (a == b) continue;
            Witness w;
            w.secret_a = secret_label(0);
            w.secret_b = secret_label(si);
            w.cell = cell_label(group_theta, !theta_secret && c != Constraint::kStorageSecrecy,
                                assignment(space, p.cond, cond));
            std::uint64_t rest = k;
            for (auto r : cfg.rows) {
              w.observation.push_back(
                  {layout.label(r), FieldElement(space.field(), static_cast<std::uint32_t>(rest % q))});
              rest /= q;
            }
            w.count_a = a;
            w.count_b = b;
            cfg.witness = std::move(w);
            break;
          }
        }
      }
    } while (advance(cond, q));
  };

  if (theta_secret) {
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].roles != parts[0].roles) throw Error("theta-dependent roles in a theta-secret audit");
    }
    run_group(0, parts[0]);
  } else {
    for (std::size_t i = 0; i < thetas.size(); ++i) run_group(thetas[i], parts[i]);
  }

  std::vector<LeakageReport> out;
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    auto r = base_report(kind, c, taps[ci], Method::kExact, opts);
    r.leaks = configs[ci].leaks;
    r.witness = configs[ci].witness;
    const double mi = configs[ci].mi_sum / static_cast<double>(cells);
    r.mi_bits = mi < 1e-12 ? 0.0 : mi;
    r.work = executions;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank criterion

struct Term {
  std::size_t i, j;  // variable ids, i < j
  FieldVector coeff;
};

// obs = base + lin * x + sum_terms coeff * x_i * x_j over all observables.
struct Quadratic {
  FieldVector base;
  FieldMatrix lin;
  std::vector<Term> terms;
};

FieldVector evaluate(VariableSpace& space, const ObservableLayout& layout, std::size_t theta,
                     std::span<const std::pair<std::size_t, std::uint32_t>> values) {
  space.clear();
  for (const auto& [v, x] : values) space.set(v, x);
  const auto flat = layout.flatten(space.run(theta));
  FieldVector out;
  out.reserve(flat.size());
  for (auto x : flat) out.push_back(FieldElement(space.field(), x));
  return out;
}

bool is_zero(const FieldVector& v) {
  return std::all_of(v.begin(), v.end(), [](const FieldElement& x) { return x.is_zero(); });
}

// Reads the quadratic form off evaluations at 0, e_i and e_i + e_j, then
// confirms it at seeded random points.
Quadratic extract(VariableSpace& space, const ObservableLayout& layout, std::size_t theta,
                  const std::vector<std::size_t>& active, RandomStream& rng) {
  const auto& f = space.field();
  const std::size_t rows = layout.size();
  Quadratic qd{evaluate(space, layout, theta, {}), FieldMatrix(f, rows, space.size()), {}};
  std::vector<FieldVector> single(space.size());
  for (auto v : active) {
    const std::pair<std::size_t, std::uint32_t> one[] = {{v, 1}};
    single[v] = evaluate(space, layout, theta, one);
    for (std::size_t r = 0; r < rows; ++r) qd.lin(r, v) = single[v][r] - qd.base[r];
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      const std::size_t i = active[a], j = active[b];
      const std::pair<std::size_t, std::uint32_t> two[] = {{i, 1}, {j, 1}};
      auto e = evaluate(space, layout, theta, two);
      for (std::size_t r = 0; r < rows; ++r) e[r] = e[r] - single[i][r] - single[j][r] + qd.base[r];
      if (!is_zero(e)) qd.terms.push_back({i, j, std::move(e)});
    }
  }
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<std::pair<std::size_t, std::uint32_t>> point;
    std::vector<FieldElement> x(space.size(), f.zero());
    for (auto v : active) {
      x[v] = rng.uniform(f);
      point.push_back({v, x[v].index()});
    }
    const auto got = evaluate(space, layout, theta, point);
    for (std::size_t r = 0; r < rows; ++r) {
      auto pred = qd.base[r];
      for (auto v : active) pred += qd.lin(r, v) * x[v];
      for (const auto& t : qd.terms) pred += t.coeff[r] * x[t.i] * x[t.j];
      if (pred != got[r]) {
        throw NotLinearError("observable " + layout.label(r) +
                             " is not a multilinear form of degree two in the randomness");
      }
    }
  }
  return qd;
}

FieldMatrix from_columns(const GaloisField& f, std::size_t rows, const std::vector<FieldVector>& cols) {
  FieldMatrix m(f, rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t r = 0; r < rows; ++r) m(r, j) = cols[j][r];
  return m;
}

FieldMatrix as_column(const GaloisField& f, const FieldVector& v) {
  return from_columns(f, v.size(), {v});
}

bool in_span(const FieldMatrix& c, std::size_t rank_c, const FieldVector& v) {
  return rank(hstack(c, as_column(c.field(), v))) == rank_c;
}

// Reduced view of one theta at one cell: offset and a column per variable.
struct CellView {
  FieldVector offset;
  std::vector<FieldVector> column;  // indexed by variable id; empty when unused
};

struct ReducedQuadratic {
  FieldVector base;
  std::vector<FieldVector> lin;  // per variable id
  std::vector<Term> terms;
};

ReducedQuadratic reduce(const Quadratic& qd, std::span<const std::size_t> rows, const FieldMatrix& p,
                        const std::vector<std::size_t>& vars) {
  const auto& f = p.field();
  auto project = [&](auto&& value_at) {
    FieldVector out(p.rows(), f.zero());
    for (std::size_t i = 0; i < p.rows(); ++i) {
      std::uint32_t acc = 0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        acc = f.add(acc, f.mul(p(i, r).index(), value_at(rows[r]).index()));
      }
      out[i] = FieldElement(f, acc);
    }
    return out;
  };
  ReducedQuadratic out;
  out.base = project([&](std::size_t r) { return qd.base[r]; });
  out.lin.resize(qd.lin.cols());
  for (auto v : vars) out.lin[v] = project([&](std::size_t r) { return qd.lin(r, v); });
  for (const auto& t : qd.terms) {
    auto c = project([&](std::size_t r) { return t.coeff[r]; });
    if (!is_zero(c)) out.terms.push_back({t.i, t.j, std::move(c)});
  }
  return out;
}

CellView substitute(const ReducedQuadratic& rq, const std::vector<std::size_t>& cell_vars,
                    const std::vector<FieldElement>& x, const std::vector<std::size_t>& others,
                    const std::vector<bool>& is_cell) {
  CellView cv{rq.base, std::vector<FieldVector>(rq.lin.size())};
  const std::size_t n = rq.base.size();
  for (auto c : cell_vars) {
    for (std::size_t r = 0; r < n; ++r) cv.offset[r] += rq.lin[c][r] * x[c];
  }
  for (auto w : others) cv.column[w] = rq.lin[w];
  for (const auto& t : rq.terms) {
    if (is_cell[t.i] && is_cell[t.j]) {
      const auto s = x[t.i] * x[t.j];
      for (std::size_t r = 0; r < n; ++r) cv.offset[r] += t.coeff[r] * s;
    } else if (is_cell[t.i] || is_cell[t.j]) {
      const std::size_t c = is_cell[t.i] ? t.i : t.j;
      const std::size_t w = is_cell[t.i] ? t.j : t.i;
      if (cv.column[w].empty()) continue;  // dropped conditioned variable
      for (std::size_t r = 0; r < n; ++r) cv.column[w][r] += t.coeff[r] * x[c];
    }
  }
  return cv;
}

std::vector<LeakageReport> rank_constraint(const Instance& inst, AdversaryKind kind, Constraint c,
                                           std::span<const TapSet> taps, const AuditOptions& opts) {
  VariableSpace space(inst);
  const ObservableLayout layout(inst);
  const auto& f = space.field();
  const std::uint32_t q = f.order();
  const auto thetas = thetas_for(c, inst);
  const bool theta_secret = theta_is_secret(c);
  RandomStream rng(opts.seed, "rank-probe");

  std::vector<Partition> parts;
  std::vector<Quadratic> quads;
  for (auto t : thetas) {
    parts.push_back(partition(space, c, t, opts.sabotage));
    std::vector<std::size_t> active;
    for (std::size_t v = 0; v < space.size(); ++v) {
      if (parts.back().roles[v] != Role::kFixed) active.push_back(v);
    }
    quads.push_back(extract(space, layout, t, active, rng));
  }
  if (theta_secret) {
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].roles != parts[0].roles) throw Error("theta-dependent roles in a theta-secret audit");
    }
  }

  // Groups of thetas compared against each other: all of them when theta is
  // the secret, else one group per theta.
  std::vector<std::vector<std::size_t>> groups;
  if (theta_secret) {
    groups.emplace_back();
    for (std::size_t i = 0; i < thetas.size(); ++i) groups.back().push_back(i);
  } else {
    for (std::size_t i = 0; i < thetas.size(); ++i) groups.push_back({i});
  }

  std::vector<LeakageReport> out;
  for (const auto& taps_i : taps) {
    auto report = base_report(kind, c, taps_i, Method::kRank, opts);
    const auto rows = layout.rows_for(taps_i);
    for (const auto& group : groups) {
      if (report.leaks) break;
      const auto& roles = parts[group.front()].roles;

      // Pure masks: noise symbols entering the view linearly, identically for
      // every theta of the group.
      std::vector<std::size_t> masks, cond_vars, secret_vars, noise_vars;
      for (std::size_t v = 0; v < space.size(); ++v) {
        if (roles[v] == Role::kSecret) secret_vars.push_back(v);
        if (roles[v] == Role::kConditioned) cond_vars.push_back(v);
        if (roles[v] != Role::kNoise) continue;
        bool pure = true;
        for (auto gi : group) {
          for (const auto& t : quads[gi].terms) {
            if (t.i != v && t.j != v) continue;
            for (auto r : rows) pure = pure && t.coeff[r].is_zero();
          }
          for (auto r : rows) pure = pure && quads[gi].lin(r, v) == quads[group.front()].lin(r, v);
        }
        (pure ? masks : noise_vars).push_back(v);
      }
      FieldMatrix cm(f, rows.size(), masks.size());
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t m = 0; m < masks.size(); ++m) cm(r, m) = quads[group.front()].lin(rows[r], masks[m]);
      const auto p = left_null_space(cm);

      std::vector<std::size_t> used;
      for (std::size_t v = 0; v < space.size(); ++v) {
        if (roles[v] != Role::kFixed) used.push_back(v);
      }
      std::vector<ReducedQuadratic> reduced;
      for (auto gi : group) reduced.push_back(reduce(quads[gi], rows, p, used));

      // Every remaining product needs a conditioned factor; pick a cover of
      // the products by conditioned symbols to enumerate as cells.
      std::vector<bool> is_cell(space.size(), false);
      std::vector<std::pair<std::size_t, std::size_t>> pending;
      for (const auto& rq : reduced) {
        for (const auto& t : rq.terms) {
          const bool ci = roles[t.i] == Role::kConditioned, cj = roles[t.j] == Role::kConditioned;
          if (!ci && !cj) {
            throw NotLinearError("view " + taps_i.to_string() + " keeps the product " +
                                 space.var(t.i).label + " * " + space.var(t.j).label +
                                 " of unconditioned randomness");
          }
          if (ci != cj) {
            is_cell[ci ? t.i : t.j] = true;
          } else {
            pending.push_back({t.i, t.j});
          }
        }
      }
      while (true) {
        std::map<std::size_t, std::size_t> degree;
        for (const auto& [i, j] : pending) {
          if (is_cell[i] || is_cell[j]) continue;
          ++degree[i];
          ++degree[j];
        }
        if (degree.empty()) break;
        auto best = degree.begin();
        for (auto it = degree.begin(); it != degree.end(); ++it) {
          if (it->second > best->second) best = it;
        }
        is_cell[best->first] = true;
      }
      std::vector<std::size_t> cell_vars, kept_cond;
      for (auto v : cond_vars) (is_cell[v] ? cell_vars : kept_cond).push_back(v);
      const std::uint64_t n_cells = power(q, cell_vars.size());
      if (mul_sat(n_cells, space.size()) > opts.budget) {
        throw BudgetExceeded("rank criterion for " + to_string(c) + " needs " +
                             std::to_string(n_cells) + " conditioning cells, beyond the budget of " +
                             std::to_string(opts.budget));
      }
      std::vector<std::size_t> others = noise_vars;
      others.insert(others.end(), secret_vars.begin(), secret_vars.end());

      std::vector<std::uint32_t> digits(cell_vars.size(), 0);
      std::vector<FieldElement> x(space.size(), f.zero());
      do {
        ++report.work;
        for (std::size_t i = 0; i < cell_vars.size(); ++i) x[cell_vars[i]] = FieldElement(f, digits[i]);
        std::vector<CellView> views;
        for (const auto& rq : reduced) views.push_back(substitute(rq, cell_vars, x, others, is_cell));
        const std::size_t n = p.rows();
        auto noise_matrix = [&](const CellView& cv) {
          std::vector<FieldVector> cols;
          for (auto v : noise_vars) cols.push_back(cv.column[v]);
          return from_columns(f, n, cols);
        };
        const auto cell_desc = [&] {
          std::string rest = assignment(space, cell_vars, std::vector<std::uint32_t>(digits));
          if (!kept_cond.empty()) rest += std::string(rest.empty() ? "" : ", ") + "other conditioned symbols 0";
          return cell_label(thetas[group.front()], !theta_secret && c != Constraint::kStorageSecrecy, rest);
        };
        auto witness_at = [&](std::size_t theta, std::vector<std::pair<std::size_t, std::uint32_t>> extra) {
          std::vector<std::pair<std::size_t, std::uint32_t>> point;
          for (std::size_t i = 0; i < cell_vars.size(); ++i) point.push_back({cell_vars[i], digits[i]});
          point.insert(point.end(), extra.begin(), extra.end());
          space.clear();
          for (const auto& [v, val] : point) space.set(v, val);
          return observe(space, layout, rows, theta);
        };

        if (theta_secret) {
          const auto c0 = noise_matrix(views[0]);
          const auto r0 = rank(c0);
          for (std::size_t g = 1; g < views.size() && !report.leaks; ++g) {
            const auto cg = noise_matrix(views[g]);
            FieldVector diff(n, f.zero());
            for (std::size_t r = 0; r < n; ++r) diff[r] = views[g].offset[r] - views[0].offset[r];
            const bool same = rank(cg) == r0 && rank(hstack(c0, cg)) == r0 && in_span(c0, r0, diff);
            if (same) continue;
            report.leaks = true;
            // Find an observation possible under one theta and impossible under the other.
            const std::size_t pair_idx[2][2] = {{0, g}, {g, 0}};
            for (const auto& ab : pair_idx) {
              if (report.witness) break;
              const auto& va = views[ab[0]];
              const auto& vb = views[ab[1]];
              const auto cb = noise_matrix(vb);
              const auto rb = rank(cb);
              FieldVector d(n, f.zero());
              for (std::size_t r = 0; r < n; ++r) d[r] = va.offset[r] - vb.offset[r];
              std::vector<std::pair<std::size_t, std::uint32_t>> extra;
              if (in_span(cb, rb, d)) {
                for (auto v : noise_vars) {
                  if (!in_span(cb, rb, va.column[v])) {
                    extra.push_back({v, 1});
                    break;
                  }
                }
                if (extra.empty()) continue;
              }
              const std::size_t ta = thetas[group[ab[0]]], tb = thetas[group[ab[1]]];
              Witness w;
              w.secret_a = "theta=" + std::to_string(ta);
              w.secret_b = "theta=" + std::to_string(tb);
              w.cell = cell_desc();
              w.observation = witness_at(ta, extra);
              report.witness = std::move(w);
            }
          }
        } else {
          const auto cn = noise_matrix(views[0]);
          const auto rn = rank(cn);
          for (auto v : secret_vars) {
            if (in_span(cn, rn, views[0].column[v])) continue;
            report.leaks = true;
            Witness w;
            w.secret_a = "all secret symbols 0";
            w.secret_b = space.var(v).label + "=1, other secret symbols 0";
            w.cell = cell_desc();
            w.observation = witness_at(thetas[group.front()], {});
            report.witness = std::move(w);
            break;
          }
        }
      } while (!report.leaks && advance(digits, q));
    }
    out.push_back(std::move(report));
  }
  return out;
}

template <typename Fn>
std::vector<LeakageReport> per_constraint(const Instance& inst, AdversaryKind kind,
                                          std::span<const TapSet> taps, const AuditOptions& opts,
                                          Fn fn) {
  check_sabotage(inst, opts.sabotage);
  for (const auto& t : taps) validate_taps(inst, kind, t, opts.allow_over_threshold);
  std::vector<std::vector<LeakageReport>> by_constraint;
  for (auto c : constraints_for(kind)) by_constraint.push_back(fn(inst, kind, c, taps, opts));
  std::vector<LeakageReport> out;
  for (std::size_t t = 0; t < taps.size(); ++t) {
    for (auto& reports : by_constraint) out.push_back(std::move(reports[t]));
  }
  return out;
}

}  // namespace

std::vector<LeakageReport> audit_exact(const Instance& inst, AdversaryKind kind,
                                       std::span<const TapSet> taps, const AuditOptions& opts) {
  return per_constraint(inst, kind, taps, opts, exact_constraint);
}

std::vector<LeakageReport> audit_rank(const Instance& inst, AdversaryKind kind,
                                      std::span<const TapSet> taps, const AuditOptions& opts) {
  return per_constraint(inst, kind, taps, opts, rank_constraint);
}

std::vector<LeakageReport> audit(const Instance& inst, AdversaryKind kind,
                                 std::span<const TapSet> taps, Method method,
                                 const AuditOptions& opts) {
  return method == Method::kExact ? audit_exact(inst, kind, taps, opts)
                                  : audit_rank(inst, kind, taps, opts);
}

std::vector<LeakageReport> audit_all(const Instance& inst, Method method, const AuditOptions& opts) {
  std::vector<LeakageReport> out;
  for (auto kind : kinds_for(inst)) {
    const auto taps = admissible_taps(inst, kind);
    if (taps.empty()) continue;
    auto reports = audit(inst, kind, taps, method, opts);
    out.insert(out.end(), std::make_move_iterator(reports.begin()),
               std::make_move_iterator(reports.end()));
  }
  return out;
}

}  // namespace xspir
