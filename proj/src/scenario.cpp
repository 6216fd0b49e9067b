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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "xspir/errors.hpp"
#include "xspir/harness.hpp"

namespace xspir {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("scenario.value", std::string(key) + " expects a non-negative integer, got '" +
                                            std::string(v) + "'");
  }
  return out;
}

std::vector<std::uint32_t> parse_list(std::string_view key, std::string_view v) {
  std::vector<std::uint32_t> out;
  for (auto item : split(v, ',')) {
    const auto x = parse_uint(key, item);
    if (x > UINT32_MAX) throw ConfigError("scenario.value", std::string(key) + " entry too large");
    out.push_back(static_cast<std::uint32_t>(x));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("scenario.value", std::string(key) + " expects true or false");
}

std::vector<std::size_t> parse_index_set(std::string_view body) {
  std::vector<std::size_t> out;
  if (trim(body).empty()) return out;
  for (auto item : split(body, ',')) {
    const auto x = parse_uint("tap", item);
    if (x == 0) throw ConfigError("scenario.value", "database indices are 1-based");
    out.push_back(static_cast<std::size_t>(x - 1));
  }
  return out;
}

}  // namespace

TapSet parse_tap_set(std::string_view text) {
  text = trim(text);
  TapSet out;
  if (text == "user") {
    out.user = true;
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == ' ') {
      ++pos;
      continue;
    }
    const auto open = text.find('{', pos);
    const auto close = text.find('}', pos);
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      throw ConfigError("scenario.taps", "malformed tap set '" + std::string(text) + "'");
    }
    const auto tag = trim(text.substr(pos, open - pos));
    auto idx = parse_index_set(text.substr(open + 1, close - open - 1));
    if (tag == "S") out.storage = std::move(idx);
    else if (tag == "Q") out.queries = std::move(idx);
    else if (tag == "A") out.answers = std::move(idx);
    else if (tag == "L") out.masks = std::move(idx);
    else throw ConfigError("scenario.taps", "unknown tap tag '" + std::string(tag) + "'");
    pos = close + 1;
  }
  return out;
}

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("scenario.syntax", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ConfigError("scenario.syntax", "line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("scenario.duplicate-key", "key '" + key + "' given twice");
    }
  }

  Scenario s;
  std::uint32_t p = 7, r = 1;
  std::optional<std::vector<std::uint32_t>> modulus;
  bool have_n = false, have_k = false;
  for (const auto& [key, value] : kv) {
    if (key == "mode") {
      if (value == "classical") s.mode = Mode::kClassical;
      else if (value == "quantum") s.mode = Mode::kQuantum;
      else throw ConfigError("scenario.value", "mode must be classical or quantum");
    } else if (key == "p") {
      p = static_cast<std::uint32_t>(std::min<std::uint64_t>(parse_uint(key, value), UINT32_MAX));
    } else if (key == "r") {
      r = static_cast<std::uint32_t>(std::min<std::uint64_t>(parse_uint(key, value), UINT32_MAX));
    } else if (key == "modulus") {
      modulus = parse_list(key, value);
    } else if (key == "N") {
      s.n = parse_uint(key, value);
      have_n = true;
    } else if (key == "K") {
      s.k = parse_uint(key, value);
      have_k = true;
    } else if (key == "X") {
      s.x = parse_uint(key, value);
    } else if (key == "T") {
      s.t = parse_uint(key, value);
    } else if (key == "E") {
      s.e = parse_uint(key, value);
    } else if (key == "theta") {
      if (value != "sweep") s.theta = parse_uint(key, value);
    } else if (key == "seed") {
      s.seed = parse_uint(key, value);
    } else if (key == "audits") {
      if (value == "all") {
        s.audit_every_kind = true;
      } else if (value != "none") {
        for (auto item : split(value, ',')) {
          const auto kind = parse_adversary_kind(item);
          if (!kind) throw ConfigError("scenario.value", "unknown audit kind '" + std::string(item) + "'");
          s.audits.push_back(*kind);
        }
      }
    } else if (key == "audit_method") {
      if (value == "exact") s.audit_method = Method::kExact;
      else if (value == "rank") s.audit_method = Method::kRank;
      else throw ConfigError("scenario.value", "audit_method must be exact or rank");
    } else if (key == "taps") {
      for (auto item : split(value, ';')) s.taps.push_back(parse_tap_set(item));
    } else if (key == "drop_storage_noise") {
      s.sabotage.drop_storage_noise = parse_bool(key, value);
    } else if (key == "drop_query_noise") {
      s.sabotage.drop_query_noise = parse_bool(key, value);
    } else if (key == "zero_masks") {
      s.sabotage.zero_masks = parse_bool(key, value);
    } else if (key == "drop_common") {
      for (auto i : parse_list(key, value)) s.sabotage.drop_common.push_back(i);
    } else if (key == "allow_over_threshold") {
      s.allow_over_threshold = parse_bool(key, value);
    } else if (key == "alpha") {
      s.alpha = parse_list(key, value);
    } else if (key == "f") {
      s.f = parse_list(key, value);
    } else if (key == "u") {
      s.u = parse_list(key, value);
    } else if (key == "v") {
      s.v = parse_list(key, value);
    } else {
      throw ConfigError("scenario.unknown-key", "unknown key '" + key + "'");
    }
  }
  if (!have_n || !have_k) throw ConfigError("scenario.required", "N and K are required");
  if (r == 1) {
    s.field = FieldSpec::prime(p);
  } else if (modulus) {
    s.field = FieldSpec{p, r, *modulus};
  } else {
    if (!is_prime(p)) throw ConfigError("field.p-prime", std::to_string(p) + " is not prime");
    s.field = FieldSpec::extension(p, r);
  }
  if (s.theta && (*s.theta < 1 || *s.theta > s.k)) {
    throw ConfigError("scenario.theta-range", "theta must lie in [1.." + std::to_string(s.k) + "]");
  }
  if (s.mode == Mode::kClassical && (s.u || s.v)) {
    throw ConfigError("scenario.quantum-only", "u and v apply to quantum scenarios");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario.file", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

Instance build_instance(const Scenario& s) {
  const auto& field = GaloisField::get(s.field);
  auto elements = [&](const std::optional<std::vector<std::uint32_t>>& idx,
                      const char* name) -> std::optional<FieldVector> {
    if (!idx) return std::nullopt;
    FieldVector out;
    for (auto i : *idx) {
      if (i >= field.order()) {
        throw ConfigError("scenario.element-range", std::string(name) + " entry " + std::to_string(i) +
                                                        " is not an element of " + s.field.to_string());
      }
      out.push_back(field.element(i));
    }
    return out;
  };
  const auto alpha = elements(s.alpha, "alpha");
  const auto f = elements(s.f, "f");
  if (s.mode == Mode::kQuantum) {
    QuantumOverrides o{alpha, f, elements(s.u, "u"), elements(s.v, "v")};
    return Instance::quantum(effective_params(field, s.n, s.k, s.x, s.t, s.e, o));
  }
  std::optional<EvalPoints> points;
  if (alpha || f) {
    const std::size_t m = std::max(s.t, s.e);
    if (s.x + m >= s.n) throw ConfigError("params.L-positive", "N - X - max(T,E) must be >= 1");
    const std::size_t l = s.n - s.x - m;
    if (alpha && f) {
      points.emplace(*alpha, *f);
    } else {
      const auto d = EvalPoints::defaults(field, s.n, l);
      points.emplace(alpha.value_or(d.alpha()), f.value_or(d.f()));
    }
  }
  return Instance::classical(SchemeParams::classical(field, s.n, s.k, s.x, s.t, s.e, points));
}

}  // namespace xspir
