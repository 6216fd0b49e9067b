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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xspir {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter or scenario validation failure. `invariant` names the violated
// condition so the harness can echo it back.
class ConfigError : public Error {
 public:
  ConfigError(std::string invariant, const std::string& detail)
      : Error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t rank, std::size_t size)
      : Error("singular matrix: rank " + std::to_string(rank) + " < " +
              std::to_string(size)),
        rank_(rank),
        size_(size) {}
  std::size_t rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return size_; }

 private:
  std::size_t rank_;
  std::size_t size_;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class NotLinearError : public Error {
 public:
  using Error::Error;
};

}  // namespace xspir
