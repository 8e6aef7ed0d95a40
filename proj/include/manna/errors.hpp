// Copyright 2026 The Manna Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace manna {

/// Base of every error raised by the library. Each subclass carries the
/// process exit code the command-line front end maps it to.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const noexcept = 0;
};

/// Malformed or out-of-contract input.
class InputError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// An enumeration or search exceeded its configured size guard.
class SizeError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// The subdivision search hit its depth limit without a verified point.
class UnresolvedError : public Error {
 public:
  UnresolvedError(const std::string& what, std::string best_simplex)
      : Error(what), best_simplex_(std::move(best_simplex)) {}
  int exit_code() const noexcept override { return 4; }
  const std::string& best_simplex() const noexcept { return best_simplex_; }

 private:
  std::string best_simplex_;
};

/// A (item, agent) alternating cycle; item j_k is followed by agent i_k.
struct CycleStep {
  int item;
  int agent;
  friend bool operator==(const CycleStep&, const CycleStep&) = default;
};
using Cycle = std::vector<CycleStep>;

/// The perturbed instance realised a ratio-one cycle.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, Cycle cycle)
      : Error(what), cycle_(std::move(cycle)) {}
  int exit_code() const noexcept override { return 5; }
  const Cycle& cycle() const noexcept { return cycle_; }

 private:
  Cycle cycle_;
};

/// A proven invariant failed at runtime. Signals a bug or a violated
/// non-degeneracy assumption, never bad user input.
class InvariantError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

}  // namespace manna
