// Copyright 2026 The groupage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace groupage {

// k does not divide n.
class DivisibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside its admissible range (p, k, or a source index).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Sequence length or problem size does not match what the operation needs.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Argument outside the domain of a mathematical function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative method did not converge within its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bisection endpoints do not bracket a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough simulated cycles for an estimator.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace groupage
