// Copyright 2026 The AMSS Authors. All Rights Reserved.
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

#ifndef AMSS_COMMON_HPP_
#define AMSS_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace amss {

// Input data violates a domain invariant (rating out of range, malformed row,
// non-monotone calibration, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value lies outside the interval an operation is defined on.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Caller passed arguments that can never be valid (lo >= hi, empty list).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A predictor backend failed. Carries the backend identity.
class BackendError : public std::runtime_error {
 public:
  BackendError(std::string backend, const std::string& what)
      : std::runtime_error(backend + ": " + what), backend_(std::move(backend)) {}

  const std::string& backend() const { return backend_; }

 private:
  std::string backend_;
};

}  // namespace amss

#endif  // AMSS_COMMON_HPP_
