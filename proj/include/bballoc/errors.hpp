// Copyright 2026 The bballoc Authors
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

#ifndef BBALLOC_ERRORS_HPP_
#define BBALLOC_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace bballoc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input whose shape makes an operation meaningless (no slots, empty product
// map, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data read from files or handed in by a caller.
class DataError : public Error {
 public:
  using Error::Error;
};

class UnknownIdError : public DataError {
 public:
  UnknownIdError(std::string kind, std::string id)
      : DataError("unknown " + kind + " id \"" + id + "\""),
        kind_(std::move(kind)),
        id_(std::move(id)) {}

  const std::string& kind() const { return kind_; }
  const std::string& id() const { return id_; }

 private:
  std::string kind_;
  std::string id_;
};

// The brute-force oracle refuses instances whose label space is too large.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

// The LP engine failed in a way the caller cannot recover from.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace bballoc

#endif  // BBALLOC_ERRORS_HPP_
