// Copyright 2026 The tsv-lab Authors
//
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

namespace tsvlab {

// Pre- and postselected states are (numerically) orthogonal, so conditional
// quantities built on their overlap are undefined.
class NearOrthogonal : public std::runtime_error {
 public:
  explicit NearOrthogonal(const std::string& what) : std::runtime_error(what) {}
};

// An eigendecomposition step needs a nondegenerate spectrum and did not get
// one.
class DegenerateSpectrum : public std::runtime_error {
 public:
  explicit DegenerateSpectrum(const std::string& what)
      : std::runtime_error(what) {}
};

// A reconstruction or fit has no solution within its declared tolerance.
class NoSolution : public std::runtime_error {
 public:
  explicit NoSolution(const std::string& what) : std::runtime_error(what) {}
};

// The postselected branch carries so little weight relative to the ideal
// run that conditional statistics on it would be pure noise.
class DeadBranch : public std::runtime_error {
 public:
  explicit DeadBranch(const std::string& what) : std::runtime_error(what) {}
};

// A branch amplitude decayed below the double-precision floor.
class UnderflowedBranch : public std::runtime_error {
 public:
  explicit UnderflowedBranch(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace tsvlab
