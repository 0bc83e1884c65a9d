// SPDX-License-Identifier: Apache-2.0
//
// rstc - rate-split transform coding library for CSI feedback simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace rstc {

// Bad arguments, malformed inputs, degenerate sources. CLI exit code 1.
class validation_error : public std::runtime_error {
  public:
    explicit validation_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Dimension or memory guards exceeded. CLI exit code 1.
class capacity_error : public std::runtime_error {
  public:
    explicit capacity_error(const std::string &msg) : std::runtime_error(msg) {}
};

// File format / I/O problems. CLI exit code 2.
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Iterative solver exhausted its budget. CLI exit code 3.
class convergence_error : public std::runtime_error {
  public:
    explicit convergence_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace rstc
