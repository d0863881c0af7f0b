// Copyright 2026 The tbepp Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tbepp {

/// Raised when a simulation produces something the optical model forbids,
/// e.g. a heralded pair whose photons arrive at different times. Always a bug.
class ConsistencyError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An optical element was misused inside a circuit; carries the element index.
class ElementError : public std::invalid_argument {
   public:
    ElementError(std::size_t index, const std::string &what)
        : std::invalid_argument("element " + std::to_string(index) + ": " + what), index_(index) {}

    std::size_t index() const { return index_; }

   private:
    std::size_t index_;
};

}  // namespace tbepp
