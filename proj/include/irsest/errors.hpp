// SPDX-License-Identifier: Apache-2.0
//
// irsest - training design and least-squares channel estimation for
// IRS-aided MISO links.
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

namespace irsest {

// Shapes or sizes of the arguments do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A value is outside its admissible domain (negative variance, r >= 1, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The system matrix or Gram matrix is (numerically) rank deficient.
class SingularDesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse failures in the text formats (design files, ranges).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_dims(bool ok, const std::string& what) {
    if (!ok)
        throw DimensionError(what);
}

inline void require_domain(bool ok, const std::string& what) {
    if (!ok)
        throw DomainError(what);
}

} // namespace detail
} // namespace irsest
