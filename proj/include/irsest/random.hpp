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

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "tensor_ops.hpp"

namespace irsest {

using Rng = std::mt19937_64;

/// Substream tags so that channel draws never depend on which noise or
/// pilot draws happened before them.
enum class Substream : std::uint64_t { channel = 1, noise = 2, pilots = 3, design = 4 };

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Counter-based key: a pure function of its inputs, independent of call order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = detail::splitmix64(master);
    for (auto p : path)
        h = detail::splitmix64(h ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_stream(std::uint64_t master, std::uint64_t sweep_index, std::uint64_t trial_index,
                       Substream tag) {
    const auto key = derive_seed(master, {sweep_index, trial_index, static_cast<std::uint64_t>(tag)});
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return Rng(seq);
}

/// One CN(0, variance) draw: independent real and imaginary parts with variance/2 each.
inline cplx complex_normal(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline ComplexVector complex_normal_vector(Rng& rng, Index n, double variance = 1.0) {
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = complex_normal(rng, variance);
    return v;
}

inline ComplexMatrix complex_normal_matrix(Rng& rng, Index rows, Index cols, double variance = 1.0) {
    ComplexMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = complex_normal(rng, variance);
    return m;
}

/// Unit-modulus symbol with uniform phase.
inline cplx random_unit_symbol(Rng& rng) {
    std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
    return std::polar(1.0, ud(rng));
}

} // namespace irsest
