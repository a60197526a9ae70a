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

/**
 * @file fft.hpp
 * @brief Arbitrary-length complex DFT.
 *
 * Power-of-two lengths use an iterative radix-2 transform. Every other length
 * goes through Bluestein's chirp-z algorithm on a padded power-of-two
 * convolution, so the cost is O(n log n) for any n including primes.
 *
 * Conventions:
 *   forward: X_k = sum_n x_n exp(-j 2 pi n k / n_len)
 *   inverse: x_n = (1/n_len) sum_k X_k exp(+j 2 pi n k / n_len)
 */

#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace irsest::fft {

using cplx = std::complex<double>;

namespace detail {

// exp(sign * j 2 pi num / den) with num reduced mod den first.
inline cplx twiddle(std::size_t num, std::size_t den, double sign) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(num % den) /
                         static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

// In-place radix-2 transform, unscaled. data.size() must be a power of two.
inline void radix2(std::span<cplx> data, const std::vector<cplx>& roots) {
    const std::size_t n = data.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        const std::size_t half = len / 2;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx u = data[start + k];
                const cplx v = data[start + k + half] * roots[k * stride];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
    }
}

} // namespace detail

/**
 * Precomputed transform of a fixed length. Plans are immutable after
 * construction and may be shared between threads.
 */
class Plan {
public:
    explicit Plan(std::size_t n) : n_(n) {
        irsest::detail::require_dims(n >= 1, "fft::Plan: length must be positive");
        if (std::has_single_bit(n)) {
            fwd_roots_ = make_roots(n, -1.0);
            inv_roots_ = make_roots(n, +1.0);
            return;
        }
        m_ = std::bit_ceil(2 * n - 1);
        fwd_roots_ = make_roots(m_, -1.0);
        inv_roots_ = make_roots(m_, +1.0);
        // chirp_n = exp(-j pi n^2 / N); n^2 is reduced mod 2N to keep the argument small.
        chirp_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            chirp_[i] = detail::twiddle((i * i) % (2 * n), 2 * n, -1.0);
        fwd_kernel_ = make_kernel(+1);
        inv_kernel_ = make_kernel(-1);
    }

    std::size_t size() const { return n_; }

    void forward(std::span<cplx> data) const { transform(data, false); }

    /// Inverse transform including the 1/n scaling.
    void inverse(std::span<cplx> data) const {
        transform(data, true);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : data)
            v *= scale;
    }

private:
    static std::vector<cplx> make_roots(std::size_t n, double sign) {
        std::vector<cplx> roots(n / 2 + 1);
        for (std::size_t k = 0; k < roots.size(); ++k)
            roots[k] = detail::twiddle(k, n, sign);
        return roots;
    }

    // FFT of the conjugate chirp (forward) or the chirp (inverse), wrapped to length m_.
    std::vector<cplx> make_kernel(int direction) const {
        std::vector<cplx> b(m_, cplx{});
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx c = direction > 0 ? std::conj(chirp_[i]) : chirp_[i];
            b[i] = c;
            if (i != 0)
                b[m_ - i] = c;
        }
        detail::radix2(b, fwd_roots_);
        return b;
    }

    void transform(std::span<cplx> data, bool inverse) const {
        irsest::detail::require_dims(data.size() == n_, "fft::Plan: input length does not match plan");
        if (m_ == 0) {
            detail::radix2(data, inverse ? inv_roots_ : fwd_roots_);
            return;
        }
        // Bluestein: X_k = c_k sum_n (x_n c_n) conj(c_{k-n}) with c = chirp for the
        // forward sign; the inverse uses the conjugate chirp.
        const auto& kernel = inverse ? inv_kernel_ : fwd_kernel_;
        std::vector<cplx> a(m_, cplx{});
        for (std::size_t i = 0; i < n_; ++i)
            a[i] = data[i] * (inverse ? std::conj(chirp_[i]) : chirp_[i]);
        detail::radix2(a, fwd_roots_);
        for (std::size_t i = 0; i < m_; ++i)
            a[i] *= kernel[i];
        detail::radix2(a, inv_roots_);
        const double scale = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k)
            data[k] = a[k] * scale * (inverse ? std::conj(chirp_[k]) : chirp_[k]);
    }

    std::size_t n_ = 0;
    std::size_t m_ = 0; // padded convolution length, 0 on the radix-2 path
    std::vector<cplx> fwd_roots_;
    std::vector<cplx> inv_roots_;
    std::vector<cplx> chirp_;
    std::vector<cplx> fwd_kernel_;
    std::vector<cplx> inv_kernel_;
};

} // namespace irsest::fft
