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
 * @file tensor_ops.hpp
 * @brief Complex matrix helpers: vec/mat reshaping, diag, Kronecker and
 *        Hadamard products, DFT columns and permutation matrices.
 *
 * Storage is Eigen's default column-major layout, so vec() is a plain copy
 * of the coefficient buffer. Indices are 0-based everywhere in code; the
 * element (t,k) of a T-point DFT matrix is exp(-j 2 pi t k / T).
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace irsest {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx I_unit{0.0, 1.0};

/// Columnwise stacking of x.
inline ComplexVector vec(const ComplexMatrix& x) {
    return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

/// Inverse of vec(): reshapes a rows*cols vector columnwise.
inline ComplexMatrix mat(const ComplexVector& x, Index rows, Index cols) {
    detail::require_dims(rows >= 1 && cols >= 1, "mat: rows and cols must be positive");
    detail::require_dims(x.size() == rows * cols,
                         "mat: vector length " + std::to_string(x.size()) + " != " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    return Eigen::Map<const ComplexMatrix>(x.data(), rows, cols);
}

inline ComplexMatrix diag_build(const ComplexVector& x) {
    return x.asDiagonal();
}

inline ComplexVector diag_extract(const ComplexMatrix& x) {
    detail::require_dims(x.rows() == x.cols(), "diag_extract: matrix is not square");
    return x.diagonal();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_dims(a.rows() == b.rows() && a.cols() == b.cols(),
                         "hadamard: operand shapes differ");
    return a.cwiseProduct(b);
}

/// exp(-j 2 pi ((t k) mod T) / T); the reduction keeps the trig argument in [0, 2 pi).
inline cplx dft_entry(Index t, Index k, Index T) {
    const auto r = static_cast<double>((static_cast<long long>(t) * k) % T);
    const double angle = -2.0 * std::numbers::pi * r / static_cast<double>(T);
    return {std::cos(angle), std::sin(angle)};
}

/// The ncols leading columns of the T x T DFT matrix.
inline ComplexMatrix dft_columns(Index T, Index ncols) {
    detail::require_dims(T >= 1, "dft_columns: T must be positive");
    detail::require_dims(ncols >= 1 && ncols <= T,
                         "dft_columns: need 1 <= ncols <= T (ncols=" + std::to_string(ncols) +
                             ", T=" + std::to_string(T) + ")");
    ComplexMatrix f(T, ncols);
    for (Index k = 0; k < ncols; ++k)
        for (Index t = 0; t < T; ++t)
            f(t, k) = dft_entry(t, k, T);
    return f;
}

/**
 * Permutation matrix stored as a mapping. Row i of the materialized matrix
 * has its single one in column mapping[i], so (P x)_i = x_{mapping[i]}.
 */
class PermutationMatrix {
public:
    PermutationMatrix() = default;

    explicit PermutationMatrix(std::vector<Index> mapping) : mapping_(std::move(mapping)) {
        std::vector<char> seen(mapping_.size(), 0);
        for (auto m : mapping_) {
            detail::require_domain(m >= 0 && static_cast<std::size_t>(m) < mapping_.size() && !seen[m],
                                   "PermutationMatrix: mapping is not a bijection");
            seen[m] = 1;
        }
    }

    static PermutationMatrix identity(Index n) {
        std::vector<Index> m(static_cast<std::size_t>(n));
        std::iota(m.begin(), m.end(), Index{0});
        return PermutationMatrix(std::move(m));
    }

    /// Transposition of indices a and b (0-based).
    static PermutationMatrix swap(Index n, Index a, Index b) {
        auto p = identity(n);
        std::swap(p.mapping_.at(a), p.mapping_.at(b));
        return p;
    }

    Index size() const { return static_cast<Index>(mapping_.size()); }
    Index operator[](Index i) const { return mapping_[static_cast<std::size_t>(i)]; }
    const std::vector<Index>& mapping() const { return mapping_; }

    PermutationMatrix inverse() const {
        std::vector<Index> inv(mapping_.size());
        for (std::size_t i = 0; i < mapping_.size(); ++i)
            inv[static_cast<std::size_t>(mapping_[i])] = static_cast<Index>(i);
        return PermutationMatrix(std::move(inv));
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < mapping_.size(); ++i)
            if (mapping_[i] != static_cast<Index>(i))
                return false;
        return true;
    }

    Eigen::MatrixXd materialize() const {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(size(), size());
        for (Index i = 0; i < size(); ++i)
            p(i, (*this)[i]) = 1.0;
        return p;
    }

    friend bool operator==(const PermutationMatrix&, const PermutationMatrix&) = default;

private:
    std::vector<Index> mapping_;
};

enum class Side { left, right };

/// P x (rows permuted) for Side::left, x P (columns permuted) for Side::right.
inline ComplexMatrix permute(const PermutationMatrix& p, const ComplexMatrix& x, Side side) {
    ComplexMatrix out(x.rows(), x.cols());
    if (side == Side::left) {
        detail::require_dims(p.size() == x.rows(), "permute: P size must equal rows(x)");
        for (Index i = 0; i < x.rows(); ++i)
            out.row(i) = x.row(p[i]);
    } else {
        detail::require_dims(p.size() == x.cols(), "permute: P size must equal cols(x)");
        // (x P)(:, mapping[i]) = x(:, i)
        for (Index i = 0; i < x.cols(); ++i)
            out.col(p[i]) = x.col(i);
    }
    return out;
}

/// Largest |a_ij - b_ij|.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_dims(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

} // namespace irsest
