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
 * @file estimate.hpp
 * @brief Least-squares channel estimators and their exact covariance.
 *
 * Three solvers produce the same estimate theta_hat = (H^H H)^{-1} H^H s:
 *
 *  - ls_estimate: column-pivoted QR on the system matrix; works for any
 *    full-rank design and serves as the reference.
 *  - onoff_estimate_fast: O(TM) closed form for the on/off pattern,
 *    h_d = x_1^* s_1 and v_k = x_{k+1}^* s_{k+1} - h_d.
 *  - dft_estimate_fft: for (permuted) DFT designs Phi^H Phi = T I, so the
 *    estimate is (1/T) Phi^H X^H s, i.e. M inverse DFTs of length T along
 *    the rows of mat(conj(x) .* s) truncated to K+1 columns.
 *
 * With unit-modulus pilots the covariance is sigma^2 (Phi^H Phi)^{-1} kron I_M,
 * which is what covariance() returns in factored form.
 */

#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "channel.hpp"
#include "fft.hpp"

namespace irsest {

enum class Solver { normal_equations, onoff_fast, fft };

inline std::string_view to_string(Solver s) {
    switch (s) {
    case Solver::normal_equations: return "normal-equations";
    case Solver::onoff_fast: return "onoff-fast";
    case Solver::fft: return "fft";
    }
    return "unknown";
}

struct Estimate {
    ComplexVector theta_hat; // (K+1)M
    Index M = 1;
    Solver solver = Solver::normal_equations;

    Index K() const { return theta_hat.size() / M - 1; }
    ComplexVector h_d_hat() const { return theta_hat.head(M); }
    ComplexMatrix V_hat() const { return mat(theta_hat.tail(K() * M), M, K()); }
};

/// Reciprocal condition threshold below which a design counts as singular.
inline constexpr double kRankGuard = 1e-10;

namespace detail {

template <class QR>
void check_rank(const QR& qr, const char* who) {
    const auto d = qr.matrixQR().diagonal().cwiseAbs();
    const double dmax = d.maxCoeff();
    if (dmax == 0.0 || d.minCoeff() / dmax < kRankGuard)
        throw SingularDesignError(std::string(who) + ": system matrix is rank deficient");
}

} // namespace detail

/// theta_hat = argmin ||H theta - s||, solved by column-pivoted Householder QR.
inline Estimate ls_estimate(const ComplexMatrix& H, const ComplexVector& s, Index M = 1) {
    detail::require_dims(H.rows() == s.size(), "ls_estimate: rows(H) != length(s)");
    detail::require_dims(M >= 1 && H.cols() % M == 0 && H.cols() >= 2 * M,
                         "ls_estimate: cols(H) must be (K+1)M with K >= 1");
    if (H.rows() < H.cols())
        throw SingularDesignError("ls_estimate: underdetermined system (rows < cols)");
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(H);
    detail::check_rank(qr, "ls_estimate");
    return {qr.solve(s), M, Solver::normal_equations};
}

/**
 * Same least-squares solution without materializing H: H = (diag(x) Phi) kron I_M,
 * so Theta^T = (diag(x) Phi)^+ mat(s)^T with a (K+1)-column QR.
 */
inline Estimate ls_estimate(const TrainingDesign& design, const ComplexVector& s, Index M) {
    detail::require_dims(M >= 1 && s.size() == design.T() * M, "ls_estimate: length(s) != T*M");
    if (design.T() < design.K() + 1)
        throw SingularDesignError("ls_estimate: underdetermined design (T < K+1)");
    const ComplexMatrix A = design.pilots.asDiagonal() * design.phi;
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(A);
    detail::check_rank(qr, "ls_estimate");
    const ComplexMatrix Y = mat(s, M, design.T()).transpose();
    const ComplexMatrix theta_t = qr.solve(Y); // (K+1) x M
    return {vec(theta_t.transpose()), M, Solver::normal_equations};
}

inline Estimate onoff_estimate_fast(const ComplexVector& s, const ComplexVector& pilots, const SystemDims& dims) {
    const Index M = dims.M, K = dims.K, T = dims.T;
    detail::require_dims(M >= 1 && K >= 1, "onoff_estimate_fast: invalid dims");
    detail::require_dims(T == K + 1, "onoff_estimate_fast: on/off design needs T = K+1");
    detail::require_dims(pilots.size() == T, "onoff_estimate_fast: pilot count must equal T");
    detail::require_dims(s.size() == T * M, "onoff_estimate_fast: length(s) != T*M");
    ComplexVector theta(T * M);
    theta.head(M) = std::conj(pilots(0)) * s.head(M);
    for (Index k = 1; k <= K; ++k)
        theta.segment(k * M, M) = std::conj(pilots(k)) * s.segment(k * M, M) - theta.head(M);
    return {std::move(theta), M, Solver::onoff_fast};
}

/**
 * FFT solver for Phi = leading K+1 columns of P1 F_T P2. Pass a plan of
 * length T to reuse twiddles across calls.
 */
inline Estimate dft_estimate_fft(const ComplexVector& s, const ComplexVector& pilots, const SystemDims& dims,
                                 const DftStructure* perms = nullptr, const fft::Plan* plan = nullptr) {
    const Index M = dims.M, K = dims.K, T = dims.T;
    detail::require_dims(M >= 1 && K >= 1, "dft_estimate_fft: invalid dims");
    detail::require_dims(T >= K + 1, "dft_estimate_fft: need T >= K+1");
    detail::require_dims(pilots.size() == T, "dft_estimate_fft: pilot count must equal T");
    detail::require_dims(s.size() == T * M, "dft_estimate_fft: length(s) != T*M");
    if (perms)
        detail::require_dims(perms->rows.size() == T && perms->cols.size() == T,
                             "dft_estimate_fft: permutations must be T x T");

    std::unique_ptr<fft::Plan> own;
    if (!plan || plan->size() != static_cast<std::size_t>(T)) {
        own = std::make_unique<fft::Plan>(static_cast<std::size_t>(T));
        plan = own.get();
    }

    // Undo the row permutation: z_{P1[r]} = conj(x_r) s_r.
    std::vector<Index> row_of(static_cast<std::size_t>(T));
    for (Index r = 0; r < T; ++r)
        row_of[static_cast<std::size_t>(r)] = perms ? (*perms).rows[r] : r;
    std::vector<Index> col_src(static_cast<std::size_t>(K + 1));
    if (perms) {
        const auto inv = perms->cols.inverse();
        for (Index j = 0; j <= K; ++j)
            col_src[static_cast<std::size_t>(j)] = inv[j];
    } else {
        std::iota(col_src.begin(), col_src.end(), Index{0});
    }

    ComplexVector theta((K + 1) * M);
    std::vector<cplx> row(static_cast<std::size_t>(T));
    for (Index m = 0; m < M; ++m) {
        for (Index r = 0; r < T; ++r)
            row[static_cast<std::size_t>(row_of[static_cast<std::size_t>(r)])] = std::conj(pilots(r)) * s(r * M + m);
        plan->inverse(row);
        for (Index j = 0; j <= K; ++j)
            theta(j * M + m) = row[static_cast<std::size_t>(col_src[static_cast<std::size_t>(j)])];
    }
    return {std::move(theta), M, Solver::fft};
}

/// Picks the fast solver matching the design's scheme; custom designs use QR.
inline Estimate estimate(const TrainingDesign& design, const ComplexVector& s, Index M,
                         const fft::Plan* plan = nullptr) {
    const SystemDims dims{M, design.K(), design.T(), std::nullopt};
    switch (design.scheme) {
    case Scheme::onoff: return onoff_estimate_fast(s, design.pilots, dims);
    case Scheme::dft:
    case Scheme::permuted_dft:
        return dft_estimate_fft(s, design.pilots, dims, design.dft ? &*design.dft : nullptr, plan);
    case Scheme::custom: break;
    }
    return ls_estimate(design, s, M);
}

// ---------------------------------------------------------------------------
// Covariance and Cramer-Rao bound
// ---------------------------------------------------------------------------

struct CrlbReport {
    ComplexMatrix factor;               // sigma^2 (Phi^H Phi)^{-1}; covariance = factor kron I_M
    RealVector per_element_variance;    // (K+1)M
    RealVector fisher_diag;             // diag(sigma^-2 (Phi^H Phi kron I_M))
    Index M = 1;

    static constexpr Index kMaxMaterialized = 4096;

    /// Full (K+1)M square covariance; refused above kMaxMaterialized.
    ComplexMatrix full() const {
        const Index n = factor.rows() * M;
        detail::require_dims(n <= kMaxMaterialized, "CrlbReport::full: covariance too large to materialize");
        return kron(factor, ComplexMatrix::Identity(M, M));
    }
};

inline ComplexMatrix gram(const TrainingDesign& design) {
    return design.phi.adjoint() * design.phi;
}

/// (Phi^H Phi)^{-1} via Cholesky; throws SingularDesignError when ill-conditioned.
inline ComplexMatrix gram_inverse(const TrainingDesign& design) {
    const ComplexMatrix g = gram(design);
    Eigen::LLT<ComplexMatrix> llt(g);
    if (llt.info() != Eigen::Success || llt.rcond() < kRankGuard)
        throw SingularDesignError("gram_inverse: Phi^H Phi is singular");
    ComplexMatrix inv = llt.solve(ComplexMatrix::Identity(g.rows(), g.cols()));
    return (inv + inv.adjoint()) / 2.0;
}

namespace detail {

// Closed-form (Phi^H Phi)^{-1} for the generated schemes, so the analytic
// variances come out as exact multiples of sigma2.
inline std::optional<ComplexMatrix> structured_gram_inverse(const TrainingDesign& design) {
    const Index n = design.K() + 1;
    if (design.scheme == Scheme::onoff) {
        ComplexMatrix inv = ComplexMatrix::Ones(n, n);
        inv.row(0).setConstant(-1.0);
        inv.col(0).setConstant(-1.0);
        inv(0, 0) = 1.0;
        inv.bottomRightCorner(n - 1, n - 1).diagonal().setConstant(2.0);
        return inv;
    }
    if (design.dft)
        return ComplexMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(design.T()));
    return std::nullopt;
}

} // namespace detail

inline CrlbReport covariance(const TrainingDesign& design, double sigma2, Index M) {
    detail::require_domain(sigma2 > 0.0, "covariance: sigma2 must be > 0");
    detail::require_dims(M >= 1, "covariance: M must be >= 1");
    detail::require_dims(design.pilots.size() == design.T(), "covariance: pilot count must equal T");
    for (Index t = 0; t < design.T(); ++t)
        detail::require_domain(std::abs(std::abs(design.pilots(t)) - 1.0) <= kUnitTolerance,
                               "covariance: pilots must be unit modulus");

    CrlbReport r;
    r.M = M;
    const auto closed = detail::structured_gram_inverse(design);
    r.factor = sigma2 * (closed ? *closed : gram_inverse(design));
    const ComplexMatrix g = gram(design);
    const Index n = design.K() + 1;
    r.per_element_variance.resize(n * M);
    r.fisher_diag.resize(n * M);
    for (Index b = 0; b < n; ++b) {
        r.per_element_variance.segment(b * M, M).setConstant(r.factor(b, b).real());
        r.fisher_diag.segment(b * M, M).setConstant(g(b, b).real() / sigma2);
    }
    return r;
}

struct CrlbBound {
    RealVector bound; // 1 / fisher_diag
    bool attained = false;
};

/// Per-element lower bound 1/[I]_ii; attained iff Phi^H Phi is diagonal.
inline CrlbBound crlb_diag_bound(const TrainingDesign& design, double sigma2, Index M) {
    const auto report = covariance(design, sigma2, M);
    CrlbBound out;
    out.bound = report.fisher_diag.cwiseInverse();
    ComplexMatrix g = gram(design);
    g.diagonal().setZero();
    out.attained = g.cwiseAbs().maxCoeff() < default_gram_tolerance(design.T());
    return out;
}

} // namespace irsest
