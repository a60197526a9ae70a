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
 * @file channel.hpp
 * @brief Ground-truth channels, noise and the stacked observation model.
 *
 * During training period t node A receives
 *
 *     s_t = (h_d + V phi_t) x_t + n_t,     V = G^H diag(h),
 *
 * and stacking the T periods gives s = H theta + n with
 * theta = [h_d; v_1; ...; v_K] and H = X (Phi kron I_M),
 * X = diag(x_1 1_M, ..., x_T 1_M).
 */

#pragma once

#include <optional>
#include <string>

#include "design.hpp"
#include "random.hpp"

namespace irsest {

struct SystemDims {
    Index M = 1; // receive antennas at node A
    Index K = 1; // IRS elements
    Index T = 2; // training periods
    std::optional<Index> Kbar;

    Index theta_size() const { return (K + 1) * M; }

    void validate() const {
        detail::require_dims(M >= 1, "SystemDims: M must be >= 1");
        detail::require_dims(K >= 1, "SystemDims: K must be >= 1");
        detail::require_dims(T >= K + 1, "SystemDims: need T >= K+1 (T=" + std::to_string(T) +
                                             ", K=" + std::to_string(K) + ")");
        if (Kbar) {
            detail::require_dims(*Kbar >= 1 && *Kbar <= K, "SystemDims: need 1 <= Kbar <= K");
            detail::require_dims(K % *Kbar == 0, "SystemDims: Kbar must divide K");
        }
    }
};

struct ChannelModelKind {
    enum class Kind { iid, correlated };
    Kind kind = Kind::iid;
    double r = 0.0; // only used by Kind::correlated

    static ChannelModelKind iid() { return {}; }
    static ChannelModelKind correlated(double r) { return {Kind::correlated, r}; }

    void validate() const {
        detail::require_domain(r >= 0.0 && r < 1.0, "ChannelModelKind: r must lie in [0, 1)");
    }

    std::string label() const { return kind == Kind::iid ? "iid" : "corr"; }
};

struct ChannelState {
    ComplexVector h_d; // M
    ComplexMatrix V;   // M x K, cascaded channel
    std::optional<ComplexMatrix> G; // K x M
    std::optional<ComplexVector> h; // K

    Index M() const { return h_d.size(); }
    Index K() const { return V.cols(); }

    /// [h_d; v_1; ...; v_K]
    ComplexVector theta_vector() const {
        ComplexVector theta((K() + 1) * M());
        theta.head(M()) = h_d;
        theta.tail(K() * M()) = vec(V);
        return theta;
    }

    static ChannelState from_theta(const ComplexVector& theta, Index M, Index K) {
        const ComplexMatrix m = mat(theta, M, K + 1);
        return {m.col(0), m.rightCols(K), std::nullopt, std::nullopt};
    }
};

struct ObservationBatch {
    ComplexVector s; // T*M, s_1 first
    double sigma2 = 1.0;
    SystemDims dims;
};

/// [R]_{ij} = r^{|i-j|}
inline Eigen::MatrixXd correlation_matrix(Index M, double r) {
    Eigen::MatrixXd R(M, M);
    for (Index j = 0; j < M; ++j)
        for (Index i = 0; i < M; ++i)
            R(i, j) = std::pow(r, static_cast<double>(std::abs(i - j)));
    return R;
}

namespace detail {

// Lower Cholesky factor of the antenna correlation, or nullopt for iid.
inline std::optional<ComplexMatrix> correlation_factor(Index M, const ChannelModelKind& model) {
    model.validate();
    if (model.kind == ChannelModelKind::Kind::iid)
        return std::nullopt;
    Eigen::LLT<Eigen::MatrixXd> llt(correlation_matrix(M, model.r));
    require_domain(llt.info() == Eigen::Success, "correlation matrix is not positive definite");
    return ComplexMatrix(llt.matrixL().toDenseMatrix().cast<cplx>());
}

inline ComplexMatrix draw_columns(Rng& rng, Index M, Index n, const std::optional<ComplexMatrix>& factor) {
    ComplexMatrix w = complex_normal_matrix(rng, M, n);
    if (factor)
        return *factor * w;
    return w;
}

} // namespace detail

/**
 * Rayleigh draw of h_d and V with unit-variance CN entries. For the
 * correlated kind every column (h_d and each v_k) is L w with L L^T = R.
 */
inline ChannelState gen_channel(const SystemDims& dims, const ChannelModelKind& model, Rng& rng) {
    dims.validate();
    const auto factor = detail::correlation_factor(dims.M, model);
    const ComplexMatrix cols = detail::draw_columns(rng, dims.M, dims.K + 1, factor);
    return {cols.col(0), cols.rightCols(dims.K), std::nullopt, std::nullopt};
}

/// Draws G (K x M) and h (K) and forms V = G^H diag(h).
inline ChannelState gen_physical_channel(const SystemDims& dims, const ChannelModelKind& model, Rng& rng) {
    dims.validate();
    const auto factor = detail::correlation_factor(dims.M, model);
    const ComplexVector h_d = detail::draw_columns(rng, dims.M, 1, factor).col(0);
    const ComplexMatrix G_adj = detail::draw_columns(rng, dims.M, dims.K, factor);
    const ComplexVector h = complex_normal_vector(rng, dims.K);
    ComplexMatrix G = G_adj.adjoint();
    return {h_d, G_adj * h.asDiagonal(), std::move(G), h};
}

inline ChannelState physical_to_cascaded(const ComplexMatrix& G, const ComplexVector& h, const ComplexVector& h_d) {
    detail::require_dims(G.rows() == h.size() && G.cols() == h_d.size(), "physical_to_cascaded: shape mismatch");
    return {h_d, G.adjoint() * h.asDiagonal(), G, h};
}

/// H = X (Phi kron I_M), TM x (K+1)M.
inline ComplexMatrix build_system_matrix(const TrainingDesign& design, Index M) {
    detail::require_dims(M >= 1, "build_system_matrix: M must be >= 1");
    ComplexMatrix H = kron(design.phi, ComplexMatrix::Identity(M, M));
    for (Index t = 0; t < design.T(); ++t)
        H.middleRows(t * M, M) *= design.pilots(t);
    return H;
}

/// Noiseless H theta evaluated as mat(s) = mat(theta) Phi^T diag(x).
inline ComplexVector apply_system(const TrainingDesign& design, const ComplexVector& theta, Index M) {
    detail::require_dims(theta.size() == (design.K() + 1) * M, "apply_system: theta length mismatch");
    ComplexMatrix S = mat(theta, M, design.K() + 1) * design.phi.transpose();
    S *= design.pilots.asDiagonal();
    return vec(S);
}

enum class Noise { on, suppressed };

/**
 * s = H theta + n with n ~ CN(0, sigma2 I). Noise::suppressed skips the
 * noise draw entirely (rng is left untouched) while keeping sigma2 > 0 in
 * the returned batch.
 */
inline ObservationBatch synthesize(const ChannelState& theta, const TrainingDesign& design, double sigma2, Rng& rng,
                                   Noise noise = Noise::on) {
    detail::require_domain(sigma2 > 0.0, "synthesize: sigma2 must be > 0");
    detail::require_dims(theta.K() == design.K(), "synthesize: design K does not match channel K");
    detail::require_dims(theta.V.rows() == theta.M(), "synthesize: V must have M rows");
    // T >= K+1 is an estimation requirement, not a synthesis one: block
    // designs observe the full surface with fewer periods.
    SystemDims dims{theta.M(), theta.K(), design.T(), std::nullopt};
    detail::require_dims(dims.M >= 1 && dims.T >= 1, "synthesize: empty system");
    ObservationBatch out{apply_system(design, theta.theta_vector(), dims.M), sigma2, dims};
    if (noise == Noise::on)
        out.s += complex_normal_vector(rng, out.s.size(), sigma2);
    return out;
}

/// Noiseless observation evaluated per period from G and h directly.
inline ComplexVector observe_physical(const ChannelState& theta, const TrainingDesign& design) {
    detail::require_dims(theta.G.has_value() && theta.h.has_value(), "observe_physical: state lacks G and h");
    const Index M = theta.M();
    ComplexVector s(design.T() * M);
    for (Index t = 0; t < design.T(); ++t) {
        const ComplexVector phi_t = design.phi.row(t).tail(design.K()).transpose();
        s.segment(t * M, M) = (theta.h_d + theta.G->adjoint() * phi_t.asDiagonal() * *theta.h) * design.pilots(t);
    }
    return s;
}

/**
 * Merges K elements into Kbar equal blocks of K/Kbar consecutive elements
 * sharing one reflection coefficient. Column j of the reduced V is the sum of
 * the block's columns, so V phi = Vbar phibar for blockwise-constant phi.
 */
inline ChannelState group_blocks(const ChannelState& theta, Index Kbar) {
    const Index K = theta.K();
    detail::require_dims(Kbar >= 1 && Kbar <= K, "group_blocks: need 1 <= Kbar <= K");
    detail::require_dims(K % Kbar == 0, "group_blocks: Kbar must divide K");
    const Index width = K / Kbar;
    ComplexMatrix Vbar(theta.M(), Kbar);
    for (Index j = 0; j < Kbar; ++j)
        Vbar.col(j) = theta.V.middleCols(j * width, width).rowwise().sum();
    return {theta.h_d, std::move(Vbar), std::nullopt, std::nullopt};
}

/// Full-surface design equivalent to a block design: element k copies block k / (K/Kbar).
inline TrainingDesign expand_blocks(const TrainingDesign& block_design, Index K) {
    const Index Kbar = block_design.K();
    detail::require_dims(Kbar >= 1 && K % Kbar == 0, "expand_blocks: Kbar must divide K");
    const Index width = K / Kbar;
    ComplexMatrix phi(block_design.T(), K + 1);
    phi.col(0) = block_design.phi.col(0);
    for (Index k = 0; k < K; ++k)
        phi.col(k + 1) = block_design.phi.col(1 + k / width);
    return {std::move(phi), block_design.pilots, Scheme::custom, std::nullopt};
}

} // namespace irsest
