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
 * @file design.hpp
 * @brief IRS training designs and their optimality checks.
 *
 * A training design is the T x (K+1) matrix Phi whose first column is all
 * ones (the direct path, which the surface cannot steer) and whose column
 * k+1 holds the reflection coefficients beta * exp(j p) of element k over
 * the T training periods, together with the unit-modulus pilots x_t.
 *
 * For any design with equally scaled orthogonal columns, Phi^H Phi = alpha I,
 * and alpha = tr(Phi^H Phi) / (K+1) <= T because every |phi_tk| <= 1. The
 * leading K+1 columns of the T-point DFT matrix reach alpha = T whenever the
 * phase alphabet contains the T-th roots of unity.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tensor_ops.hpp"

namespace irsest {

enum class Scheme { onoff, dft, permuted_dft, custom };

inline std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::onoff: return "onoff";
    case Scheme::dft: return "dft";
    case Scheme::permuted_dft: return "permuted-dft";
    case Scheme::custom: return "custom";
    }
    return "unknown";
}

/// Row permutation P1 and column permutation P2 (both T x T) of a DFT design.
struct DftStructure {
    PermutationMatrix rows;
    PermutationMatrix cols;
};

struct TrainingDesign {
    ComplexMatrix phi;    // T x (K+1)
    ComplexVector pilots; // T
    Scheme scheme = Scheme::custom;
    std::optional<DftStructure> dft; // set for dft and permuted-dft designs

    Index T() const { return phi.rows(); }
    Index K() const { return phi.cols() - 1; }
};

inline constexpr double kUnitTolerance = 1e-12;

inline ComplexVector unit_pilots(Index T) {
    return ComplexVector::Ones(T);
}

/// Throws unless the design has a ones first column, unit pilots and |phi| <= 1.
inline void validate_design(const TrainingDesign& d) {
    detail::require_dims(d.phi.rows() >= 1 && d.phi.cols() >= 2, "design: Phi must be T x (K+1) with K >= 1");
    detail::require_dims(d.pilots.size() == d.phi.rows(), "design: pilot count must equal T");
    for (Index t = 0; t < d.T(); ++t) {
        detail::require_domain(std::abs(d.phi(t, 0) - cplx{1.0, 0.0}) <= kUnitTolerance,
                               "design: first column of Phi must be all ones (row " + std::to_string(t + 1) + ")");
        detail::require_domain(std::abs(std::abs(d.pilots(t)) - 1.0) <= kUnitTolerance,
                               "design: pilot " + std::to_string(t + 1) + " is not unit modulus");
        for (Index k = 1; k < d.phi.cols(); ++k)
            detail::require_domain(std::abs(d.phi(t, k)) <= 1.0 + kUnitTolerance,
                                   "design: |phi| > 1 at (" + std::to_string(t + 1) + "," +
                                       std::to_string(k + 1) + ")");
    }
}

inline TrainingDesign make_custom_design(ComplexMatrix phi, ComplexVector pilots) {
    TrainingDesign d{std::move(phi), std::move(pilots), Scheme::custom, std::nullopt};
    validate_design(d);
    return d;
}

/// The conventional one-element-at-a-time pattern: row 1 switches every
/// element off, row k+1 switches on element k only. Requires T = K+1.
inline TrainingDesign onoff_design(Index K, const ComplexVector& pilots) {
    detail::require_dims(K >= 1, "onoff_design: K must be >= 1");
    detail::require_dims(pilots.size() == K + 1,
                         "onoff_design: requires T = K+1 (T=" + std::to_string(pilots.size()) +
                             ", K=" + std::to_string(K) + ")");
    ComplexMatrix phi = ComplexMatrix::Zero(K + 1, K + 1);
    phi.col(0).setOnes();
    for (Index k = 1; k <= K; ++k)
        phi(k, k) = 1.0;
    TrainingDesign d{std::move(phi), pilots, Scheme::onoff, std::nullopt};
    validate_design(d);
    return d;
}

inline TrainingDesign onoff_design(Index K) {
    return onoff_design(K, unit_pilots(K + 1));
}

inline TrainingDesign dft_design(Index T, Index K, const ComplexVector& pilots) {
    detail::require_dims(K >= 1, "dft_design: K must be >= 1");
    detail::require_dims(T >= K + 1, "dft_design: requires T >= K+1 (T=" + std::to_string(T) +
                                         ", K=" + std::to_string(K) + ")");
    detail::require_dims(pilots.size() == T, "dft_design: pilot count must equal T");
    TrainingDesign d{dft_columns(T, K + 1), pilots, Scheme::dft,
                     DftStructure{PermutationMatrix::identity(T), PermutationMatrix::identity(T)}};
    validate_design(d);
    return d;
}

inline TrainingDesign dft_design(Index T, Index K) {
    return dft_design(T, K, unit_pilots(T));
}

/**
 * Phi = leading K+1 columns of P1 F_T P2. P2 must keep index 0 in place so
 * the first column stays all ones. When T > K+1 the column permutation may
 * bring other DFT columns into the retained set.
 */
inline TrainingDesign permuted_dft_design(Index T, Index K, const PermutationMatrix& p1,
                                          const PermutationMatrix& p2, const ComplexVector& pilots) {
    detail::require_dims(K >= 1, "permuted_dft_design: K must be >= 1");
    detail::require_dims(T >= K + 1, "permuted_dft_design: requires T >= K+1");
    detail::require_dims(p1.size() == T && p2.size() == T, "permuted_dft_design: P1 and P2 must be T x T");
    detail::require_dims(pilots.size() == T, "permuted_dft_design: pilot count must equal T");
    detail::require_domain(p2[0] == 0, "permuted_dft_design: P2 must satisfy [P2]_{1,1} = 1");
    const ComplexMatrix full = permute(p2, permute(p1, dft_columns(T, T), Side::left), Side::right);
    TrainingDesign d{full.leftCols(K + 1), pilots, Scheme::permuted_dft, DftStructure{p1, p2}};
    validate_design(d);
    return d;
}

/// Uniformly random P1 and a random P2 with index 0 fixed.
template <class URBG>
inline std::pair<PermutationMatrix, PermutationMatrix> random_dft_permutations(Index T, URBG& rng) {
    std::vector<Index> a(static_cast<std::size_t>(T));
    std::iota(a.begin(), a.end(), Index{0});
    auto b = a;
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin() + 1, b.end(), rng);
    return {PermutationMatrix(std::move(a)), PermutationMatrix(std::move(b))};
}

// ---------------------------------------------------------------------------
// Constraints and certification
// ---------------------------------------------------------------------------

struct PhaseConstraint {
    std::vector<double> levels; // radians in [0, 2 pi)
    double beta_min = 0.0;
    double beta_max = 1.0;
    double tolerance = 1e-9; // radians

    /// L = {2 pi i / n : i = 0..n-1}
    static PhaseConstraint uniform(std::size_t n) {
        detail::require_domain(n >= 1, "PhaseConstraint: need at least one level");
        PhaseConstraint c;
        for (std::size_t i = 0; i < n; ++i)
            c.levels.push_back(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
        return c;
    }

    static PhaseConstraint from_levels(std::vector<double> levels) {
        PhaseConstraint c;
        c.levels = std::move(levels);
        c.validate();
        return c;
    }

    void validate() const {
        detail::require_domain(!levels.empty(), "PhaseConstraint: level set is empty");
        detail::require_domain(0.0 <= beta_min && beta_min <= beta_max && beta_max <= 1.0,
                               "PhaseConstraint: need 0 <= beta_min <= beta_max <= 1");
        for (std::size_t i = 0; i < levels.size(); ++i)
            for (std::size_t j = i + 1; j < levels.size(); ++j)
                detail::require_domain(phase_distance(levels[i], levels[j]) > tolerance,
                                       "PhaseConstraint: levels are not distinct modulo 2 pi");
    }

    /// Distance on the circle between two angles.
    static double phase_distance(double a, double b) {
        const double two_pi = 2.0 * std::numbers::pi;
        double d = std::fmod(std::abs(a - b), two_pi);
        return std::min(d, two_pi - d);
    }

    bool contains_phase(double p) const {
        return std::any_of(levels.begin(), levels.end(),
                           [&](double l) { return phase_distance(p, l) <= tolerance; });
    }
};

/// 0-based (t, k) position in Phi; k = 0 is the direct-path column.
struct Violation {
    Index t = 0;
    Index k = 0;
    std::string reason;
};

struct OptimalityReport {
    double alpha = 0.0;
    bool is_orthogonal = false;
    double gram_offdiag_max = 0.0;
    double upper_bound = 0.0;
    double gap = 0.0;
    bool feasible = true;
    std::vector<Violation> violations;
};

/**
 * Checks every entry against the alphabet: the direct-path column must be
 * exactly one, and each IRS entry must be beta * exp(j p) with beta in
 * [beta_min, beta_max] and p within tolerance of a level. Entries with
 * beta = 0 carry no phase and only the attenuation range applies.
 */
inline OptimalityReport check_feasibility(const TrainingDesign& design, const PhaseConstraint& constraint) {
    constraint.validate();
    OptimalityReport r;
    r.upper_bound = static_cast<double>(design.T());
    const auto& phi = design.phi;
    for (Index t = 0; t < phi.rows(); ++t) {
        if (std::abs(phi(t, 0) - cplx{1.0, 0.0}) > kUnitTolerance)
            r.violations.push_back({t, 0, "direct-path entry is not 1"});
        for (Index k = 1; k < phi.cols(); ++k) {
            const double beta = std::abs(phi(t, k));
            if (beta < constraint.beta_min - kUnitTolerance || beta > constraint.beta_max + kUnitTolerance) {
                r.violations.push_back({t, k, "attenuation " + std::to_string(beta) + " out of range"});
                continue;
            }
            if (beta <= kUnitTolerance)
                continue;
            if (!constraint.contains_phase(std::arg(phi(t, k))))
                r.violations.push_back({t, k, "phase " + std::to_string(std::arg(phi(t, k))) + " not in L"});
        }
    }
    r.feasible = r.violations.empty();
    return r;
}

inline double default_gram_tolerance(Index T) {
    return 1e-8 * static_cast<double>(T);
}

/**
 * Gram-based certificate. alpha is the mean of diag(Phi^H Phi); the design
 * is orthogonal when every off-diagonal Gram entry and every diagonal
 * deviation from alpha is below tol. feasible here only covers the
 * structural constraints (ones column, |phi| <= 1); use the overload with
 * a PhaseConstraint to include the alphabet.
 */
inline OptimalityReport certify(const TrainingDesign& design, double tol) {
    OptimalityReport r;
    const ComplexMatrix gram = design.phi.adjoint() * design.phi;
    const Index n = gram.rows();
    r.alpha = gram.diagonal().real().mean();
    double diag_dev = 0.0;
    for (Index j = 0; j < n; ++j) {
        diag_dev = std::max(diag_dev, std::abs(gram(j, j).real() - r.alpha));
        for (Index i = 0; i < n; ++i)
            if (i != j)
                r.gram_offdiag_max = std::max(r.gram_offdiag_max, std::abs(gram(i, j)));
    }
    r.is_orthogonal = r.gram_offdiag_max < tol && diag_dev < tol;
    r.upper_bound = static_cast<double>(design.T());
    r.gap = r.upper_bound - r.alpha;

    for (Index t = 0; t < design.T(); ++t) {
        if (std::abs(design.phi(t, 0) - cplx{1.0, 0.0}) > kUnitTolerance)
            r.violations.push_back({t, 0, "direct-path entry is not 1"});
        for (Index k = 1; k < design.phi.cols(); ++k)
            if (std::abs(design.phi(t, k)) > 1.0 + kUnitTolerance)
                r.violations.push_back({t, k, "|phi| > 1"});
    }
    r.feasible = r.violations.empty();
    return r;
}

inline OptimalityReport certify(const TrainingDesign& design) {
    return certify(design, default_gram_tolerance(design.T()));
}

inline OptimalityReport certify(const TrainingDesign& design, const PhaseConstraint& constraint, double tol) {
    auto r = certify(design, tol);
    auto f = check_feasibility(design, constraint);
    r.violations = std::move(f.violations);
    r.feasible = r.violations.empty();
    return r;
}

// ---------------------------------------------------------------------------
// Exhaustive search
// ---------------------------------------------------------------------------

struct BruteForceResult {
    OptimalityReport report;
    ComplexMatrix best_phi;
    std::size_t candidates = 0;
    std::size_t orthogonal_candidates = 0;
    double max_trace_alpha = 0.0; // largest tr(Phi^H Phi)/(K+1) over all candidates
};

inline constexpr std::size_t kBruteForceLimit = std::size_t{1} << 24;

/**
 * (K+1) / tr((Phi^H Phi)^{-1}): the common per-element inverse variance of an
 * equal-variance design. Equals alpha when Phi^H Phi = alpha I, never exceeds
 * the mean Gram diagonal, and is 0 for singular Gram matrices.
 */
inline double effective_alpha(const ComplexMatrix& gram) {
    Eigen::LLT<ComplexMatrix> llt(gram);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12)
        return 0.0;
    const ComplexMatrix inv = llt.solve(ComplexMatrix::Identity(gram.rows(), gram.cols()));
    return static_cast<double>(gram.rows()) / inv.diagonal().real().sum();
}

/**
 * Enumerates every Phi whose IRS entries are drawn from
 * {beta exp(j p) : beta in beta_grid, p in L} (beta = 0 counted once) and
 * returns the one with the largest alpha among those with
 * Phi^H Phi = alpha I. If no candidate is orthogonal, the candidate with the
 * largest effective_alpha is reported with is_orthogonal = false. Ties keep
 * the first candidate in enumeration order (row-major, first row most
 * significant, levels in the order given).
 */
inline BruteForceResult brute_force_optimum(Index T, Index K, const PhaseConstraint& constraint,
                                            const std::vector<double>& beta_grid, double tol = -1.0,
                                            std::size_t limit = kBruteForceLimit) {
    constraint.validate();
    detail::require_dims(K >= 1 && T >= K + 1, "brute_force_optimum: need K >= 1 and T >= K+1");
    detail::require_domain(!beta_grid.empty(), "brute_force_optimum: beta grid is empty");
    if (tol < 0.0)
        tol = default_gram_tolerance(T);

    std::vector<cplx> alphabet;
    bool zero_added = false;
    for (double beta : beta_grid) {
        detail::require_domain(beta >= 0.0 && beta <= 1.0, "brute_force_optimum: beta outside [0,1]");
        if (beta < constraint.beta_min - kUnitTolerance || beta > constraint.beta_max + kUnitTolerance)
            continue;
        if (beta == 0.0) {
            if (!zero_added)
                alphabet.emplace_back(0.0, 0.0);
            zero_added = true;
            continue;
        }
        for (double p : constraint.levels)
            alphabet.push_back(std::polar(beta, p));
    }
    detail::require_domain(!alphabet.empty(), "brute_force_optimum: no admissible entry values");

    const std::size_t entries = static_cast<std::size_t>(T * K);
    const std::size_t base = alphabet.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < entries; ++i) {
        if (total > limit / base)
            throw DomainError("brute_force_optimum: instance too large (" + std::to_string(base) + "^" +
                              std::to_string(entries) + " candidates exceeds " + std::to_string(limit) + ")");
        total *= base;
    }

    BruteForceResult out;
    out.candidates = total;
    ComplexMatrix phi = ComplexMatrix::Zero(T, K + 1);
    phi.col(0).setOnes();
    std::vector<std::size_t> digits(entries, 0);

    double best_orth = -1.0, best_fallback = -1.0;
    ComplexMatrix best_orth_phi, best_fallback_phi;

    for (std::size_t c = 0; c < total; ++c) {
        for (std::size_t e = 0; e < entries; ++e)
            phi(static_cast<Index>(e) / K, 1 + static_cast<Index>(e) % K) = alphabet[digits[e]];

        const ComplexMatrix gram = phi.adjoint() * phi;
        const double mean_diag = gram.diagonal().real().mean();
        out.max_trace_alpha = std::max(out.max_trace_alpha, mean_diag);

        double dev = 0.0;
        for (Index j = 0; j < gram.cols(); ++j)
            for (Index i = 0; i < gram.rows(); ++i)
                dev = std::max(dev, std::abs(gram(i, j) - (i == j ? cplx{mean_diag, 0.0} : cplx{})));
        if (dev < tol) {
            ++out.orthogonal_candidates;
            if (mean_diag > best_orth + 1e-12) {
                best_orth = mean_diag;
                best_orth_phi = phi;
            }
        } else if (best_orth < 0.0) {
            const double eff = effective_alpha(gram);
            if (eff > best_fallback + 1e-12) {
                best_fallback = eff;
                best_fallback_phi = phi;
            }
        }

        // increment, last entry fastest
        for (std::size_t e = entries; e-- > 0;) {
            if (++digits[e] < base)
                break;
            digits[e] = 0;
        }
    }

    auto& r = out.report;
    r.upper_bound = static_cast<double>(T);
    r.feasible = true;
    if (best_orth >= 0.0) {
        r.alpha = best_orth;
        r.is_orthogonal = true;
        out.best_phi = best_orth_phi;
    } else {
        r.alpha = std::max(best_fallback, 0.0);
        r.is_orthogonal = false;
        out.best_phi = best_fallback_phi;
    }
    const ComplexMatrix gram = out.best_phi.adjoint() * out.best_phi;
    for (Index j = 0; j < gram.cols(); ++j)
        for (Index i = 0; i < gram.rows(); ++i)
            if (i != j)
                r.gram_offdiag_max = std::max(r.gram_offdiag_max, std::abs(gram(i, j)));
    r.gap = r.upper_bound - r.alpha;
    return out;
}

} // namespace irsest
