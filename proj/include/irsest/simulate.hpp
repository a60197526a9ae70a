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
 * @file simulate.hpp
 * @brief Seeded Monte Carlo engine for estimator MSE sweeps.
 *
 * Every trial owns its random streams. They are derived from
 * (master seed, sweep index, trial index, substream tag), so a trial's
 * channel and noise do not depend on the scheme, on the execution order or
 * on the number of worker threads. Per-trial errors are written to fixed
 * slots and reduced sequentially in trial order, which keeps the report
 * bit-identical for any thread count.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "estimate.hpp"

namespace irsest {

struct ExperimentConfig {
    SystemDims dims{10, 50, 51, std::nullopt};
    Scheme scheme = Scheme::dft;
    ChannelModelKind channel;
    std::vector<double> sigma2_values{1e-2};
    std::vector<Index> K_values; // empty: use dims.K
    Index T_extra = 0;           // K sweeps use T = K + 1 + T_extra
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    std::vector<Index> tracked; // empty: [h_d]_1 and [v_1]_1
    bool track_total = false;
    bool noiseless = false;
    bool random_pilots = false;
    bool verify = false; // also run the QR reference solver on every trial
    std::size_t threads = 1; // 0: hardware concurrency
    std::optional<TrainingDesign> custom_design;

    bool sweeps_K() const { return K_values.size() > 1; }

    std::vector<Index> tracked_indices() const {
        if (!tracked.empty())
            return tracked;
        return {0, dims.M};
    }

    void validate() const;
};

struct SweepPoint {
    std::size_t index = 0;
    SystemDims dims;
    double sigma2 = 1.0;

    double sweep_value(bool K_axis) const { return K_axis ? static_cast<double>(dims.K) : sigma2; }
};

inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
    std::vector<SweepPoint> pts;
    if (cfg.sweeps_K()) {
        for (std::size_t i = 0; i < cfg.K_values.size(); ++i) {
            const Index K = cfg.K_values[i];
            pts.push_back({i, SystemDims{cfg.dims.M, K, K + 1 + cfg.T_extra, std::nullopt}, cfg.sigma2_values.front()});
        }
    } else {
        SystemDims d = cfg.dims;
        if (cfg.K_values.size() == 1) {
            d.K = cfg.K_values.front();
            d.T = d.K + 1 + cfg.T_extra;
        }
        if (cfg.custom_design) {
            d.K = cfg.custom_design->K();
            d.T = cfg.custom_design->T();
        }
        for (std::size_t i = 0; i < cfg.sigma2_values.size(); ++i)
            pts.push_back({i, d, cfg.sigma2_values[i]});
    }
    return pts;
}

inline void ExperimentConfig::validate() const {
    detail::require_domain(reps >= 1, "ExperimentConfig: reps must be >= 1");
    detail::require_domain(!sigma2_values.empty(), "ExperimentConfig: no sigma2 values");
    detail::require_domain(!(sigma2_values.size() > 1 && K_values.size() > 1),
                           "ExperimentConfig: only one of sigma2 and K may be swept");
    for (double s2 : sigma2_values)
        detail::require_domain(s2 > 0.0, "ExperimentConfig: sigma2 must be > 0");
    detail::require_dims(T_extra >= 0, "ExperimentConfig: T_extra must be >= 0");
    channel.validate();
    if (scheme == Scheme::custom)
        detail::require_domain(custom_design.has_value(), "ExperimentConfig: custom scheme needs a design");
    for (const auto& p : sweep_points(*this)) {
        p.dims.validate();
        if (scheme == Scheme::onoff)
            detail::require_dims(p.dims.T == p.dims.K + 1, "ExperimentConfig: on/off scheme needs T = K+1");
        for (Index i : tracked_indices())
            detail::require_dims(i >= 0 && i < p.dims.theta_size(),
                                 "ExperimentConfig: tracked index " + std::to_string(i) + " out of range");
    }
}

/// Pilots and design for one sweep point; shared read-only by all its trials.
struct PointContext {
    SweepPoint point;
    TrainingDesign design;
    std::optional<fft::Plan> plan;
};

inline PointContext make_point_context(const ExperimentConfig& cfg, const SweepPoint& p) {
    const Index T = p.dims.T, K = p.dims.K;
    ComplexVector pilots = unit_pilots(T);
    if (cfg.random_pilots) {
        auto rng = make_stream(cfg.seed, p.index, 0, Substream::pilots);
        for (Index t = 0; t < T; ++t)
            pilots(t) = random_unit_symbol(rng);
    }
    PointContext ctx{p, {}, std::nullopt};
    switch (cfg.scheme) {
    case Scheme::onoff: ctx.design = onoff_design(K, pilots); break;
    case Scheme::dft: ctx.design = dft_design(T, K, pilots); break;
    case Scheme::permuted_dft: {
        auto rng = make_stream(cfg.seed, p.index, 0, Substream::design);
        auto [p1, p2] = random_dft_permutations(T, rng);
        ctx.design = permuted_dft_design(T, K, p1, p2, pilots);
        break;
    }
    case Scheme::custom:
        ctx.design = *cfg.custom_design;
        if (cfg.random_pilots)
            ctx.design.pilots = pilots;
        break;
    }
    if (ctx.design.dft)
        ctx.plan.emplace(static_cast<std::size_t>(T));
    return ctx;
}

struct TrialOutcome {
    ComplexVector theta;
    ComplexVector error;           // theta - theta_hat (fast solver)
    ComplexVector reference_error; // QR solver, only with verify
};

inline TrialOutcome run_trial(const ExperimentConfig& cfg, const PointContext& ctx, std::size_t trial) {
    const auto& p = ctx.point;
    auto channel_rng = make_stream(cfg.seed, p.index, trial, Substream::channel);
    auto noise_rng = make_stream(cfg.seed, p.index, trial, Substream::noise);
    const ChannelState state = gen_channel(p.dims, cfg.channel, channel_rng);
    const auto obs = synthesize(state, ctx.design, p.sigma2, noise_rng, cfg.noiseless ? Noise::suppressed : Noise::on);
    const auto est = estimate(ctx.design, obs.s, p.dims.M, ctx.plan ? &*ctx.plan : nullptr);

    TrialOutcome out;
    out.theta = state.theta_vector();
    out.error = out.theta - est.theta_hat;
    if (cfg.verify)
        out.reference_error = out.theta - ls_estimate(ctx.design, obs.s, p.dims.M).theta_hat;
    return out;
}

/// Convenience overload that builds the point context itself.
inline TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t sweep_index, std::size_t trial) {
    const auto pts = sweep_points(cfg);
    detail::require_dims(sweep_index < pts.size(), "run_trial: sweep index out of range");
    return run_trial(cfg, make_point_context(cfg, pts[sweep_index]), trial);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct MseRow {
    std::string sweep_var; // "sigma2" or "K"
    double sweep_value = 0.0;
    std::string scheme;
    std::string channel;
    std::string element;
    double mse_measured = 0.0;
    double var_analytic = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    cplx mean_error{}; // not exported; used for bias checks
};

struct MseReport {
    std::vector<MseRow> rows;
};

/// "hd_m" or "vk_m" (1-based) for theta index i, given M.
inline std::string element_label(Index i, Index M) {
    const Index block = i / M, m = i % M + 1;
    if (block == 0)
        return "hd_" + std::to_string(m);
    return "v" + std::to_string(block) + "_" + std::to_string(m);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (threads == 0)
        threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace detail

/**
 * Runs R trials at every sweep point and reports, per tracked element,
 * MSE = (1/R) sum_r |e_r[i]|^2 next to the analytic variance from
 * covariance(). With track_total an extra "total" row carries the summed
 * MSE over all (K+1)M elements.
 */
inline MseReport run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const bool K_axis = cfg.sweeps_K();
    const auto tracked = cfg.tracked_indices();
    const std::size_t n_tracked = tracked.size();
    const std::size_t slots = n_tracked + (cfg.track_total ? 1 : 0);
    const int n_solvers = cfg.verify ? 2 : 1;

    MseReport report;
    for (const auto& point : sweep_points(cfg)) {
        const auto ctx = make_point_context(cfg, point);
        const auto crlb = covariance(ctx.design, point.sigma2, point.dims.M);

        // errs[(solver * R + r) * slots + slot]; the total slot stores |e|^2 in real().
        std::vector<cplx> errs(static_cast<std::size_t>(n_solvers) * cfg.reps * slots);
        try {
            detail::parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) {
                const auto out = run_trial(cfg, ctx, r);
                for (int s = 0; s < n_solvers; ++s) {
                    const auto& e = s == 0 ? out.error : out.reference_error;
                    cplx* dst = &errs[(static_cast<std::size_t>(s) * cfg.reps + r) * slots];
                    for (std::size_t i = 0; i < n_tracked; ++i)
                        dst[i] = e(tracked[i]);
                    if (cfg.track_total)
                        dst[n_tracked] = e.squaredNorm();
                }
            });
        } catch (const std::exception& ex) {
            throw std::runtime_error("run_sweep: sweep point " + std::to_string(point.index) + ": " + ex.what());
        }

        for (int s = 0; s < n_solvers; ++s) {
            std::string scheme{to_string(cfg.scheme)};
            if (s == 1)
                scheme += "-reference";
            for (std::size_t slot = 0; slot < slots; ++slot) {
                CompensatedSum sq, re, im;
                for (std::size_t r = 0; r < cfg.reps; ++r) {
                    const cplx e = errs[(static_cast<std::size_t>(s) * cfg.reps + r) * slots + slot];
                    if (slot == n_tracked) {
                        sq.add(e.real());
                    } else {
                        sq.add(std::norm(e));
                        re.add(e.real());
                        im.add(e.imag());
                    }
                }
                const double R = static_cast<double>(cfg.reps);
                MseRow row;
                row.sweep_var = K_axis ? "K" : "sigma2";
                row.sweep_value = point.sweep_value(K_axis);
                row.scheme = scheme;
                row.channel = cfg.channel.label();
                row.mse_measured = sq.value() / R;
                row.reps = cfg.reps;
                row.seed = cfg.seed;
                if (slot == n_tracked) {
                    row.element = "total";
                    row.var_analytic = crlb.per_element_variance.sum();
                } else {
                    row.element = element_label(tracked[slot], point.dims.M);
                    row.var_analytic = crlb.per_element_variance(tracked[slot]);
                    row.mean_error = {re.value() / R, im.value() / R};
                }
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

struct SchemeComparison {
    MseReport first;
    MseReport second;
    std::vector<double> ratio; // first.mse / second.mse, row by row
};

/// Runs two schemes on common random numbers (same channel and noise draws).
inline SchemeComparison compare_schemes(const ExperimentConfig& cfg, Scheme first, Scheme second) {
    auto a = cfg;
    a.scheme = first;
    auto b = cfg;
    b.scheme = second;
    SchemeComparison out{run_sweep(a), run_sweep(b), {}};
    detail::require_dims(out.first.rows.size() == out.second.rows.size(),
                         "compare_schemes: reports have different shapes");
    for (std::size_t i = 0; i < out.first.rows.size(); ++i)
        out.ratio.push_back(out.first.rows[i].mse_measured / out.second.rows[i].mse_measured);
    return out;
}

} // namespace irsest
