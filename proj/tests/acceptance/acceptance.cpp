// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli.hpp"
#include "irsest/irsest.hpp"

using namespace irsest;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) {
        if (pass)
            detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

double rel(double measured, double expected) {
    return std::abs(measured - expected) / std::abs(expected);
}

// Reference setup: K=50, M=10, T=51, sigma2=1e-2, R=1000.
ExperimentConfig reference_config(Scheme scheme, ChannelModelKind channel = ChannelModelKind::iid()) {
    ExperimentConfig cfg;
    cfg.scheme = scheme;
    cfg.dims = {10, 50, 51, std::nullopt};
    cfg.sigma2_values = {1e-2};
    cfg.reps = 1000;
    cfg.seed = 20240601;
    cfg.channel = channel;
    cfg.threads = 1;
    return cfg;
}

struct Cache {
    std::optional<MseReport> onoff_iid, dft_iid;
    double onoff_seconds = 0.0;

    const MseReport& onoff() {
        if (!onoff_iid) {
            const auto t0 = std::chrono::steady_clock::now();
            onoff_iid = run_sweep(reference_config(Scheme::onoff));
            onoff_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        return *onoff_iid;
    }
    const MseReport& dft() {
        if (!dft_iid)
            dft_iid = run_sweep(reference_config(Scheme::dft));
        return *dft_iid;
    }
};

Cache cache;

Outcome a1() {
    Outcome o;
    const auto& rep = cache.onoff();
    const double hd = rep.rows.at(0).mse_measured, v1 = rep.rows.at(1).mse_measured;
    o.require(rep.rows[0].element == "hd_1" && rep.rows[1].element == "v1_1", "unexpected row layout");
    o.require(rel(hd, 1e-2) <= 0.15, "hd_1 mse " + num(hd) + " not within 15% of 1e-2");
    o.require(rel(v1, 2e-2) <= 0.15, "v1_1 mse " + num(v1) + " not within 15% of 2e-2");
    o.require(cache.onoff_seconds < 30.0, "runtime " + num(cache.onoff_seconds) + " s >= 30 s");
    o.note("hd_1=" + num(hd) + " v1_1=" + num(v1) + " runtime=" + num(cache.onoff_seconds) + "s");
    return o;
}

Outcome a2() {
    Outcome o;
    const auto& rep = cache.dft();
    const auto& on = cache.onoff();
    const double target = 1e-2 / 51;
    for (std::size_t i = 0; i < 2; ++i) {
        const double m = rep.rows.at(i).mse_measured;
        o.require(rel(m, target) <= 0.15, rep.rows[i].element + " mse " + num(m) + " not within 15% of " + num(target));
    }
    const double r_hd = on.rows[0].mse_measured / rep.rows[0].mse_measured;
    const double r_v1 = on.rows[1].mse_measured / rep.rows[1].mse_measured;
    o.require(r_hd >= 40.0, "h_d ratio " + num(r_hd) + " < 40");
    o.require(r_v1 >= 80.0, "v1 ratio " + num(r_v1) + " < 80");
    o.note("hd_1=" + num(rep.rows[0].mse_measured) + " v1_1=" + num(rep.rows[1].mse_measured) +
           " ratio_hd=" + num(r_hd) + " ratio_v1=" + num(r_v1));
    return o;
}

Outcome a3() {
    Outcome o;
    const auto corr = ChannelModelKind::correlated(0.95);
    const std::pair<Scheme, const MseReport*> cases[] = {{Scheme::onoff, &cache.onoff()}, {Scheme::dft, &cache.dft()}};
    double worst = 0.0;
    for (const auto& [scheme, iid] : cases) {
        const auto rep = run_sweep(reference_config(scheme, corr));
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            const double d = rel(rep.rows[i].mse_measured, iid->rows.at(i).mse_measured);
            worst = std::max(worst, d);
            o.require(d <= 0.15, std::string(to_string(scheme)) + " " + rep.rows[i].element + " differs by " + num(d));
        }
    }
    o.note("max relative difference " + num(worst));
    return o;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log10(x[i]);
        my += std::log10(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log10(x[i]) - mx;
        sxy += dx * (std::log10(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

Outcome a4() {
    Outcome o;
    const auto sigma2 = cli::parse_real_range("1e-4:1:log:9", "sigma2");
    std::string summary;
    for (Scheme scheme : {Scheme::onoff, Scheme::dft}) {
        auto cfg = reference_config(scheme);
        cfg.sigma2_values = sigma2;
        cfg.threads = 0;
        const auto rep = run_sweep(cfg);
        for (const std::string element : {"hd_1", "v1_1"}) {
            std::vector<double> x, y;
            for (const auto& r : rep.rows)
                if (r.element == element) {
                    x.push_back(r.sweep_value);
                    y.push_back(r.mse_measured);
                }
            o.require(x.size() == 9, "expected 9 points");
            const double slope = loglog_slope(x, y);
            o.require(std::abs(slope - 1.0) <= 0.05,
                      std::string(to_string(scheme)) + " " + element + " slope " + num(slope));
            summary += std::string(summary.empty() ? "" : " ") + std::string(to_string(scheme)) + "/" + element + "=" + num(slope);
        }
    }
    o.note("slopes " + summary);
    return o;
}

Outcome a5() {
    Outcome o;
    std::string summary;
    for (Scheme scheme : {Scheme::dft, Scheme::onoff}) {
        auto cfg = reference_config(scheme);
        cfg.K_values = {10, 20, 40, 80};
        cfg.threads = 0;
        const auto rep = run_sweep(cfg);
        for (const std::string element : {"hd_1", "v1_1"}) {
            double lo = INFINITY, hi = 0.0;
            for (const auto& r : rep.rows) {
                if (r.element != element)
                    continue;
                const double v = scheme == Scheme::dft ? r.mse_measured * (r.sweep_value + 1) : r.mse_measured;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double spread = hi / lo - 1.0;
            o.require(spread <= 0.20, std::string(to_string(scheme)) + " " + element + " spread " + num(spread));
            summary += std::string(summary.empty() ? "" : " ") + std::string(to_string(scheme)) + "/" + element + "=" + num(spread);
        }
    }
    o.note("max/min-1 " + summary);
    return o;
}

ComplexVector random_pilots(Index T, Rng& rng) {
    ComplexVector x(T);
    for (Index t = 0; t < T; ++t)
        x(t) = random_unit_symbol(rng);
    return x;
}

Outcome a6() {
    Outcome o;
    Rng rng(606);
    std::uniform_int_distribution<Index> Tdist(2, 64), Mdist(1, 4);
    double worst = 0.0;
    int npow2 = 0;
    for (int inst = 0; inst < 100; ++inst) {
        Index T = inst == 0 ? 2 : inst == 1 ? 64 : Tdist(rng);
        const Index M = Mdist(rng);
        Index K = T - 1;
        TrainingDesign d;
        const int kind = inst % 3;
        if (kind == 0) {
            d = onoff_design(K, random_pilots(T, rng));
        } else {
            K = std::uniform_int_distribution<Index>(1, T - 1)(rng);
            if (kind == 1) {
                d = dft_design(T, K, random_pilots(T, rng));
            } else {
                auto [p1, p2] = random_dft_permutations(T, rng);
                d = permuted_dft_design(T, K, p1, p2, random_pilots(T, rng));
            }
        }
        npow2 += (T & (T - 1)) != 0;
        const SystemDims dims{M, K, T, std::nullopt};
        const auto st = gen_channel(dims, ChannelModelKind::iid(), rng);
        const auto s = synthesize(st, d, 0.1, rng).s;
        const auto fast = kind == 0 ? onoff_estimate_fast(s, d.pilots, dims)
                                    : dft_estimate_fft(s, d.pilots, dims, &*d.dft);
        const auto ref = ls_estimate(build_system_matrix(d, M), s, M);
        const double dev = (fast.theta_hat - ref.theta_hat).norm() / ref.theta_hat.norm();
        worst = std::max(worst, dev);
    }
    o.require(worst < 1e-9, "max relative deviation " + num(worst));
    o.require(npow2 > 0, "no non-power-of-two T drawn");
    o.note("max relative deviation " + num(worst) + " (" + std::to_string(npow2) + " non-power-of-two T)");
    return o;
}

Outcome a7() {
    Outcome o;
    double worst = 0.0;
    for (Index K : {1, 2, 5, 10, 50}) {
        ComplexMatrix closed = ComplexMatrix::Ones(K + 1, K + 1);
        closed.row(0).setConstant(-1.0);
        closed.col(0).setConstant(-1.0);
        closed(0, 0) = 1.0;
        closed.bottomRightCorner(K, K) += ComplexMatrix::Identity(K, K);
        worst = std::max(worst, max_abs_diff(gram_inverse(onoff_design(K)), closed));
    }
    o.require(worst <= 1e-10, "max abs deviation " + num(worst));
    o.note("max abs deviation " + num(worst));
    return o;
}

Outcome a8() {
    Outcome o;
    int certified = 0;
    for (Index T = 2; T <= 64; T += (T < 12 ? 1 : 7)) {
        for (Index K : {Index{1}, T / 2, T - 1}) {
            if (K < 1)
                continue;
            const auto r = certify(dft_design(T, K));
            ++certified;
            o.require(r.is_orthogonal && std::abs(r.gap) < 1e-9 && std::abs(r.alpha - double(T)) < 1e-9,
                      "dft(" + std::to_string(T) + "," + std::to_string(K) + ") alpha=" + num(r.alpha));
        }
    }
    for (Index T : {2, 3}) {
        const auto res = brute_force_optimum(T, 1, PhaseConstraint::uniform(static_cast<std::size_t>(T)), {0.0, 0.5, 1.0});
        o.require(res.report.is_orthogonal && std::abs(res.report.alpha - double(T)) < 1e-9,
                  "brute force T=" + std::to_string(T) + " alpha*=" + num(res.report.alpha));
        o.require(res.max_trace_alpha <= double(T) + 1e-9,
                  "brute force T=" + std::to_string(T) + " candidate with alpha " + num(res.max_trace_alpha));
        o.note("T=" + std::to_string(T) + ": alpha*=" + num(res.report.alpha) + " over " +
               std::to_string(res.candidates) + " candidates");
    }
    o.note(std::to_string(certified) + " DFT designs certified");
    return o;
}

Outcome a9() {
    Outcome o;
    Rng rng(909);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double sigma2 = 1.0;
    int diagonal = 0, dense = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const Index K = 1 + inst % 7, T = K + 1 + inst % 4;
        TrainingDesign d;
        switch (inst % 5) {
        case 0: d = dft_design(T, K); break;
        case 1: {
            auto [p1, p2] = random_dft_permutations(T, rng);
            d = permuted_dft_design(T, K, p1, p2, unit_pilots(T));
            break;
        }
        case 2: { // column-scaled DFT: Gram stays diagonal but not scalar
            ComplexMatrix phi = dft_columns(T, K + 1);
            for (Index k = 1; k <= K; ++k)
                phi.col(k) *= 0.2 + 0.8 * u(rng);
            d = make_custom_design(phi, unit_pilots(T));
            break;
        }
        case 3: d = onoff_design(K); break;
        default: {
            ComplexMatrix phi(T, K + 1);
            for (Index t = 0; t < T; ++t) {
                phi(t, 0) = 1.0;
                for (Index k = 1; k <= K; ++k)
                    phi(t, k) = std::polar(0.3 + 0.7 * u(rng), 2.0 * M_PI * std::floor(8.0 * u(rng)) / 8.0);
            }
            d = make_custom_design(phi, unit_pilots(T));
        }
        }
        const auto cov = covariance(d, sigma2, 1);
        const RealVector bound = cov.fisher_diag.cwiseInverse();
        const RealVector diff = cov.per_element_variance - bound;
        o.require(diff.minCoeff() >= -1e-12, "variance below bound by " + num(-diff.minCoeff()));
        ComplexMatrix g = gram(d);
        g.diagonal().setZero();
        const bool is_diag = g.cwiseAbs().maxCoeff() < default_gram_tolerance(d.T());
        const bool equal = diff.cwiseAbs().maxCoeff() <= 1e-10;
        o.require(is_diag == equal, std::string("instance ") + std::to_string(inst) + ": diagonal Gram=" +
                                        (is_diag ? "yes" : "no") + " but bound attained=" + (equal ? "yes" : "no"));
        (is_diag ? diagonal : dense)++;
    }
    o.note(std::to_string(diagonal) + " diagonal-Gram designs attain the bound, " + std::to_string(dense) +
           " others exceed it");
    return o;
}

Outcome a10() {
    Outcome o;
    std::vector<ExperimentConfig> configs;
    {
        auto cfg = reference_config(Scheme::permuted_dft, ChannelModelKind::correlated(0.9));
        cfg.dims = {4, 12, 15, std::nullopt};
        cfg.sigma2_values = {1e-3, 1e-2, 1e-1};
        cfg.random_pilots = true;
        cfg.track_total = true;
        cfg.verify = true;
        cfg.reps = 300;
        configs.push_back(cfg);
    }
    {
        auto cfg = reference_config(Scheme::onoff);
        cfg.dims.M = 3;
        cfg.K_values = {4, 9, 17};
        cfg.reps = 300;
        configs.push_back(cfg);
    }
    for (std::size_t c = 0; c < configs.size(); ++c) {
        auto cfg = configs[c];
        cfg.threads = 1;
        const auto first = to_csv(run_sweep(cfg));
        const auto again = to_csv(run_sweep(cfg));
        cfg.threads = 4;
        const auto four = to_csv(run_sweep(cfg));
        cfg.threads = 7;
        const auto seven = to_csv(run_sweep(cfg));
        o.require(first == again && first == four && first == seven,
                  "sweep " + std::to_string(c) + " output differs between runs");
    }
    // same check through the command-line front end
    auto cli_csv = [](const char* threads) {
        std::ostringstream out, err;
        cli::run({"irsest", "sweep-sigma", "--scheme", "dft", "--K", "8", "--M", "2", "--sigma2", "1e-3:1e-1:log:3",
                  "--reps", "200", "--seed", "5", "--threads", threads},
                 out, err);
        return out.str();
    };
    const auto c1 = cli_csv("1"), c3 = cli_csv("3");
    o.require(!c1.empty() && c1 == c3, "command-line output differs between thread counts");
    o.note("byte-identical across repeated runs and 1/4/7 threads");
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"A1 on/off variance", a1},          {"A2 DFT variance", a2},
        {"A3 channel independence", a3},     {"A4 noise sweep slope", a4},
        {"A5 K sweep shape", a5},            {"A6 fast solvers match QR", a6},
        {"A7 on/off Gram inverse", a7},      {"A8 design optimality", a8},
        {"A9 CRLB bound", a9},               {"A10 determinism", a10},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
