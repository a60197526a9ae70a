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

// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage error.

#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "irsest/irsest.hpp"

namespace irsest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_real(const std::string& s, const std::string& flag) {
    try {
        return detail::parse_double(s, flag);
    } catch (const FormatError&) {
        throw UsageError(flag + ": malformed number '" + s + "'");
    }
}

inline long long parse_int(const std::string& s, const std::string& flag) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw UsageError(flag + ": malformed integer '" + s + "'");
    return v;
}

/**
 * Real-valued sweep spec: a single value, a comma list, or
 * start:stop:log|lin:count (endpoints included).
 */
inline std::vector<double> parse_real_range(const std::string& spec, const std::string& flag) {
    if (spec.find(':') == std::string::npos) {
        std::vector<double> out;
        for (const auto& p : split(spec, ','))
            out.push_back(parse_real(p, flag));
        return out;
    }
    const auto parts = split(spec, ':');
    if (parts.size() != 4 || (parts[2] != "log" && parts[2] != "lin"))
        throw UsageError(flag + ": range must be start:stop:log|lin:count, got '" + spec + "'");
    const double a = parse_real(parts[0], flag), b = parse_real(parts[1], flag);
    const long long n = parse_int(parts[3], flag);
    if (n < 1)
        throw UsageError(flag + ": range count must be >= 1");
    const bool log = parts[2] == "log";
    if (log && (a <= 0.0 || b <= 0.0))
        throw UsageError(flag + ": log range needs positive endpoints");
    std::vector<double> out;
    for (long long i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        if (log)
            out.push_back(std::pow(10.0, std::log10(a) + f * (std::log10(b) - std::log10(a))));
        else
            out.push_back(a + f * (b - a));
    }
    if (n > 1) { // pin the endpoints exactly
        out.front() = a;
        out.back() = b;
    }
    return out;
}

/// Integer sweep spec: a single value, a comma list, or start:stop:step.
inline std::vector<Index> parse_int_range(const std::string& spec, const std::string& flag) {
    std::vector<Index> out;
    if (spec.find(':') == std::string::npos) {
        for (const auto& p : split(spec, ','))
            out.push_back(static_cast<Index>(parse_int(p, flag)));
        return out;
    }
    const auto parts = split(spec, ':');
    if (parts.size() != 3)
        throw UsageError(flag + ": integer range must be start:stop:step, got '" + spec + "'");
    const long long a = parse_int(parts[0], flag), b = parse_int(parts[1], flag), step = parse_int(parts[2], flag);
    if (step < 1 || b < a)
        throw UsageError(flag + ": integer range needs step >= 1 and stop >= start");
    for (long long v = a; v <= b; v += step)
        out.push_back(static_cast<Index>(v));
    return out;
}

inline PhaseConstraint make_constraint(std::size_t levels, const std::string& levels_list, double tol) {
    PhaseConstraint c;
    if (!levels_list.empty()) {
        for (const auto& p : split(levels_list, ','))
            c.levels.push_back(parse_real(p, "--levels-list"));
    } else {
        if (levels < 1)
            throw UsageError("--levels must be >= 1");
        c = PhaseConstraint::uniform(levels);
    }
    c.tolerance = tol;
    c.validate();
    return c;
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "onoff")
        return Scheme::onoff;
    if (s == "dft")
        return Scheme::dft;
    if (s == "permuted-dft")
        return Scheme::permuted_dft;
    throw UsageError("--scheme must be onoff, dft or permuted-dft");
}

inline std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string bool_str(bool b) { return b ? "true" : "false"; }

// Result sink: a file, or `out` when path is "-".
template <class Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path == "-") {
        fn(out);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    fn(f);
    f.flush();
    if (!f)
        throw std::runtime_error("write failed for '" + path + "'");
}

struct SweepFlags {
    std::string scheme = "dft";
    std::string K = "50";
    Index M = 10;
    Index T = -1; // default K+1
    Index T_extra = 0;
    std::string sigma2 = "1e-2";
    std::size_t reps = 1000;
    std::string channel = "iid";
    double r = 0.95;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::size_t threads = 0;
    bool verify = false;
    bool noiseless = false;
    bool random_pilots = false;
    bool total = false;
    std::vector<Index> track; // 1-based theta indices
    std::string design_file;
    std::size_t trial = 0;
};

inline void add_sweep_flags(CLI::App* cmd, SweepFlags& f, bool k_sweep) {
    cmd->add_option("--scheme", f.scheme, "onoff | dft | permuted-dft")->capture_default_str();
    cmd->add_option("--K", f.K, k_sweep ? "IRS elements: value, list or start:stop:step" : "IRS elements")
        ->capture_default_str();
    cmd->add_option("--M", f.M, "receive antennas")->capture_default_str();
    if (k_sweep)
        cmd->add_option("--T-extra", f.T_extra, "training periods beyond K+1")->capture_default_str();
    else
        cmd->add_option("--T", f.T, "training periods (default K+1)");
    cmd->add_option("--sigma2", f.sigma2, "noise variance: value, list or start:stop:log|lin:count")
        ->capture_default_str();
    cmd->add_option("--reps", f.reps, "Monte Carlo repetitions")->capture_default_str();
    cmd->add_option("--channel", f.channel, "iid | corr")->capture_default_str();
    cmd->add_option("--r", f.r, "antenna correlation for --channel corr")->capture_default_str();
    cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
    cmd->add_option("--out", f.out, "output path, - for stdout")->capture_default_str();
    cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores")->capture_default_str();
    cmd->add_flag("--noiseless", f.noiseless, "suppress noise (diagnostic)");
    cmd->add_flag("--random-pilots", f.random_pilots, "random unit-modulus pilots instead of ones");
}

inline ExperimentConfig build_config(const SweepFlags& f, bool k_sweep) {
    ExperimentConfig cfg;
    cfg.scheme = parse_scheme(f.scheme);
    if (f.channel == "iid")
        cfg.channel = ChannelModelKind::iid();
    else if (f.channel == "corr")
        cfg.channel = ChannelModelKind::correlated(f.r);
    else
        throw UsageError("--channel must be iid or corr");
    cfg.sigma2_values = parse_real_range(f.sigma2, "--sigma2");
    const auto Ks = parse_int_range(f.K, "--K");
    if (k_sweep) {
        if (cfg.sigma2_values.size() != 1)
            throw UsageError("sweep-k takes a single --sigma2 value");
        cfg.K_values = Ks;
        cfg.T_extra = f.T_extra;
        if (Ks.size() == 1) {
            cfg.dims.K = Ks.front();
            cfg.dims.T = Ks.front() + 1 + f.T_extra;
            cfg.K_values.clear();
        }
    } else {
        if (Ks.size() != 1)
            throw UsageError("sweep-sigma takes a single --K value (use sweep-k)");
        cfg.dims.K = Ks.front();
        cfg.dims.T = f.T < 0 ? cfg.dims.K + 1 : f.T;
    }
    cfg.dims.M = f.M;
    cfg.reps = f.reps;
    cfg.seed = f.seed;
    cfg.threads = f.threads;
    cfg.verify = f.verify;
    cfg.noiseless = f.noiseless;
    cfg.random_pilots = f.random_pilots;
    cfg.track_total = f.total;
    for (Index i : f.track) {
        if (i < 1)
            throw UsageError("--track indices are 1-based");
        cfg.tracked.push_back(i - 1);
    }
    if (!f.design_file.empty()) {
        cfg.custom_design = load_design(f.design_file);
        cfg.scheme = Scheme::custom;
    }
    cfg.validate();
    return cfg;
}

inline void print_report(std::ostream& os, const OptimalityReport& r, double tol_scale) {
    const double gap = std::abs(r.gap) < 1e-12 * tol_scale ? 0.0 : r.gap;
    os << "alpha=" << fmt_g(r.alpha) << " orthogonal=" << bool_str(r.is_orthogonal) << " gap=" << fmt_g(gap)
       << " upper_bound=" << fmt_g(r.upper_bound) << " offdiag_max=" << fmt_g(r.gram_offdiag_max)
       << " feasible=" << bool_str(r.feasible) << " violations=" << r.violations.size() << '\n';
    for (const auto& v : r.violations)
        os << "violation t=" << v.t + 1 << " k=" << v.k + 1 << ": " << v.reason << '\n';
}

/// Runs the CLI on argv-style arguments (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"irsest: IRS training design and least-squares channel estimation"};
    app.require_subcommand(1);

    SweepFlags sigma_flags, k_flags, dump_flags;
    auto* sweep_sigma = app.add_subcommand("sweep-sigma", "MSE versus noise variance");
    add_sweep_flags(sweep_sigma, sigma_flags, false);
    sweep_sigma->add_flag("--verify", sigma_flags.verify, "also report the QR reference solver");
    sweep_sigma->add_flag("--total", sigma_flags.total, "add a row with the summed MSE over all elements");
    sweep_sigma->add_option("--track", sigma_flags.track, "1-based theta indices to report");
    sweep_sigma->add_option("--design-file", sigma_flags.design_file, "custom design (estimated with QR)");

    auto* sweep_k = app.add_subcommand("sweep-k", "MSE versus number of IRS elements");
    k_flags.K = "10:100:10";
    add_sweep_flags(sweep_k, k_flags, true);
    sweep_k->add_flag("--verify", k_flags.verify, "also report the QR reference solver");
    sweep_k->add_flag("--total", k_flags.total, "add a row with the summed MSE over all elements");
    sweep_k->add_option("--track", k_flags.track, "1-based theta indices to report");

    auto* dump = app.add_subcommand("trial-dump", "dump theta, estimate and error of one trial");
    add_sweep_flags(dump, dump_flags, false);
    dump->add_option("--trial", dump_flags.trial, "trial index")->capture_default_str();

    std::string design_file;
    std::size_t levels = 0;
    std::string levels_list;
    double phase_tol = 1e-9;
    double gram_tol = -1.0;
    auto* cert = app.add_subcommand("certify-design", "optimality certificate for a design file");
    cert->add_option("--design-file", design_file, "design matrix file")->required();
    cert->add_option("--levels", levels, "uniform phase alphabet size");
    cert->add_option("--levels-list", levels_list, "comma-separated phases in radians");
    cert->add_option("--phase-tol", phase_tol, "phase membership tolerance (rad)")->capture_default_str();
    cert->add_option("--tol", gram_tol, "Gram orthogonality tolerance (default 1e-8 T)");

    Index bf_T = 2, bf_K = 1;
    std::size_t bf_levels = 2;
    std::string bf_levels_list, bf_beta = "1";
    auto* brute = app.add_subcommand("brute-force", "exhaustive search over a small design space");
    brute->add_option("--T", bf_T, "training periods")->capture_default_str();
    brute->add_option("--K", bf_K, "IRS elements")->capture_default_str();
    brute->add_option("--levels", bf_levels, "uniform phase alphabet size")->capture_default_str();
    brute->add_option("--levels-list", bf_levels_list, "comma-separated phases in radians");
    brute->add_option("--beta", bf_beta, "comma-separated attenuation grid")->capture_default_str();

    std::string ex_scheme = "dft", ex_out = "-";
    Index ex_T = -1, ex_K = 1;
    std::uint64_t ex_seed = 1;
    auto* exp = app.add_subcommand("export-design", "write a generated design in design-file format");
    exp->add_option("--scheme", ex_scheme, "onoff | dft | permuted-dft")->capture_default_str();
    exp->add_option("--T", ex_T, "training periods (default K+1)");
    exp->add_option("--K", ex_K, "IRS elements")->capture_default_str();
    exp->add_option("--seed", ex_seed, "permutation seed for permuted-dft")->capture_default_str();
    exp->add_option("--out", ex_out, "output path, - for stdout")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    // Validation: every usage problem is reported before any computation.
    ExperimentConfig cfg;
    std::optional<TrainingDesign> design;
    PhaseConstraint constraint;
    std::vector<double> beta_grid;
    try {
        if (*sweep_sigma)
            cfg = build_config(sigma_flags, false);
        else if (*sweep_k)
            cfg = build_config(k_flags, true);
        else if (*dump) {
            cfg = build_config(dump_flags, false);
            if (cfg.sigma2_values.size() != 1)
                throw UsageError("trial-dump takes a single --sigma2 value");
        } else if (*cert) {
            if (levels == 0 && levels_list.empty())
                throw UsageError("certify-design needs --levels or --levels-list");
            constraint = make_constraint(levels, levels_list, phase_tol);
        } else if (*brute) {
            constraint = make_constraint(bf_levels, bf_levels_list, 1e-9);
            for (const auto& b : split(bf_beta, ','))
                beta_grid.push_back(parse_real(b, "--beta"));
            if (bf_K < 1 || bf_T < bf_K + 1)
                throw UsageError("brute-force needs K >= 1 and T >= K+1");
        } else if (*exp) {
            if (ex_T < 0)
                ex_T = ex_K + 1;
            const auto scheme = parse_scheme(ex_scheme);
            if (ex_K < 1 || ex_T < ex_K + 1)
                throw UsageError("export-design needs K >= 1 and T >= K+1");
            if (scheme == Scheme::onoff) {
                if (ex_T != ex_K + 1)
                    throw UsageError("onoff design needs T = K+1");
                design = onoff_design(ex_K);
            } else if (scheme == Scheme::dft) {
                design = dft_design(ex_T, ex_K);
            } else {
                Rng rng(ex_seed);
                auto [p1, p2] = random_dft_permutations(ex_T, rng);
                design = permuted_dft_design(ex_T, ex_K, p1, p2, unit_pilots(ex_T));
            }
        }
    } catch (const std::invalid_argument& e) { // UsageError, DimensionError, DomainError
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }

    try {
        if (*sweep_sigma || *sweep_k) {
            const auto report = run_sweep(cfg);
            with_output(*sweep_sigma ? sigma_flags.out : k_flags.out, out,
                        [&](std::ostream& os) { write_csv(os, report); });
        } else if (*dump) {
            const auto ctx = make_point_context(cfg, sweep_points(cfg).front());
            const auto trial = run_trial(cfg, ctx, dump_flags.trial);
            with_output(dump_flags.out, out, [&](std::ostream& os) {
                os << "index,element,theta_re,theta_im,estimate_re,estimate_im,error_re,error_im\n";
                for (Index i = 0; i < trial.theta.size(); ++i) {
                    const cplx th = trial.theta(i), e = trial.error(i), est = th - e;
                    os << i + 1 << ',' << element_label(i, cfg.dims.M) << ',' << format_double(th.real()) << ','
                       << format_double(th.imag()) << ',' << format_double(est.real()) << ','
                       << format_double(est.imag()) << ',' << format_double(e.real()) << ','
                       << format_double(e.imag()) << '\n';
                }
            });
        } else if (*cert) {
            const auto d = load_design(design_file);
            const double tol = gram_tol < 0.0 ? default_gram_tolerance(d.T()) : gram_tol;
            print_report(out, certify(d, constraint, tol), static_cast<double>(d.T()));
        } else if (*brute) {
            const auto res = brute_force_optimum(bf_T, bf_K, constraint, beta_grid);
            print_report(out, res.report, static_cast<double>(bf_T));
            out << "candidates=" << res.candidates << " orthogonal_candidates=" << res.orthogonal_candidates
                << " max_trace_alpha=" << fmt_g(res.max_trace_alpha) << '\n';
            TrainingDesign best{res.best_phi, unit_pilots(bf_T), Scheme::custom, std::nullopt};
            write_design(out, best);
        } else if (*exp) {
            with_output(ex_out, out, [&](std::ostream& os) { write_design(os, *design); });
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace irsest::cli
