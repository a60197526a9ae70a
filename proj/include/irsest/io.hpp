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
 * @file io.hpp
 * @brief Text formats: design matrices and MSE report CSV.
 *
 * Design file:
 *
 *     T K
 *     <K+1 entries of row 1>
 *     ...
 *     <K+1 entries of row T>
 *
 * Each entry is written as `re+imj` / `re-imj` with both parts in shortest
 * round-trip decimal. The reader also accepts a bare real (`1`) or a bare
 * imaginary part (`-0.5j`).
 */

#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "simulate.hpp"

namespace irsest {

/// Shortest decimal string that parses back to exactly x.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string format_complex(cplx z) {
    std::string out = format_double(z.real());
    std::string im = format_double(z.imag());
    if (im.front() != '-')
        out += '+';
    return out + im + 'j';
}

namespace detail {

inline double parse_double(std::string_view s, std::string_view context) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != last)
        throw FormatError("cannot parse number '" + std::string(s) + "' in " + std::string(context));
    return v;
}

} // namespace detail

inline cplx parse_complex(std::string_view tok) {
    if (tok.empty())
        throw FormatError("empty complex token");
    if (tok.back() != 'j' && tok.back() != 'i')
        return {detail::parse_double(tok, "complex token"), 0.0};
    tok.remove_suffix(1);
    // split at the last sign that does not belong to an exponent
    std::size_t split = std::string_view::npos;
    for (std::size_t i = tok.size(); i-- > 1;) {
        if ((tok[i] == '+' || tok[i] == '-') && tok[i - 1] != 'e' && tok[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string_view::npos) {
        if (tok.empty() || tok == "+" || tok == "-")
            return {0.0, tok == "-" ? -1.0 : 1.0};
        return {0.0, detail::parse_double(tok, "complex token")};
    }
    const auto re = tok.substr(0, split);
    auto im = tok.substr(split);
    const double imv = (im == "+" || im == "-") ? (im == "-" ? -1.0 : 1.0) : detail::parse_double(im, "complex token");
    return {detail::parse_double(re, "complex token"), imv};
}

inline void write_design(std::ostream& os, const TrainingDesign& d) {
    os << d.T() << ' ' << d.K() << '\n';
    for (Index t = 0; t < d.T(); ++t) {
        for (Index k = 0; k <= d.K(); ++k) {
            if (k)
                os << ' ';
            os << format_complex(d.phi(t, k));
        }
        os << '\n';
    }
}

/// Reads Phi; pilots default to ones and the scheme is custom.
inline TrainingDesign read_design(std::istream& is) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos)
                return true;
        }
        return false;
    };
    if (!next_line())
        throw FormatError("design file: missing header line 'T K'");
    long long T = 0, K = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> T >> K) || (hs >> extra))
            throw FormatError("design file: header must be 'T K'");
    }
    if (T < 1 || K < 1)
        throw FormatError("design file: T and K must be positive");
    ComplexMatrix phi(T, K + 1);
    for (Index t = 0; t < T; ++t) {
        if (!next_line())
            throw FormatError("design file: expected " + std::to_string(T) + " rows, got " + std::to_string(t));
        std::istringstream ls(line);
        std::string tok;
        Index k = 0;
        while (ls >> tok) {
            if (k > K)
                throw FormatError("design file: row " + std::to_string(t + 1) + " has more than K+1 entries");
            phi(t, k++) = parse_complex(tok);
        }
        if (k != K + 1)
            throw FormatError("design file: row " + std::to_string(t + 1) + " has " + std::to_string(k) +
                              " entries, expected " + std::to_string(K + 1));
    }
    if (next_line())
        throw FormatError("design file: trailing content after " + std::to_string(T) + " rows");
    return make_custom_design(std::move(phi), unit_pilots(T));
}

inline TrainingDesign load_design(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open design file '" + path + "'");
    return read_design(is);
}

inline void save_design(const std::string& path, const TrainingDesign& d) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write design file '" + path + "'");
    write_design(os, d);
    if (!os)
        throw std::runtime_error("write failed for '" + path + "'");
}

inline constexpr std::string_view kCsvHeader =
    "sweep_var,sweep_value,scheme,channel,element,mse_measured,var_analytic,reps,seed";

inline void write_csv(std::ostream& os, const MseReport& report) {
    os << kCsvHeader << '\n';
    for (const auto& r : report.rows) {
        os << r.sweep_var << ',' << format_double(r.sweep_value) << ',' << r.scheme << ',' << r.channel << ','
           << r.element << ',' << format_double(r.mse_measured) << ',' << format_double(r.var_analytic) << ','
           << r.reps << ',' << r.seed << '\n';
    }
}

inline std::string to_csv(const MseReport& report) {
    std::ostringstream os;
    write_csv(os, report);
    return os.str();
}

inline void write_csv(const std::string& path, const MseReport& report) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(os, report);
    os.flush();
    if (!os)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace irsest
