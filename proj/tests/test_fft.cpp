// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "irsest/fft.hpp"
#include "oracles.hpp"

using irsest::fft::Plan;
using cplx = std::complex<double>;

namespace {

std::vector<cplx> random_signal(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<cplx> x(n);
    for (auto& v : x)
        v = {nd(rng), nd(rng)};
    return x;
}

double max_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

} // namespace

class FftLength : public ::testing::TestWithParam<std::size_t> {};

TEST_P(FftLength, ForwardMatchesNaiveDft) {
    const std::size_t n = GetParam();
    std::mt19937_64 rng(n);
    auto x = random_signal(n, rng);
    const auto expected = oracle::naive_dft(x, -1);
    Plan(n).forward(x);
    EXPECT_LE(max_err(x, expected), 1e-12 * static_cast<double>(n));
}

TEST_P(FftLength, InverseMatchesScaledNaiveDft) {
    const std::size_t n = GetParam();
    std::mt19937_64 rng(n + 1000);
    auto x = random_signal(n, rng);
    auto expected = oracle::naive_dft(x, +1);
    for (auto& v : expected)
        v /= static_cast<double>(n);
    Plan(n).inverse(x);
    EXPECT_LE(max_err(x, expected), 1e-13 * static_cast<double>(n));
}

TEST_P(FftLength, RoundTrip) {
    const std::size_t n = GetParam();
    std::mt19937_64 rng(n + 7);
    const auto x = random_signal(n, rng);
    auto y = x;
    const Plan plan(n);
    plan.forward(y);
    plan.inverse(y);
    EXPECT_LE(max_err(x, y), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Lengths, FftLength,
                         ::testing::Values(1, 2, 3, 4, 5, 7, 8, 12, 16, 17, 31, 51, 64, 81, 97, 100, 128, 255));

TEST(Fft, TwoPointInverse) {
    std::vector<cplx> x{3.0, 1.0};
    Plan(2).inverse(x);
    EXPECT_EQ(x[0], cplx(2.0));
    EXPECT_EQ(x[1], cplx(1.0));
}

TEST(Fft, LengthMismatchThrows) {
    std::vector<cplx> x(5);
    EXPECT_THROW(Plan(4).forward(x), irsest::DimensionError);
    EXPECT_THROW(Plan(0), irsest::DimensionError);
}
