// Copyright 2026 The VAM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "vam/statistics.hpp"

using namespace vam;
using namespace vam::stats;

namespace {

// Independent oracle: full sort, then pick or average the middle.
double sorted_median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

BootstrapParams params(std::uint64_t seed, std::size_t resamples = 10000)
{
    return {resamples, 0.95, seed};
}

} // namespace

TEST(Median, Examples)
{
    EXPECT_EQ(median(std::vector<double>{40}), 40);
    EXPECT_EQ(median(std::vector<double>{5, 10, 20, 40}), 15);
    EXPECT_EQ(median(std::vector<double>{40, 5, 20}), 20);
    EXPECT_THROW(median(std::vector<double>{}), ValidationError);
}

TEST(Median, MatchesSortOracleAndIsOrderFree)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(1, 60), val(0, 100);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> v(len(rng));
        for (auto& x : v)
            x = val(rng);
        const double m = median(v);
        ASSERT_EQ(m, sorted_median(v));
        std::shuffle(v.begin(), v.end(), rng);
        ASSERT_EQ(median(v), m);
        auto doubled = v;
        doubled.insert(doubled.end(), v.begin(), v.end());
        ASSERT_EQ(median(doubled), m);
    }
}

TEST(Quantile, LinearInterpolation)
{
    std::vector<double> v{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.0), 1);
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 1.0), 4);
    EXPECT_DOUBLE_EQ(sorted_quantile(v, 1.0 / 3), 2);
}

TEST(Bootstrap, DegenerateSampleCollapses)
{
    std::vector<double> v(117, 10.0);
    auto ci = bootstrap_median_ci(v, params(1));
    EXPECT_EQ(ci.low, 10);
    EXPECT_EQ(ci.high, 10);
}

TEST(Bootstrap, OneToHundredIsDeterministic)
{
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    auto a = bootstrap_median_ci(v, params(42));
    auto b = bootstrap_median_ci(v, params(42));
    EXPECT_GE(a.low, 1);
    EXPECT_LE(a.high, 100);
    EXPECT_TRUE(a.contains(50.5));
    EXPECT_LT(a.low, 50.5);
    EXPECT_GT(a.high, 50.5);
    // Bit-identical rerun.
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
    auto c = bootstrap_median_ci(v, params(43));
    EXPECT_TRUE(c.contains(50.5));
}

TEST(Bootstrap, RejectsInsufficientInput)
{
    std::vector<double> one{1};
    EXPECT_THROW(bootstrap_median_ci(one, params(1)), ValidationError);
    std::vector<double> two{1, 2};
    EXPECT_THROW(bootstrap_median_ci(two, params(1, 999)), ValidationError);
    EXPECT_THROW(bootstrap_median_ci(two, {1000, 1.0, 1}), ValidationError);
}

TEST(Bootstrap, BracketsThePointStatistic)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(2, 40);
    std::exponential_distribution<double> skewed(0.1);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> v(len(rng));
        for (auto& x : v)
            x = std::round(skewed(rng));
        auto ci = bootstrap_median_ci(v, params(trial, 1000));
        ASSERT_TRUE(ci.contains(median(v))) << "trial " << trial;
    }
}

TEST(Bootstrap, WidthShrinksAsDataConverges)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 100);
    std::vector<double> base(80);
    for (auto& x : base)
        x = u(rng);
    double previous = std::numeric_limits<double>::infinity();
    for (double spread : {1.0, 0.5, 0.25, 0.1, 0.0}) {
        std::vector<double> v(base.size());
        std::transform(base.begin(), base.end(), v.begin(), [&](double x) { return 50 + spread * (x - 50); });
        auto ci = bootstrap_median_ci(v, params(9, 2000));
        double width = ci.high - ci.low;
        EXPECT_LE(width, previous + 1e-12);
        previous = width;
    }
    EXPECT_EQ(previous, 0);
}
