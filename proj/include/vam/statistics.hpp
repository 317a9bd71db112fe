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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vam/errors.hpp"

namespace vam::stats {

/// Standard median; the mean of the two middle order statistics for even n.
template <class T>
T median(std::span<const T> values)
{
    if (values.empty())
        throw ValidationError("median of an empty sample");
    std::vector<T> v(values.begin(), values.end());
    const auto n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1)
        return *mid;
    T upper = *mid;
    T lower = *std::max_element(v.begin(), mid);
    return (lower + upper) / 2;
}

template <class T>
T median(const std::vector<T>& values)
{
    return median(std::span<const T>(values));
}

/// Linear-interpolation quantile of an already sorted sample
/// (h = (n - 1) p, the usual "type 7" definition).
inline double sorted_quantile(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw ValidationError("quantile of an empty sample");
    if (p <= 0)
        return sorted.front();
    if (p >= 1)
        return sorted.back();
    double h = static_cast<double>(sorted.size() - 1) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = h - static_cast<double>(lo);
    if (sorted[lo] == sorted[hi])
        return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct BootstrapParams {
    std::size_t resamples = 10000;
    double confidence_level = 0.95;
    std::uint64_t seed = 0;
};

struct Interval {
    double low = 0;
    double high = 0;

    bool contains(double x) const { return low <= x && x <= high; }
};

namespace detail {

/// Uniform index in [0, n) from a 64-bit engine by rejection, so that draws
/// are identical across standard library implementations.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n)
{
    const std::uint64_t range = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
}

} // namespace detail

/// Percentile bootstrap interval for `statistic` over with-replacement
/// resamples of size n. The engine is mt19937_64 seeded with params.seed.
/// The returned interval is widened, if necessary, to contain the statistic
/// of the original sample.
template <class Statistic>
Interval bootstrap_ci(std::span<const double> sample, Statistic&& statistic, const BootstrapParams& params)
{
    if (sample.size() < 2)
        throw ValidationError("bootstrap needs at least 2 observations");
    if (params.resamples < 1000)
        throw ValidationError("bootstrap needs at least 1000 resamples");
    if (!(params.confidence_level > 0 && params.confidence_level < 1))
        throw ValidationError("confidence level must lie in (0, 1)");

    std::mt19937_64 rng(params.seed);
    std::vector<double> resample(sample.size());
    std::vector<double> replicates;
    replicates.reserve(params.resamples);
    for (std::size_t b = 0; b < params.resamples; ++b) {
        for (auto& x : resample)
            x = sample[detail::uniform_index(rng, sample.size())];
        replicates.push_back(statistic(std::span<const double>(resample)));
    }
    std::sort(replicates.begin(), replicates.end());

    const double alpha = 1.0 - params.confidence_level;
    Interval ci{sorted_quantile(replicates, alpha / 2), sorted_quantile(replicates, 1 - alpha / 2)};
    const double point = statistic(sample);
    ci.low = std::min(ci.low, point);
    ci.high = std::max(ci.high, point);
    return ci;
}

/// Percentile bootstrap of the median.
inline Interval bootstrap_median_ci(std::span<const double> sample, const BootstrapParams& params)
{
    return bootstrap_ci(sample, [](std::span<const double> s) { return median(s); }, params);
}

} // namespace vam::stats
