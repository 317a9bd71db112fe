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

#include <cmath>
#include <compare>
#include <cstdint>
#include <ios>
#include <limits>
#include <regex>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "vam/errors.hpp"

namespace vam {

/// 50-digit decimal floating point. Sums and products of the short decimal
/// literals that appear in ledgers are exact at this width.
using Decimal = boost::multiprecision::cpp_dec_float_50;

namespace detail {

inline const std::regex& decimal_literal_pattern()
{
    static const std::regex re(R"(^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$)");
    return re;
}

} // namespace detail

/// Parses a decimal literal ("1602096836", "0.0346", "-2.5e3").
/// Thousands separators are accepted as underscores or commas.
inline Decimal parse_decimal(std::string_view text)
{
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char c : text) {
        if (c == '_' || c == ',' || c == ' ')
            continue;
        cleaned.push_back(c);
    }
    if (!std::regex_match(cleaned, detail::decimal_literal_pattern()))
        throw ValidationError("not a decimal number: '" + std::string(text) + "'");
    return Decimal(cleaned);
}

/// Converts a binary double to Decimal, keeping `places` fractional digits.
/// Percentages and coefficients cross into currency arithmetic this way so
/// that 1.1 becomes exactly 1.1.
inline Decimal decimal_from_double(double value, int places = 9)
{
    if (!std::isfinite(value))
        throw ValidationError("non-finite number");
    return Decimal(Decimal(value).str(places, std::ios_base::fixed));
}

/// Rounds half away from zero to the nearest integer.
inline Decimal round_half_up(const Decimal& value)
{
    using boost::multiprecision::floor;
    if (value < 0)
        return -Decimal(floor(-value + Decimal("0.5")));
    return Decimal(floor(value + Decimal("0.5")));
}

/// Fixed-point rendering with `places` fractional digits, rounded half up.
inline std::string format_decimal(const Decimal& value, int places)
{
    Decimal scale = boost::multiprecision::pow(Decimal(10), places);
    Decimal rounded = round_half_up(value * scale) / scale;
    std::string s = rounded.str(places, std::ios_base::fixed);
    if (s.rfind("-0", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

/// Shortest plain rendering that round-trips exactly (no exponent).
inline std::string to_plain_string(const Decimal& value)
{
    std::string s = value.str(40, std::ios_base::fixed);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0')
            s.pop_back();
        if (!s.empty() && s.back() == '.')
            s.pop_back();
    }
    if (s == "-0")
        s = "0";
    return s;
}

/// Currency amount held as an integer count of minor units (1/100 of the
/// major unit: fen for CNY, cents for USD).
class Money {
public:
    static constexpr std::int64_t kMinorPerMajor = 100;

    constexpr Money() = default;

    static constexpr Money from_minor(std::int64_t minor) { return Money(minor); }

    static constexpr Money from_major(std::int64_t major) { return Money(major * kMinorPerMajor); }

    /// Rounds a major-unit decimal to the nearest minor unit, half up.
    static Money from_major(const Decimal& major) { return from_minor_decimal(major * kMinorPerMajor); }

    /// Rounds a minor-unit decimal to the nearest minor unit, half up.
    static Money from_minor_decimal(const Decimal& minor)
    {
        Decimal r = round_half_up(minor);
        if (r > Decimal(std::numeric_limits<std::int64_t>::max()) ||
            r < Decimal(std::numeric_limits<std::int64_t>::min()))
            throw DomainError("currency amount out of range");
        return Money(r.convert_to<std::int64_t>());
    }

    static Money parse(std::string_view text) { return from_major(parse_decimal(text)); }

    constexpr std::int64_t minor() const { return minor_; }

    Decimal major() const { return Decimal(minor_) / kMinorPerMajor; }

    Decimal minor_decimal() const { return Decimal(minor_); }

    /// "1587786926" when there is no fractional part, "14.50" otherwise.
    std::string to_string() const
    {
        std::int64_t whole = minor_ / kMinorPerMajor;
        std::int64_t frac = minor_ % kMinorPerMajor;
        std::string sign = (minor_ < 0) ? "-" : "";
        if (whole < 0)
            whole = -whole;
        if (frac < 0)
            frac = -frac;
        std::string out = sign + std::to_string(whole);
        if (frac != 0) {
            out += '.';
            if (frac < 10)
                out += '0';
            out += std::to_string(frac);
        }
        return out;
    }

    constexpr Money operator+(Money o) const { return Money(minor_ + o.minor_); }
    constexpr Money operator-(Money o) const { return Money(minor_ - o.minor_); }
    constexpr Money& operator+=(Money o)
    {
        minor_ += o.minor_;
        return *this;
    }
    constexpr Money& operator-=(Money o)
    {
        minor_ -= o.minor_;
        return *this;
    }
    constexpr auto operator<=>(const Money&) const = default;

private:
    constexpr explicit Money(std::int64_t minor) : minor_(minor) {}

    std::int64_t minor_ = 0;
};

/// Major units with digit grouping, e.g. "1,587,786,926" or "14.50".
inline std::string format_grouped(Money m)
{
    std::string plain = m.to_string();
    std::string sign;
    if (!plain.empty() && plain[0] == '-') {
        sign = "-";
        plain.erase(0, 1);
    }
    auto dot = plain.find('.');
    std::string whole = plain.substr(0, dot);
    std::string frac = (dot == std::string::npos) ? "" : plain.substr(dot);
    std::string grouped;
    int count = 0;
    for (auto it = whole.rbegin(); it != whole.rend(); ++it) {
        if (count != 0 && count % 3 == 0)
            grouped.insert(grouped.begin(), ',');
        grouped.insert(grouped.begin(), *it);
        ++count;
    }
    return sign + grouped + frac;
}

/// Millions of major units with `places` decimals, e.g. "158.8".
inline std::string format_millions(Money m, int places = 1)
{
    return format_decimal(m.major() / 1000000, places);
}

inline std::string format_millions(const Decimal& minor_units, int places = 1)
{
    return format_decimal(minor_units / Money::kMinorPerMajor / 1000000, places);
}

} // namespace vam
