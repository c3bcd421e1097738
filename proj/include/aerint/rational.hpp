/*
 * Copyright 2026 The aerint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

namespace aerint {

/// Exact fraction used for the closed-form latency/area expressions, so table
/// values compare with `==` instead of a floating tolerance.
class Rational {
public:
    constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) { normalize(); }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend constexpr bool operator==(const Rational&, const Rational&) = default;

    friend constexpr Rational operator+(Rational a, Rational b)
    {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend constexpr Rational operator*(Rational a, Rational b)
    {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }

    std::string str() const
    {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Decimal rendering for reports: exact when the denominator divides a
    // power of ten, which holds for every expression the models produce.
    std::string decimal() const;

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    constexpr void normalize()
    {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_;
    std::int64_t den_;
};

inline std::string Rational::decimal() const
{
    if (den_ == 1) return std::to_string(num_);
    std::int64_t den = den_;
    int twos = 0, fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) return std::to_string(to_double());
    const int digits = twos > fives ? twos : fives;
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const std::int64_t scaled = num_ * (scale / den_);
    const bool neg = scaled < 0;
    const std::int64_t mag = neg ? -scaled : scaled;
    std::string frac = std::to_string(mag % scale);
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    return (neg ? "-" : "") + std::to_string(mag / scale) + "." + frac;
}

} // namespace aerint
