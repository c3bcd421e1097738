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

#include <cmath>
#include <cstdint>
#include <random>

namespace aerint {

/// Seeded random source with a portable output sequence.
///
/// The engine is std::mt19937_64, whose raw output is fixed by the C++
/// standard (the 10000th draw from a default-seeded engine is
/// 9981545732273789042). The standard distributions are implementation
/// defined, so the mappings to integers and reals are done here explicitly:
///
///   below(n)  : rejection sampling on the raw 64-bit word, r % n once
///               r >= (2^64 - n) % n
///   uniform() : (r >> 11) * 2^-53, in [0, 1)
///   coin()    : top bit of r
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    std::uint64_t below(std::uint64_t n)
    {
        if (n <= 1) return 0;
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool coin() { return (engine_() >> 63) != 0; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

} // namespace aerint
