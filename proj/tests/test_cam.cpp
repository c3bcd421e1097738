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

#include <cmath>
#include <set>

#include "aerint/cam.hpp"
#include "aerint/error.hpp"
#include "aerint/rng.hpp"
#include "doctest.h"

using namespace aerint;

namespace {

CamConfig base(std::uint32_t n, unsigned w, CompletionKind c = CompletionKind::Cscd)
{
    CamConfig cfg;
    cfg.n_entries = n;
    cfg.width = w;
    cfg.completion = c;
    return cfg;
}

std::vector<bool> naive_match(const std::vector<std::uint64_t>& words, std::uint64_t key)
{
    std::vector<bool> out;
    for (auto w : words) out.push_back(w == key);
    return out;
}

std::set<std::string> constraints(const std::vector<TimingViolation>& v)
{
    std::set<std::string> out;
    for (const auto& x : v) out.insert(x.constraint);
    return out;
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::Io;
}

struct Variant {
    bool feedback;
    unsigned tail;
};

} // namespace

TEST_SUITE("cam") {

TEST_CASE("write and read back, bounds and width")
{
    CamArray a(base(16, 11));
    a.write_entry(0, 0b10110001011);
    CHECK(a.read_entry(0) == 0b10110001011);
    CHECK(code_of([&] { a.write_entry(16, 1); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([&] { a.write_entry(0, 1u << 11); }) == ErrorCode::WidthMismatch);
    CHECK(code_of([&] { a.search(1u << 11); }) == ErrorCode::WidthMismatch);
    const auto r = a.search(0b10110001011);
    CHECK(r.match[0]);
}

TEST_CASE("writes cost no search energy")
{
    CamArray a(base(16, 11));
    CamArray b(base(16, 11));
    for (std::uint32_t i = 0; i < 16; ++i) a.write_entry(i, 5);
    const auto ra = a.search(0);
    const auto rb = b.search(0);
    // b's entries all hold the key; a's all mismatch. Same search-line toggles.
    CHECK(ra.energy.e_searchline == rb.energy.e_searchline);
}

TEST_CASE("all-match and no-match searches")
{
    for (auto c : {CompletionKind::Cscd, CompletionKind::DelayLine}) {
        CamArray a(base(16, 11, c));
        for (std::uint32_t i = 0; i < 16; ++i) a.write_entry(i, 0x2AB);
        const auto hit = a.search(0x2AB);
        CHECK(std::count(hit.match.begin(), hit.match.end(), true) == 16);
        const auto miss = a.search(0x2AA);
        CHECK(std::count(miss.match.begin(), miss.match.end(), true) == 0);
    }
}

TEST_CASE("exhaustive match check against a naive comparator for small words")
{
    Rng gen(5);
    for (unsigned w : {1u, 3u, 5u, 8u}) {
        for (std::uint32_t n : {1u, 7u, 16u}) {
            for (auto c : {CompletionKind::Cscd, CompletionKind::DelayLine}) {
                CamConfig cfg = base(n, w, c);
                cfg.feedback = gen.coin();
                cfg.speculative_tail = static_cast<unsigned>(gen.below(w + 1));
                CamArray a(cfg);
                std::vector<std::uint64_t> words(n);
                for (std::uint32_t i = 0; i < n; ++i) {
                    words[i] = gen.below(std::uint64_t{1} << w);
                    a.write_entry(i, words[i]);
                }
                for (std::uint64_t key = 0; key < (std::uint64_t{1} << w); ++key) {
                    const auto r = a.search(key);
                    CHECK_FALSE(r.false_timing);
                    CHECK(r.match == naive_match(words, key));
                }
            }
        }
    }
}

TEST_CASE("random 512x11 arrays agree with the naive comparator")
{
    Rng gen(11);
    CamConfig cfg = base(512, 11);
    cfg.feedback = true;
    cfg.speculative_tail = 3;
    CamArray a(cfg);
    std::vector<std::uint64_t> words(512);
    int mismatches = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        if (trial % 100 == 0) {
            for (std::uint32_t i = 0; i < 512; ++i) {
                words[i] = gen.below(2048);
                a.write_entry(i, words[i]);
            }
        }
        // Half the keys are copied from a stored word so hits are common.
        const std::uint64_t key = gen.coin() ? words[gen.below(512)] : gen.below(2048);
        if (a.search(key).match != naive_match(words, key)) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("speculative close probability")
{
    CHECK(speculative_close_probability(10, 3) == Rational(897, 1024));
    for (unsigned w = 1; w <= 16; ++w) CHECK(speculative_close_probability(w, w) == Rational(1));
    CHECK(speculative_close_probability(11, 0) == Rational(1, 2048));
    CHECK(code_of([] { speculative_close_probability(4, 5); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("speculative probability agrees with a Monte-Carlo frequency")
{
    Rng gen(2718);
    const int samples = 1000000;
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t diff = gen.below(2048) ^ gen.below(2048);
        if ((diff & 0x7) != 0 || diff == 0) ++hits;
    }
    const double p = speculative_close_probability(11, 3).to_double();
    const double se = std::sqrt(p * (1 - p) / samples);
    CHECK(std::fabs(static_cast<double>(hits) / samples - p) <= 3 * se);
}

TEST_CASE("delay-line calibration")
{
    SUBCASE("no device mismatch needs no margin")
    {
        CamConfig cfg = base(16, 11, CompletionKind::DelayLine);
        cfg.timing.jitter = 0;
        cfg.timing.wire_per_entry = 0;
        CamArray a(cfg);
        CHECK(a.delay_setting() == a.dummy_delay());
    }
    SUBCASE("default mismatch lands in the 1.2 to 1.4 band")
    {
        for (std::uint32_t n : {16u, 64u, 512u}) {
            CamArray a(base(n, 11, CompletionKind::DelayLine));
            const double ratio = static_cast<double>(a.delay_setting()) / static_cast<double>(a.dummy_delay());
            CHECK(ratio >= 1.2);
            CHECK(ratio <= 1.4);
        }
    }
    SUBCASE("delay forced to zero fails on the first search")
    {
        CamConfig cfg = base(16, 11, CompletionKind::DelayLine);
        cfg.delay_setting = 0;
        CamArray a(cfg);
        const auto r = a.search(0);
        CHECK(r.false_timing);
        CHECK(code_of([&] { require_reliable(r); }) == ErrorCode::FalseTiming);
    }
    SUBCASE("an eight-bit setting cannot cover a huge charge time")
    {
        CamConfig cfg = base(16, 11, CompletionKind::DelayLine);
        cfg.timing.base_charge = 1000;
        CHECK(code_of([&] { CamArray a(cfg); }) == ErrorCode::Unsatisfiable);
    }
    SUBCASE("calibrated setting never reports false timing")
    {
        CamArray a(base(64, 11, CompletionKind::DelayLine));
        for (int i = 0; i < 2000; ++i) CHECK_FALSE(a.search(static_cast<std::uint64_t>(i) & 0x7FF).false_timing);
    }
}

TEST_CASE("single all-match entry: delay-line cycle from the calibration rule")
{
    CamConfig cfg = base(1, 11, CompletionKind::DelayLine);
    cfg.timing.jitter = 0;
    cfg.timing.wire_per_entry = 0;
    cfg.delay_setting = static_cast<unsigned>(std::ceil(1.3 * 1.2 * 100));
    CamArray a(cfg);
    CHECK(a.dummy_delay() == 120);
    CHECK(a.return_phase_cost() == 2 + 156);
    CHECK(a.cycle_time_model(0) == 156 + a.return_phase_cost());
}

TEST_CASE("CSCD beats the calibrated delay line, more so in larger arrays")
{
    auto improvement = [](std::uint32_t n) {
        Rng gen(n);
        CamConfig fast = base(n, 11);
        fast.feedback = true;
        fast.speculative_tail = 3;
        CamArray cscd(fast);
        CamArray dl(base(n, 11, CompletionKind::DelayLine));
        for (std::uint32_t i = 0; i < n; ++i) {
            const auto w = gen.below(2048);
            cscd.write_entry(i, w);
            dl.write_entry(i, w);
        }
        double sum_c = 0, sum_d = 0;
        for (int k = 0; k < 500; ++k) {
            const auto key = gen.below(2048);
            const auto c = cscd.search(key).cycle_time;
            const auto d = dl.search(key).cycle_time;
            CHECK(c < d);
            sum_c += static_cast<double>(c);
            sum_d += static_cast<double>(d);
        }
        return 1 - sum_c / sum_d;
    };
    CHECK(improvement(16) < improvement(512));
}

TEST_CASE("energy: each mechanism helps and the full set is cheapest")
{
    const Variant variants[] = {{false, 0}, {true, 0}, {false, 3}, {true, 3}};
    Rng gen(99);
    for (int round = 0; round < 20; ++round) {
        const std::uint32_t n = 1 + static_cast<std::uint32_t>(gen.below(64));
        std::vector<std::uint64_t> words(n);
        for (auto& w : words) w = gen.below(2048);
        const std::uint64_t key = gen.coin() ? words[0] : gen.below(2048);
        const std::uint64_t seed = gen.next();

        auto run = [&](CompletionKind c, Variant v) {
            CamConfig cfg = base(n, 11, c);
            cfg.feedback = v.feedback;
            cfg.speculative_tail = v.tail;
            cfg.seed = seed;
            CamArray a(cfg);
            for (std::uint32_t i = 0; i < n; ++i) a.write_entry(i, words[i]);
            return a.search(key).energy;
        };
        const double baseline = run(CompletionKind::DelayLine, {false, 0}).total();
        double prev_best = baseline;
        std::vector<double> totals;
        for (const auto& v : variants) {
            const auto led = run(CompletionKind::Cscd, v);
            CHECK(led.e_ml_charge >= 0);
            CHECK(led.e_pulldown >= 0);
            totals.push_back(led.total());
            CHECK(led.total() <= baseline + 1e-12);
            prev_best = std::min(prev_best, led.total());
        }
        CHECK(totals[1] <= totals[0] + 1e-12);
        CHECK(totals[2] <= totals[0] + 1e-12);
        CHECK(totals[3] <= totals[1] + 1e-12);
        CHECK(totals[3] <= totals[2] + 1e-12);
        CHECK(totals[3] == doctest::Approx(prev_best));
    }
}

TEST_CASE("feedback caps the match-line swing; speculative sense is inert on a match")
{
    auto ledger = [](bool feedback, unsigned tail) {
        CamConfig cfg = base(16, 11);
        cfg.feedback = feedback;
        cfg.speculative_tail = tail;
        CamArray a(cfg);
        for (std::uint32_t i = 0; i < 16; ++i) a.write_entry(i, 0x155);
        return a.search(0x155).energy;
    };
    CHECK(ledger(true, 0).e_ml_charge / ledger(false, 0).e_ml_charge == doctest::Approx(0.6));
    const auto off = ledger(false, 0);
    const auto on = ledger(false, 3);
    CHECK(off.total() == on.total());
    CHECK(off.e_pulldown == on.e_pulldown);
    CHECK(off.e_ml_charge == on.e_ml_charge);
}

TEST_CASE("close causes follow the mechanism that shut the source")
{
    CamConfig cfg = base(4, 11);
    cfg.feedback = true;
    cfg.speculative_tail = 3;
    CamArray a(cfg);
    a.write_entry(0, 0x100);          // match
    a.write_entry(1, 0x101);          // mismatch in the tail
    a.write_entry(2, 0x500);          // mismatch in the head
    a.write_entry(3, 0x100 ^ 0x8);    // first bit past the tail
    const auto r = a.search(0x100);
    CHECK(r.close_cause == std::vector<CloseCause>{CloseCause::Feedback, CloseCause::Speculative,
                                                   CloseCause::DummyOff, CloseCause::DummyOff});
}

TEST_CASE("CSCD acknowledges only after every source is off plus the sensor delay")
{
    CamConfig cfg = base(32, 11);
    cfg.trace = true;
    CamArray a(cfg);
    Rng gen(8);
    for (std::uint32_t i = 0; i < 32; ++i) a.write_entry(i, gen.below(2048));
    for (int k = 0; k < 50; ++k) a.search(gen.below(2048));
    SimTime off = 0;
    bool checked = false;
    for (const auto& rec : a.trace().records()) {
        if (rec.component == "cam.dummy" && rec.new_value == 1) off = rec.time;
        if (rec.component == "cam.hs" && rec.signal == "ack" && rec.new_value == 1) {
            CHECK(rec.time >= off + cfg.timing.sensor_delay);
            checked = true;
        }
    }
    CHECK(checked);
}

TEST_CASE("current margin cases")
{
    CamConfig cfg = base(64, 11);
    cfg.speculative_tail = 3;
    CamArray a(cfg);
    const auto rep = a.worst_case_current_margin();
    REQUIRE(rep.cases.size() == 4);
    double all_match = 0, tail = 0;
    for (const auto& c : rep.cases) {
        if (c.name == "all-match") all_match = c.current_change;
        if (c.name == "mismatch-in-tail") tail = c.current_change;
    }
    for (const auto& c : rep.cases) {
        CHECK(c.current_change <= all_match);
        CHECK(c.current_change >= tail);
    }
    CHECK(rep.worst_case == "mismatch-in-tail");
    CHECK(rep.margin > 1);

    cfg.sense_threshold = 1.5;
    CamArray strict(cfg);
    CHECK(code_of([&] { strict.worst_case_current_margin(); }) == ErrorCode::InsufficientMargin);
    CHECK(code_of([] { CamArray(base(4, 11, CompletionKind::DelayLine)).worst_case_current_margin(); }) ==
          ErrorCode::InvalidConfig);
}

TEST_CASE("CAM timing checks")
{
    auto traced = [](auto tweak) {
        CamConfig cfg = base(16, 11);
        cfg.trace = true;
        tweak(cfg);
        CamArray a(cfg);
        for (std::uint64_t k = 0; k < 20; ++k) a.search(k * 97 % 2048);
        return check_cam_timing(a.trace().records(), cfg.timing.min_clk_pulse, cfg.timing.min_reset_pulse);
    };
    CHECK(traced([](CamConfig&) {}).empty());
    CHECK(constraints(traced([](CamConfig& c) { c.timing.sl_setup = 0; })).count("bundled_data") == 1);
    CHECK(constraints(traced([](CamConfig& c) { c.timing.inter_search_gap = 0; })).count("clk_pulse") == 1);
    CHECK(constraints(traced([](CamConfig& c) { c.timing.precharge = 2; })).count("reset_pulse") == 1);
}

TEST_CASE("completion names")
{
    CHECK(parse_completion("delay-line") == CompletionKind::DelayLine);
    CHECK(parse_completion("cscd") == CompletionKind::Cscd);
    CHECK(code_of([] { parse_completion("sync"); }) == ErrorCode::InvalidConfig);
}

}
