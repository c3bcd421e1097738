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

#include <algorithm>
#include <map>
#include <set>

#include "aerint/error.hpp"
#include "aerint/hat_pipeline.hpp"
#include "aerint/rng.hpp"
#include "doctest.h"

using namespace aerint;

namespace {

std::set<std::string> constraints(const std::vector<TimingViolation>& v)
{
    std::set<std::string> out;
    for (const auto& x : v) out.insert(x.constraint);
    return out;
}

std::vector<Spike> all_at_zero(std::vector<std::uint32_t> ids)
{
    std::vector<Spike> out;
    for (auto id : ids) out.push_back({id, 0});
    return out;
}

} // namespace

TEST_SUITE("hat_pipeline") {

TEST_CASE("C-element truth table")
{
    for (bool prev : {false, true}) {
        CHECK(c_element(false, false, prev) == false);
        CHECK(c_element(true, true, prev) == true);
        CHECK(c_element(true, false, prev) == prev);
        CHECK(c_element(false, true, prev) == prev);
    }
}

TEST_CASE("dual-rail states")
{
    DualRailValue v(2);
    CHECK(v.is_null());
    CHECK_FALSE(v.is_valid());
    v.set_rails(0, true, false);
    CHECK_FALSE(v.is_null());
    CHECK_FALSE(v.is_valid());
    v.set_rails(1, false, true);
    CHECK(v.is_valid());
    CHECK(v.value() == 1);
    v.set_rails(1, true, true);
    CHECK(v.has_conflict());
    CHECK_FALSE(v.is_valid());
    for (std::uint32_t x = 0; x < 16; ++x) {
        const auto e = DualRailValue::encode(x, 4);
        CHECK(e.is_valid());
        CHECK(e.value() == x);
        CHECK(e.false_rails() == (~x & 0xFu));
    }
}

TEST_CASE("QDI encoder maps one-hot grants to dual-rail indices")
{
    for (std::uint32_t i = 0; i < 4; ++i) {
        const auto e = qdi_encode(1u << i);
        CHECK(e.is_valid());
        CHECK(e.value() == i);
        CHECK(e == DualRailValue::encode(i, 2));
    }
    CHECK(qdi_encode(0).is_null());
    for (std::uint32_t g = 0; g < 16; ++g) {
        if (g == 0 || (g & (g - 1)) == 0) continue;
        try {
            qdi_encode(g);
            FAIL("expected NotOneHot");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotOneHot);
        }
    }
}

TEST_CASE("completion detection: OR reads activity, XOR reads exclusivity")
{
    const CDBlock orb{CdKind::OrBased, 4};
    const CDBlock xorb{CdKind::XorBased, 4};
    for (unsigned bits = 0; bits < 16; ++bits) {
        std::vector<bool> in(4);
        int ones = 0;
        for (unsigned i = 0; i < 4; ++i) {
            in[i] = (bits >> i) & 1u;
            ones += in[i];
        }
        CHECK(completion_detect(orb, in) == (ones > 0));
        CHECK(completion_detect(xorb, in) == (ones == 1));
    }
    const CDBlock or2{CdKind::OrBased, 2};
    const CDBlock xor2{CdKind::XorBased, 2};
    DualRailValue partial(2);
    partial.set_rails(0, true, false);
    CHECK_FALSE(completion_detect(or2, partial));
    CHECK(completion_detect(or2, DualRailValue::encode(2, 2)));
    DualRailValue bad = DualRailValue::encode(2, 2);
    bad.set_rails(0, true, true);
    CHECK(completion_detect(or2, bad));
    CHECK_FALSE(completion_detect(xor2, bad));
}

TEST_CASE("masking: set needs the grant, reset follows the request")
{
    MaskingStage st;
    CHECK(mask_requests({true, false, true, false}, false, st) == std::vector<bool>{false, false, false, false});
    CHECK(mask_requests({true, false, true, false}, true, st) == std::vector<bool>{true, false, true, false});
    // Grant drops mid-handshake; the masked requests stay up.
    CHECK(mask_requests({true, true, true, false}, false, st) == std::vector<bool>{true, false, true, false});
    CHECK(mask_requests({false, true, true, false}, false, st) == std::vector<bool>{false, false, true, false});
}

TEST_CASE("ack generator: reset depth depends on the lower levels")
{
    // A request still pending in the low cluster: only the low latch resets.
    AckGeneratorState st;
    CHECK(ack_generator_step(AckGeneratorInputs::three_level(true, true, true, true, true), true, st));
    CHECK(st.resetting == std::vector<bool>{false, false, true});

    // Low cluster drained, medium still busy.
    st = {};
    ack_generator_step(AckGeneratorInputs::three_level(true, false, true, true, true), true, st);
    CHECK(st.resetting == std::vector<bool>{false, true, true});

    // Everything drained: all three levels restart.
    st = {};
    ack_generator_step(AckGeneratorInputs::three_level(false, false, true, true, true), true, st);
    CHECK(st.resetting == std::vector<bool>{true, true, true});

    // Ack falls only after every resetting encoder reads NULL.
    CHECK(ack_generator_step(AckGeneratorInputs::three_level(false, false, true, false, false), false, st));
    CHECK_FALSE(ack_generator_step(AckGeneratorInputs::three_level(false, false, false, false, false), false, st));
}

TEST_CASE("every one of 64 neurons comes out with its own address")
{
    for (std::uint32_t id = 0; id < 64; ++id) {
        const auto r = run_pipeline({{id, 0}}, PipelineConfig{});
        REQUIRE(r.packets.size() == 1);
        CHECK(r.packets[0].valid);
        CHECK(r.packets[0].neuron == id);
        CHECK(r.packets[0].address == id);
        CHECK(r.arbitrations_per_level == std::vector<std::uint64_t>{1, 1, 1});
        CHECK(check_timing(r.trace).empty());
    }
}

TEST_CASE("a burst inside one low cluster arbitrates the upper levels once")
{
    const auto r = run_pipeline(all_at_zero({20, 21, 22, 23}), PipelineConfig{});
    REQUIRE(r.packets.size() == 4);
    CHECK(r.arbitrations_per_level[0] == 1);
    CHECK(r.arbitrations_per_level[1] == 1);
    CHECK(r.arbitrations_per_level[2] == 4);
    std::set<std::uint32_t> addrs;
    for (const auto& p : r.packets) {
        CHECK(p.valid);
        CHECK(p.address == p.neuron);
        addrs.insert(p.address);
    }
    CHECK(addrs == std::set<std::uint32_t>{20, 21, 22, 23});
    CHECK(check_timing(r.trace).empty());
}

TEST_CASE("full burst: 64 valid packets and clean timing")
{
    std::vector<std::uint32_t> ids(64);
    for (std::uint32_t i = 0; i < 64; ++i) ids[i] = i;
    const auto r = run_pipeline(all_at_zero(ids), PipelineConfig{});
    REQUIRE(r.packets.size() == 64);
    std::set<std::uint32_t> addrs;
    for (const auto& p : r.packets) {
        CHECK(p.valid);
        addrs.insert(p.address);
    }
    CHECK(addrs.size() == 64);
    CHECK(r.arbitrations_per_level == std::vector<std::uint64_t>{4, 16, 64});
    CHECK(check_timing(r.trace).empty());
}

TEST_CASE("random spike sets: addresses preserved, no timing violations")
{
    Rng gen(77);
    for (int round = 0; round < 60; ++round) {
        std::vector<Spike> ev;
        const int count = 1 + static_cast<int>(gen.below(40));
        for (int i = 0; i < count; ++i)
            ev.push_back({static_cast<std::uint32_t>(gen.below(64)), gen.below(3000)});
        std::sort(ev.begin(), ev.end(), [](const Spike& a, const Spike& b) { return a.t < b.t; });
        PipelineConfig cfg;
        cfg.seed = gen.next();
        const auto r = run_pipeline(ev, cfg);
        REQUIRE(r.packets.size() == ev.size());
        std::map<std::uint32_t, int> want, got;
        for (const auto& s : ev) ++want[s.neuron];
        for (const auto& p : r.packets) {
            CHECK(p.valid);
            CHECK(p.address == p.neuron);
            CHECK(p.t_output > p.t_request);
            ++got[p.neuron];
        }
        CHECK(want == got);
        CHECK(check_timing(r.trace).empty());
    }
}

TEST_CASE("timing checker catches injected faults")
{
    const auto spikes = all_at_zero({0, 1, 2, 3, 17, 40});

    SUBCASE("slow latch close breaks the hold constraint")
    {
        PipelineConfig cfg;
        cfg.delays.latch_close = 10;
        CHECK(constraints(check_timing(run_pipeline(spikes, cfg).trace)) == std::set<std::string>{"hold"});
    }
    SUBCASE("slow grant reset breaks the reopen constraint")
    {
        PipelineConfig cfg;
        cfg.delays.grant_reset = 2000;
        CHECK(constraints(check_timing(run_pipeline(spikes, cfg).trace)) == std::set<std::string>{"reopen"});
    }
    SUBCASE("slow mask CD breaks the ack generator ordering")
    {
        PipelineConfig cfg;
        cfg.delays.cd_mask = 10;
        CHECK(constraints(check_timing(run_pipeline(spikes, cfg).trace)) ==
              std::set<std::string>{"ack_generator"});
    }
    SUBCASE("hand-made rail conflict and missing spacer")
    {
        std::vector<TraceRecord> recs = {
            {1, "enc.L0", "t", 0, 1},
            {2, "enc.L0", "f", 0, 1},
        };
        CHECK(constraints(check_timing(recs)).count("dual_rail") == 1);
        std::vector<TraceRecord> spacer = {
            {1, "enc.L0", "t", 0, 1},
            {2, "enc.L0", "f", 0, 2},
            {3, "enc.L0", "t", 1, 0},
            {4, "enc.L0", "t", 0, 2},
        };
        CHECK_FALSE(check_timing(spacer).empty());
    }
}

}
