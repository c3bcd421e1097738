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
#include <vector>

#include "aerint/sim_kernel.hpp"
#include "aerint/workloads.hpp"

namespace aerint {

/// Muller C-element: follows its inputs when they agree, holds otherwise.
constexpr bool c_element(bool a, bool b, bool prev) { return a == b ? a : prev; }

/// Word on dual-rail wires. Bit i is valid when exactly one of its rails is
/// high and NULL when both are low; both high is a conflict.
class DualRailValue {
public:
    explicit DualRailValue(unsigned width = 0) : width_(width) {}

    static DualRailValue encode(std::uint32_t value, unsigned width);

    unsigned width() const { return width_; }
    std::uint32_t true_rails() const { return t_; }
    std::uint32_t false_rails() const { return f_; }
    void set_rails(unsigned bit, bool t, bool f);

    bool is_null() const { return t_ == 0 && f_ == 0; }
    bool has_conflict() const { return (t_ & f_) != 0; }
    bool is_valid() const { return !has_conflict() && (t_ | f_) == mask(); }
    /// Decoded value; only meaningful when is_valid().
    std::uint32_t value() const { return t_; }

    friend bool operator==(const DualRailValue&, const DualRailValue&) = default;

private:
    std::uint32_t mask() const { return width_ >= 32 ? ~0u : (1u << width_) - 1u; }

    unsigned width_;
    std::uint32_t t_ = 0;
    std::uint32_t f_ = 0;
};

/// Masked-request latches of one cluster. A masked request is set only
/// when both the neuron request and the cluster grant are high; once set it
/// follows the neuron request alone, so dropping the grant cannot cut a
/// handshake in flight (asymmetric C-element, grant on the plus input).
struct MaskingStage {
    std::vector<bool> masked;
};

std::vector<bool> mask_requests(const std::vector<bool>& neuron_reqs, bool cluster_grant, MaskingStage& stage);

enum class CdKind { OrBased, XorBased };

struct CDBlock {
    CdKind kind = CdKind::OrBased;
    unsigned width = 4;
};

/// OR-based: any input high. XOR-based: exactly one input high, so two
/// overlapping grants read as invalid.
bool completion_detect(const CDBlock& block, const std::vector<bool>& inputs);
/// Dual-rail form. OR-based: every bit has a rail high. XOR-based: every bit
/// has exactly one rail high.
bool completion_detect(const CDBlock& block, const DualRailValue& value);

/// One-hot 4-bit grant to a 2-bit dual-rail code; zero encodes to NULL.
/// Throws NotOneHot for two or more bits set.
DualRailValue qdi_encode(std::uint32_t one_hot);

/// Validity flags seen by the ack generator, indexed by level (0 = high).
/// `mask_valid[l]` comes from the CD block after the masking stage and is
/// only consulted for l >= 1; `encoded_valid[l]` from the CD block after
/// the level's encoder.
struct AckGeneratorInputs {
    std::vector<bool> mask_valid;
    std::vector<bool> encoded_valid;

    /// Three-level form: V_M, V_L and D_H, D_M, D_L.
    static AckGeneratorInputs three_level(bool v_m, bool v_l, bool d_h, bool d_m, bool d_l)
    {
        return {{false, v_m, v_l}, {d_h, d_m, d_l}};
    }
};

struct AckGeneratorState {
    bool ack = false;
    /// Levels whose first-stage latch is being reset in the current cycle.
    std::vector<bool> resetting;
};

/// On a packet capture ack rises and the low level is always reset; level l
/// is reset only if every level below it reports no active request. Without
/// a capture, ack falls once every resetting level's encoder CD is low.
bool ack_generator_step(const AckGeneratorInputs& inputs, bool packet_captured, AckGeneratorState& state);

/// Gate and stage delays in subticks (100 per two-input arbiter decision).
struct PipelineDelays {
    SimTime mask = 1;
    SimTime cd_mask = 1;
    SimTime arbiter = 2 * kSubticksPerUnit;  // four-input arbiter: two cells deep
    SimTime latch_capture = 1;
    SimTime latch_close = 2;
    SimTime grant_reset = 3;
    SimTime encoder = 1;
    SimTime cd = 1;
    SimTime join = 1;
    SimTime ack = 1;
    SimTime ack_reopen = 2;
    SimTime neuron_response = 2;
    SimTime receiver = 2;
    SimTime gate = 1;
};

struct PipelineConfig {
    unsigned levels = 3;  // N = 4^levels
    PipelineDelays delays;
    std::uint64_t seed = 1;
};

struct PipelinePacket {
    std::uint32_t neuron = 0;
    std::uint32_t address = 0;
    bool valid = false;
    SimTime t_request = 0;
    SimTime t_output = 0;
};

struct PipelineResult {
    std::vector<PipelinePacket> packets;
    std::vector<std::uint64_t> arbitrations_per_level;
    std::vector<TraceRecord> trace;
};

PipelineResult run_pipeline(const std::vector<Spike>& events, const PipelineConfig& config);

/// Latch hold and reopen ordering on every first/second stage latch,
/// validity-before-encoder ordering at the ack generator, dual-rail safety
/// with NULL spacers, and four-phase order on the neuron and output channels.
std::vector<TimingViolation> check_timing(const std::vector<TraceRecord>& records);

} // namespace aerint
