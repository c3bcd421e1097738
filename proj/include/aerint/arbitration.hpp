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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aerint/rational.hpp"
#include "aerint/rng.hpp"
#include "aerint/sim_kernel.hpp"
#include "aerint/workloads.hpp"

namespace aerint {

enum class ArchitectureKind { BinaryTree, GreedyTree, TokenRing, HierTokenRing, HierArbiterTree };

inline constexpr ArchitectureKind kAllArchitectures[] = {
    ArchitectureKind::BinaryTree, ArchitectureKind::GreedyTree, ArchitectureKind::TokenRing,
    ArchitectureKind::HierTokenRing, ArchitectureKind::HierArbiterTree};

/// CLI spelling: binary-tree, greedy-tree, token-ring, hier-ring, hier-tree.
const char* to_string(ArchitectureKind kind);
std::optional<ArchitectureKind> parse_architecture(std::string_view name);

/// Throws InvalidN unless N >= 2 and N fits the topology: trees need a power
/// of two, the hierarchical ring a perfect square, HAT a power of four.
void validate_n(ArchitectureKind kind, std::uint64_t n);
bool is_valid_n(ArchitectureKind kind, std::uint64_t n);

// Closed-form models, in two-input-arbiter delays.
Rational analytic_sparse_latency(ArchitectureKind kind, std::uint64_t n);
Rational analytic_burst_latency(ArchitectureKind kind, std::uint64_t n);
std::uint64_t arbiter_count(ArchitectureKind kind, std::uint64_t n);

enum class Grant : std::uint8_t { None = 0, A = 1, B = 2 };

/// Mutex state of one two-input arbiter cell.
struct ArbiterCell {
    Grant grant = Grant::None;
};

/// A held grant persists while its requester keeps requesting; a
/// simultaneous request pair on a free cell is resolved by a coin flip.
Grant two_input_arbitrate(bool req_a, bool req_b, ArbiterCell& cell, Rng& rng);

struct ArbiterConfig {
    ArchitectureKind kind = ArchitectureKind::HierArbiterTree;
    std::uint32_t n_neurons = 64;
    /// Ticks per unit stage delay (a two-input arbiter decision).
    SimTime stage_delay = 1;
    /// Extra delay per greedy-tree hand-over, for neurons that re-request slowly.
    SimTime greedy_neuron_response = 0;
    std::uint64_t seed = 1;
    bool trace = false;
};

struct AddressEvent {
    std::uint32_t neuron_id = 0;
    std::uint32_t encoded_address = 0;
    SimTime t_request = 0;
    SimTime t_output = 0;

    SimTime latency() const { return t_output - t_request; }
};

struct ArbiterStats {
    std::uint64_t requests = 0;
    std::uint64_t outputs = 0;
    std::uint64_t mutex_violations = 0;
    /// Number of arbitrations per hierarchy level (top first). Trees count
    /// per depth, rings count top ring then leaf ring.
    std::vector<std::uint64_t> arbitrations_per_level;
};

class ArbiterInstance {
public:
    explicit ArbiterInstance(const ArbiterConfig& config);
    ~ArbiterInstance();
    ArbiterInstance(ArbiterInstance&&) noexcept;
    ArbiterInstance& operator=(ArbiterInstance&&) noexcept;

    const ArbiterConfig& config() const;

    /// Two-input arbiter cells in the built topology.
    std::uint64_t two_input_cells() const;
    /// Tree depth for binary/greedy, four-input levels for HAT, 1 or 2 for rings.
    std::uint32_t levels() const;
    /// Stages per leaf ring (rings only; 0 otherwise).
    std::uint32_t ring_size() const;
    std::uint32_t ring_count() const;
    /// Stage that currently holds the token of ring `ring`.
    std::uint32_t token_position(std::uint32_t ring = 0) const;

    /// Feeds a spike train through the arbiter, continuing from the current
    /// state and time. Returns one AddressEvent per spike in output order.
    std::vector<AddressEvent> simulate(const SpikeTrain& train);

    const ArbiterStats& stats() const;
    SimTime now() const;
    const Trace& trace() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct LatencyEstimate {
    double mean = 0;
    double stddev = 0;
    double ci95 = 0;  // half-width, 1.96 standard errors
    std::uint64_t trials = 0;
};

/// Sparse measurement: `trials` uniform random neurons, one at a time.
LatencyEstimate measure_sparse(ArbiterInstance& instance, std::uint64_t trials, std::uint64_t seed);
/// Burst measurement: all N neurons request at once; returns the time of
/// the last output relative to the common request time.
SimTime measure_burst(ArbiterInstance& instance);

/// Grant-signal checker over a trace: a cell's grant may not move from one
/// side to the other without passing through None.
std::vector<TimingViolation> check_mutual_exclusion(const std::vector<TraceRecord>& records);

} // namespace aerint
