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
#include <string>
#include <variant>
#include <vector>

#include "aerint/sim_kernel.hpp"

namespace aerint {

struct Spike {
    std::uint32_t neuron = 0;
    SimTime t = 0;

    friend bool operator==(const Spike&, const Spike&) = default;
};

/// One neuron per trial, each injected only after the previous event has
/// left the arbiter.
struct SparseWorkload {
    std::uint64_t trials = 1;
};
/// Every neuron fires once inside [0, window].
struct BurstWorkload {
    SimTime window = 0;
};
struct PoissonWorkload {
    double rate = 0.1;  // events per unit time
    SimTime duration = 1000;
};
/// All `size` neurons of cluster `cluster` fire at t=0.
struct LocalizedBurstWorkload {
    std::uint32_t cluster = 0;
    std::uint32_t size = 4;
};

using WorkloadVariant =
    std::variant<SparseWorkload, BurstWorkload, PoissonWorkload, LocalizedBurstWorkload>;

struct Workload {
    WorkloadVariant variant;
    std::uint64_t seed = 0;
};

struct SpikeTrain {
    std::vector<Spike> spikes;
    /// Sparse trains: spike k+1 is injected when spike k has been encoded,
    /// and the `t` fields are zero offsets.
    bool drain_between = false;
};

SpikeTrain generate(const Workload& workload, std::uint32_t n_neurons);

/// JSON form, e.g. {"variant":"burst","window":0,"seed":42}.
Workload workload_from_json(const std::string& text);
std::string workload_to_json(const Workload& workload);

} // namespace aerint
