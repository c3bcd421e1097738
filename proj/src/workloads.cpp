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

#include "aerint/workloads.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "aerint/error.hpp"
#include "aerint/rng.hpp"

namespace aerint {

namespace {

void sort_spikes(std::vector<Spike>& spikes)
{
    std::sort(spikes.begin(), spikes.end(), [](const Spike& a, const Spike& b) {
        return a.t != b.t ? a.t < b.t : a.neuron < b.neuron;
    });
}

} // namespace

SpikeTrain generate(const Workload& workload, std::uint32_t n_neurons)
{
    if (n_neurons < 1) throw Error(ErrorCode::InvalidN, "workload needs at least one neuron");
    Rng rng(workload.seed);
    SpikeTrain train;

    if (const auto* w = std::get_if<SparseWorkload>(&workload.variant)) {
        train.drain_between = true;
        train.spikes.reserve(w->trials);
        for (std::uint64_t i = 0; i < w->trials; ++i)
            train.spikes.push_back({static_cast<std::uint32_t>(rng.below(n_neurons)), 0});
    } else if (const auto* w = std::get_if<BurstWorkload>(&workload.variant)) {
        train.spikes.reserve(n_neurons);
        for (std::uint32_t id = 0; id < n_neurons; ++id) {
            const SimTime t = w->window == 0 ? 0 : rng.below(w->window + 1);
            train.spikes.push_back({id, t});
        }
        sort_spikes(train.spikes);
    } else if (const auto* w = std::get_if<PoissonWorkload>(&workload.variant)) {
        if (!(w->rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "poisson rate must be > 0");
        double t = 0.0;
        for (;;) {
            t += rng.exponential(w->rate);
            if (t >= static_cast<double>(w->duration)) break;
            const auto id = static_cast<std::uint32_t>(rng.below(n_neurons));
            train.spikes.push_back({id, static_cast<SimTime>(std::floor(t))});
        }
        sort_spikes(train.spikes);
    } else if (const auto* w = std::get_if<LocalizedBurstWorkload>(&workload.variant)) {
        const std::uint64_t first = std::uint64_t{w->cluster} * w->size;
        if (w->size == 0 || first + w->size > n_neurons)
            throw Error(ErrorCode::InvalidConfig, "cluster " + std::to_string(w->cluster) + " of size " +
                                                      std::to_string(w->size) + " exceeds N=" +
                                                      std::to_string(n_neurons));
        for (std::uint32_t i = 0; i < w->size; ++i)
            train.spikes.push_back({static_cast<std::uint32_t>(first + i), 0});
    }
    return train;
}

Workload workload_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("workload json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("variant"))
        throw Error(ErrorCode::InvalidConfig, "workload json needs a \"variant\" field");
    Workload w;
    try {
        w.seed = j.value("seed", std::uint64_t{0});
        const auto variant = j.at("variant").get<std::string>();
        auto check_keys = [&](std::initializer_list<const char*> allowed) {
            for (const auto& [key, _] : j.items()) {
                if (key == "variant" || key == "seed") continue;
                if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
                    throw Error(ErrorCode::InvalidConfig, "unknown workload key \"" + key + "\"");
            }
        };
        if (variant == "sparse") {
            check_keys({"trials"});
            w.variant = SparseWorkload{j.value("trials", std::uint64_t{1})};
        } else if (variant == "burst") {
            check_keys({"window"});
            w.variant = BurstWorkload{j.value("window", SimTime{0})};
        } else if (variant == "poisson") {
            check_keys({"rate", "duration"});
            w.variant = PoissonWorkload{j.value("rate", 0.1), j.value("duration", SimTime{1000})};
        } else if (variant == "localized") {
            check_keys({"cluster", "size"});
            w.variant = LocalizedBurstWorkload{j.value("cluster", 0u), j.value("size", 4u)};
        } else {
            throw Error(ErrorCode::InvalidConfig,
                        "unknown workload variant \"" + variant + "\" (allowed: sparse, burst, poisson, localized)");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("workload json: ") + e.what());
    }
    return w;
}

std::string workload_to_json(const Workload& workload)
{
    nlohmann::json j;
    j["seed"] = workload.seed;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SparseWorkload>) {
                j["variant"] = "sparse";
                j["trials"] = v.trials;
            } else if constexpr (std::is_same_v<T, BurstWorkload>) {
                j["variant"] = "burst";
                j["window"] = v.window;
            } else if constexpr (std::is_same_v<T, PoissonWorkload>) {
                j["variant"] = "poisson";
                j["rate"] = v.rate;
                j["duration"] = v.duration;
            } else {
                j["variant"] = "localized";
                j["cluster"] = v.cluster;
                j["size"] = v.size;
            }
        },
        workload.variant);
    return j.dump();
}

} // namespace aerint
