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

#include "aerint/aerint.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "aerint/arbitration.hpp"
#include "aerint/cam.hpp"
#include "aerint/error.hpp"
#include "commands.hpp"
#include "json.hpp"

struct aer_arbiter {
    aerint::ArbiterInstance instance;
};

struct aer_cam {
    aerint::CamArray array;
};

namespace {

thread_local std::string g_last_error;

aer_status status_for(aerint::ErrorCode code)
{
    using aerint::ErrorCode;
    switch (code) {
    case ErrorCode::ProtocolViolation:
    case ErrorCode::FalseTiming:
    case ErrorCode::InsufficientMargin:
    case ErrorCode::SchedulingInPast: return AER_ERR_VIOLATION;
    case ErrorCode::Io: return AER_ERR_IO;
    default: return AER_ERR_INVALID;
    }
}

template <class F>
aer_status guarded(F f)
{
    g_last_error.clear();
    try {
        return f();
    } catch (const aerint::Error& e) {
        g_last_error = e.what();
        return status_for(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return AER_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return AER_ERR_INTERNAL;
    }
}

aer_status invalid(const char* message)
{
    g_last_error = message;
    return AER_ERR_INVALID;
}

char* copy_out(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

aerint::ArchitectureKind arch_or_throw(const char* name)
{
    const auto k = aerint::parse_architecture(name ? name : "");
    if (!k)
        throw aerint::Error(aerint::ErrorCode::InvalidConfig,
                            std::string("unknown arch '") + (name ? name : "") +
                                "' (allowed: binary-tree, greedy-tree, token-ring, hier-ring, hier-tree)");
    return *k;
}

} // namespace

extern "C" {

const char* aer_version(void) { return "0.1.0"; }

const char* aer_last_error(void) { return g_last_error.c_str(); }

void aer_free(char* text) { std::free(text); }

aer_status aer_analytic(const char* arch, const char* quantity, uint32_t n, int64_t* num, int64_t* den)
{
    if (!num || !den) return invalid("null output pointer");
    return guarded([&] {
        const auto k = arch_or_throw(arch);
        const std::string q = quantity ? quantity : "";
        aerint::Rational r;
        if (q == "sparse") {
            r = aerint::analytic_sparse_latency(k, n);
        } else if (q == "burst") {
            r = aerint::analytic_burst_latency(k, n);
        } else if (q == "area") {
            r = aerint::Rational(static_cast<std::int64_t>(aerint::arbiter_count(k, n)));
        } else {
            throw aerint::Error(aerint::ErrorCode::InvalidConfig,
                                "unknown quantity '" + q + "' (allowed: sparse, burst, area)");
        }
        *num = r.num();
        *den = r.den();
        return AER_OK;
    });
}

aer_status aer_arbiter_create(const char* arch, uint32_t n, uint64_t seed, aer_arbiter** out)
{
    if (!out) return invalid("null output pointer");
    *out = nullptr;
    return guarded([&] {
        aerint::ArbiterConfig cfg;
        cfg.kind = arch_or_throw(arch);
        cfg.n_neurons = n;
        cfg.seed = seed;
        *out = new aer_arbiter{aerint::ArbiterInstance(cfg)};
        return AER_OK;
    });
}

void aer_arbiter_destroy(aer_arbiter* arbiter) { delete arbiter; }

aer_status aer_arbiter_cell_count(const aer_arbiter* arbiter, uint64_t* cells)
{
    if (!arbiter || !cells) return invalid("null argument");
    *cells = arbiter->instance.two_input_cells();
    g_last_error.clear();
    return AER_OK;
}

aer_status aer_arbiter_measure_sparse(aer_arbiter* arbiter, uint64_t trials, uint64_t seed, double* mean, double* ci95)
{
    if (!arbiter || !mean) return invalid("null argument");
    return guarded([&] {
        const auto est = aerint::measure_sparse(arbiter->instance, trials, seed);
        *mean = est.mean;
        if (ci95) *ci95 = est.ci95;
        return AER_OK;
    });
}

aer_status aer_arbiter_measure_burst(aer_arbiter* arbiter, uint64_t* total)
{
    if (!arbiter || !total) return invalid("null argument");
    return guarded([&] {
        *total = aerint::measure_burst(arbiter->instance);
        return AER_OK;
    });
}

aer_status aer_arbiter_run_burst(aer_arbiter* arbiter, const uint32_t* neurons, size_t count, uint32_t* addresses)
{
    if (!arbiter || (count > 0 && (!neurons || !addresses))) return invalid("null argument");
    return guarded([&] {
        aerint::SpikeTrain train;
        for (size_t i = 0; i < count; ++i) train.spikes.push_back({neurons[i], 0});
        const std::uint64_t before = arbiter->instance.stats().mutex_violations;
        const auto events = arbiter->instance.simulate(train);
        for (size_t i = 0; i < events.size(); ++i) addresses[i] = events[i].encoded_address;
        if (arbiter->instance.stats().mutex_violations != before) {
            g_last_error = "overlapping grants";
            return AER_ERR_VIOLATION;
        }
        return AER_OK;
    });
}

aer_status aer_cam_create(const char* config_json, aer_cam** out)
{
    if (!out) return invalid("null output pointer");
    *out = nullptr;
    return guarded([&] {
        aerint::CamConfig cfg;
        if (config_json && *config_json) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(config_json);
                for (const auto& item : j.items()) {
                    const std::string& k = item.key();
                    const auto& v = item.value();
                    if (k == "entries") cfg.n_entries = v.get<std::uint32_t>();
                    else if (k == "width") cfg.width = v.get<unsigned>();
                    else if (k == "completion") cfg.completion = aerint::parse_completion(v.get<std::string>());
                    else if (k == "feedback") cfg.feedback = v.get<bool>();
                    else if (k == "speculative") cfg.speculative_tail = v.get<unsigned>();
                    else if (k == "sense-threshold") cfg.sense_threshold = v.get<double>();
                    else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
                    else if (k == "delay-setting") cfg.delay_setting = v.get<unsigned>();
                    else throw aerint::Error(aerint::ErrorCode::InvalidConfig, "unknown key \"" + k + "\"");
                }
            } catch (const nlohmann::json::exception& e) {
                throw aerint::Error(aerint::ErrorCode::InvalidConfig, std::string("cam config: ") + e.what());
            }
        }
        *out = new aer_cam{aerint::CamArray(cfg)};
        return AER_OK;
    });
}

void aer_cam_destroy(aer_cam* cam) { delete cam; }

aer_status aer_cam_write(aer_cam* cam, uint32_t index, uint64_t word)
{
    if (!cam) return invalid("null cam");
    return guarded([&] {
        cam->array.write_entry(index, word);
        return AER_OK;
    });
}

aer_status aer_cam_search(aer_cam* cam, uint64_t key, uint8_t* flags, size_t flags_len, uint64_t* cycle_time,
                          double* energy)
{
    if (!cam) return invalid("null cam");
    return guarded([&] {
        if (flags && flags_len < cam->array.config().n_entries)
            throw aerint::Error(aerint::ErrorCode::InvalidConfig, "flags buffer shorter than the entry count");
        const auto r = cam->array.search(key);
        if (flags)
            for (size_t i = 0; i < r.match.size(); ++i) flags[i] = r.match[i] ? 1 : 0;
        if (cycle_time) *cycle_time = r.cycle_time;
        if (energy) *energy = r.energy.total();
        aerint::require_reliable(r);
        return AER_OK;
    });
}

aer_status aer_speculative_probability(unsigned width, unsigned n_tail, int64_t* num, int64_t* den)
{
    if (!num || !den) return invalid("null output pointer");
    return guarded([&] {
        const auto r = aerint::speculative_close_probability(width, n_tail);
        *num = r.num();
        *den = r.den();
        return AER_OK;
    });
}

aer_status aer_execute(const char* command, const char* file_json, const char* flags_json, char** output,
                       char** trace_csv)
{
    if (!command || !output) return invalid("null argument");
    *output = nullptr;
    if (trace_csv) *trace_csv = nullptr;
    return guarded([&] {
        const auto res = aerint::run_command(command, file_json ? file_json : "", flags_json ? flags_json : "",
                                             trace_csv != nullptr);
        *output = copy_out(res.output);
        if (trace_csv && !res.trace_csv.empty()) *trace_csv = copy_out(res.trace_csv);
        if (res.status == 3) g_last_error = "violations detected";
        return static_cast<aer_status>(res.status);
    });
}

aer_status aer_check_trace(const char* trace_csv, char** report_json)
{
    if (!trace_csv || !report_json) return invalid("null argument");
    *report_json = nullptr;
    return guarded([&] {
        const auto res = aerint::check_trace_csv(trace_csv);
        *report_json = copy_out(res.output);
        if (res.status == 3) g_last_error = "violations detected";
        return static_cast<aer_status>(res.status);
    });
}

} // extern "C"
