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
#include <vector>

#include "aerint/rational.hpp"
#include "aerint/sim_kernel.hpp"

namespace aerint {

enum class CompletionKind { DelayLine, Cscd };

const char* to_string(CompletionKind k);
CompletionKind parse_completion(const std::string& name);

enum class CloseCause { None, Feedback, Speculative, DummyOff };

const char* to_string(CloseCause c);

/// Device and timing model. Times are in subticks.
struct CamTimingParams {
    double base_charge = 100;     // ML charge time of a nominal matching entry
    double jitter = 0.10;         // per-entry static charge-time spread, uniform +-
    double dummy_slowdown = 1.2;  // dummy charge time over the slowest entry
    double wire_per_entry = 0.08; // Off-signal distribution delay per entry
    /// Per-search common-mode variation, as a multiple of `jitter`.
    double search_variation_gain = 3.0;
    double decay = 4;             // current decay constant after a source closes
    SimTime sl_setup = 2;         // search lines valid before req+
    SimTime hs_gate = 1;
    SimTime precharge = 20;       // ML discharge to ground, also the reset pulse
    SimTime sensor_delay = 60;
    SimTime cscd_reset = 5;
    SimTime inter_search_gap = 10;
    SimTime min_clk_pulse = 4;
    SimTime min_reset_pulse = 4;
    unsigned calibration_trials = 200;
};

/// Fitted energy units. Not derived from a circuit model.
struct CamEnergyParams {
    double e_ml = 1.0;            // full-swing ML charge per entry
    double swing_cap = 0.6;       // ML swing with feedback control
    double e_pulldown = 0.00073;  // per subtick of current through a mismatching entry
    double e_searchline = 0.02;   // per toggled search-line bit per entry
    double e_dummy = 1.0;
    double e_cscd = 0.05;
    double e_delay_step = 0.002;  // per delay-line step traversed
};

struct CamConfig {
    std::uint32_t n_entries = 16;
    unsigned width = 11;
    CompletionKind completion = CompletionKind::Cscd;
    /// Delay-line setting in steps (1 subtick each). Calibrated on
    /// construction when unset.
    std::optional<unsigned> delay_setting;
    bool feedback = false;
    unsigned speculative_tail = 0;  // 0 disables speculative sense
    double sense_threshold = 0.5;   // fraction of the dummy entry's current
    CamTimingParams timing;
    CamEnergyParams energy;
    std::uint64_t seed = 1;
    bool trace = false;
};

struct EnergyLedger {
    double e_ml_charge = 0;
    double e_pulldown = 0;
    double e_searchline = 0;
    double e_dummy = 0;
    double e_cscd = 0;
    double e_delay_line = 0;

    double total() const { return e_ml_charge + e_pulldown + e_searchline + e_dummy + e_cscd + e_delay_line; }
};

struct SearchResult {
    std::vector<bool> match;
    SimTime cycle_time = 0;  // req+ to ack-
    EnergyLedger energy;
    std::vector<CloseCause> close_cause;
    /// Set when the delay line fired before the dummy entry completed; flags
    /// of slow matching entries may then read as mismatches.
    bool false_timing = false;
};

struct CurrentCase {
    std::string name;
    double current_change = 0;  // in units of the dummy entry's current
};

struct MarginReport {
    std::vector<CurrentCase> cases;
    std::string worst_case;
    double margin = 0;  // smallest change over the sensing threshold
};

class CamArray {
public:
    explicit CamArray(const CamConfig& config);
    ~CamArray();
    CamArray(CamArray&&) noexcept;
    CamArray& operator=(CamArray&&) noexcept;

    const CamConfig& config() const;

    void write_entry(std::uint32_t index, std::uint64_t word);
    std::uint64_t read_entry(std::uint32_t index) const;

    /// Full four-phase search. Draws one per-search variation sample.
    SearchResult search(std::uint64_t key);
    /// Cycle time at nominal conditions (no per-search variation); does not
    /// advance the array.
    SimTime cycle_time_model(std::uint64_t key) const;
    /// Handshake time outside the forward phase: ack+ to ack-.
    SimTime return_phase_cost() const;

    /// Nominal dummy-entry completion time, Off distribution included.
    SimTime dummy_delay() const;
    double entry_jitter(std::uint32_t index) const;
    unsigned delay_setting() const;
    void set_delay_setting(unsigned steps);

    /// Peak switched current per sensing case; throws InsufficientMargin if
    /// any case stays below the sense threshold.
    MarginReport worst_case_current_margin() const;

    const Trace& trace() const;
    SimTime now() const;

private:
    friend unsigned calibrate_delay_line(const CamConfig&, unsigned, std::uint64_t);

    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Throws FalseTiming for a search whose delay line fired early.
void require_reliable(const SearchResult& result);

/// Minimal 8-bit delay setting with no FalseTiming over `trials` searches
/// of a device built from `config`. Throws Unsatisfiable past 255 steps.
unsigned calibrate_delay_line(const CamConfig& config, unsigned trials, std::uint64_t seed);

/// (2^W - 2^(W - n_tail) + 1) / 2^W.
Rational speculative_close_probability(unsigned width, unsigned n_tail);

/// Bundled-data order on the search handshake, clock high/low widths and
/// reset pulse width.
std::vector<TimingViolation> check_cam_timing(const std::vector<TraceRecord>& records,
                                              SimTime min_clk_pulse = 4, SimTime min_reset_pulse = 4);

} // namespace aerint
