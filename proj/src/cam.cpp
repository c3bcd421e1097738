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

#include "aerint/cam.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "aerint/error.hpp"
#include "aerint/rng.hpp"

namespace aerint {

const char* to_string(CompletionKind k) { return k == CompletionKind::DelayLine ? "delay-line" : "cscd"; }

CompletionKind parse_completion(const std::string& name)
{
    if (name == "delay-line") return CompletionKind::DelayLine;
    if (name == "cscd") return CompletionKind::Cscd;
    throw Error(ErrorCode::InvalidConfig, "unknown completion mode '" + name + "' (allowed: delay-line, cscd)");
}

const char* to_string(CloseCause c)
{
    switch (c) {
    case CloseCause::None: return "none";
    case CloseCause::Feedback: return "feedback";
    case CloseCause::Speculative: return "speculative";
    case CloseCause::DummyOff: return "dummy-off";
    }
    return "?";
}

namespace {

constexpr unsigned kMaxDelaySetting = 255;

void validate(const CamConfig& c)
{
    if (c.n_entries < 1) throw Error(ErrorCode::InvalidConfig, "n_entries must be >= 1");
    if (c.width < 1 || c.width > 63) throw Error(ErrorCode::InvalidConfig, "width must be in [1, 63]");
    if (c.speculative_tail > c.width)
        throw Error(ErrorCode::InvalidConfig, "speculative tail longer than the word");
    if (!(c.timing.dummy_slowdown > 1)) throw Error(ErrorCode::InvalidConfig, "dummy_slowdown must exceed 1");
    if (c.timing.jitter < 0 || c.timing.jitter >= 1) throw Error(ErrorCode::InvalidConfig, "jitter must be in [0, 1)");
    if (!(c.sense_threshold > 0)) throw Error(ErrorCode::InvalidConfig, "sense_threshold must be positive");
    if (!(c.timing.decay > 0) || !(c.timing.base_charge > 0))
        throw Error(ErrorCode::InvalidConfig, "timing constants must be positive");
    const auto& e = c.energy;
    if (e.e_ml < 0 || e.swing_cap <= 0 || e.swing_cap > 1 || e.e_pulldown < 0 || e.e_searchline < 0 ||
        e.e_dummy < 0 || e.e_cscd < 0 || e.e_delay_step < 0)
        throw Error(ErrorCode::InvalidConfig, "energy parameters out of range");
}

} // namespace

struct CamArray::Impl {
    explicit Impl(const CamConfig& cfg) : config(cfg), trace(cfg.trace), rng(cfg.seed), hs("cam.hs", true, false)
    {
        validate(config);
        Rng device(config.seed ^ 0x9e3779b97f4a7c15ull);
        jitter.resize(config.n_entries);
        double worst = 0;
        for (auto& j : jitter) {
            j = device.uniform(-config.timing.jitter, config.timing.jitter);
            worst = std::max(worst, j);
        }
        stored.assign(config.n_entries, 0);
        const auto& t = config.timing;
        dummy_nominal = t.dummy_slowdown * t.base_charge * (1 + worst) + t.wire_per_entry * config.n_entries;
    }

    std::uint64_t word_mask() const { return (std::uint64_t{1} << config.width) - 1; }
    std::uint64_t tail_mask() const { return (std::uint64_t{1} << config.speculative_tail) - 1; }

    /// Per-search scale factor for a variation draw u in [-1, 1).
    double scale(double u) const { return 1 + u * config.timing.jitter * config.timing.search_variation_gain; }

    struct Evaluation {
        SearchResult result;
        double dummy_time = 0;
        SimTime forward = 0;
    };

    Evaluation evaluate(std::uint64_t key, double u) const
    {
        const auto& t = config.timing;
        const auto& e = config.energy;
        const double f = scale(u);
        const double d_s = dummy_nominal * f;
        const bool delay_line = config.completion == CompletionKind::DelayLine;
        const double fire = delay_line ? static_cast<double>(setting) : d_s;

        Evaluation ev;
        SearchResult& r = ev.result;
        r.false_timing = delay_line && fire < d_s;
        r.match.assign(config.n_entries, false);
        r.close_cause.assign(config.n_entries, CloseCause::None);

        // Close times of every source that turned on, for the current sensor.
        std::vector<double> closes;
        closes.reserve(config.n_entries + 1);
        closes.push_back(d_s);  // dummy
        r.energy.e_dummy = e.e_dummy;
        const std::uint64_t tail = tail_mask();
        for (std::uint32_t i = 0; i < config.n_entries; ++i) {
            const std::uint64_t diff = (stored[i] ^ key) & word_mask();
            if (diff == 0) {
                const double charge = t.base_charge * (1 + jitter[i]) * f;
                r.match[i] = charge <= fire;
                if (config.feedback) {
                    r.close_cause[i] = CloseCause::Feedback;
                    closes.push_back(charge);
                    r.energy.e_ml_charge += e.e_ml * e.swing_cap;
                } else {
                    r.close_cause[i] = CloseCause::DummyOff;
                    closes.push_back(d_s);
                    r.energy.e_ml_charge += e.e_ml;
                }
            } else if (config.speculative_tail > 0 && (diff & tail) != 0) {
                r.close_cause[i] = CloseCause::Speculative;
            } else {
                r.close_cause[i] = CloseCause::DummyOff;
                closes.push_back(d_s);
                r.energy.e_pulldown += e.e_pulldown * d_s;
            }
        }
        const std::uint64_t toggled = (key ^ last_key) & word_mask();
        r.energy.e_searchline =
            e.e_searchline * static_cast<double>(std::popcount(toggled)) * config.n_entries;

        SimTime back = 0;
        if (delay_line) {
            ev.forward = setting;
            back = std::max<SimTime>(t.precharge, setting);
            r.energy.e_delay_line = e.e_delay_step * 2.0 * setting;
        } else {
            // Total current decays with constant `decay` after each source
            // closes; completion is when it drops below the threshold.
            const double m = *std::max_element(closes.begin(), closes.end());
            double sum = 0;
            for (double c : closes) sum += std::exp((c - m) / t.decay);
            const double quiet = m + t.decay * std::log(sum / config.sense_threshold);
            ev.forward = static_cast<SimTime>(std::ceil(std::max(quiet, m))) + t.sensor_delay;
            back = std::max(t.precharge, t.cscd_reset);
            r.energy.e_cscd = e.e_cscd;
        }
        r.cycle_time = ev.forward + t.hs_gate + back + t.hs_gate;
        ev.dummy_time = d_s;
        return ev;
    }

    CamConfig config;
    Trace trace;
    Rng rng;
    HandshakeChannel hs;
    std::vector<double> jitter;
    std::vector<std::uint64_t> stored;
    double dummy_nominal = 0;
    unsigned setting = 0;
    std::uint64_t last_key = 0;
    SimTime now = 0;
    bool first = true;
};

CamArray::CamArray(const CamConfig& config) : impl_(std::make_unique<Impl>(config))
{
    if (config.completion == CompletionKind::DelayLine) {
        if (config.delay_setting) {
            set_delay_setting(*config.delay_setting);
        } else {
            impl_->setting = calibrate_delay_line(config, config.timing.calibration_trials, config.seed + 1);
        }
        impl_->config.delay_setting = impl_->setting;
    }
}

CamArray::~CamArray() = default;
CamArray::CamArray(CamArray&&) noexcept = default;
CamArray& CamArray::operator=(CamArray&&) noexcept = default;

const CamConfig& CamArray::config() const { return impl_->config; }

void CamArray::write_entry(std::uint32_t index, std::uint64_t word)
{
    if (index >= impl_->config.n_entries)
        throw Error(ErrorCode::IndexOutOfRange, "entry " + std::to_string(index) + " of " +
                                                    std::to_string(impl_->config.n_entries));
    if ((word & ~impl_->word_mask()) != 0)
        throw Error(ErrorCode::WidthMismatch, "word wider than " + std::to_string(impl_->config.width) + " bits");
    impl_->stored[index] = word;
}

std::uint64_t CamArray::read_entry(std::uint32_t index) const
{
    if (index >= impl_->config.n_entries)
        throw Error(ErrorCode::IndexOutOfRange, "entry " + std::to_string(index));
    return impl_->stored[index];
}

SearchResult CamArray::search(std::uint64_t key)
{
    Impl& im = *impl_;
    if ((key & ~im.word_mask()) != 0)
        throw Error(ErrorCode::WidthMismatch, "key wider than " + std::to_string(im.config.width) + " bits");
    const double u = im.rng.uniform(-1.0, 1.0);
    Impl::Evaluation ev = im.evaluate(key, u);
    const auto& t = im.config.timing;

    const SimTime s0 = im.first ? im.now : im.now + t.inter_search_gap;
    const SimTime req_up = s0 + t.sl_setup;
    const SimTime dummy_off = req_up + static_cast<SimTime>(std::ceil(ev.dummy_time));
    const SimTime ack_up = req_up + ev.forward;
    const SimTime req_down = ack_up + t.hs_gate;
    const SimTime ack_down = req_up + ev.result.cycle_time;
    Trace* tr = im.trace.enabled() ? &im.trace : nullptr;
    if (tr) {
        im.hs.set_data_valid(true, s0, tr);
        im.hs.advance(HandshakeAction::RaiseReq, req_up, tr);
        tr->record(req_up, "cam.clk", "clk", 0, 1);
        if (dummy_off <= ack_up) tr->record(dummy_off, "cam.dummy", "off", 0, 1);
        im.hs.advance(HandshakeAction::RaiseAck, ack_up, tr);
        if (dummy_off > ack_up) tr->record(dummy_off, "cam.dummy", "off", 0, 1);
        const SimTime late = std::max(dummy_off, req_down);
        im.hs.set_data_valid(false, late, tr);
        im.hs.advance(HandshakeAction::LowerReq, late, tr);
        tr->record(late, "cam.dummy", "off", 1, 0);
        tr->record(late, "cam.rst", "rst", 0, 1);
        tr->record(late + t.precharge, "cam.rst", "rst", 1, 0);
        const SimTime end = std::max(ack_down, late + t.precharge);
        im.hs.advance(HandshakeAction::LowerAck, end, tr);
        tr->record(end, "cam.clk", "clk", 1, 0);
        im.now = end;
    } else {
        im.now = std::max(ack_down, std::max(dummy_off, req_down) + t.precharge);
    }
    im.first = false;
    im.last_key = key;
    return std::move(ev.result);
}

SimTime CamArray::cycle_time_model(std::uint64_t key) const { return impl_->evaluate(key, 0.0).result.cycle_time; }

SimTime CamArray::return_phase_cost() const
{
    const auto& t = impl_->config.timing;
    const SimTime back = impl_->config.completion == CompletionKind::DelayLine
                             ? std::max<SimTime>(t.precharge, impl_->setting)
                             : std::max(t.precharge, t.cscd_reset);
    return 2 * t.hs_gate + back;
}

SimTime CamArray::dummy_delay() const { return static_cast<SimTime>(std::ceil(impl_->dummy_nominal)); }
double CamArray::entry_jitter(std::uint32_t index) const { return impl_->jitter.at(index); }
unsigned CamArray::delay_setting() const { return impl_->setting; }

void CamArray::set_delay_setting(unsigned steps)
{
    if (steps > kMaxDelaySetting) throw Error(ErrorCode::InvalidConfig, "delay setting exceeds 8 bits");
    impl_->setting = steps;
    impl_->config.delay_setting = steps;
}

MarginReport CamArray::worst_case_current_margin() const
{
    const CamConfig& c = impl_->config;
    if (c.completion != CompletionKind::Cscd)
        throw Error(ErrorCode::InvalidConfig, "current margin applies to CSCD completion only");
    const double n = c.n_entries;
    const unsigned tail = c.speculative_tail;
    // Sources still on when the dummy turns off, plus the dummy itself.
    const double random_open = tail > 0 ? n * std::ldexp(1.0, -static_cast<int>(tail)) : n;
    MarginReport rep;
    rep.cases = {{"all-match", n + 1},
                 {"mismatch-in-tail", (tail > 0 ? 0.0 : n) + 1},
                 {"mismatch-in-head", n + 1},
                 {"random", random_open + 1}};
    const auto worst = std::min_element(rep.cases.begin(), rep.cases.end(),
                                        [](const CurrentCase& a, const CurrentCase& b) {
                                            return a.current_change < b.current_change;
                                        });
    rep.worst_case = worst->name;
    rep.margin = worst->current_change / c.sense_threshold;
    if (worst->current_change < c.sense_threshold)
        throw Error(ErrorCode::InsufficientMargin,
                    "case " + worst->name + " switches " + std::to_string(worst->current_change) +
                        " units, below threshold " + std::to_string(c.sense_threshold));
    return rep;
}

const Trace& CamArray::trace() const { return impl_->trace; }
SimTime CamArray::now() const { return impl_->now; }

void require_reliable(const SearchResult& result)
{
    if (result.false_timing) throw Error(ErrorCode::FalseTiming, "delay line fired before the dummy entry completed");
}

unsigned calibrate_delay_line(const CamConfig& config, unsigned trials, std::uint64_t seed)
{
    if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
    CamConfig probe = config;
    probe.completion = CompletionKind::DelayLine;
    probe.delay_setting = 0;
    probe.trace = false;
    CamArray array(probe);
    Rng rng(seed);
    // Start from zero and raise the setting until no trial sees an early
    // completion; FalseTiming depends only on the per-search variation.
    double needed = 0;
    for (unsigned i = 0; i < trials; ++i) {
        const double u = rng.uniform(-1.0, 1.0);
        needed = std::max(needed, array.impl_->dummy_nominal * array.impl_->scale(u));
    }
    const double steps = std::ceil(needed - 1e-9);
    if (steps > kMaxDelaySetting)
        throw Error(ErrorCode::Unsatisfiable, "delay line needs " + std::to_string(static_cast<long long>(steps)) +
                                                  " steps, more than 255");
    return static_cast<unsigned>(steps);
}

Rational speculative_close_probability(unsigned width, unsigned n_tail)
{
    if (n_tail > width) throw Error(ErrorCode::InvalidConfig, "n_tail exceeds width");
    if (width > 61) throw Error(ErrorCode::InvalidConfig, "width too large for an exact ratio");
    const std::int64_t total = std::int64_t{1} << width;
    return Rational(total - (std::int64_t{1} << (width - n_tail)) + 1, total);
}

std::vector<TimingViolation> check_cam_timing(const std::vector<TraceRecord>& records, SimTime min_clk_pulse,
                                              SimTime min_reset_pulse)
{
    std::vector<TimingViolation> out = check_handshakes(records);
    std::optional<SimTime> clk_rise, clk_fall, rst_rise;
    for (const TraceRecord& r : records) {
        if (r.component == "cam.clk" && r.signal == "clk") {
            if (r.old_value == 0 && r.new_value == 1) {
                if (clk_fall && r.time - *clk_fall < min_clk_pulse)
                    out.push_back({"clk_pulse", r.time,
                                   "clock low for " + std::to_string(r.time - *clk_fall) + " subticks"});
                clk_rise = r.time;
            } else if (r.old_value == 1 && r.new_value == 0) {
                if (clk_rise && r.time - *clk_rise < min_clk_pulse)
                    out.push_back({"clk_pulse", r.time,
                                   "clock high for " + std::to_string(r.time - *clk_rise) + " subticks"});
                clk_fall = r.time;
            }
        } else if (r.component == "cam.rst" && r.signal == "rst") {
            if (r.old_value == 0 && r.new_value == 1) {
                rst_rise = r.time;
            } else if (r.old_value == 1 && r.new_value == 0 && rst_rise && r.time - *rst_rise < min_reset_pulse) {
                out.push_back({"reset_pulse", r.time,
                               "reset high for " + std::to_string(r.time - *rst_rise) + " subticks"});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TimingViolation& a, const TimingViolation& b) { return a.time < b.time; });
    return out;
}

} // namespace aerint
