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

#include "aerint/hat_pipeline.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "aerint/arbitration.hpp"
#include "aerint/error.hpp"
#include "aerint/rng.hpp"

namespace aerint {

DualRailValue DualRailValue::encode(std::uint32_t value, unsigned width)
{
    DualRailValue v(width);
    for (unsigned i = 0; i < width; ++i) {
        const bool bit = ((value >> i) & 1u) != 0;
        v.set_rails(i, bit, !bit);
    }
    return v;
}

void DualRailValue::set_rails(unsigned bit, bool t, bool f)
{
    if (bit >= width_) throw Error(ErrorCode::IndexOutOfRange, "dual-rail bit " + std::to_string(bit));
    const std::uint32_t m = 1u << bit;
    t_ = t ? (t_ | m) : (t_ & ~m);
    f_ = f ? (f_ | m) : (f_ & ~m);
}

std::vector<bool> mask_requests(const std::vector<bool>& neuron_reqs, bool cluster_grant, MaskingStage& stage)
{
    stage.masked.resize(neuron_reqs.size(), false);
    for (std::size_t i = 0; i < neuron_reqs.size(); ++i) {
        // plus input: grant; both inputs drive the reset
        const bool set = neuron_reqs[i] && cluster_grant;
        const bool reset = !neuron_reqs[i];
        if (set) stage.masked[i] = true;
        else if (reset) stage.masked[i] = false;
    }
    return stage.masked;
}

bool completion_detect(const CDBlock& block, const std::vector<bool>& inputs)
{
    const auto high = std::count(inputs.begin(), inputs.end(), true);
    return block.kind == CdKind::OrBased ? high > 0 : high == 1;
}

bool completion_detect(const CDBlock& block, const DualRailValue& value)
{
    const std::uint32_t both = value.true_rails() & value.false_rails();
    const std::uint32_t any = value.true_rails() | value.false_rails();
    const std::uint32_t full = block.width >= 32 ? ~0u : (1u << block.width) - 1u;
    if (block.kind == CdKind::OrBased) return (any & full) == full;
    return ((any & ~both) & full) == full;
}

DualRailValue qdi_encode(std::uint32_t one_hot)
{
    if (one_hot & ~0xFu) throw Error(ErrorCode::NotOneHot, "grant wider than 4 bits");
    if (one_hot == 0) return DualRailValue(2);
    if ((one_hot & (one_hot - 1)) != 0)
        throw Error(ErrorCode::NotOneHot, "grant has more than one bit set");
    unsigned idx = 0;
    while (((one_hot >> idx) & 1u) == 0) ++idx;
    return DualRailValue::encode(idx, 2);
}

bool ack_generator_step(const AckGeneratorInputs& inputs, bool packet_captured, AckGeneratorState& state)
{
    const std::size_t levels = inputs.encoded_valid.size();
    if (packet_captured) {
        state.resetting.assign(levels, false);
        if (levels == 0) return state.ack = true;
        state.resetting[levels - 1] = true;
        for (std::size_t l = levels - 1; l-- > 0;) {
            const bool below_active = l + 1 < inputs.mask_valid.size() && inputs.mask_valid[l + 1];
            state.resetting[l] = state.resetting[l + 1] && !below_active;
        }
        state.ack = true;
        return state.ack;
    }
    if (state.ack) {
        bool all_low = true;
        for (std::size_t l = 0; l < levels && l < state.resetting.size(); ++l)
            if (state.resetting[l] && inputs.encoded_valid[l]) all_low = false;
        if (all_low) state.ack = false;
    }
    return state.ack;
}

namespace {

std::string lvl(const char* prefix, unsigned l) { return prefix + std::to_string(l); }

class PipelineModel {
public:
    explicit PipelineModel(const PipelineConfig& cfg)
        : cfg_(cfg), d_(cfg.delays), levels_(cfg.levels), kernel_(true), rng_(cfg.seed)
    {
        if (levels_ < 1 || levels_ > 10)
            throw Error(ErrorCode::InvalidN, "pipeline levels must be in [1, 10]");
        n_ = 1u << (2 * levels_);
        active_.resize(levels_ + 1);
        for (unsigned depth = 0; depth <= levels_; ++depth) active_[depth].assign(std::size_t{1} << (2 * depth), 0);
        neurons_.resize(n_);
        d_time_.assign(levels_, 0);
        close_time_.assign(levels_, 0);
        in_reset_time_.assign(levels_, 0);
        path_.assign(levels_, 0);
        result_.arbitrations_per_level.assign(levels_, 0);
        ack_state_.resetting.assign(levels_, true);
        actor_ = kernel_.add_component("hat", [this](Kernel&, const Event& ev) {
            auto fn = std::move(actions_[ev.payload]);
            actions_[ev.payload] = nullptr;
            fn();
        });
    }

    PipelineResult run(const std::vector<Spike>& events)
    {
        for (const Spike& s : events) {
            if (s.neuron >= n_) throw Error(ErrorCode::IndexOutOfRange, "spike neuron " + std::to_string(s.neuron));
            const std::uint32_t id = s.neuron;
            const SimTime t = static_cast<SimTime>(s.t) * kSubticksPerUnit;
            at(t, [this, id] { arrive(id); });
        }
        kernel_.run();
        result_.trace = kernel_.trace().records();
        return std::move(result_);
    }

private:
    struct Neuron {
        bool busy = false;  // between req+ and ack-
        SimTime raised = 0;
        std::deque<SimTime> queued;
    };

    void at(SimTime t, std::function<void()> fn)
    {
        actions_.push_back(std::move(fn));
        kernel_.schedule(std::max(t, kernel_.now()), actor_, actions_.size() - 1);
    }

    void emit(SimTime t, std::string comp, std::string sig, std::int64_t value)
    {
        at(t, [this, comp = std::move(comp), sig = std::move(sig), value] { set(comp, sig, value); });
    }

    void set(const std::string& comp, const std::string& sig, std::int64_t value)
    {
        auto [it, fresh] = state_.try_emplace(comp + "\x1f" + sig, 0);
        if (fresh && sig == "latch") it->second = 1;  // latches start transparent
        auto& cur = it->second;
        kernel_.trace().record(kernel_.now(), comp, sig, cur, value);
        cur = value;
    }

    std::uint32_t prefix(std::uint32_t neuron, unsigned depth) const { return neuron >> (2 * (levels_ - depth)); }

    void adjust(std::uint32_t neuron, int delta)
    {
        for (unsigned depth = 0; depth <= levels_; ++depth)
            active_[depth][prefix(neuron, depth)] += delta;
    }

    bool mask_valid(unsigned level) const
    {
        return active_[level][prefix(last_neuron_, level)] > 0;
    }

    void arrive(std::uint32_t id)
    {
        Neuron& nr = neurons_[id];
        if (nr.busy) {
            nr.queued.push_back(kernel_.now());
            return;
        }
        raise(id, kernel_.now());
    }

    void raise(std::uint32_t id, SimTime arrival)
    {
        Neuron& nr = neurons_[id];
        nr.busy = true;
        nr.raised = arrival;
        set(lvl("neuron", id), "req", 1);
        adjust(id, +1);
        if (idle_) {
            idle_ = false;
            start(0);
        }
    }

    std::uint32_t arbitrate4(const std::array<bool, 4>& req)
    {
        ArbiterCell pair_a, pair_b, root;
        const Grant ga = two_input_arbitrate(req[0], req[1], pair_a, rng_);
        const Grant gb = two_input_arbitrate(req[2], req[3], pair_b, rng_);
        const Grant gr = two_input_arbitrate(ga != Grant::None, gb != Grant::None, root, rng_);
        if (gr == Grant::A) return ga == Grant::A ? 0 : 1;
        return gb == Grant::A ? 2 : 3;
    }

    void start(unsigned first_level)
    {
        const SimTime t0 = kernel_.now();
        SimTime t = t0;
        std::uint32_t cluster = first_level == 0 ? 0 : prefix(last_neuron_, first_level);
        for (unsigned l = first_level; l < levels_; ++l) {
            std::vector<bool> reqs(4);
            std::array<bool, 4> sub{};
            for (unsigned j = 0; j < 4; ++j) reqs[j] = active_[l + 1][cluster * 4 + j] > 0;
            const auto masked = mask_requests(reqs, true, masks_);
            for (unsigned j = 0; j < 4; ++j) sub[j] = masked[j];
            const SimTime t_mask = t + d_.mask;
            if (l >= 1) at(t_mask + d_.cd_mask, [this, l] { set("ackgen", lvl("V", l), mask_valid(l)); });
            const std::uint32_t j = arbitrate4(sub);
            ++result_.arbitrations_per_level[l];
            path_[l] = j;
            const std::uint32_t one_hot = 1u << j;
            const SimTime t_a = t_mask + d_.arbiter;
            const SimTime t_out = t_a + d_.latch_capture;
            const auto hc = lvl("hc1.L", l);
            emit(t_a, lvl("arb.L", l), "grant", one_hot);
            emit(t_a, hc, "in", one_hot);
            emit(t_out, hc, "out", one_hot);
            close_time_[l] = t_a + d_.latch_close;
            emit(close_time_[l], hc, "latch", 0);
            in_reset_time_[l] = t_out + d_.grant_reset;
            emit(in_reset_time_[l], lvl("arb.L", l), "grant", 0);
            emit(in_reset_time_[l], hc, "in", 0);
            const DualRailValue code = qdi_encode(one_hot);
            const SimTime t_enc = t_out + d_.encoder;
            emit(t_enc, lvl("enc.L", l), "t", code.true_rails());
            emit(t_enc, lvl("enc.L", l), "f", code.false_rails());
            const bool complete = completion_detect(CDBlock{CdKind::XorBased, 4}, std::vector<bool>{
                (one_hot & 1u) != 0, (one_hot & 2u) != 0, (one_hot & 4u) != 0, (one_hot & 8u) != 0});
            d_time_[l] = t_enc + d_.cd;
            if (complete) emit(d_time_[l], "ackgen", lvl("D", l), 1);
            cluster = cluster * 4 + j;
            t = t_out;
        }
        const std::uint32_t neuron = cluster;
        last_neuron_ = neuron;
        adjust(neuron, -1);
        finish_packet(neuron, t0);
    }

    void finish_packet(std::uint32_t neuron, SimTime t0)
    {
        (void)t0;
        SimTime t_join = hc2_ready_;
        for (unsigned l = 0; l < levels_; ++l) t_join = std::max(t_join, d_time_[l]);
        t_join += d_.join;
        const SimTime t_hc2_out = t_join + d_.latch_capture;
        const SimTime hc2_close = t_join + d_.latch_close;
        emit(t_join, "hc2", "in", 1);
        emit(t_hc2_out, "hc2", "out", 1);
        emit(hc2_close, "hc2", "latch", 0);
        const SimTime t_output = t_hc2_out + d_.cd;
        emit(t_output, "hat.out", "req", 1);
        const SimTime t_out_ack = t_output + d_.receiver;
        emit(t_out_ack, "hat.out", "ack", 1);

        std::uint32_t address = 0;
        for (unsigned l = 0; l < levels_; ++l) address = (address << 2) | path_[l];
        PipelinePacket pkt;
        pkt.neuron = neuron;
        pkt.address = address;
        pkt.valid = address == neuron;
        pkt.t_request = neurons_[neuron].raised;
        pkt.t_output = t_output;
        result_.packets.push_back(pkt);

        const SimTime t_ack = t_output + d_.ack;
        emit(t_ack, "ackgen", "acknowledge", 1);
        emit(t_ack, lvl("neuron", neuron), "ack", 1);
        const SimTime t_req_down = t_ack + d_.neuron_response;
        emit(t_req_down, lvl("neuron", neuron), "req", 0);
        for (unsigned l = 1; l < levels_; ++l)
            at(t_req_down + d_.mask + d_.cd_mask, [this, l] { set("ackgen", lvl("V", l), mask_valid(l)); });

        // the low level is always reset
        const unsigned low = levels_ - 1;
        const SimTime t_encnull = reopen_level(low, t_ack + d_.ack_reopen);
        const SimTime t_sample = t_encnull + d_.cd;

        const SimTime hc2_in_low = t_encnull + d_.join;
        emit(hc2_in_low, "hc2", "in", 0);
        const SimTime hc2_reopen = std::max({hc2_in_low, t_out_ack, hc2_close + 1}) + d_.gate;
        emit(hc2_reopen, "hc2", "latch", 1);
        const SimTime hc2_null = hc2_reopen + d_.latch_capture;
        emit(hc2_null, "hc2", "out", 0);
        emit(hc2_null + d_.cd, "hat.out", "req", 0);
        const SimTime out_idle = hc2_null + d_.cd + d_.receiver;
        emit(out_idle, "hat.out", "ack", 0);
        hc2_ready_ = hc2_reopen;

        at(t_sample, [this, neuron, out_idle] { sample(neuron, out_idle); });
    }

    /// Reopens a first-stage latch no earlier than `t`; returns when its
    /// encoder output reaches NULL. Schedules the level's D fall.
    SimTime reopen_level(unsigned l, SimTime t)
    {
        const auto hc = lvl("hc1.L", l);
        const SimTime t_open = std::max(t, close_time_[l] + 1);
        emit(t_open, hc, "latch", 1);
        const SimTime t_null = std::max(t_open, in_reset_time_[l]) + d_.latch_capture;
        emit(t_null, hc, "out", 0);
        const SimTime t_enc = t_null + d_.encoder;
        emit(t_enc, lvl("enc.L", l), "t", 0);
        emit(t_enc, lvl("enc.L", l), "f", 0);
        d_time_[l] = t_enc + d_.cd;
        emit(d_time_[l], "ackgen", lvl("D", l), 0);
        return t_enc;
    }

    void sample(std::uint32_t neuron, SimTime out_idle)
    {
        AckGeneratorInputs in;
        in.mask_valid.assign(levels_, false);
        in.encoded_valid.assign(levels_, true);
        for (unsigned l = 1; l < levels_; ++l) in.mask_valid[l] = mask_valid(l);
        ack_generator_step(in, true, ack_state_);

        const SimTime now = kernel_.now();
        SimTime all_low = now;
        unsigned held = levels_;
        for (unsigned l = 0; l + 1 < levels_; ++l) {
            if (!ack_state_.resetting[l]) continue;
            held = std::min(held, l);
            reopen_level(l, now + d_.ack);
            all_low = std::max(all_low, d_time_[l]);
        }
        held = std::min(held, levels_ - 1);
        const SimTime t_ack_down = all_low + d_.gate;
        emit(t_ack_down, "ackgen", "acknowledge", 0);
        emit(t_ack_down, lvl("neuron", neuron), "ack", 0);
        at(t_ack_down, [this, neuron] { neuron_idle(neuron); });

        const SimTime next = std::max(t_ack_down, out_idle) + d_.gate;
        at(next, [this, held] {
            if (active_[0][0] == 0) {
                idle_ = true;
                return;
            }
            start(held);
        });
    }

    void neuron_idle(std::uint32_t id)
    {
        Neuron& nr = neurons_[id];
        nr.busy = false;
        if (nr.queued.empty()) return;
        const SimTime arrival = nr.queued.front();
        nr.queued.pop_front();
        at(kernel_.now() + d_.gate, [this, id, arrival] {
            if (!neurons_[id].busy) raise(id, arrival);
            else neurons_[id].queued.push_front(arrival);
        });
    }

    PipelineConfig cfg_;
    PipelineDelays d_;
    unsigned levels_;
    std::uint32_t n_ = 0;
    Kernel kernel_;
    Rng rng_;
    ComponentId actor_ = 0;
    std::vector<std::function<void()>> actions_;
    std::map<std::string, std::int64_t> state_;
    std::vector<std::vector<std::uint32_t>> active_;
    std::vector<Neuron> neurons_;
    std::vector<SimTime> d_time_, close_time_, in_reset_time_;
    std::vector<std::uint32_t> path_;
    MaskingStage masks_;
    AckGeneratorState ack_state_;
    SimTime hc2_ready_ = 0;
    std::uint32_t last_neuron_ = 0;
    bool idle_ = true;
    PipelineResult result_;
};

} // namespace

PipelineResult run_pipeline(const std::vector<Spike>& events, const PipelineConfig& config)
{
    PipelineModel model(config);
    return model.run(events);
}

std::vector<TimingViolation> check_timing(const std::vector<TraceRecord>& records)
{
    std::vector<TimingViolation> out = check_handshakes(records);

    struct LatchState {
        bool in_high = false;
        bool closed = false;
        SimTime close_time = 0;
        bool captured = false;
        bool in_reset_since_close = false;
        SimTime in_reset_time = 0;
    };
    struct RailState {
        std::int64_t t = 0;
        std::int64_t f = 0;
    };
    std::map<std::string, LatchState> latches;
    std::map<std::string, RailState> rails;

    // V levels that must settle before the low-level D falls
    std::set<std::string> v_signals;
    unsigned low_d = 0;
    bool any_d = false;
    for (const TraceRecord& r : records) {
        if (r.component != "ackgen") continue;
        if (r.signal.size() > 1 && r.signal[0] == 'V') v_signals.insert(r.signal);
        if (r.signal.size() > 1 && r.signal[0] == 'D') {
            low_d = std::max<unsigned>(low_d, static_cast<unsigned>(std::stoul(r.signal.substr(1))));
            any_d = true;
        }
    }
    const std::string low_d_name = "D" + std::to_string(low_d);
    std::set<std::string> awaiting;

    for (const TraceRecord& r : records) {
        const bool is_latch = r.component == "hc2" || r.component.rfind("hc1.", 0) == 0;
        if (is_latch) {
            LatchState& s = latches[r.component];
            if (r.signal == "in") {
                if (r.new_value != 0 && r.old_value == 0) {
                    s.in_high = true;
                    s.captured = true;
                    s.closed = false;
                    s.in_reset_since_close = false;
                } else if (r.new_value == 0 && r.old_value != 0) {
                    if (s.captured && (!s.closed || s.close_time >= r.time))
                        out.push_back({"hold", r.time, r.component + ": input reset before latch closed"});
                    s.in_high = false;
                    s.captured = false;
                    if (s.closed) {
                        s.in_reset_since_close = true;
                        s.in_reset_time = r.time;
                    }
                }
            } else if (r.signal == "latch") {
                if (r.old_value == 1 && r.new_value == 0) {
                    s.closed = true;
                    s.close_time = r.time;
                    s.in_reset_since_close = !s.in_high;
                    s.in_reset_time = r.time;
                } else if (r.old_value == 0 && r.new_value == 1) {
                    if (!s.in_reset_since_close || s.in_reset_time >= r.time)
                        out.push_back({"reopen", r.time, r.component + ": latch reopened before input reset"});
                }
            }
        }
        if (r.component.rfind("enc.", 0) == 0 && (r.signal == "t" || r.signal == "f")) {
            RailState& s = rails[r.component];
            if (r.old_value != 0 && r.new_value != 0 && r.old_value != r.new_value)
                out.push_back({"null_spacer", r.time, r.component + ": rails changed without NULL"});
            (r.signal == "t" ? s.t : s.f) = r.new_value;
            if ((s.t & s.f) != 0)
                out.push_back({"dual_rail", r.time, r.component + ": both rails high"});
        }
        if (r.component.rfind("neuron", 0) == 0 && r.signal == "req" && r.old_value == 1 && r.new_value == 0)
            awaiting = v_signals;
        if (r.component == "ackgen") {
            if (v_signals.count(r.signal)) awaiting.erase(r.signal);
            if (any_d && r.signal == low_d_name && r.old_value == 1 && r.new_value == 0 && !awaiting.empty()) {
                out.push_back({"ack_generator", r.time,
                               "low-level D fell before " + *awaiting.begin() + " settled"});
                awaiting.clear();
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TimingViolation& a, const TimingViolation& b) { return a.time < b.time; });
    return out;
}

} // namespace aerint
