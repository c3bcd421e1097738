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

#include "aerint/sim_kernel.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "aerint/error.hpp"

namespace aerint {

void Trace::record(SimTime time, std::string_view component, std::string_view signal,
                   std::int64_t old_value, std::int64_t new_value)
{
    if (!enabled_) return;
    if (time < last_time_)
        throw std::logic_error("trace record out of time order on " + std::string(component));
    last_time_ = time;
    if (capacity_ == 0) return;
    if (buffer_.size() == capacity_) {
        buffer_.pop_front();
        ++dropped_;
    }
    buffer_.push_back({time, std::string(component), std::string(signal), old_value, new_value});
}

std::vector<TraceRecord> Trace::records() const { return {buffer_.begin(), buffer_.end()}; }

void Trace::clear()
{
    buffer_.clear();
    dropped_ = 0;
    last_time_ = 0;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& records)
{
    os << "time,component,signal,old,new\n";
    for (const auto& r : records)
        os << r.time << ',' << r.component << ',' << r.signal << ',' << r.old_value << ','
           << r.new_value << '\n';
}

std::vector<TraceRecord> read_trace_csv(std::istream& is)
{
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("time,", 0) == 0) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.size() != 5)
            throw Error(ErrorCode::InvalidConfig,
                        "trace line " + std::to_string(line_no) + ": expected 5 columns");
        try {
            TraceRecord r;
            r.time = std::stoull(cols[0]);
            r.component = cols[1];
            r.signal = cols[2];
            r.old_value = std::stoll(cols[3]);
            r.new_value = std::stoll(cols[4]);
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidConfig,
                        "trace line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return out;
}

ComponentId Kernel::add_component(std::string name, EventHandler handler)
{
    components_.push_back({std::move(name), std::move(handler)});
    return static_cast<ComponentId>(components_.size() - 1);
}

EventId Kernel::schedule(SimTime at, ComponentId target, std::uint64_t payload)
{
    if (at < now_)
        throw Error(ErrorCode::SchedulingInPast,
                    "event at t=" + std::to_string(at) + " but now=" + std::to_string(now_));
    if (target >= components_.size())
        throw Error(ErrorCode::InvalidConfig, "unknown component " + std::to_string(target));
    const EventId id = next_id_++;
    queue_.push({id, at, target, payload});
    return id;
}

void Kernel::dispatch(const Event& ev)
{
    now_ = ev.at;
    auto& handler = components_[ev.target].handler;
    if (handler) handler(*this, ev);
}

RunStats Kernel::run_until(SimTime limit)
{
    RunStats stats;
    while (!queue_.empty() && queue_.top().at <= limit) {
        const Event ev = queue_.top();
        queue_.pop();
        dispatch(ev);
        ++stats.dispatched;
    }
    if (limit > now_) now_ = limit;
    stats.final_time = now_;
    return stats;
}

RunStats Kernel::run()
{
    RunStats stats;
    while (!queue_.empty()) {
        const Event ev = queue_.top();
        queue_.pop();
        dispatch(ev);
        ++stats.dispatched;
    }
    stats.final_time = now_;
    return stats;
}

const char* to_string(Phase p)
{
    switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::ReqHigh: return "ReqHigh";
    case Phase::AckHigh: return "AckHigh";
    case Phase::ReqLow: return "ReqLow";
    }
    return "?";
}

const char* to_string(HandshakeAction a)
{
    switch (a) {
    case HandshakeAction::RaiseReq: return "raise-req";
    case HandshakeAction::RaiseAck: return "raise-ack";
    case HandshakeAction::LowerReq: return "lower-req";
    case HandshakeAction::LowerAck: return "lower-ack";
    }
    return "?";
}

Phase HandshakeChannel::advance(HandshakeAction action, SimTime now, Trace* trace)
{
    struct Step {
        Phase from;
        Phase to;
        const char* signal;
        int level;
    };
    static constexpr std::array<Step, 4> steps{{
        {Phase::Idle, Phase::ReqHigh, "req", 1},
        {Phase::ReqHigh, Phase::AckHigh, "ack", 1},
        {Phase::AckHigh, Phase::ReqLow, "req", 0},
        {Phase::ReqLow, Phase::Idle, "ack", 0},
    }};
    const auto idx = static_cast<std::size_t>(action);
    const Step& step = steps[idx];
    if (phase_ != step.from)
        throw Error(ErrorCode::ProtocolViolation, name_ + ": " + to_string(action) + " in phase " +
                                                      to_string(phase_));
    if (action == HandshakeAction::RaiseReq && bundled_ && strict_bundling_ &&
        (!data_valid_ || data_valid_time_ >= now))
        throw Error(ErrorCode::ProtocolViolation,
                    name_ + ": req raised at t=" + std::to_string(now) +
                        " without data valid strictly earlier");
    phase_ = step.to;
    times_[idx] = now;
    if (trace) trace->record(now, name_, step.signal, 1 - step.level, step.level);
    return phase_;
}

void HandshakeChannel::set_data_valid(bool valid, SimTime now, Trace* trace)
{
    if (valid == data_valid_) return;
    if (trace) trace->record(now, name_, "data_valid", data_valid_ ? 1 : 0, valid ? 1 : 0);
    data_valid_ = valid;
    if (valid) data_valid_time_ = now;
}

std::vector<TimingViolation> check_handshakes(const std::vector<TraceRecord>& records)
{
    struct State {
        int req = 0;
        int ack = 0;
        bool has_data = false;
        int data = 0;
        SimTime data_time = 0;
    };
    std::map<std::string, State> states;
    std::vector<TimingViolation> out;
    for (const auto& r : records) {
        if (r.old_value == r.new_value) continue;
        if (r.signal != "req" && r.signal != "ack" && r.signal != "data_valid") continue;
        State& s = states[r.component];
        const int level = r.new_value != 0 ? 1 : 0;
        if (r.signal == "data_valid") {
            s.has_data = true;
            s.data = level;
            if (level) s.data_time = r.time;
            continue;
        }
        bool legal = false;
        if (r.signal == "req")
            legal = (level == 1 && s.req == 0 && s.ack == 0) || (level == 0 && s.req == 1 && s.ack == 1);
        else
            legal = (level == 1 && s.req == 1 && s.ack == 0) || (level == 0 && s.req == 0 && s.ack == 1);
        if (!legal)
            out.push_back({"protocol", r.time,
                           r.component + ": " + r.signal + (level ? "+" : "-") + " with req=" +
                               std::to_string(s.req) + " ack=" + std::to_string(s.ack)});
        if (r.signal == "req" && level == 1 && s.has_data && (s.data == 0 || s.data_time >= r.time))
            out.push_back({"bundled_data", r.time,
                           r.component + ": req+ not preceded by valid data"});
        (r.signal == "req" ? s.req : s.ack) = level;
    }
    return out;
}

std::string violations_to_json(const std::vector<TimingViolation>& violations)
{
    auto arr = nlohmann::json::array();
    for (const auto& v : violations)
        arr.push_back({{"constraint", v.constraint}, {"time", v.time}, {"detail", v.detail}});
    return arr.dump();
}

} // namespace aerint
