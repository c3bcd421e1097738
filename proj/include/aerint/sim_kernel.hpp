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

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

namespace aerint {

/// Simulation time in ticks. Arbitration models count one tick per
/// two-input arbiter decision; circuit-level models (pipeline, CAM) run on
/// subticks, kSubticksPerUnit to the arbiter unit.
using SimTime = std::uint64_t;
inline constexpr SimTime kSubticksPerUnit = 100;

using EventId = std::uint64_t;
using ComponentId = std::uint32_t;

struct Event {
    EventId id = 0;
    SimTime at = 0;
    ComponentId target = 0;
    std::uint64_t payload = 0;
};

struct TraceRecord {
    SimTime time = 0;
    std::string component;
    std::string signal;
    std::int64_t old_value = 0;
    std::int64_t new_value = 0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Bounded record store. Disabled traces drop records without formatting
/// anything; a full trace overwrites its oldest record.
class Trace {
public:
    explicit Trace(bool enabled = false, std::size_t capacity = std::size_t{1} << 22)
        : enabled_(enabled), capacity_(capacity) {}

    bool enabled() const { return enabled_; }
    void set_enabled(bool on) { enabled_ = on; }

    void record(SimTime time, std::string_view component, std::string_view signal,
                std::int64_t old_value, std::int64_t new_value);

    /// Records in time order (oldest first).
    std::vector<TraceRecord> records() const;
    std::size_t size() const { return buffer_.size(); }
    std::size_t dropped() const { return dropped_; }
    void clear();

private:
    bool enabled_;
    std::size_t capacity_;
    std::deque<TraceRecord> buffer_;
    std::size_t dropped_ = 0;
    SimTime last_time_ = 0;
};

/// `time,component,signal,old,new`, LF line endings, header first.
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace_csv(std::istream& is);

struct RunStats {
    std::uint64_t dispatched = 0;
    SimTime final_time = 0;
};

class Kernel;
using EventHandler = std::function<void(Kernel&, const Event&)>;

/// Single-threaded discrete-event engine. Events with equal time are
/// delivered in id (creation) order, so a run is a pure function of its
/// inputs.
class Kernel {
public:
    explicit Kernel(bool trace_enabled = false) : trace_(trace_enabled) {}

    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    ComponentId add_component(std::string name, EventHandler handler = {});
    const std::string& component_name(ComponentId id) const { return components_.at(id).name; }

    EventId schedule(SimTime at, ComponentId target, std::uint64_t payload = 0);
    EventId schedule_in(SimTime delay, ComponentId target, std::uint64_t payload = 0)
    {
        return schedule(now_ + delay, target, payload);
    }

    /// Dispatches every event with `at <= limit`; time ends at `limit`.
    RunStats run_until(SimTime limit);
    /// Dispatches until the queue is empty; time ends at the last event.
    RunStats run();

    SimTime now() const { return now_; }
    bool idle() const { return queue_.empty(); }
    std::size_t pending() const { return queue_.size(); }

    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }
    void record(ComponentId component, std::string_view signal, std::int64_t old_value,
                std::int64_t new_value)
    {
        if (trace_.enabled())
            trace_.record(now_, components_.at(component).name, signal, old_value, new_value);
    }

private:
    struct Component {
        std::string name;
        EventHandler handler;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.at != b.at ? a.at > b.at : a.id > b.id;
        }
    };

    void dispatch(const Event& ev);

    std::vector<Component> components_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    EventId next_id_ = 1;
    SimTime now_ = 0;
    Trace trace_;
};

enum class Phase { Idle, ReqHigh, AckHigh, ReqLow };
enum class HandshakeAction { RaiseReq, RaiseAck, LowerReq, LowerAck };

const char* to_string(Phase p);
const char* to_string(HandshakeAction a);

/// Four-phase (return-to-zero) channel: req+ ack+ req- ack-.
///
/// A bundled channel additionally requires its data to be marked valid at a
/// strictly earlier time than req+. With `strict_bundling` off the rule is
/// left to the trace checkers, which lets fault-injection runs proceed.
class HandshakeChannel {
public:
    explicit HandshakeChannel(std::string name, bool bundled = false, bool strict_bundling = true)
        : name_(std::move(name)), bundled_(bundled), strict_bundling_(strict_bundling) {}

    Phase advance(HandshakeAction action, SimTime now, Trace* trace = nullptr);
    void set_data_valid(bool valid, SimTime now, Trace* trace = nullptr);

    Phase phase() const { return phase_; }
    bool data_valid() const { return data_valid_; }
    const std::string& name() const { return name_; }
    /// Time of the most recent req+, ack+, req-, ack- respectively.
    const std::array<SimTime, 4>& transition_times() const { return times_; }

private:
    std::string name_;
    bool bundled_;
    bool strict_bundling_;
    Phase phase_ = Phase::Idle;
    bool data_valid_ = false;
    SimTime data_valid_time_ = 0;
    std::array<SimTime, 4> times_{};
};

struct TimingViolation {
    std::string constraint;
    SimTime time = 0;
    std::string detail;

    friend bool operator==(const TimingViolation&, const TimingViolation&) = default;
};

/// Checks every component that carries `req`/`ack` signals against the
/// four-phase cycle, and `data_valid` rises against the following req+.
std::vector<TimingViolation> check_handshakes(const std::vector<TraceRecord>& records);

std::string violations_to_json(const std::vector<TimingViolation>& violations);

} // namespace aerint
