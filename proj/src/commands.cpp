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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "aerint/arbitration.hpp"
#include "aerint/bench_report.hpp"
#include "aerint/cam.hpp"
#include "aerint/error.hpp"
#include "aerint/hat_pipeline.hpp"
#include "aerint/rng.hpp"
#include "json.hpp"

namespace aerint {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {"arch",  "n",       "mode",     "trials",          "seed",     "entries",
                                          "width", "completion", "feedback", "speculative", "format",   "jobs",
                                          "sense-threshold", "searches", "workload", "tags"};

json parse_object(const std::string& text, const char* what)
{
    if (text.empty()) return json::object();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string(what) + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be a JSON object");
    for (const auto& item : j.items())
        if (!kKnownKeys.count(item.key()))
            throw Error(ErrorCode::InvalidConfig, std::string("unknown key \"") + item.key() + "\" in " + what);
    return j;
}

json defaults_for(const std::string& cmd)
{
    if (cmd == "arb run")
        return {{"arch", "hier-tree"}, {"n", json::array({64})}, {"mode", "sparse"}, {"trials", 1000},
                {"seed", 1}, {"format", "csv"}};
    if (cmd == "arb tables")
        return {{"n", json::array({64, 256})}, {"trials", 10000}, {"seed", 1}, {"jobs", 1}, {"format", "csv"}};
    if (cmd == "sweep")
        return {{"arch", "all"}, {"n", json::array({16, 64, 256, 1024})}, {"mode", "sparse"}, {"trials", 10000},
                {"seed", 1}, {"jobs", 1}, {"format", "csv"}};
    if (cmd == "cam search")
        return {{"entries", 16}, {"width", 11}, {"completion", "cscd"}, {"feedback", false}, {"speculative", 0},
                {"sense-threshold", 0.5}, {"searches", 16}, {"seed", 1}, {"format", "csv"}};
    if (cmd == "cam report")
        return {{"entries", json::array({16, 512})}, {"width", 11}, {"speculative", 3}, {"trials", 1000},
                {"sense-threshold", 0.5}, {"seed", 1}, {"jobs", 1}, {"format", "csv"}};
    if (cmd == "demo")
        return {{"arch", "hier-tree"}, {"n", 64}, {"mode", "burst"}, {"width", 11}, {"completion", "cscd"},
                {"feedback", false}, {"speculative", 0}, {"seed", 1}, {"format", "csv"}};
    throw Error(ErrorCode::InvalidConfig,
                "unknown command '" + cmd + "' (allowed: arb run, arb tables, sweep, cam search, cam report, demo)");
}

std::vector<std::uint64_t> as_u64_list(const json& v, const char* key)
{
    std::vector<std::uint64_t> out;
    auto one = [&](const json& x) {
        if (x.is_number_unsigned() || (x.is_number_integer() && x.get<std::int64_t>() >= 0)) {
            out.push_back(x.get<std::uint64_t>());
        } else if (x.is_string()) {
            std::stringstream ss(x.get<std::string>());
            std::string part;
            while (std::getline(ss, part, ',')) {
                try {
                    std::size_t used = 0;
                    const auto value = std::stoull(part, &used);
                    if (used != part.size() || part.empty() || part[0] == '-') throw std::invalid_argument(part);
                    out.push_back(value);
                } catch (const std::exception&) {
                    throw Error(ErrorCode::InvalidConfig, std::string(key) + ": '" + part + "' is not a count");
                }
            }
        } else {
            throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a non-negative integer or list");
        }
    };
    if (v.is_array())
        for (const auto& x : v) one(x);
    else
        one(v);
    if (out.empty()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " is empty");
    return out;
}

std::uint64_t as_u64(const json& cfg, const char* key)
{
    const auto list = as_u64_list(cfg.at(key), key);
    if (list.size() != 1) throw Error(ErrorCode::InvalidConfig, std::string(key) + " takes a single value");
    return list[0];
}

std::vector<std::uint32_t> as_u32_list(const json& cfg, const char* key)
{
    std::vector<std::uint32_t> out;
    for (auto v : as_u64_list(cfg.at(key), key)) {
        if (v > 0xffffffffull) throw Error(ErrorCode::InvalidConfig, std::string(key) + " value too large");
        out.push_back(static_cast<std::uint32_t>(v));
    }
    return out;
}

std::string as_string(const json& cfg, const char* key)
{
    const json& v = cfg.at(key);
    if (!v.is_string()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a string");
    return v.get<std::string>();
}

bool as_bool(const json& cfg, const char* key)
{
    const json& v = cfg.at(key);
    if (!v.is_boolean()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be true or false");
    return v.get<bool>();
}

double as_double(const json& cfg, const char* key)
{
    const json& v = cfg.at(key);
    if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a number");
    return v.get<double>();
}

const char* const kArchList = "binary-tree, greedy-tree, token-ring, hier-ring, hier-tree, all";

std::vector<ArchitectureKind> as_archs(const json& cfg)
{
    std::vector<std::string> names;
    const json& v = cfg.at("arch");
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_string()) throw Error(ErrorCode::InvalidConfig, "arch entries must be strings");
            names.push_back(x.get<std::string>());
        }
    } else {
        std::stringstream ss(as_string(cfg, "arch"));
        std::string part;
        while (std::getline(ss, part, ',')) names.push_back(part);
    }
    std::vector<ArchitectureKind> out;
    for (const auto& name : names) {
        if (name == "all") {
            out.assign(std::begin(kAllArchitectures), std::end(kAllArchitectures));
            continue;
        }
        const auto k = parse_architecture(name);
        if (!k) throw Error(ErrorCode::InvalidConfig, "unknown arch '" + name + "' (allowed: " + kArchList + ")");
        out.push_back(*k);
    }
    if (out.empty()) throw Error(ErrorCode::InvalidConfig, "arch is empty");
    return out;
}

std::string as_format(const json& cfg)
{
    const std::string f = as_string(cfg, "format");
    if (f != "csv" && f != "json") throw Error(ErrorCode::InvalidConfig, "unknown format '" + f + "' (allowed: csv, json)");
    return f;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string csv_header(const json& cfg, const std::string& hash)
{
    return "# config: " + cfg.dump() + "\n# config_hash: " + hash + "\n";
}

json table_json(const ComparisonTable& t)
{
    json rows = json::array();
    for (const auto& row : t.rows) {
        json cells = json::array();
        for (const auto& c : row.cells) {
            json cell = {{"n", c.n}, {"applicable", c.applicable}};
            if (c.applicable) {
                cell["analytic"] = c.analytic.decimal();
                cell["within_tolerance"] = c.within_tolerance;
                cell["reference"] = c.reference;
                if (c.simulated)
                    cell["simulated"] = {{"mean", c.simulated->mean},
                                         {"ci95", c.simulated->ci95},
                                         {"trials", c.simulated->trials}};
            }
            cells.push_back(cell);
        }
        rows.push_back({{"arch", to_string(row.arch)},
                        {"formula", row.formula},
                        {"tolerance", row.tolerance},
                        {"cells", cells}});
    }
    return {{"title", t.title}, {"rows", rows}, {"footer", t.footer}};
}

json violation_json(const std::string& constraint, SimTime time, const std::string& detail)
{
    return {{"constraint", constraint}, {"time", time}, {"detail", detail}};
}

json point_json(const SweepPoint& p)
{
    json j = {{"arch", to_string(p.arch)}, {"n", p.n},           {"mode", to_string(p.mode)},
              {"sim_mean", p.sim_mean},    {"sim_ci95", p.sim_ci95}, {"trials", p.trials},
              {"seed", p.seed}};
    j["analytic"] = p.analytic ? json(p.analytic->decimal()) : json(nullptr);
    return j;
}

CommandOutcome finish(const json& cfg, const std::string& format, const std::string& csv_body, json payload,
                      const json& violations, int status)
{
    const std::string hash = hex64(fnv1a64(cfg.dump()));
    CommandOutcome out;
    out.status = status;
    if (format == "json") {
        payload["config"] = cfg;
        payload["config_hash"] = hash;
        payload["violations"] = violations;
        out.output = payload.dump(2) + "\n";
    } else {
        out.output = csv_header(cfg, hash) + csv_body;
    }
    return out;
}

CommandOutcome arb_run(const json& cfg, bool want_trace)
{
    const auto archs = as_archs(cfg);
    const auto ns = as_u32_list(cfg, "n");
    const LatencyMode mode = parse_mode(as_string(cfg, "mode"));
    const std::uint64_t trials = as_u64(cfg, "trials");
    const std::uint64_t seed = as_u64(cfg, "seed");
    const std::string format = as_format(cfg);
    if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");

    SweepResult res;
    json violations = json::array();
    std::string trace;
    for (ArchitectureKind arch : archs) {
        for (std::uint32_t n : ns) {
            validate_n(arch, n);
            ArbiterConfig ac;
            ac.kind = arch;
            ac.n_neurons = n;
            ac.seed = seed;
            ac.trace = want_trace;
            ArbiterInstance inst(ac);
            SweepPoint p;
            p.arch = arch;
            p.n = n;
            p.mode = mode;
            p.seed = seed;
            if (mode == LatencyMode::Sparse) {
                p.analytic = analytic_sparse_latency(arch, n);
                const auto est = measure_sparse(inst, trials, seed);
                p.sim_mean = est.mean;
                p.sim_ci95 = est.ci95;
                p.trials = est.trials;
            } else if (mode == LatencyMode::Burst) {
                p.analytic = analytic_burst_latency(arch, n);
                p.sim_mean = static_cast<double>(measure_burst(inst));
                p.trials = 1;
            } else {
                BenchOptions bo;
                const auto duration = static_cast<SimTime>(static_cast<double>(trials) / bo.poisson_rate);
                const auto events = inst.simulate(generate({PoissonWorkload{bo.poisson_rate, duration}, seed}, n));
                double sum = 0, sum_sq = 0;
                for (const auto& e : events) {
                    sum += static_cast<double>(e.latency());
                    sum_sq += static_cast<double>(e.latency()) * static_cast<double>(e.latency());
                }
                const double k = static_cast<double>(events.size());
                if (k > 0) p.sim_mean = sum / k;
                if (k > 1)
                    p.sim_ci95 = 1.96 * std::sqrt(std::max(0.0, (sum_sq - k * p.sim_mean * p.sim_mean) / (k - 1)) / k);
                p.trials = events.size();
            }
            const auto& st = inst.stats();
            if (st.mutex_violations > 0)
                violations.push_back(violation_json("mutual_exclusion", inst.now(),
                                                    std::string(to_string(arch)) + " N=" + std::to_string(n) + ": " +
                                                        std::to_string(st.mutex_violations) + " overlapping grants"));
            if (st.outputs != st.requests)
                violations.push_back(violation_json("lost_event", inst.now(),
                                                    std::string(to_string(arch)) + " N=" + std::to_string(n)));
            if (want_trace) {
                std::ostringstream os;
                write_trace_csv(os, inst.trace().records());
                trace = os.str();
            }
            res.points.push_back(p);
        }
    }
    json points = json::array();
    for (const auto& p : res.points) points.push_back(point_json(p));
    CommandOutcome out = finish(cfg, format, sweep_to_csv(res), {{"points", points}}, violations,
                                violations.empty() ? 0 : 3);
    out.trace_csv = std::move(trace);
    return out;
}

CommandOutcome arb_tables(const json& cfg)
{
    BenchOptions bo;
    bo.trials = as_u64(cfg, "trials");
    bo.seed = as_u64(cfg, "seed");
    bo.jobs = static_cast<unsigned>(as_u64(cfg, "jobs"));
    const auto ns = as_u32_list(cfg, "n");
    const std::string format = as_format(cfg);
    const std::vector<ComparisonTable> tables = {table_latency_sparse(ns, bo), table_latency_burst(ns, bo),
                                                 table_area(ns, bo)};
    json violations = json::array();
    json tj = json::object();
    for (const auto& t : tables) {
        tj[to_string(t.kind)] = table_json(t);
        for (const auto& row : t.rows)
            for (const auto& c : row.cells)
                if (c.applicable && !c.within_tolerance)
                    violations.push_back(violation_json("tolerance", 0,
                                                        std::string(to_string(t.kind)) + " " + to_string(row.arch) +
                                                            " N=" + std::to_string(c.n)));
    }
    return finish(cfg, format, tables_to_csv(tables), {{"tables", tj}}, violations, violations.empty() ? 0 : 3);
}

CommandOutcome sweep(const json& cfg)
{
    BenchOptions bo;
    bo.trials = as_u64(cfg, "trials");
    bo.seed = as_u64(cfg, "seed");
    bo.jobs = static_cast<unsigned>(as_u64(cfg, "jobs"));
    const auto res = sweep_scaling(as_archs(cfg), as_u32_list(cfg, "n"), parse_mode(as_string(cfg, "mode")), bo);
    json points = json::array();
    for (const auto& p : res.points) points.push_back(point_json(p));
    return finish(cfg, as_format(cfg), sweep_to_csv(res), {{"points", points}, {"skipped", res.skipped}},
                  json::array(), 0);
}

CamConfig cam_config(const json& cfg, std::uint32_t entries)
{
    CamConfig c;
    c.n_entries = entries;
    const auto width = as_u64(cfg, "width");
    if (width < 1 || width > 63) throw Error(ErrorCode::InvalidConfig, "width must be in [1, 63]");
    c.width = static_cast<unsigned>(width);
    c.completion = parse_completion(as_string(cfg, "completion"));
    c.feedback = as_bool(cfg, "feedback");
    c.speculative_tail = static_cast<unsigned>(as_u64(cfg, "speculative"));
    c.seed = as_u64(cfg, "seed");
    if (cfg.contains("sense-threshold")) c.sense_threshold = as_double(cfg, "sense-threshold");
    return c;
}

CommandOutcome cam_search(const json& cfg, bool want_trace)
{
    const auto entries = as_u64(cfg, "entries");
    if (entries < 1 || entries > (1u << 20)) throw Error(ErrorCode::InvalidConfig, "entries must be in [1, 2^20]");
    CamConfig c = cam_config(cfg, static_cast<std::uint32_t>(entries));
    c.trace = want_trace;
    CamArray cam(c);
    const std::uint64_t searches = as_u64(cfg, "searches");
    Rng data(c.seed * 0x9e3779b97f4a7c15ull + 7);
    const std::uint64_t space = std::uint64_t{1} << c.width;
    for (std::uint32_t i = 0; i < c.n_entries; ++i) cam.write_entry(i, data.below(space));

    std::ostringstream os;
    os << "search,key,matches,cycle_time,energy,false_timing\n";
    json rows = json::array();
    json violations = json::array();
    for (std::uint64_t s = 0; s < searches; ++s) {
        // Every other key is taken from the array so that matches occur.
        const std::uint64_t key = s % 2 == 0 ? cam.read_entry(static_cast<std::uint32_t>(data.below(c.n_entries)))
                                             : data.below(space);
        const SearchResult r = cam.search(key);
        std::string matches;
        json mj = json::array();
        for (std::uint32_t i = 0; i < r.match.size(); ++i)
            if (r.match[i]) {
                matches += (matches.empty() ? "" : ";") + std::to_string(i);
                mj.push_back(i);
            }
        os << s << ',' << key << ',' << matches << ',' << r.cycle_time << ',' << format_double(r.energy.total())
           << ',' << (r.false_timing ? 1 : 0) << '\n';
        rows.push_back({{"search", s},
                        {"key", key},
                        {"matches", mj},
                        {"cycle_time", r.cycle_time},
                        {"energy", r.energy.total()},
                        {"false_timing", r.false_timing}});
        if (r.false_timing) violations.push_back(violation_json("false_timing", cam.now(), "search " + std::to_string(s)));
    }
    if (want_trace)
        for (const auto& v : check_cam_timing(cam.trace().records(), c.timing.min_clk_pulse, c.timing.min_reset_pulse))
            violations.push_back(violation_json(v.constraint, v.time, v.detail));
    CommandOutcome out = finish(cfg, as_format(cfg), os.str(), {{"searches", rows}}, violations,
                                violations.empty() ? 0 : 3);
    if (want_trace) {
        std::ostringstream ts;
        write_trace_csv(ts, cam.trace().records());
        out.trace_csv = ts.str();
    }
    return out;
}

CommandOutcome cam_report_cmd(const json& cfg)
{
    CamReportOptions o;
    o.design_points.clear();
    const auto width = as_u64(cfg, "width");
    if (width < 1 || width > 63) throw Error(ErrorCode::InvalidConfig, "width must be in [1, 63]");
    for (auto e : as_u32_list(cfg, "entries")) {
        if (e < 1) throw Error(ErrorCode::InvalidConfig, "entries must be >= 1");
        o.design_points.push_back({e, static_cast<unsigned>(width)});
    }
    o.trials = as_u64(cfg, "trials");
    o.seed = as_u64(cfg, "seed");
    o.spec_tail = static_cast<unsigned>(as_u64(cfg, "speculative"));
    if (o.spec_tail < 1 || o.spec_tail > width)
        throw Error(ErrorCode::InvalidConfig, "speculative must be in [1, width] for the report");
    o.jobs = static_cast<unsigned>(as_u64(cfg, "jobs"));
    o.sense_threshold = as_double(cfg, "sense-threshold");
    const auto rows = cam_report(o);

    // Normalized to the delay-line baseline without mechanisms, per case.
    json jrows = json::array();
    for (const auto& r : rows) {
        double base_cycle = 0, base_energy = 0;
        for (const auto& b : rows)
            if (b.entries == r.entries && b.search_case == r.search_case && b.mode == CompletionKind::DelayLine &&
                !b.feedback && b.spec_tail == 0) {
                base_cycle = b.cycle_mean;
                base_energy = b.energy_mean;
            }
        jrows.push_back({{"entries", r.entries},
                         {"width", r.width},
                         {"mode", to_string(r.mode)},
                         {"feedback", r.feedback},
                         {"spec_tail", r.spec_tail},
                         {"case", r.search_case},
                         {"cycle_mean", r.cycle_mean},
                         {"energy_mean", r.energy_mean},
                         {"cycle_normalized", base_cycle > 0 ? r.cycle_mean / base_cycle : 0.0},
                         {"energy_normalized", base_energy > 0 ? r.energy_mean / base_energy : 0.0},
                         {"seed", r.seed}});
    }
    return finish(cfg, as_format(cfg), cam_report_to_csv(rows), {{"rows", jrows}}, json::array(), 0);
}

CommandOutcome demo(const json& cfg)
{
    DemoOptions o;
    const auto archs = as_archs(cfg);
    if (archs.size() != 1) throw Error(ErrorCode::InvalidConfig, "demo takes a single arch");
    o.arch = archs[0];
    o.n = static_cast<std::uint32_t>(as_u64(cfg, "n"));
    validate_n(o.arch, o.n);
    const std::uint64_t seed = as_u64(cfg, "seed");
    if (cfg.contains("workload")) {
        o.workload = workload_from_json(cfg.at("workload").dump());
    } else {
        const LatencyMode mode = parse_mode(as_string(cfg, "mode"));
        if (mode == LatencyMode::Sparse) o.workload = {SparseWorkload{o.n}, seed};
        if (mode == LatencyMode::Burst) o.workload = {BurstWorkload{0}, seed};
        if (mode == LatencyMode::Poisson) o.workload = {PoissonWorkload{0.05, 20ull * o.n}, seed};
    }
    const std::uint32_t entries =
        cfg.contains("entries") ? static_cast<std::uint32_t>(as_u64(cfg, "entries")) : o.n;
    o.cam = cam_config(cfg, entries);
    if (cfg.contains("tags")) {
        for (auto t : as_u64_list(cfg.at("tags"), "tags")) o.tags.push_back(t);
    }
    const auto events = aer_demo(o);
    json rows = json::array();
    for (const auto& e : events)
        rows.push_back({{"neuron", e.neuron},
                        {"address", e.address},
                        {"t_request", e.t_request},
                        {"t_output", e.t_output},
                        {"matches", e.matches},
                        {"cam_cycle", e.cam_cycle}});
    return finish(cfg, as_format(cfg), demo_to_csv(events), {{"events", rows}}, json::array(), 0);
}

} // namespace

CommandOutcome run_command(const std::string& command, const std::string& file_json, const std::string& flags_json,
                           bool want_trace)
{
    json cfg = defaults_for(command);
    const json file = parse_object(file_json, "config file");
    const json flags = parse_object(flags_json, "flags");
    for (const auto& item : file.items()) cfg[item.key()] = item.value();
    for (const auto& item : flags.items()) cfg[item.key()] = item.value();
    // "64,256" from the command line and [64,256] from a file echo the same.
    for (const char* key : {"n", "entries"}) {
        if (!cfg.contains(key) || !cfg.at(key).is_string()) continue;
        const auto list = as_u64_list(cfg.at(key), key);
        cfg[key] = list.size() == 1 ? json(list[0]) : json(list);
    }
    try {
        if (command == "arb run") return arb_run(cfg, want_trace);
        if (command == "arb tables") return arb_tables(cfg);
        if (command == "sweep") return sweep(cfg);
        if (command == "cam search") return cam_search(cfg, want_trace);
        if (command == "cam report") return cam_report_cmd(cfg);
        return demo(cfg);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("configuration: ") + e.what());
    }
}

CommandOutcome check_trace_csv(const std::string& csv)
{
    std::istringstream is(csv);
    const auto records = read_trace_csv(is);
    std::vector<TimingViolation> all = check_timing(records);
    for (auto& v : check_cam_timing(records))
        if (v.constraint == "clk_pulse" || v.constraint == "reset_pulse") all.push_back(std::move(v));
    for (auto& v : check_mutual_exclusion(records)) all.push_back(std::move(v));
    std::stable_sort(all.begin(), all.end(),
                     [](const TimingViolation& a, const TimingViolation& b) { return a.time < b.time; });
    CommandOutcome out;
    out.output = violations_to_json(all) + "\n";
    out.status = all.empty() ? 0 : 3;
    return out;
}

} // namespace aerint
