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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "aerint/aerint.h"
#include "json.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 4;

struct Flags {
    std::optional<std::string> arch, n, mode, completion, format;
    std::optional<std::uint64_t> trials, seed, entries, width, speculative, jobs, searches;
    std::optional<double> sense_threshold;
    bool feedback = false;
    std::string config_path, out_path, trace_path;
};

nlohmann::json flags_to_json(const Flags& f)
{
    nlohmann::json j = nlohmann::json::object();
    auto put = [&](const char* key, const auto& opt) {
        if (opt) j[key] = *opt;
    };
    put("arch", f.arch);
    put("n", f.n);
    put("mode", f.mode);
    put("completion", f.completion);
    put("format", f.format);
    put("trials", f.trials);
    put("seed", f.seed);
    put("entries", f.entries);
    put("width", f.width);
    put("speculative", f.speculative);
    put("jobs", f.jobs);
    put("searches", f.searches);
    put("sense-threshold", f.sense_threshold);
    if (f.feedback) j["feedback"] = true;
    return j;
}

bool read_file(const std::string& path, std::string& text)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return !in.bad();
}

bool write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << text;
    out.flush();
    return static_cast<bool>(out);
}

int emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text;
        std::cout.flush();
        return 0;
    }
    if (!write_file(out_path, text)) {
        std::cerr << "aerint: cannot write " << out_path << "\n";
        return kExitIo;
    }
    return 0;
}

int report_status(aer_status st)
{
    if (st != AER_OK) std::cerr << "aerint: " << aer_last_error() << "\n";
    return static_cast<int>(st);
}

void add_arbiter_flags(CLI::App* app, Flags& f, bool with_arch, bool with_mode)
{
    if (with_arch)
        app->add_option("--arch", f.arch, "binary-tree, greedy-tree, token-ring, hier-ring, hier-tree or all");
    app->add_option("--n", f.n, "neuron count, or a comma-separated list");
    if (with_mode) app->add_option("--mode", f.mode, "sparse, burst or poisson");
}

void add_cam_flags(CLI::App* app, Flags& f)
{
    app->add_option("--entries", f.entries, "CAM entries");
    app->add_option("--width", f.width, "bits per entry");
    app->add_option("--completion", f.completion, "delay-line or cscd");
    app->add_flag("--feedback", f.feedback, "enable feedback control");
    app->add_option("--speculative", f.speculative, "speculative sense over the last n bits");
    app->add_option("--sense-threshold", f.sense_threshold, "CSCD threshold, fraction of the dummy current");
}

void add_common(CLI::App* app, Flags& f, bool traced)
{
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--config", f.config_path, "JSON config file; flags override it");
    app->add_option("--out", f.out_path, "output path (default stdout)");
    app->add_option("--format", f.format, "csv or json");
    if (traced) app->add_option("--trace", f.trace_path, "write the signal trace CSV here");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Asynchronous AER arbitration and CAM routing simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(aer_version()));
    Flags f;
    std::string command;
    std::string check_input;

    auto* arb = app.add_subcommand("arb", "arbiter runs and tables");
    arb->require_subcommand(1);
    auto* arb_run = arb->add_subcommand("run", "simulate arbiters and compare with the closed forms");
    add_arbiter_flags(arb_run, f, true, true);
    arb_run->add_option("--trials", f.trials, "sparse trials or approximate poisson events");
    add_common(arb_run, f, true);
    arb_run->callback([&] { command = "arb run"; });

    auto* arb_tables = arb->add_subcommand("tables", "sparse, burst and area tables");
    add_arbiter_flags(arb_tables, f, false, false);
    arb_tables->add_option("--trials", f.trials, "sparse trials per cell");
    arb_tables->add_option("--jobs", f.jobs, "parallel simulations");
    add_common(arb_tables, f, false);
    arb_tables->callback([&] { command = "arb tables"; });

    auto* sweep = app.add_subcommand("sweep", "latency scaling over N");
    add_arbiter_flags(sweep, f, true, true);
    sweep->add_option("--trials", f.trials, "trials per point");
    sweep->add_option("--jobs", f.jobs, "parallel simulations");
    add_common(sweep, f, false);
    sweep->callback([&] { command = "sweep"; });

    auto* cam = app.add_subcommand("cam", "content-addressable memory");
    cam->require_subcommand(1);
    auto* cam_search = cam->add_subcommand("search", "searches on a random array");
    add_cam_flags(cam_search, f);
    cam_search->add_option("--searches", f.searches, "number of searches");
    add_common(cam_search, f, true);
    cam_search->callback([&] { command = "cam search"; });

    auto* cam_report = cam->add_subcommand("report", "cycle time and energy per mechanism set");
    std::optional<std::string> entries_list;
    cam_report->add_option("--entries", entries_list, "entries, or a comma-separated list");
    cam_report->add_option("--width", f.width, "bits per entry");
    cam_report->add_option("--speculative", f.speculative, "tail length for the speculative variants");
    cam_report->add_option("--sense-threshold", f.sense_threshold, "CSCD threshold");
    cam_report->add_option("--trials", f.trials, "searches per row");
    cam_report->add_option("--jobs", f.jobs, "parallel arrays");
    add_common(cam_report, f, false);
    cam_report->callback([&] { command = "cam report"; });

    auto* demo = app.add_subcommand("demo", "arbiter output searched in a tag CAM");
    add_arbiter_flags(demo, f, true, true);
    add_cam_flags(demo, f);
    add_common(demo, f, false);
    demo->callback([&] { command = "demo"; });

    auto* check = app.add_subcommand("check", "run the protocol and timing checkers on a trace CSV");
    check->add_option("trace", check_input, "trace CSV")->required();
    check->add_option("--out", f.out_path, "report path (default stdout)");
    check->callback([&] { command = "check"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    if (command == "check") {
        std::string text;
        if (!read_file(check_input, text)) {
            std::cerr << "aerint: cannot read " << check_input << "\n";
            return kExitIo;
        }
        char* report = nullptr;
        const aer_status st = aer_check_trace(text.c_str(), &report);
        int rc = report_status(st);
        if (report) {
            const int wrc = emit(report, f.out_path);
            aer_free(report);
            if (wrc != 0) return wrc;
        }
        return rc;
    }

    std::string file_json;
    if (!f.config_path.empty() && !read_file(f.config_path, file_json)) {
        std::cerr << "aerint: cannot read " << f.config_path << "\n";
        return kExitIo;
    }
    nlohmann::json flags = flags_to_json(f);
    if (command == "cam report" && entries_list) flags["entries"] = *entries_list;
    const std::string flags_json = flags.dump();

    char* output = nullptr;
    char* trace = nullptr;
    const aer_status st = aer_execute(command.c_str(), file_json.empty() ? nullptr : file_json.c_str(),
                                      flags_json.c_str(), &output, f.trace_path.empty() ? nullptr : &trace);
    int rc = report_status(st);
    if (output) {
        const int wrc = emit(output, f.out_path);
        aer_free(output);
        if (wrc != 0) rc = wrc;
    }
    if (trace) {
        if (!write_file(f.trace_path, trace)) {
            std::cerr << "aerint: cannot write " << f.trace_path << "\n";
            rc = kExitIo;
        }
        aer_free(trace);
    }
    return rc;
}
