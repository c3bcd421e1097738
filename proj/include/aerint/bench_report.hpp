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
#include <optional>
#include <string>
#include <vector>

#include "aerint/arbitration.hpp"
#include "aerint/cam.hpp"
#include "aerint/rational.hpp"
#include "aerint/workloads.hpp"

namespace aerint {

enum class LatencyMode { Sparse, Burst, Poisson };

const char* to_string(LatencyMode m);
LatencyMode parse_mode(const std::string& name);

enum class TableKind { SparseLatency, BurstLatency, Area };

const char* to_string(TableKind k);

struct TableCell {
    std::uint32_t n = 0;
    bool applicable = true;   // N valid for the architecture
    Rational analytic;
    std::optional<LatencyEstimate> simulated;
    /// Published figure with its technology-dependent unit, for reference
    /// only. Empty when none exists.
    std::string reference;
    bool within_tolerance = true;
};

struct TableRow {
    ArchitectureKind arch = ArchitectureKind::BinaryTree;
    std::string formula;
    std::string tolerance;  // "exact", "3se" or "10pct"
    std::vector<TableCell> cells;
};

struct ComparisonTable {
    TableKind kind = TableKind::SparseLatency;
    std::string title;
    std::vector<std::uint32_t> ns;
    std::vector<TableRow> rows;
    std::string footer;

    bool all_within_tolerance() const;
};

struct BenchOptions {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool simulate = true;
    double poisson_rate = 0.05;  // aggregate events per unit time
};

ComparisonTable table_latency_sparse(const std::vector<std::uint32_t>& ns, const BenchOptions& opts = {});
ComparisonTable table_latency_burst(const std::vector<std::uint32_t>& ns, const BenchOptions& opts = {});
ComparisonTable table_area(const std::vector<std::uint32_t>& ns, const BenchOptions& opts = {});

/// Columns: table,arch,formula,n,analytic,sim_mean,sim_ci95,trials,within_tolerance,reference.
std::string tables_to_csv(const std::vector<ComparisonTable>& tables);

struct SweepPoint {
    ArchitectureKind arch = ArchitectureKind::BinaryTree;
    std::uint32_t n = 0;
    LatencyMode mode = LatencyMode::Sparse;
    std::optional<Rational> analytic;  // none for poisson
    double sim_mean = 0;
    double sim_ci95 = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<std::string> skipped;  // "arch n: reason"
};

/// Every (arch, N) pair on independent arbiter instances, up to
/// `opts.jobs` at a time. Points come back in (arch, N) input order.
SweepResult sweep_scaling(const std::vector<ArchitectureKind>& archs, const std::vector<std::uint32_t>& ns,
                          LatencyMode mode, const BenchOptions& opts = {});

/// Header: arch,n,mode,analytic,sim_mean,sim_ci95,trials,seed.
std::string sweep_to_csv(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& text);

struct CamDesignPoint {
    std::uint32_t entries = 16;
    unsigned width = 11;
};

struct CamReportOptions {
    std::vector<CamDesignPoint> design_points{{16, 11}, {512, 11}};
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned spec_tail = 3;
    unsigned jobs = 1;
    CamTimingParams timing;
    CamEnergyParams energy;
    double sense_threshold = 0.5;
};

struct CamReportRow {
    std::uint32_t entries = 0;
    unsigned width = 0;
    CompletionKind mode = CompletionKind::DelayLine;
    bool feedback = false;
    unsigned spec_tail = 0;
    std::string search_case;  // all-match, all-mismatch, random
    double cycle_mean = 0;
    double energy_mean = 0;
    std::uint64_t seed = 0;
};

extern const char* const kCamCases[3];

/// Both completion modes with every feedback / speculative combination,
/// over the three search cases. Each variant sees the same arrays and keys.
std::vector<CamReportRow> cam_report(const CamReportOptions& opts = {});

/// Header: entries,width,mode,feedback,spec_tail,case,cycle_mean,energy_mean,seed.
std::string cam_report_to_csv(const std::vector<CamReportRow>& rows);

struct DemoOptions {
    ArchitectureKind arch = ArchitectureKind::HierArbiterTree;
    std::uint32_t n = 64;
    Workload workload{BurstWorkload{0}, 1};
    CamConfig cam;  // n_entries 0 takes N
    /// Tag stored in each CAM entry; empty means entry i stores i.
    std::vector<std::uint64_t> tags;
    bool identity_tags = true;
};

struct DemoEvent {
    std::uint32_t neuron = 0;
    std::uint32_t address = 0;
    SimTime t_request = 0;
    SimTime t_output = 0;
    std::vector<std::uint32_t> matches;
    SimTime cam_cycle = 0;
};

/// Arbiter output addresses searched in a CAM holding source tags.
std::vector<DemoEvent> aer_demo(const DemoOptions& opts);

/// Header: neuron,address,t_request,t_output,matches,cam_cycle; matches are
/// separated by ';'.
std::string demo_to_csv(const std::vector<DemoEvent>& events);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
/// Shortest round-trip text for a double.
std::string format_double(double x);

} // namespace aerint
