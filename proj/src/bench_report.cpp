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

#include "aerint/bench_report.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "aerint/error.hpp"
#include "aerint/rng.hpp"

namespace aerint {

const char* to_string(LatencyMode m)
{
    switch (m) {
    case LatencyMode::Sparse: return "sparse";
    case LatencyMode::Burst: return "burst";
    case LatencyMode::Poisson: return "poisson";
    }
    return "?";
}

LatencyMode parse_mode(const std::string& name)
{
    if (name == "sparse") return LatencyMode::Sparse;
    if (name == "burst") return LatencyMode::Burst;
    if (name == "poisson") return LatencyMode::Poisson;
    throw Error(ErrorCode::InvalidConfig, "unknown mode '" + name + "' (allowed: sparse, burst, poisson)");
}

const char* to_string(TableKind k)
{
    switch (k) {
    case TableKind::SparseLatency: return "sparse-latency";
    case TableKind::BurstLatency: return "burst-latency";
    case TableKind::Area: return "area";
    }
    return "?";
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

/// Runs f(i) for i in [0, count) on up to `jobs` threads. The first
/// exception is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F f)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::size_t arch_index(ArchitectureKind k) { return static_cast<std::size_t>(k); }

const char* const kSparseFormula[] = {"2*(log2 N-1)", "2*(log2 N-1)", "(N+1)/2", "sqrt(N)", "log2 N"};
const char* const kBurstFormula[] = {"2N*(log2 N-1)", "3N-6", "N", "N+2*sqrt(N)", "17N/16+3"};
const char* const kAreaFormula[] = {"N-1", "N-1", "N", "N+2*sqrt(N)", "3*log4 N"};

// Published figures for N=64 and N=256, in arch order.
const char* const kSparseRef[2][5] = {{"1.7 ns", "1.8 ns", "25.3 ns", "5.7 ns", "1.7 ns"},
                                      {"2.1 ns", "2.3 ns", "102.7 ns", "9.2 ns", "2.0 ns"}};
const char* const kBurstRef[2][5] = {{"83.7 ns", "", "40.5 ns", "48.9 ns", "47.2 ns"},
                                     {"436.9 ns", "", "178.4 ns", "192.9 ns", "194.4 ns"}};
const char* const kAreaRef[2][5] = {{"72.3", "83.4", "79.1", "89.2", "59.4"},
                                    {"277.4", "286.7", "272.5", "296.3", "192.4"}};

std::string reference_for(TableKind kind, ArchitectureKind arch, std::uint32_t n)
{
    const int col = n == 64 ? 0 : n == 256 ? 1 : -1;
    if (col < 0) return {};
    const auto a = arch_index(arch);
    switch (kind) {
    case TableKind::SparseLatency: return kSparseRef[col][a];
    case TableKind::BurstLatency: return kBurstRef[col][a];
    case TableKind::Area: return std::string(kAreaRef[col][a]) + " area units";
    }
    return {};
}

std::string tolerance_for(TableKind kind, ArchitectureKind arch)
{
    if (kind == TableKind::SparseLatency &&
        (arch == ArchitectureKind::TokenRing || arch == ArchitectureKind::HierTokenRing))
        return "3se";
    if (kind == TableKind::BurstLatency && arch == ArchitectureKind::HierArbiterTree) return "10pct";
    return "exact";
}

bool within(const std::string& tolerance, const Rational& analytic, const LatencyEstimate& sim)
{
    const double a = analytic.to_double();
    if (tolerance == "exact") return sim.mean == a;
    if (tolerance == "10pct") return std::fabs(sim.mean - a) <= 0.10 * a;
    const double se = sim.ci95 / 1.96;
    return std::fabs(sim.mean - a) <= 3 * se;
}

ComparisonTable build_table(TableKind kind, const std::vector<std::uint32_t>& ns, const BenchOptions& opts)
{
    ComparisonTable table;
    table.kind = kind;
    table.ns = ns;
    switch (kind) {
    case TableKind::SparseLatency: table.title = "Average latency with sparse events"; break;
    case TableKind::BurstLatency: table.title = "Total latency with burst events"; break;
    case TableKind::Area: table.title = "Two-input arbiter count"; break;
    }
    for (ArchitectureKind arch : kAllArchitectures) {
        TableRow row;
        row.arch = arch;
        const auto a = arch_index(arch);
        row.formula = kind == TableKind::SparseLatency ? kSparseFormula[a]
                      : kind == TableKind::BurstLatency ? kBurstFormula[a]
                                                        : kAreaFormula[a];
        row.tolerance = tolerance_for(kind, arch);
        for (std::uint32_t n : ns) {
            TableCell cell;
            cell.n = n;
            cell.applicable = is_valid_n(arch, n);
            if (cell.applicable) {
                cell.analytic = kind == TableKind::SparseLatency ? analytic_sparse_latency(arch, n)
                                : kind == TableKind::BurstLatency ? analytic_burst_latency(arch, n)
                                                                  : Rational(static_cast<std::int64_t>(arbiter_count(arch, n)));
                cell.reference = reference_for(kind, arch, n);
            }
            row.cells.push_back(cell);
        }
        table.rows.push_back(std::move(row));
    }
    if (opts.simulate) {
        const std::size_t per_row = ns.size();
        parallel_for(table.rows.size() * per_row, opts.jobs, [&](std::size_t i) {
            TableRow& row = table.rows[i / per_row];
            TableCell& cell = row.cells[i % per_row];
            if (!cell.applicable) return;
            ArbiterConfig cfg;
            cfg.kind = row.arch;
            cfg.n_neurons = cell.n;
            cfg.seed = opts.seed;
            ArbiterInstance inst(cfg);
            LatencyEstimate est;
            if (kind == TableKind::SparseLatency) {
                est = measure_sparse(inst, opts.trials, opts.seed);
            } else if (kind == TableKind::BurstLatency) {
                est.mean = static_cast<double>(measure_burst(inst));
                est.trials = 1;
            } else {
                est.mean = static_cast<double>(inst.two_input_cells());
                est.trials = 1;
            }
            cell.simulated = est;
            cell.within_tolerance = within(row.tolerance, cell.analytic, est);
        });
    }
    table.footer =
        "tolerance: exact = simulated equals analytic; 3se = within three standard errors; "
        "10pct = within 10% of analytic. reference = published figure, technology-dependent, "
        "not reproduced by this model";
    return table;
}

} // namespace

bool ComparisonTable::all_within_tolerance() const
{
    for (const auto& row : rows)
        for (const auto& cell : row.cells)
            if (cell.applicable && !cell.within_tolerance) return false;
    return true;
}

ComparisonTable table_latency_sparse(const std::vector<std::uint32_t>& ns, const BenchOptions& opts)
{
    return build_table(TableKind::SparseLatency, ns, opts);
}

ComparisonTable table_latency_burst(const std::vector<std::uint32_t>& ns, const BenchOptions& opts)
{
    return build_table(TableKind::BurstLatency, ns, opts);
}

ComparisonTable table_area(const std::vector<std::uint32_t>& ns, const BenchOptions& opts)
{
    return build_table(TableKind::Area, ns, opts);
}

std::string tables_to_csv(const std::vector<ComparisonTable>& tables)
{
    std::ostringstream os;
    os << "table,arch,formula,n,analytic,sim_mean,sim_ci95,trials,within_tolerance,reference\n";
    for (const auto& t : tables) {
        for (const auto& row : t.rows) {
            for (const auto& cell : row.cells) {
                os << to_string(t.kind) << ',' << to_string(row.arch) << ",\"" << row.formula << "\"," << cell.n << ',';
                if (!cell.applicable) {
                    os << "n/a,,,,,\n";
                    continue;
                }
                os << cell.analytic.decimal() << ',';
                if (cell.simulated)
                    os << format_double(cell.simulated->mean) << ',' << format_double(cell.simulated->ci95) << ','
                       << cell.simulated->trials;
                else
                    os << ",,";
                os << ',' << (cell.within_tolerance ? "yes" : "no") << ',' << cell.reference << '\n';
            }
        }
    }
    if (!tables.empty()) os << "# " << tables.front().footer << '\n';
    return os.str();
}

SweepResult sweep_scaling(const std::vector<ArchitectureKind>& archs, const std::vector<std::uint32_t>& ns,
                          LatencyMode mode, const BenchOptions& opts)
{
    if (opts.trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
    SweepResult result;
    for (ArchitectureKind arch : archs) {
        for (std::uint32_t n : ns) {
            if (!is_valid_n(arch, n)) {
                result.skipped.push_back(std::string(to_string(arch)) + " " + std::to_string(n) +
                                         ": N does not fit the topology");
                continue;
            }
            SweepPoint p;
            p.arch = arch;
            p.n = n;
            p.mode = mode;
            p.seed = opts.seed;
            if (mode == LatencyMode::Sparse) p.analytic = analytic_sparse_latency(arch, n);
            if (mode == LatencyMode::Burst) p.analytic = analytic_burst_latency(arch, n);
            result.points.push_back(p);
        }
    }
    parallel_for(result.points.size(), opts.jobs, [&](std::size_t i) {
        SweepPoint& p = result.points[i];
        ArbiterConfig cfg;
        cfg.kind = p.arch;
        cfg.n_neurons = p.n;
        cfg.seed = opts.seed;
        ArbiterInstance inst(cfg);
        if (p.mode == LatencyMode::Sparse) {
            const LatencyEstimate est = measure_sparse(inst, opts.trials, opts.seed);
            p.sim_mean = est.mean;
            p.sim_ci95 = est.ci95;
            p.trials = est.trials;
        } else if (p.mode == LatencyMode::Burst) {
            p.sim_mean = static_cast<double>(measure_burst(inst));
            p.trials = 1;
        } else {
            const auto duration = static_cast<SimTime>(std::ceil(static_cast<double>(opts.trials) / opts.poisson_rate));
            const SpikeTrain train = generate({PoissonWorkload{opts.poisson_rate, duration}, opts.seed}, p.n);
            const auto events = inst.simulate(train);
            double sum = 0, sum_sq = 0;
            for (const auto& e : events) {
                const double l = static_cast<double>(e.latency());
                sum += l;
                sum_sq += l * l;
            }
            const double k = static_cast<double>(events.size());
            if (k > 0) {
                p.sim_mean = sum / k;
                const double var = k > 1 ? std::max(0.0, (sum_sq - k * p.sim_mean * p.sim_mean) / (k - 1)) : 0.0;
                p.sim_ci95 = 1.96 * std::sqrt(var / k);
            }
            p.trials = events.size();
        }
    });
    return result;
}

std::string sweep_to_csv(const SweepResult& result)
{
    std::ostringstream os;
    for (const auto& s : result.skipped) os << "# skipped " << s << '\n';
    os << "arch,n,mode,analytic,sim_mean,sim_ci95,trials,seed\n";
    for (const auto& p : result.points)
        os << to_string(p.arch) << ',' << p.n << ',' << to_string(p.mode) << ','
           << (p.analytic ? p.analytic->decimal() : std::string()) << ',' << format_double(p.sim_mean) << ','
           << format_double(p.sim_ci95) << ',' << p.trials << ',' << p.seed << '\n';
    return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Rational parse_decimal(const std::string& s)
{
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(s));
    const std::string frac = s.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const bool neg = !s.empty() && s[0] == '-';
    const std::int64_t whole = std::stoll(s.substr(0, dot));
    const std::int64_t f = std::stoll(frac);
    return Rational(whole * den + (neg ? -f : f), den);
}

} // namespace

SweepResult sweep_from_csv(const std::string& text)
{
    SweepResult result;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# skipped ", 0) == 0) result.skipped.push_back(line.substr(10));
            continue;
        }
        if (!header) {
            if (line != "arch,n,mode,analytic,sim_mean,sim_ci95,trials,seed")
                throw Error(ErrorCode::InvalidConfig, "unexpected sweep header: " + line);
            header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 8) throw Error(ErrorCode::InvalidConfig, "sweep row needs 8 fields: " + line);
        SweepPoint p;
        const auto arch = parse_architecture(f[0]);
        if (!arch) throw Error(ErrorCode::InvalidConfig, "unknown architecture " + f[0]);
        p.arch = *arch;
        p.n = static_cast<std::uint32_t>(std::stoul(f[1]));
        p.mode = parse_mode(f[2]);
        if (!f[3].empty()) p.analytic = parse_decimal(f[3]);
        p.sim_mean = std::stod(f[4]);
        p.sim_ci95 = std::stod(f[5]);
        p.trials = std::stoull(f[6]);
        p.seed = std::stoull(f[7]);
        result.points.push_back(p);
    }
    return result;
}

const char* const kCamCases[3] = {"all-match", "all-mismatch", "random"};

std::vector<CamReportRow> cam_report(const CamReportOptions& opts)
{
    if (opts.trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
    struct Job {
        CamDesignPoint dp;
        CompletionKind mode;
        bool feedback;
        unsigned tail;
        int search_case;
    };
    std::vector<Job> jobs;
    for (const auto& dp : opts.design_points)
        for (int c = 0; c < 3; ++c)
            for (CompletionKind mode : {CompletionKind::DelayLine, CompletionKind::Cscd})
                for (bool fb : {false, true})
                    for (unsigned tail : {0u, opts.spec_tail}) jobs.push_back({dp, mode, fb, tail, c});

    std::vector<CamReportRow> rows(jobs.size());
    parallel_for(jobs.size(), opts.jobs, [&](std::size_t i) {
        const Job& j = jobs[i];
        CamConfig cfg;
        cfg.n_entries = j.dp.entries;
        cfg.width = j.dp.width;
        cfg.completion = j.mode;
        cfg.feedback = j.feedback;
        cfg.speculative_tail = j.tail;
        cfg.sense_threshold = opts.sense_threshold;
        cfg.timing = opts.timing;
        cfg.energy = opts.energy;
        cfg.seed = opts.seed;
        CamArray cam(cfg);
        // Same arrays and keys for every variant of a case.
        Rng data(opts.seed * 0x100000001b3ull + static_cast<std::uint64_t>(j.search_case));
        const std::uint64_t space = std::uint64_t{1} << j.dp.width;
        double cycle = 0, energy = 0;
        for (std::uint64_t t = 0; t < opts.trials; ++t) {
            const std::uint64_t key = data.below(space);
            for (std::uint32_t e = 0; e < j.dp.entries; ++e) {
                std::uint64_t word = key;
                if (j.search_case == 1) word = key ^ (1 + data.below(space - 1));
                if (j.search_case == 2) word = data.below(space);
                cam.write_entry(e, word);
            }
            const SearchResult r = cam.search(key);
            cycle += static_cast<double>(r.cycle_time);
            energy += r.energy.total();
        }
        const double k = static_cast<double>(opts.trials);
        rows[i] = {j.dp.entries, j.dp.width, j.mode, j.feedback, j.tail, kCamCases[j.search_case],
                   cycle / k, energy / k, opts.seed};
    });
    return rows;
}

std::string cam_report_to_csv(const std::vector<CamReportRow>& rows)
{
    std::ostringstream os;
    os << "entries,width,mode,feedback,spec_tail,case,cycle_mean,energy_mean,seed\n";
    for (const auto& r : rows)
        os << r.entries << ',' << r.width << ',' << to_string(r.mode) << ',' << (r.feedback ? 1 : 0) << ','
           << r.spec_tail << ',' << r.search_case << ',' << format_double(r.cycle_mean) << ','
           << format_double(r.energy_mean) << ',' << r.seed << '\n';
    return os.str();
}

std::vector<DemoEvent> aer_demo(const DemoOptions& opts)
{
    CamConfig cam_cfg = opts.cam;
    if (cam_cfg.n_entries == 0) cam_cfg.n_entries = opts.n;
    std::uint32_t bits = 0;
    while ((std::uint64_t{1} << bits) < opts.n) ++bits;
    if (cam_cfg.width < bits)
        throw Error(ErrorCode::InvalidConfig, "CAM width " + std::to_string(cam_cfg.width) + " cannot hold " +
                                                  std::to_string(bits) + "-bit addresses");
    CamArray cam(cam_cfg);
    if (!opts.tags.empty()) {
        if (opts.tags.size() > cam_cfg.n_entries) throw Error(ErrorCode::InvalidConfig, "more tags than CAM entries");
        for (std::uint32_t i = 0; i < opts.tags.size(); ++i) cam.write_entry(i, opts.tags[i]);
    } else if (opts.identity_tags) {
        const std::uint64_t mask = (std::uint64_t{1} << cam_cfg.width) - 1;
        for (std::uint32_t i = 0; i < cam_cfg.n_entries; ++i) cam.write_entry(i, i & mask);
    }
    const bool have_tags = !opts.tags.empty() || opts.identity_tags;

    ArbiterConfig arb_cfg;
    arb_cfg.kind = opts.arch;
    arb_cfg.n_neurons = opts.n;
    arb_cfg.seed = opts.workload.seed;
    ArbiterInstance arbiter(arb_cfg);
    const auto events = arbiter.simulate(generate(opts.workload, opts.n));

    std::vector<DemoEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) {
        DemoEvent d;
        d.neuron = e.neuron_id;
        d.address = e.encoded_address;
        d.t_request = e.t_request;
        d.t_output = e.t_output;
        const SearchResult r = cam.search(e.encoded_address);
        require_reliable(r);
        if (have_tags)
            for (std::uint32_t i = 0; i < r.match.size(); ++i)
                if (r.match[i]) d.matches.push_back(i);
        d.cam_cycle = r.cycle_time;
        out.push_back(std::move(d));
    }
    return out;
}

std::string demo_to_csv(const std::vector<DemoEvent>& events)
{
    std::ostringstream os;
    os << "neuron,address,t_request,t_output,matches,cam_cycle\n";
    for (const auto& e : events) {
        os << e.neuron << ',' << e.address << ',' << e.t_request << ',' << e.t_output << ',';
        for (std::size_t i = 0; i < e.matches.size(); ++i) os << (i ? ";" : "") << e.matches[i];
        os << ',' << e.cam_cycle << '\n';
    }
    return os.str();
}

} // namespace aerint
