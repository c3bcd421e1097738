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

#include "aerint/arbitration.hpp"

#include <bit>
#include <cmath>
#include <map>

#include "aerint/error.hpp"

namespace aerint {

namespace {

std::uint32_t ilog2(std::uint64_t n) { return static_cast<std::uint32_t>(std::bit_width(n) - 1); }

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_pow4(std::uint64_t n) { return std::has_single_bit(n) && ilog2(n) % 2 == 0; }

constexpr std::uint32_t kNone = ~std::uint32_t{0};

/// Per-leaf request counts in a complete binary tree, padded to a power of
/// two. Node 1 is the root; leaf i lives at node `size + i`.
class PendingTree {
public:
    explicit PendingTree(std::uint32_t n) : size_(std::bit_ceil(std::max<std::uint32_t>(n, 1))), count_(2 * size_, 0) {}

    std::uint32_t size() const { return size_; }
    std::uint32_t count(std::uint32_t node) const { return count_[node]; }
    std::uint32_t total() const { return count_[1]; }
    std::uint32_t leaf(std::uint32_t id) const { return size_ + id; }

    void add(std::uint32_t id)
    {
        for (std::uint32_t v = leaf(id); v >= 1; v >>= 1) ++count_[v];
    }
    void remove(std::uint32_t id)
    {
        for (std::uint32_t v = leaf(id); v >= 1; v >>= 1) --count_[v];
    }

    /// Smallest pending id in [lo, hi), or kNone.
    std::uint32_t first_in(std::uint32_t lo, std::uint32_t hi) const
    {
        return lo >= hi ? kNone : first_in(1, 0, size_, lo, hi);
    }

private:
    std::uint32_t first_in(std::uint32_t node, std::uint32_t nlo, std::uint32_t nhi, std::uint32_t lo,
                           std::uint32_t hi) const
    {
        if (count_[node] == 0 || nhi <= lo || hi <= nlo) return kNone;
        if (nhi - nlo == 1) return nlo;
        const std::uint32_t mid = nlo + (nhi - nlo) / 2;
        const std::uint32_t left = first_in(2 * node, nlo, mid, lo, hi);
        return left != kNone ? left : first_in(2 * node + 1, mid, nhi, lo, hi);
    }

    std::uint32_t size_;
    std::vector<std::uint32_t> count_;
};

/// FIFO of request times per neuron, stored as intrusive lists so that
/// N = 2^20 neurons costs two words each.
class RequestQueues {
public:
    explicit RequestQueues(std::uint32_t n) : head_(n, kNone), tail_(n, kNone) {}

    void push(std::uint32_t id, SimTime t)
    {
        std::uint32_t slot;
        if (free_ != kNone) {
            slot = free_;
            free_ = next_[slot];
            time_[slot] = t;
            next_[slot] = kNone;
        } else {
            slot = static_cast<std::uint32_t>(time_.size());
            time_.push_back(t);
            next_.push_back(kNone);
        }
        if (tail_[id] == kNone)
            head_[id] = slot;
        else
            next_[tail_[id]] = slot;
        tail_[id] = slot;
    }

    SimTime pop(std::uint32_t id)
    {
        const std::uint32_t slot = head_[id];
        const SimTime t = time_[slot];
        head_[id] = next_[slot];
        if (head_[id] == kNone) tail_[id] = kNone;
        next_[slot] = free_;
        free_ = slot;
        return t;
    }

private:
    std::vector<std::uint32_t> head_, tail_, next_;
    std::vector<SimTime> time_;
    std::uint32_t free_ = kNone;
};

/// Grant state of every two-input cell. Granting a cell that is already
/// granted to the other side is a mutual-exclusion violation.
class CellLedger {
public:
    CellLedger(std::uint64_t cells, Kernel& kernel) : grant_(cells, Grant::None), kernel_(kernel) {}

    void grant(std::uint64_t cell, Grant side)
    {
        Grant& g = grant_.at(cell);
        if (g == side) return;
        if (g != Grant::None) ++violations_;
        set(cell, g, side);
    }
    void release(std::uint64_t cell)
    {
        Grant& g = grant_.at(cell);
        if (g != Grant::None) set(cell, g, Grant::None);
    }
    std::uint64_t violations() const { return violations_; }
    std::uint64_t size() const { return grant_.size(); }

private:
    void set(std::uint64_t cell, Grant& g, Grant side)
    {
        if (kernel_.trace().enabled())
            kernel_.trace().record(kernel_.now(), "cell" + std::to_string(cell), "grant",
                                   static_cast<int>(g), static_cast<int>(side));
        g = side;
    }

    std::vector<Grant> grant_;
    Kernel& kernel_;
    std::uint64_t violations_ = 0;
};

struct Selection {
    std::uint32_t neuron = 0;
    std::uint32_t address = 0;
    SimTime cost = 0;  // in unit stage delays
};

class Topology {
public:
    virtual ~Topology() = default;
    /// Chooses the next pending request. `from_idle` is set when no grant is
    /// held, i.e. the previous event found the arbiter empty.
    virtual Selection select(bool from_idle, PendingTree& pending, CellLedger& ledger, Rng& rng,
                             std::vector<std::uint64_t>& arbitrations) = 0;
    /// Called when `neuron` has been encoded; `more` says whether any other
    /// request is still pending.
    virtual void complete(std::uint32_t neuron, bool more, PendingTree& pending, CellLedger& ledger) = 0;
    virtual std::uint64_t cells() const = 0;
    virtual std::uint32_t levels() const = 0;
    virtual std::uint32_t ring_size() const { return 0; }
    virtual std::uint32_t ring_count() const { return 0; }
    virtual std::uint32_t token_position(std::uint32_t) const { return 0; }
};

/// Binary and greedy trees share the heap layout: cell v has children 2v and
/// 2v+1, which are also the PendingTree nodes of the two subtrees.
class TreeTopology : public Topology {
public:
    TreeTopology(std::uint32_t n, bool greedy, SimTime neuron_response)
        : n_(n), depth_(ilog2(n)), greedy_(greedy), response_(neuron_response)
    {
    }

    Selection select(bool from_idle, PendingTree& pending, CellLedger& ledger, Rng& rng,
                     std::vector<std::uint64_t>& arbitrations) override
    {
        Selection sel;
        std::uint32_t start = 1;
        std::uint32_t start_height = depth_;
        if (greedy_ && !from_idle && has_last_) {
            // Lowest ancestor of the last leaf that still has requests below it.
            std::uint32_t h = 1;
            while (h < depth_ && pending.count(pending.leaf(last_) >> h) == 0) ++h;
            start = pending.leaf(last_) >> h;
            start_height = h;
            // The old path up to and including that ancestor loses its requests.
            for (std::uint32_t k = 1; k <= h; ++k) {
                const std::uint32_t c = pending.leaf(last_) >> k;
                ledger.release(c - 1);
                cell_state_[c] = Grant::None;
            }
            sel.cost = (h == depth_ ? 2 * (depth_ - 1) : 2 * h - 1) + response_;
        } else {
            sel.cost = 2 * (depth_ - 1);
        }
        std::uint32_t v = start;
        // Address bits above the starting cell are those of its subtree.
        std::uint32_t address = start - (1u << (depth_ - start_height));
        for (std::uint32_t h = start_height; h >= 1; --h) {
            const bool a = pending.count(2 * v) > 0;
            const bool b = pending.count(2 * v + 1) > 0;
            ArbiterCell cell{cell_state_[v]};
            const Grant g = two_input_arbitrate(a, b, cell, rng);
            cell_state_[v] = cell.grant;
            ledger.grant(v - 1, g);
            ++arbitrations[depth_ - h];
            v = 2 * v + (g == Grant::B ? 1 : 0);
            address = (address << 1) | (g == Grant::B ? 1u : 0u);
        }
        sel.neuron = v - pending.size();
        sel.address = address;
        return sel;
    }

    void complete(std::uint32_t neuron, bool more, PendingTree& pending, CellLedger& ledger) override
    {
        last_ = neuron;
        has_last_ = true;
        if (greedy_ && more) return;
        for (std::uint32_t h = 1; h <= depth_; ++h) {
            const std::uint32_t v = pending.leaf(neuron) >> h;
            ledger.release(v - 1);
            cell_state_[v] = Grant::None;
        }
    }

    std::uint64_t cells() const override { return n_ - 1; }
    std::uint32_t levels() const override { return depth_; }

private:
    std::uint32_t n_;
    std::uint32_t depth_;
    bool greedy_;
    SimTime response_;
    std::vector<Grant> cell_state_ = std::vector<Grant>(2 * std::uint64_t{n_}, Grant::None);
    std::uint32_t last_ = 0;
    bool has_last_ = false;
};

/// Linear token ring. Serving the stage that holds the token costs one
/// unit; every hop costs one more. After serving stage j the token sits at
/// j+1, so a repeat of j travels the full ring.
class TokenRingTopology : public Topology {
public:
    explicit TokenRingTopology(std::uint32_t n) : n_(n) {}

    Selection select(bool, PendingTree& pending, CellLedger& ledger, Rng&,
                     std::vector<std::uint64_t>& arbitrations) override
    {
        std::uint32_t j = pending.first_in(token_, n_);
        if (j == kNone) j = pending.first_in(0, token_);
        const std::uint32_t hops = (j + n_ - token_) % n_;
        ledger.grant(j, Grant::A);
        ++arbitrations[0];
        return {j, j, SimTime{1} + hops};
    }

    void complete(std::uint32_t neuron, bool, PendingTree&, CellLedger& ledger) override
    {
        ledger.release(neuron);
        token_ = (neuron + 1) % n_;
    }

    std::uint64_t cells() const override { return n_; }
    std::uint32_t levels() const override { return 1; }
    std::uint32_t ring_size() const override { return n_; }
    std::uint32_t ring_count() const override { return 1; }
    std::uint32_t token_position(std::uint32_t) const override { return token_; }

private:
    std::uint32_t n_;
    std::uint32_t token_ = 0;
};

/// Two-level token ring: a top ring of s = sqrt(N) nodes, each owning a
/// leaf ring of s stages. Cells: N leaf stages, s top stages, s ring
/// interfaces.
///
/// Cost of an event:
///   leaf part   1 + hops from the leaf ring's token to the stage
///   ring entry  top-ring hops from the last entered ring when nothing else
///               is pending; 2 (exit + entry, the first hop overlapped with
///               the previous ring's tail) plus any further hops when other
///               requests are queued
///   same ring   no entry cost while the ring stays granted
class HierRingTopology : public Topology {
public:
    explicit HierRingTopology(std::uint32_t n)
        : n_(n), s_(static_cast<std::uint32_t>(isqrt(n))), leaf_token_(s_, 0)
    {
    }

    Selection select(bool from_idle, PendingTree& pending, CellLedger& ledger, Rng&,
                     std::vector<std::uint64_t>& arbitrations) override
    {
        SimTime cost = 0;
        std::uint32_t ring = active_;
        if (ring == kNone || from_idle || ring_pending(pending, ring) == kNone) {
            // Top ring scan from the last entered ring.
            std::uint32_t hops = 0;
            for (; hops < s_; ++hops) {
                const std::uint32_t r = (top_ + hops) % s_;
                if (ring_pending(pending, r) != kNone) {
                    ring = r;
                    break;
                }
            }
            const bool contended = !from_idle || pending.total() > 1;
            cost += contended ? 2 + (hops > 1 ? hops - 1 : 0) : hops;
            ledger.grant(n_ + ring, Grant::A);
            ledger.grant(n_ + s_ + ring, Grant::A);
            ++arbitrations[0];
            active_ = ring;
            top_ = ring;
        }
        const std::uint32_t stage = ring_pending(pending, ring);
        const std::uint32_t q = leaf_token_[ring];
        cost += 1 + (stage + s_ - q) % s_;
        const std::uint32_t j = ring * s_ + stage;
        ledger.grant(j, Grant::A);
        ++arbitrations[1];
        return {j, ring * s_ + stage, cost};
    }

    void complete(std::uint32_t neuron, bool more, PendingTree& pending, CellLedger& ledger) override
    {
        const std::uint32_t ring = neuron / s_;
        leaf_token_[ring] = (neuron % s_ + 1) % s_;
        ledger.release(neuron);
        if (!more || ring_pending(pending, ring) == kNone) {
            ledger.release(n_ + ring);
            ledger.release(n_ + s_ + ring);
            active_ = kNone;
        }
    }

    std::uint64_t cells() const override { return std::uint64_t{n_} + 2 * s_; }
    std::uint32_t levels() const override { return 2; }
    std::uint32_t ring_size() const override { return s_; }
    std::uint32_t ring_count() const override { return s_; }
    std::uint32_t token_position(std::uint32_t ring) const override { return leaf_token_.at(ring); }

private:
    /// First pending stage of `ring` at or after its token, cyclically.
    std::uint32_t ring_pending(const PendingTree& pending, std::uint32_t ring) const
    {
        const std::uint32_t base = ring * s_;
        const std::uint32_t q = leaf_token_[ring];
        std::uint32_t j = pending.first_in(base + q, base + s_);
        if (j == kNone) j = pending.first_in(base, base + q);
        return j == kNone ? kNone : j - base;
    }

    std::uint32_t n_;
    std::uint32_t s_;
    std::vector<std::uint32_t> leaf_token_;
    std::uint32_t top_ = 0;
    std::uint32_t active_ = kNone;
};

/// Hierarchical arbiter tree: L = log4 N levels, each one four-input
/// arbiter (three two-input cells) shared by all clusters of that level
/// through wired-OR request lines. A level keeps its grant while the granted
/// sub-cluster still has requests.
///
/// Timing: a cold event walks all levels, 2 units per level. While requests
/// are queued, the next low-level grant overlaps the current packet and
/// costs 1 unit; medium-level changes hide behind the low-level validity
/// detector, and changing the 16-neuron cluster (or anything above it) adds
/// 1 unit of hand-over.
class HatTopology : public Topology {
public:
    explicit HatTopology(std::uint32_t n) : n_(n), levels_(ilog2(n) / 2) {}

    Selection select(bool from_idle, PendingTree& pending, CellLedger& ledger, Rng& rng,
                     std::vector<std::uint64_t>& arbitrations) override
    {
        Selection sel;
        std::uint32_t start = 0;
        if (from_idle || !has_last_) {
            sel.cost = 2 * levels_;
        } else {
            // Deepest held cluster that still has active neurons.
            start = levels_ - 1;
            while (start > 0 && pending.count(cluster_node(last_, start)) == 0) --start;
            sel.cost = 1 + (levels_ >= 3 && start <= levels_ - 3 ? 1 : 0);
        }
        for (std::uint32_t l = start; l < levels_; ++l)
            for (std::uint32_t c = 0; c < 3; ++c) {
                ledger.release(3 * l + c);
                cell_state_[3 * l + c] = Grant::None;
            }
        std::uint32_t node = start == 0 ? 1 : cluster_node(last_, start);
        std::uint32_t address = start == 0 ? 0 : (last_ >> (2 * (levels_ - start)));
        for (std::uint32_t l = start; l < levels_; ++l) {
            // Four-input arbiter: root cell picks a pair, pair cell picks one.
            const std::uint32_t lo = 2 * node, hi = 2 * node + 1;
            const Grant root = arbitrate(3 * l, pending.count(lo) > 0, pending.count(hi) > 0, ledger, rng);
            const std::uint32_t pair = root == Grant::B ? hi : lo;
            const std::uint32_t pair_cell = 3 * l + (root == Grant::B ? 2 : 1);
            const Grant leaf =
                arbitrate(pair_cell, pending.count(2 * pair) > 0, pending.count(2 * pair + 1) > 0, ledger, rng);
            const std::uint32_t digit = (root == Grant::B ? 2u : 0u) + (leaf == Grant::B ? 1u : 0u);
            address = (address << 2) | digit;
            node = 2 * pair + (leaf == Grant::B ? 1 : 0);
            ++arbitrations[l];
        }
        sel.neuron = node - pending.size();
        sel.address = address;
        return sel;
    }

    void complete(std::uint32_t neuron, bool more, PendingTree&, CellLedger& ledger) override
    {
        last_ = neuron;
        has_last_ = true;
        if (more) return;
        for (std::uint64_t c = 0; c < cells(); ++c) {
            ledger.release(c);
            cell_state_[c] = Grant::None;
        }
    }

    std::uint64_t cells() const override { return 3 * std::uint64_t{levels_}; }
    std::uint32_t levels() const override { return levels_; }

private:
    /// PendingTree node of the cluster holding `neuron` at hierarchy depth
    /// `depth` (depth 0 is the whole array).
    std::uint32_t cluster_node(std::uint32_t neuron, std::uint32_t depth) const
    {
        return (1u << (2 * depth)) + (neuron >> (2 * (levels_ - depth)));
    }

    Grant arbitrate(std::uint32_t cell, bool a, bool b, CellLedger& ledger, Rng& rng)
    {
        ArbiterCell state{cell_state_[cell]};
        const Grant g = two_input_arbitrate(a, b, state, rng);
        cell_state_[cell] = g;
        ledger.grant(cell, g);
        return g;
    }

    std::uint32_t n_;
    std::uint32_t levels_;
    std::vector<Grant> cell_state_ = std::vector<Grant>(3 * std::size_t{levels_}, Grant::None);
    std::uint32_t last_ = 0;
    bool has_last_ = false;
};

std::unique_ptr<Topology> make_topology(const ArbiterConfig& cfg)
{
    switch (cfg.kind) {
    case ArchitectureKind::BinaryTree: return std::make_unique<TreeTopology>(cfg.n_neurons, false, 0);
    case ArchitectureKind::GreedyTree:
        return std::make_unique<TreeTopology>(cfg.n_neurons, true, cfg.greedy_neuron_response);
    case ArchitectureKind::TokenRing: return std::make_unique<TokenRingTopology>(cfg.n_neurons);
    case ArchitectureKind::HierTokenRing: return std::make_unique<HierRingTopology>(cfg.n_neurons);
    case ArchitectureKind::HierArbiterTree: return std::make_unique<HatTopology>(cfg.n_neurons);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown architecture");
}

} // namespace

const char* to_string(ArchitectureKind kind)
{
    switch (kind) {
    case ArchitectureKind::BinaryTree: return "binary-tree";
    case ArchitectureKind::GreedyTree: return "greedy-tree";
    case ArchitectureKind::TokenRing: return "token-ring";
    case ArchitectureKind::HierTokenRing: return "hier-ring";
    case ArchitectureKind::HierArbiterTree: return "hier-tree";
    }
    return "?";
}

std::optional<ArchitectureKind> parse_architecture(std::string_view name)
{
    for (auto k : kAllArchitectures)
        if (name == to_string(k)) return k;
    return std::nullopt;
}

bool is_valid_n(ArchitectureKind kind, std::uint64_t n)
{
    if (n < 2 || n > (std::uint64_t{1} << 20)) return false;
    switch (kind) {
    case ArchitectureKind::BinaryTree:
    case ArchitectureKind::GreedyTree: return std::has_single_bit(n);
    case ArchitectureKind::TokenRing: return true;
    case ArchitectureKind::HierTokenRing: {
        const auto s = isqrt(n);
        return s * s == n;
    }
    case ArchitectureKind::HierArbiterTree: return is_pow4(n);
    }
    return false;
}

void validate_n(ArchitectureKind kind, std::uint64_t n)
{
    if (is_valid_n(kind, n)) return;
    std::string need;
    switch (kind) {
    case ArchitectureKind::BinaryTree:
    case ArchitectureKind::GreedyTree: need = "a power of two"; break;
    case ArchitectureKind::TokenRing: need = "at least 2"; break;
    case ArchitectureKind::HierTokenRing: need = "a perfect square"; break;
    case ArchitectureKind::HierArbiterTree: need = "a power of four"; break;
    }
    throw Error(ErrorCode::InvalidN, std::string(to_string(kind)) + " needs N in [2, 2^20] and " + need +
                                         ", got " + std::to_string(n));
}

Rational analytic_sparse_latency(ArchitectureKind kind, std::uint64_t n)
{
    validate_n(kind, n);
    const auto N = static_cast<std::int64_t>(n);
    switch (kind) {
    case ArchitectureKind::BinaryTree:
    case ArchitectureKind::GreedyTree: return Rational(2 * (ilog2(n) - 1));
    case ArchitectureKind::TokenRing: return Rational(N + 1, 2);
    case ArchitectureKind::HierTokenRing: return Rational(static_cast<std::int64_t>(isqrt(n)));
    case ArchitectureKind::HierArbiterTree: return Rational(ilog2(n));
    }
    return {};
}

Rational analytic_burst_latency(ArchitectureKind kind, std::uint64_t n)
{
    validate_n(kind, n);
    const auto N = static_cast<std::int64_t>(n);
    switch (kind) {
    case ArchitectureKind::BinaryTree: return Rational(2 * N * (ilog2(n) - 1));
    case ArchitectureKind::GreedyTree: return Rational(3 * N - 6);
    case ArchitectureKind::TokenRing: return Rational(N);
    case ArchitectureKind::HierTokenRing: return Rational(N + 2 * static_cast<std::int64_t>(isqrt(n)));
    case ArchitectureKind::HierArbiterTree: return Rational(17, 16) * Rational(N) + Rational(3);
    }
    return {};
}

std::uint64_t arbiter_count(ArchitectureKind kind, std::uint64_t n)
{
    validate_n(kind, n);
    switch (kind) {
    case ArchitectureKind::BinaryTree:
    case ArchitectureKind::GreedyTree: return n - 1;
    case ArchitectureKind::TokenRing: return n;
    case ArchitectureKind::HierTokenRing: return n + 2 * isqrt(n);
    case ArchitectureKind::HierArbiterTree: return 3 * (ilog2(n) / 2);
    }
    return 0;
}

Grant two_input_arbitrate(bool req_a, bool req_b, ArbiterCell& cell, Rng& rng)
{
    if (cell.grant == Grant::A && req_a) return Grant::A;
    if (cell.grant == Grant::B && req_b) return Grant::B;
    if (req_a && req_b)
        cell.grant = rng.coin() ? Grant::B : Grant::A;
    else if (req_a)
        cell.grant = Grant::A;
    else if (req_b)
        cell.grant = Grant::B;
    else
        cell.grant = Grant::None;
    return cell.grant;
}

struct ArbiterInstance::Impl {
    explicit Impl(const ArbiterConfig& cfg)
        : config(cfg), kernel(cfg.trace), rng(cfg.seed), pending(cfg.n_neurons), queues(cfg.n_neurons),
          topology(make_topology(cfg)), ledger(topology->cells(), kernel)
    {
        stats.arbitrations_per_level.assign(topology->levels(), 0);
        driver = kernel.add_component("arbiter", [this](Kernel& k, const Event& ev) { handle(k, ev); });
    }

    static constexpr std::uint64_t kArrival = std::uint64_t{1} << 32;
    static constexpr std::uint64_t kStart = std::uint64_t{1} << 33;

    void handle(Kernel& k, const Event& ev)
    {
        const auto neuron = static_cast<std::uint32_t>(ev.payload & 0xffffffffu);
        if (ev.payload & kArrival) {
            pending.add(neuron);
            queues.push(neuron, k.now());
            ++stats.requests;
            // Arbitrate after every request arriving at this instant is in.
            if (!busy && !start_queued) {
                start_queued = true;
                k.schedule(k.now(), driver, kStart);
            }
            return;
        }
        if (ev.payload & kStart) {
            start_queued = false;
            if (!busy) start(k);
            return;
        }
        const SimTime t_req = queues.pop(neuron);
        pending.remove(neuron);
        out->push_back({neuron, current.address, t_req, k.now()});
        ++stats.outputs;
        const bool more = pending.total() > 0;
        topology->complete(neuron, more, pending, ledger);
        held = more;
        busy = false;
        if (more) start(k);
    }

    void start(Kernel& k)
    {
        current = topology->select(!held, pending, ledger, rng, stats.arbitrations_per_level);
        busy = true;
        k.schedule_in(current.cost * config.stage_delay, driver, current.neuron);
    }

    ArbiterConfig config;
    Kernel kernel;
    Rng rng;
    PendingTree pending;
    RequestQueues queues;
    std::unique_ptr<Topology> topology;
    CellLedger ledger;
    ArbiterStats stats;
    ComponentId driver = 0;
    Selection current;
    bool busy = false;
    bool held = false;
    bool start_queued = false;
    std::vector<AddressEvent>* out = nullptr;
};

ArbiterInstance::ArbiterInstance(const ArbiterConfig& config)
{
    validate_n(config.kind, config.n_neurons);
    impl_ = std::make_unique<Impl>(config);
}

ArbiterInstance::~ArbiterInstance() = default;
ArbiterInstance::ArbiterInstance(ArbiterInstance&&) noexcept = default;
ArbiterInstance& ArbiterInstance::operator=(ArbiterInstance&&) noexcept = default;

const ArbiterConfig& ArbiterInstance::config() const { return impl_->config; }
std::uint64_t ArbiterInstance::two_input_cells() const { return impl_->topology->cells(); }
std::uint32_t ArbiterInstance::levels() const { return impl_->topology->levels(); }
std::uint32_t ArbiterInstance::ring_size() const { return impl_->topology->ring_size(); }
std::uint32_t ArbiterInstance::ring_count() const { return impl_->topology->ring_count(); }
std::uint32_t ArbiterInstance::token_position(std::uint32_t ring) const
{
    return impl_->topology->token_position(ring);
}
const ArbiterStats& ArbiterInstance::stats() const
{
    impl_->stats.mutex_violations = impl_->ledger.violations();
    return impl_->stats;
}
SimTime ArbiterInstance::now() const { return impl_->kernel.now(); }
const Trace& ArbiterInstance::trace() const { return impl_->kernel.trace(); }

std::vector<AddressEvent> ArbiterInstance::simulate(const SpikeTrain& train)
{
    Impl& im = *impl_;
    for (const auto& s : train.spikes)
        if (s.neuron >= im.config.n_neurons)
            throw Error(ErrorCode::InvalidConfig,
                        "neuron " + std::to_string(s.neuron) + " out of range for N=" + std::to_string(im.config.n_neurons));
    std::vector<AddressEvent> out;
    out.reserve(train.spikes.size());
    im.out = &out;
    if (train.drain_between) {
        for (const auto& s : train.spikes) {
            im.kernel.schedule(im.kernel.now(), im.driver, Impl::kArrival | s.neuron);
            im.kernel.run();
        }
    } else {
        const SimTime base = im.kernel.now();
        for (const auto& s : train.spikes) im.kernel.schedule(base + s.t, im.driver, Impl::kArrival | s.neuron);
        im.kernel.run();
    }
    im.out = nullptr;
    return out;
}

LatencyEstimate measure_sparse(ArbiterInstance& instance, std::uint64_t trials, std::uint64_t seed)
{
    if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
    const auto train = generate({SparseWorkload{trials}, seed}, instance.config().n_neurons);
    const auto events = instance.simulate(train);
    double sum = 0, sum_sq = 0;
    for (const auto& e : events) {
        const auto l = static_cast<double>(e.latency());
        sum += l;
        sum_sq += l * l;
    }
    LatencyEstimate est;
    est.trials = events.size();
    const auto n = static_cast<double>(est.trials);
    est.mean = sum / n;
    if (est.trials > 1) {
        const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1));
        est.stddev = std::sqrt(var);
        est.ci95 = 1.96 * est.stddev / std::sqrt(n);
    }
    return est;
}

SimTime measure_burst(ArbiterInstance& instance)
{
    const SimTime start = instance.now();
    const auto events = instance.simulate(generate({BurstWorkload{0}, 0}, instance.config().n_neurons));
    SimTime last = start;
    for (const auto& e : events) last = std::max(last, e.t_output);
    return last - start;
}

std::vector<TimingViolation> check_mutual_exclusion(const std::vector<TraceRecord>& records)
{
    std::vector<TimingViolation> out;
    std::map<std::string, std::int64_t> grant;
    for (const auto& r : records) {
        if (r.signal != "grant" || r.component.rfind("cell", 0) != 0) continue;
        auto& g = grant[r.component];
        if (g != 0 && r.new_value != 0 && r.new_value != g)
            out.push_back({"mutual_exclusion", r.time,
                           r.component + " granted side " + std::to_string(r.new_value) + " while side " +
                               std::to_string(g) + " held"});
        g = r.new_value;
    }
    return out;
}

} // namespace aerint
