#pragma once

#include "l3c/lemma_lab.hpp"

#include <random>

namespace l3c {

/// Distribution over list sizes used by gen_lists.
struct ListProfile {
    double p1 = 0.0, p2 = 0.0, p3 = 1.0;

    static ListProfile full() { return {0.0, 0.0, 1.0}; }
    static ListProfile ones() { return {1.0, 0.0, 0.0}; }
    static ListProfile twos() { return {0.0, 1.0, 0.0}; }
    static ListProfile mixed() { return {0.15, 0.35, 0.5}; }

    void validate() const {
        if (p1 < 0 || p2 < 0 || p3 < 0 || std::abs(p1 + p2 + p3 - 1.0) > 1e-9)
            throw std::invalid_argument("list profile probabilities must be nonnegative and sum to 1");
    }
};

namespace detail {

inline Graph random_graph(int n, double p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (unif(rng) < p) edges.emplace_back(u, v);
    return Graph(n, edges);
}

// Spine p0-p1-p2-p3 with every other vertex attached to p1 or p2 and random
// extra edges avoiding p0 and p3. The p0..p3 distance stays exactly 3 because
// p0 and p3 keep a single neighbour each, and every pair is within distance 3
// through the p1-p2 edge.
inline Graph diameter3_scaffold(int n, std::mt19937_64& rng, const std::vector<int>* classes = nullptr) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<Vertex, Vertex>> edges{{0, 1}, {1, 2}, {2, 3}};
    auto cross = [&](int u, int v) { return classes == nullptr || (*classes)[static_cast<std::size_t>(u)] != (*classes)[static_cast<std::size_t>(v)]; };
    for (int v = 4; v < n; ++v) {
        int hub = cross(v, 1) ? 1 : 2;
        if (hub == 2 && !cross(v, 2)) throw std::logic_error("scaffold: vertex conflicts with both hubs");
        edges.emplace_back(hub, v);
    }
    double extra = 0.15 + 0.25 * unif(rng);
    for (int u = 1; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (u == 3 || v == 3) continue; // p3 keeps its single neighbour
            if (!cross(u, v)) continue;
            if (unif(rng) < extra) edges.emplace_back(u, v);
        }
    }
    return Graph(n, edges);
}

} // namespace detail

/// Connected graph of diameter exactly 3: random attempts at densities near
/// the diameter-3 band, then a constructive scaffold. Every emitted graph is
/// post-verified, never assumed.
inline Graph gen_diameter3(int n, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("gen_diameter3: need n >= 4");
    std::mt19937_64 rng(seed);
    double lo = std::pow(3.0 * std::log(static_cast<double>(n)) / (static_cast<double>(n) * n), 1.0 / 3.0);
    double hi = std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
    if (hi <= lo) hi = lo * 1.5;
    for (int attempt = 0; attempt < 64; ++attempt) {
        double frac = static_cast<double>(attempt % 8) / 7.0;
        double p = lo + frac * (hi - lo);
        Graph g = detail::random_graph(n, p, rng);
        auto d = (g.vertex_count() > 0) ? diameter(g) : std::nullopt;
        if (d && *d == 3) return g;
    }
    Graph g = detail::diameter3_scaffold(n, rng);
    auto d = diameter(g);
    if (!d || *d != 3) throw std::logic_error("gen_diameter3: scaffold failed post-verification");
    return g;
}

struct PlantedResult {
    Graph graph;
    Coloring colouring;        // proper by construction (cross-class edges only)
    bool exact_diameter3 = true; // false when only diameter 2 was achievable
};

/// Planted 3-colourable graph of diameter <= 3 (exactly 3 where possible):
/// three colour classes, cross-class edges, densify/trim with retries, then a
/// class-aware scaffold.
inline PlantedResult gen_planted_3col_diam3(int n, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("gen_planted_3col_diam3: need n >= 4");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_class(0, 2);

    std::vector<int> classes(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) classes[static_cast<std::size_t>(v)] = (v < 3) ? v : pick_class(rng);
    // Scaffold hubs must sit in distinct classes; vertices 1 and 2 do.
    auto colouring_of = [&]() {
        Coloring c;
        for (int v = 0; v < n; ++v) c[v] = classes[static_cast<std::size_t>(v)] + 1;
        return c;
    };

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::optional<Graph> diam2_candidate;
    for (int attempt = 0; attempt < 64; ++attempt) {
        double p = 0.1 + 0.5 * static_cast<double>(attempt % 8) / 7.0;
        std::vector<std::pair<Vertex, Vertex>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (classes[static_cast<std::size_t>(u)] != classes[static_cast<std::size_t>(v)] && unif(rng) < p)
                    edges.emplace_back(u, v);
        Graph g(n, edges);
        auto d = diameter(g);
        if (!d) continue;
        if (*d == 3) return {g, colouring_of(), true};
        if (*d == 2 && !diam2_candidate) diam2_candidate = g;
    }
    // Trim a diameter-2 candidate towards diameter 3.
    if (diam2_candidate) {
        Graph g = *diam2_candidate;
        for (int round = 0; round < 4 * n; ++round) {
            auto edges = g.edges();
            if (edges.empty()) break;
            std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
            std::size_t k = pick(rng);
            std::vector<std::pair<Vertex, Vertex>> rest;
            for (std::size_t i = 0; i < edges.size(); ++i)
                if (i != k) rest.push_back(edges[i]);
            Graph g2(n, rest);
            auto d = diameter(g2);
            if (!d || *d > 3) continue;
            g = g2;
            if (*d == 3) return {g, colouring_of(), true};
        }
    }
    Graph g = detail::diameter3_scaffold(n, rng, &classes);
    auto d = diameter(g);
    if (d && *d == 3) return {g, colouring_of(), true};
    if (diam2_candidate) return {*diam2_candidate, colouring_of(), false};
    throw std::logic_error("gen_planted_3col_diam3: construction failed post-verification");
}

/// Per-vertex independent list sampling by profile; sizes from the profile,
/// the concrete subset uniform among subsets of that size.
inline Instance gen_lists(const Graph& g, const ListProfile& profile, std::uint64_t seed) {
    profile.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::map<Vertex, ColourSet> lists;
    for (Vertex v : g.vertices()) {
        double roll = unif(rng);
        int size = (roll < profile.p1) ? 1 : (roll < profile.p1 + profile.p2) ? 2 : 3;
        if (size == 3) {
            lists[v] = ColourSet::full();
        } else if (size == 1) {
            std::uniform_int_distribution<int> pick(1, 3);
            lists[v] = ColourSet::single(pick(rng));
        } else {
            std::uniform_int_distribution<int> pick(1, 3);
            Colour out = pick(rng); // the colour left out
            lists[v] = ColourSet::full().without(out);
        }
    }
    return Instance(g, lists);
}

struct GadgetParams {
    int mu = 12;            // target |L3|
    BranchConfig cfg;       // thresholds the gadget must beat
    bool b4_adjacent = false;
    int margin = 0;         // extra targets beyond the threshold
};

namespace detail {

// L3 filler as a path component: cheap for R4-style enumeration to prune and
// silent for every branching rule at tau >= 3.
inline void add_filler_path(std::vector<std::pair<Vertex, Vertex>>& edges, int first, int count) {
    for (int i = 1; i < count; ++i) edges.emplace_back(first + i - 1, first + i);
}

inline Instance verify_gadget(Instance inst, RuleId rule, const BranchConfig& cfg) {
    ReduceOutcome out = reduce_fixpoint(inst, cfg.r4_cutoff);
    if (out.kind != ReduceKind::Reduced)
        throw std::invalid_argument("gen_rule_gadget: infeasible params (instance not reduced)");
    const Instance& red = *out.reduced;
    if (!(red == inst)) throw std::invalid_argument("gen_rule_gadget: infeasible params (reduction altered lists)");
    bool b1 = find_b1(red, cfg).has_value();
    bool b2 = find_b2(red, cfg).has_value();
    bool b3 = find_b3(red, cfg).has_value();
    bool b4 = find_b4(red, cfg).has_value();
    switch (rule) {
        case RuleId::B1:
            if (!b1) throw std::invalid_argument("gen_rule_gadget: B1 does not fire");
            break;
        case RuleId::B2:
            if (b1 || !b2) throw std::invalid_argument("gen_rule_gadget: B2 gating violated");
            break;
        case RuleId::B3:
            if (b1 || b2 || !b3) throw std::invalid_argument("gen_rule_gadget: B3 gating violated");
            break;
        case RuleId::B4:
            if (b1 || b2 || b3 || !b4) throw std::invalid_argument("gen_rule_gadget: B4 gating violated");
            break;
        case RuleId::B5:
            if (b1 || b2 || b3 || b4) throw std::invalid_argument("gen_rule_gadget: B5 gating violated");
            break;
        default:
            throw std::invalid_argument("gen_rule_gadget: rule must be B1..B5");
    }
    return inst;
}

} // namespace detail

/// An instance on which every rule below `rule` is silent and `rule` fires,
/// post-verified by running the detectors. Seed varies margins, fillers and
/// list choices.
inline Instance gen_rule_gadget(RuleId rule, const GadgetParams& params, std::uint64_t seed) {
    params.cfg.validate();
    std::mt19937_64 rng(seed);
    int mu = params.mu;
    if (mu < params.cfg.r4_cutoff)
        throw std::invalid_argument("gen_rule_gadget: mu below the R4 cutoff never reaches the branching rules");
    auto tau = static_cast<int>(threshold_tau(mu, params.cfg));
    std::uniform_int_distribution<int> extra_margin(0, std::max(0, params.margin));

    switch (rule) {
        case RuleId::B1: {
            int leaves = tau + extra_margin(rng);
            if (leaves + 1 > mu) leaves = mu - 1;
            if (leaves < tau) throw std::invalid_argument("gen_rule_gadget: mu too small for B1 hub");
            std::vector<std::pair<Vertex, Vertex>> edges;
            for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
            int filler = mu - 1 - leaves;
            detail::add_filler_path(edges, leaves + 1, filler);
            return detail::verify_gadget(Instance(Graph(mu, edges)), rule, params.cfg);
        }
        case RuleId::B2: {
            if (tau < 3) throw std::invalid_argument("gen_rule_gadget: B2 needs tau >= 3");
            int spokes = tau + extra_margin(rng);
            // v = 0 in L3; midpoints in L2; endpoints in L3; L3 filler path.
            int l3_needed = 1 + spokes;
            if (l3_needed > mu) spokes = mu - 1;
            if (spokes < tau) throw std::invalid_argument("gen_rule_gadget: mu too small for B2 fan");
            std::vector<std::pair<Vertex, Vertex>> edges;
            std::map<Vertex, ColourSet> lists;
            int next = 1;
            std::vector<Vertex> mids;
            for (int i = 0; i < spokes; ++i) {
                int mid = next++, end = next++;
                edges.emplace_back(0, mid);
                edges.emplace_back(mid, end);
                mids.push_back(mid);
            }
            std::uniform_int_distribution<int> pick(1, 3);
            for (Vertex m : mids) lists[m] = ColourSet::full().without(pick(rng));
            int filler = mu - 1 - spokes;
            detail::add_filler_path(edges, next, filler);
            int total = next + std::max(0, filler);
            return detail::verify_gadget(Instance(Graph(total, edges), lists), rule, params.cfg);
        }
        case RuleId::B3: {
            if (tau < 2) throw std::invalid_argument("gen_rule_gadget: B3 needs tau >= 2");
            int paths = tau + extra_margin(rng);
            if (1 + paths > mu) paths = mu - 1;
            if (paths < tau) throw std::invalid_argument("gen_rule_gadget: mu too small for B3 fan");
            // u = 0; per path u - x_i - y_i - z_i with x_i, y_i in L2.
            std::vector<std::pair<Vertex, Vertex>> edges;
            std::map<Vertex, ColourSet> lists;
            std::uniform_int_distribution<int> pick(1, 3);
            int next = 1;
            for (int i = 0; i < paths; ++i) {
                int x = next++, y = next++, z = next++;
                edges.emplace_back(0, x);
                edges.emplace_back(x, y);
                edges.emplace_back(y, z);
                // L(x) = {f, a}, L(y) = {a, b}: assigning f to u forces the path.
                Colour f = pick(rng);
                Colour a = (f % 3) + 1;
                Colour b = 1 + (pick(rng) % 3 == 0 ? (a % 3) : ((a + 1) % 3));
                if (b == a) b = (a % 3) + 1;
                lists[x] = ColourSet::of({f, a});
                lists[y] = ColourSet::of({a, b});
            }
            int filler = mu - 1 - paths;
            detail::add_filler_path(edges, next, filler);
            int total = next + std::max(0, filler);
            return detail::verify_gadget(Instance(Graph(total, edges), lists), rule, params.cfg);
        }
        case RuleId::B4: {
            if (tau < 4) throw std::invalid_argument("gen_rule_gadget: B4 needs tau >= 4");
            // u = 0, v = 1 share common neighbours w_j; teeth spread so every
            // L3-degree stays below tau. Measured set = {u, v} + teeth.
            int per_hub_cap = tau - 3;
            int hubs_max = tau - 1 - (params.b4_adjacent ? 1 : 0); // u,v keep degree < tau
            int capacity = hubs_max * per_hub_cap;
            int teeth = std::min(tau - 2 + extra_margin(rng), capacity);
            if (teeth < tau - 2) throw std::invalid_argument("gen_rule_gadget: B4 fan does not fit under tau");
            int hubs = std::min(hubs_max, std::max(2, static_cast<int>(ceil_div(teeth, std::max(1, per_hub_cap)))));
            std::vector<std::pair<Vertex, Vertex>> edges;
            int next = 2;
            std::vector<Vertex> hub_ids;
            for (int j = 0; j < hubs; ++j) {
                int w = next++;
                hub_ids.push_back(w);
                edges.emplace_back(0, w);
                edges.emplace_back(1, w);
            }
            if (params.b4_adjacent) edges.emplace_back(0, 1);
            for (int t = 0; t < teeth; ++t) {
                int w = hub_ids[static_cast<std::size_t>(t % hubs)];
                int z = next++;
                edges.emplace_back(w, z);
            }
            int used_l3 = 2 + hubs + teeth;
            int filler = mu - used_l3;
            if (filler < 0) throw std::invalid_argument("gen_rule_gadget: mu too small for B4 fan");
            detail::add_filler_path(edges, next, filler);
            int total = next + filler;
            return detail::verify_gadget(Instance(Graph(total, edges)), rule, params.cfg);
        }
        case RuleId::B5: {
            if (tau < 3) throw std::invalid_argument("gen_rule_gadget: B5 cycles need tau >= 3");
            // A mu-cycle, optionally with random chords that keep degrees and
            // B4 silent; everything in L3, fully reduced.
            for (int attempt = 0; attempt < 16; ++attempt) {
                std::vector<std::pair<Vertex, Vertex>> edges;
                for (int i = 0; i < mu; ++i) edges.emplace_back(i, (i + 1) % mu);
                if (attempt > 0 && mu >= 8) {
                    std::uniform_int_distribution<int> pick(0, mu - 1);
                    int chords = attempt % 3;
                    for (int c = 0; c < chords; ++c) {
                        int a = pick(rng), b = pick(rng);
                        if (a == b || std::abs(a - b) == 1 || std::abs(a - b) == mu - 1) continue;
                        edges.emplace_back(std::min(a, b), std::max(a, b));
                    }
                }
                try {
                    return detail::verify_gadget(Instance(Graph(mu, edges)), rule, params.cfg);
                } catch (const std::invalid_argument&) {
                    if (attempt == 15) throw;
                }
            }
            throw std::invalid_argument("gen_rule_gadget: B5 construction failed");
        }
        default:
            throw std::invalid_argument("gen_rule_gadget: rule must be B1..B5");
    }
}

/// A graph satisfying the dichotomy preconditions with a planted proper
/// 3-colouring: tripartite, near-regular at degree ~mu^(1/3+eps), no two
/// vertices sharing more than one neighbour (kills 4-cycles, which keeps the
/// pairwise bound), post-verified by check_dichotomy_preconditions.
inline Graph gen_dichotomy_precond(int mu, double epsilon, std::uint64_t seed, Coloring* planted_out = nullptr) {
    if (mu < 20) throw std::invalid_argument("gen_dichotomy_precond: mu too small for the degree band");
    std::mt19937_64 rng(seed);
    auto degree_cap = static_cast<int>(floor_bound(std::pow(static_cast<double>(mu), 1.0 / 3.0 + epsilon)));
    if (degree_cap < 2) throw std::invalid_argument("gen_dichotomy_precond: degree cap below 2");

    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> cls(static_cast<std::size_t>(mu));
        for (int v = 0; v < mu; ++v) cls[static_cast<std::size_t>(v)] = v % 3;
        std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(mu));
        auto adjacent = [&](int u, int v) {
            return std::find(adj[static_cast<std::size_t>(u)].begin(), adj[static_cast<std::size_t>(u)].end(), v) !=
                   adj[static_cast<std::size_t>(u)].end();
        };
        auto share_neighbor = [&](int u, int v) {
            for (Vertex w : adj[static_cast<std::size_t>(u)])
                if (adjacent(v, w)) return true;
            return false;
        };
        // Adding (u,v) makes v a common neighbour of u and each x in N(v);
        // those pairs must not already share one, or a 4-cycle would appear.
        auto creates_c4 = [&](int u, int v) {
            for (Vertex x : adj[static_cast<std::size_t>(v)])
                if (x != u && share_neighbor(u, x)) return true;
            for (Vertex x : adj[static_cast<std::size_t>(u)])
                if (x != v && share_neighbor(v, x)) return true;
            return false;
        };
        std::uniform_int_distribution<int> pick(0, mu - 1);
        long long tries = 60LL * mu * degree_cap;
        std::vector<std::pair<Vertex, Vertex>> edges;
        for (long long t = 0; t < tries; ++t) {
            int u = pick(rng), v = pick(rng);
            if (u == v || cls[static_cast<std::size_t>(u)] == cls[static_cast<std::size_t>(v)]) continue;
            if (static_cast<int>(adj[static_cast<std::size_t>(u)].size()) >= degree_cap ||
                static_cast<int>(adj[static_cast<std::size_t>(v)].size()) >= degree_cap)
                continue;
            if (adjacent(u, v) || share_neighbor(u, v) || creates_c4(u, v)) continue;
            adj[static_cast<std::size_t>(u)].push_back(v);
            adj[static_cast<std::size_t>(v)].push_back(u);
            edges.emplace_back(std::min(u, v), std::max(u, v));
        }
        Graph g(mu, edges);
        if (!diameter(g).has_value()) continue; // disconnected
        if (!check_dichotomy_preconditions(g, epsilon).ok) continue;
        if (planted_out) {
            planted_out->clear();
            for (int v = 0; v < mu; ++v) (*planted_out)[v] = cls[static_cast<std::size_t>(v)] + 1;
        }
        return g;
    }
    throw std::logic_error("gen_dichotomy_precond: failed to satisfy the preconditions");
}

} // namespace l3c
