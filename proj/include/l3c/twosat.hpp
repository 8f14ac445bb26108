#pragma once

#include "l3c/instance.hpp"

#include <optional>

namespace l3c {

/// Implication graph for the 2-SAT encoding of a 2-list-colouring instance.
///
/// One boolean per vertex with a nonempty list. For a 2-list {lo,hi} the
/// positive literal (2*var) means "take hi", the negative (2*var+1) means
/// "take lo". Singleton lists keep one boolean forced true by a unit clause,
/// so they flow through the same machinery instead of being substituted away.
/// For every implication a->b the contrapositive ~b->~a is present.
struct ImplicationGraph {
    int var_count = 0;
    std::vector<std::vector<int>> succ;              // literal -> implied literals
    std::vector<Vertex> var_vertex;                  // var -> vertex label
    std::vector<std::pair<Colour, Colour>> var_lohi; // var -> (lo, hi); lo == hi for singletons

    static int negate(int lit) { return lit ^ 1; }

    void add_clause(int a, int b) {
        succ[static_cast<std::size_t>(negate(a))].push_back(b);
        succ[static_cast<std::size_t>(negate(b))].push_back(a);
    }

    // Literal asserting "vertex of var takes colour c"; c must be lo or hi.
    int literal_for(int var, Colour c) const {
        auto [lo, hi] = var_lohi[static_cast<std::size_t>(var)];
        if (c == hi) return 2 * var;
        if (c == lo) return 2 * var + 1;
        throw std::logic_error("literal_for: colour not on the variable");
    }

    std::pair<Vertex, Colour> literal_meaning(int lit) const {
        int var = lit / 2;
        auto [lo, hi] = var_lohi[static_cast<std::size_t>(var)];
        return {var_vertex[static_cast<std::size_t>(var)], (lit % 2 == 0) ? hi : lo};
    }
};

/// Encoding: one boolean per vertex, a unit clause per singleton list, and for
/// each edge and each colour on both endpoint lists a clause forbidding the
/// endpoints from sharing that colour.
/// Pre: every list has size <= 2 (empty allowed; the caller handles those).
inline ImplicationGraph build_implication_graph(const Instance& inst) {
    ImplicationGraph ig;
    std::map<Vertex, int> var_of;
    for (Vertex v : inst.graph().vertices()) {
        ColourSet l = inst.list(v);
        if (l.size() == 3) throw std::logic_error("build_implication_graph: vertex with 3-list");
        if (l.empty()) continue;
        auto cs = l.colours();
        int var = ig.var_count++;
        var_of[v] = var;
        ig.var_vertex.push_back(v);
        ig.var_lohi.emplace_back(cs.front(), cs.back());
    }
    ig.succ.assign(static_cast<std::size_t>(2 * ig.var_count), {});

    for (Vertex v : inst.graph().vertices()) {
        if (inst.list(v).size() == 1) {
            int lit = ig.literal_for(var_of.at(v), inst.list(v).only());
            ig.add_clause(lit, lit);
        }
    }
    for (auto [u, v] : inst.graph().edges()) {
        ColourSet shared = inst.list(u).intersect(inst.list(v));
        for (Colour c : shared.colours()) {
            int a = ig.literal_for(var_of.at(u), c);
            int b = ig.literal_for(var_of.at(v), c);
            ig.add_clause(ImplicationGraph::negate(a), ImplicationGraph::negate(b));
        }
    }
    return ig;
}

namespace detail {

// Iterative Tarjan over literal nodes. Components are numbered in completion
// order, i.e. reverse topological order of the condensation.
inline std::vector<int> tarjan_scc(const std::vector<std::vector<int>>& succ) {
    int n = static_cast<int>(succ.size());
    std::vector<int> comp(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
        index(static_cast<std::size_t>(n), -1);
    std::vector<int> stack;
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    int next_index = 0, next_comp = 0;

    struct Frame {
        int node;
        std::size_t edge;
    };
    std::vector<Frame> frames;

    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != -1) continue;
        frames.push_back({root, 0});
        while (!frames.empty()) {
            auto& fr = frames.back();
            int v = fr.node;
            if (fr.edge == 0) {
                index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = next_index++;
                stack.push_back(v);
                on_stack[static_cast<std::size_t>(v)] = true;
            }
            bool descended = false;
            while (fr.edge < succ[static_cast<std::size_t>(v)].size()) {
                int w = succ[static_cast<std::size_t>(v)][fr.edge++];
                if (index[static_cast<std::size_t>(w)] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[static_cast<std::size_t>(w)])
                    low[static_cast<std::size_t>(v)] =
                        std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
            }
            if (descended) continue;
            if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = false;
                    comp[static_cast<std::size_t>(w)] = next_comp;
                    if (w == v) break;
                }
                ++next_comp;
            }
            frames.pop_back();
            if (!frames.empty()) {
                int parent = frames.back().node;
                low[static_cast<std::size_t>(parent)] =
                    std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(v)]);
            }
        }
    }
    return comp;
}

} // namespace detail

/// Decide a 2-list-colouring instance and extract a certificate on YES.
/// Pre: every list has size <= 2; a vertex with an empty list forces NO.
/// Satisfiability via SCCs of the implication graph; a literal is true iff its
/// component precedes its negation's in completion order (closer to a sink).
inline std::optional<Coloring> solve_two_list(const Instance& inst) {
    for (Vertex v : inst.graph().vertices()) {
        if (inst.list(v).size() == 3) throw std::logic_error("solve_two_list: vertex with 3-list");
        if (inst.list(v).empty()) return std::nullopt;
    }
    ImplicationGraph ig = build_implication_graph(inst);
    std::vector<int> comp = detail::tarjan_scc(ig.succ);
    Coloring out;
    for (int var = 0; var < ig.var_count; ++var) {
        int pos = 2 * var, neg = 2 * var + 1;
        if (comp[static_cast<std::size_t>(pos)] == comp[static_cast<std::size_t>(neg)]) return std::nullopt;
        bool take_hi = comp[static_cast<std::size_t>(pos)] < comp[static_cast<std::size_t>(neg)];
        auto [lo, hi] = ig.var_lohi[static_cast<std::size_t>(var)];
        out[ig.var_vertex[static_cast<std::size_t>(var)]] = take_hi ? hi : lo;
    }
    return out;
}

} // namespace l3c
