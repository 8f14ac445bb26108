#pragma once

#include "l3c/instance.hpp"

#include <optional>

namespace l3c {

/// Thrown when brute_force exhausts its node budget. An oracle never returns
/// a wrong answer; running out of budget is an explicit error.
struct OracleBudgetExceeded : std::runtime_error {
    OracleBudgetExceeded() : std::runtime_error("oracle node budget exceeded") {}
};

struct OracleResult {
    bool feasible = false;
    std::optional<Coloring> certificate;
    long long nodes_explored = 0;
};

/// Ground-truth list-colouring search: plain backtracking over vertices in
/// ascending label order, colours in list order, pruning only on edge
/// conflicts. Shares no propagation code with the solver on purpose.
inline OracleResult brute_force(const Instance& inst, std::optional<long long> node_budget = std::nullopt) {
    const Graph& g = inst.graph();
    const auto& verts = g.vertices();
    int n = g.vertex_count();
    std::vector<Colour> chosen(static_cast<std::size_t>(n), 0);
    OracleResult res;

    auto conflicts = [&](int i, Colour c) {
        for (Vertex w : g.neighbors(verts[static_cast<std::size_t>(i)])) {
            int j = g.index_of(w);
            if (chosen[static_cast<std::size_t>(j)] == c) return true;
        }
        return false;
    };

    // Iterative DFS; position i tries the colours of verts[i] in list order.
    auto dfs = [&](auto&& self, int i) -> bool {
        if (i == n) return true;
        for (Colour c : inst.list(verts[static_cast<std::size_t>(i)]).colours()) {
            ++res.nodes_explored;
            if (node_budget && res.nodes_explored > *node_budget) throw OracleBudgetExceeded();
            if (conflicts(i, c)) continue;
            chosen[static_cast<std::size_t>(i)] = c;
            if (self(self, i + 1)) return true;
            chosen[static_cast<std::size_t>(i)] = 0;
        }
        return false;
    };

    res.feasible = dfs(dfs, 0);
    if (res.feasible) {
        Coloring cert;
        for (int i = 0; i < n; ++i) cert[verts[static_cast<std::size_t>(i)]] = chosen[static_cast<std::size_t>(i)];
        res.certificate = cert;
    }
    return res;
}

/// Two instances are equivalent when they are both yes- or both no-instances.
inline bool check_equivalence(const Instance& a, const Instance& b,
                              std::optional<long long> node_budget = std::nullopt) {
    return brute_force(a, node_budget).feasible == brute_force(b, node_budget).feasible;
}

/// A branch set is sound iff the parent is feasible exactly when some child is.
inline bool check_children_cover(const Instance& parent, const std::vector<Instance>& children,
                                 std::optional<long long> node_budget = std::nullopt) {
    bool parent_yes = brute_force(parent, node_budget).feasible;
    bool any_child_yes = false;
    for (const Instance& ch : children) {
        if (brute_force(ch, node_budget).feasible) {
            any_child_yes = true;
            break;
        }
    }
    return parent_yes == any_child_yes;
}

} // namespace l3c
