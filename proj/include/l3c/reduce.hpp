#pragma once

#include "l3c/twosat.hpp"

#include <deque>

namespace l3c {

enum class RuleId { R1, R2, R3, R4, B1, B2, B3, B4, B5, Fallback };

inline const char* rule_name(RuleId r) {
    switch (r) {
        case RuleId::R1: return "R1";
        case RuleId::R2: return "R2";
        case RuleId::R3: return "R3";
        case RuleId::R4: return "R4";
        case RuleId::B1: return "B1";
        case RuleId::B2: return "B2";
        case RuleId::B3: return "B3";
        case RuleId::B4: return "B4";
        case RuleId::B5: return "B5";
        case RuleId::Fallback: return "FALLBACK";
    }
    return "?";
}

struct TraceEntry {
    RuleId rule;
    Vertex vertex = -1; // affected vertex, -1 when not applicable
    Colour colour = 0;  // removed/assigned colour, 0 when not applicable

    friend bool operator==(const TraceEntry& a, const TraceEntry& b) {
        return a.rule == b.rule && a.vertex == b.vertex && a.colour == b.colour;
    }
};

enum class ReduceKind { SolvedYes, SolvedNo, Reduced };

struct ReduceOutcome {
    ReduceKind kind = ReduceKind::Reduced;
    std::optional<Coloring> certificate; // present when SolvedYes
    std::optional<Instance> reduced;     // present when Reduced
    std::vector<TraceEntry> trace;
};

/// R1: some vertex has an empty list, so the instance is infeasible.
inline bool rule_r1(const Instance& inst) {
    for (ColourSet s : inst.raw_lists())
        if (s.empty()) return true;
    return false;
}

inline std::optional<Vertex> first_empty_list(const Instance& inst) {
    const auto& verts = inst.graph().vertices();
    for (std::size_t i = 0; i < verts.size(); ++i)
        if (inst.raw_lists()[i].empty()) return verts[i];
    return std::nullopt;
}

/// R3 to fixpoint: while some edge (u,v) has L(u)={c} and c in L(v), remove c
/// from L(v). Worklist of singleton vertices in ascending order; the fixpoint
/// itself is order-independent. Empty lists may appear; R1 catches them.
inline Instance rule_r3_fixpoint(const Instance& inst, std::vector<TraceEntry>* trace = nullptr) {
    const Graph& g = inst.graph();
    const auto& verts = g.vertices();
    std::vector<ColourSet> lists = inst.raw_lists();
    std::deque<int> work;
    for (std::size_t i = 0; i < verts.size(); ++i)
        if (lists[i].size() == 1) work.push_back(static_cast<int>(i));

    while (!work.empty()) {
        int i = work.front();
        work.pop_front();
        if (lists[static_cast<std::size_t>(i)].size() != 1) continue; // may have been emptied meanwhile
        Colour c = lists[static_cast<std::size_t>(i)].only();
        for (Vertex w : g.neighbors(verts[static_cast<std::size_t>(i)])) {
            int j = g.index_of(w);
            if (!lists[static_cast<std::size_t>(j)].contains(c)) continue;
            lists[static_cast<std::size_t>(j)] = lists[static_cast<std::size_t>(j)].without(c);
            if (trace) trace->push_back({RuleId::R3, w, c});
            if (lists[static_cast<std::size_t>(j)].size() == 1) work.push_back(j);
        }
    }
    return Instance(inst.graph_ptr(), std::move(lists));
}

enum class RuleOutcomeKind { SolvedYes, SolvedNo, NotApplicable };

struct RuleResult {
    RuleOutcomeKind kind = RuleOutcomeKind::NotApplicable;
    std::optional<Coloring> certificate;
};

/// R2: once no list has three colours the instance is a 2-list-colouring
/// instance, decided in polynomial time with a certificate on YES.
inline RuleResult rule_r2(const Instance& inst) {
    if (!level_set(inst, 3).empty()) return {RuleOutcomeKind::NotApplicable, std::nullopt};
    auto cert = solve_two_list(inst);
    if (cert) return {RuleOutcomeKind::SolvedYes, cert};
    return {RuleOutcomeKind::SolvedNo, std::nullopt};
}

/// Exhaustive guessing over all of L3 (R4 without the cutoff): enumerate the
/// colourings of the L3 vertices, pruning partial assignments that clash on an
/// edge inside L3, then run R3 and the 2-SAT solver on each leaf.
inline RuleResult enumerate_l3(const Instance& inst) {
    std::vector<Vertex> l3 = level_set(inst, 3);
    const Graph& g = inst.graph();
    std::vector<Colour> guess(l3.size(), 0);

    auto clash = [&](std::size_t i, Colour c) {
        for (std::size_t j = 0; j < i; ++j)
            if (guess[j] == c && g.adjacent(l3[j], l3[i])) return true;
        return false;
    };

    std::optional<Coloring> found;
    auto dfs = [&](auto&& self, std::size_t i) -> bool {
        if (i == l3.size()) {
            Instance fixed = inst;
            for (std::size_t j = 0; j < l3.size(); ++j) fixed = assign_colour(fixed, l3[j], guess[j]);
            fixed = rule_r3_fixpoint(fixed);
            if (rule_r1(fixed)) return false;
            auto cert = solve_two_list(fixed);
            if (cert) {
                found = cert;
                return true;
            }
            return false;
        }
        for (Colour c = 1; c <= 3; ++c) {
            if (clash(i, c)) continue;
            guess[i] = c;
            if (self(self, i + 1)) return true;
        }
        return false;
    };

    if (dfs(dfs, 0)) return {RuleOutcomeKind::SolvedYes, found};
    return {RuleOutcomeKind::SolvedNo, std::nullopt};
}

/// R4: applicable iff 0 < |L3| < cutoff (strict on both sides).
inline RuleResult rule_r4(const Instance& inst, int cutoff) {
    auto mu = static_cast<int>(level_set(inst, 3).size());
    if (mu == 0 || mu >= cutoff) return {RuleOutcomeKind::NotApplicable, std::nullopt};
    return enumerate_l3(inst);
}

/// Apply R1 > R3 > R2 > R4 until the instance is solved or none applies.
/// R2 and R4 always resolve their instance, so a Reduced outcome means every
/// list is nonempty, R3 is at fixpoint, and |L3| >= cutoff.
inline ReduceOutcome reduce_fixpoint(const Instance& inst, int cutoff) {
    ReduceOutcome out;
    if (auto v = first_empty_list(inst)) {
        out.kind = ReduceKind::SolvedNo;
        out.trace.push_back({RuleId::R1, *v, 0});
        return out;
    }
    Instance cur = rule_r3_fixpoint(inst, &out.trace);
    if (auto v = first_empty_list(cur)) {
        out.kind = ReduceKind::SolvedNo;
        out.trace.push_back({RuleId::R1, *v, 0});
        return out;
    }
    if (level_set(cur, 3).empty()) {
        RuleResult r2 = rule_r2(cur);
        out.trace.push_back({RuleId::R2, -1, 0});
        out.kind = (r2.kind == RuleOutcomeKind::SolvedYes) ? ReduceKind::SolvedYes : ReduceKind::SolvedNo;
        out.certificate = r2.certificate;
        return out;
    }
    RuleResult r4 = rule_r4(cur, cutoff);
    if (r4.kind != RuleOutcomeKind::NotApplicable) {
        out.trace.push_back({RuleId::R4, -1, 0});
        out.kind = (r4.kind == RuleOutcomeKind::SolvedYes) ? ReduceKind::SolvedYes : ReduceKind::SolvedNo;
        out.certificate = r4.certificate;
        return out;
    }
    out.kind = ReduceKind::Reduced;
    out.reduced = std::move(cur);
    return out;
}

struct ForcingChoice {
    Colour colour = 0;
    int forced_drop = 0; // |L3 before| - |L3 after| for the returned colour
};

/// For each colour of u, simulate assigning it plus an R3 cascade and count
/// how many vertices leave L3; return a colour attaining the maximum (ties
/// break to the smallest colour). The guarantee behind B3: three times the
/// best drop covers |N_L3(N_L2(N_L2(u)))|.
inline ForcingChoice choose_forcing_colour(const Instance& inst, Vertex u) {
    ColourSet l = inst.list(u);
    if (l.empty()) throw std::logic_error("choose_forcing_colour: empty list");
    auto mu_before = static_cast<int>(level_set(inst, 3).size());
    ForcingChoice best{0, -1};
    for (Colour c : l.colours()) {
        Instance sim = rule_r3_fixpoint(assign_colour(inst, u, c));
        int drop = mu_before - static_cast<int>(level_set(sim, 3).size());
        if (drop > best.forced_drop) best = {c, drop};
    }
    return best;
}

} // namespace l3c
