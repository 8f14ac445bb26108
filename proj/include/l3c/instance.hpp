#pragma once

#include "l3c/graph.hpp"

#include <map>
#include <memory>
#include <optional>
#include <sstream>

namespace l3c {

using Coloring = std::map<Vertex, Colour>;

/// A list-3-colouring instance: a graph plus a list L(v) <= {1,2,3} per vertex.
/// Instances are value-semantic snapshots; the (immutable) graph is shared
/// between copies, so branch children are cheap unless the graph changes.
class Instance {
public:
    Instance() : graph_(std::make_shared<const Graph>()) {}

    explicit Instance(Graph g)
        : graph_(std::make_shared<const Graph>(std::move(g))),
          lists_(static_cast<std::size_t>(graph_->vertex_count()), ColourSet::full()) {}

    Instance(Graph g, const std::map<Vertex, ColourSet>& lists) : Instance(std::move(g)) {
        for (auto& [v, s] : lists) lists_[static_cast<std::size_t>(graph_->index_of(v))] = s;
    }

    Instance(std::shared_ptr<const Graph> g, std::vector<ColourSet> lists)
        : graph_(std::move(g)), lists_(std::move(lists)) {
        if (lists_.size() != static_cast<std::size_t>(graph_->vertex_count()))
            throw std::invalid_argument("list vector does not match vertex count");
    }

    const Graph& graph() const { return *graph_; }
    std::shared_ptr<const Graph> graph_ptr() const { return graph_; }

    ColourSet list(Vertex v) const { return lists_[static_cast<std::size_t>(graph_->index_of(v))]; }
    const std::vector<ColourSet>& raw_lists() const { return lists_; }

    Instance with_list(Vertex v, ColourSet s) const {
        Instance out = *this;
        out.lists_[static_cast<std::size_t>(graph_->index_of(v))] = s;
        return out;
    }

    friend bool operator==(const Instance& a, const Instance& b) {
        return *a.graph_ == *b.graph_ && a.lists_ == b.lists_;
    }

private:
    std::shared_ptr<const Graph> graph_;
    std::vector<ColourSet> lists_;
};

/// L_i = vertices whose list has exactly i colours. Vertices with empty lists
/// belong to none of the three sets.
struct LevelSets {
    std::vector<Vertex> l1, l2, l3;
};

inline LevelSets level_sets(const Instance& inst) {
    LevelSets ls;
    const auto& verts = inst.graph().vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
        switch (inst.raw_lists()[i].size()) {
            case 1: ls.l1.push_back(verts[i]); break;
            case 2: ls.l2.push_back(verts[i]); break;
            case 3: ls.l3.push_back(verts[i]); break;
            default: break;
        }
    }
    return ls;
}

inline std::vector<Vertex> level_set(const Instance& inst, int size) {
    std::vector<Vertex> out;
    const auto& verts = inst.graph().vertices();
    for (std::size_t i = 0; i < verts.size(); ++i)
        if (inst.raw_lists()[i].size() == size) out.push_back(verts[i]);
    return out;
}

/// Potential sum_v |L(v)|; strictly decreases under productive reductions.
inline long long potential(const Instance& inst) {
    long long p = 0;
    for (ColourSet s : inst.raw_lists()) p += s.size();
    return p;
}

/// First violated constraint of a claimed certificate, or nullopt if valid.
/// Checks totality, then lists, then edges, all in ascending label order.
inline std::optional<std::string> coloring_violation(const Instance& inst, const Coloring& c) {
    for (Vertex v : inst.graph().vertices()) {
        auto it = c.find(v);
        if (it == c.end()) return "vertex " + std::to_string(v) + " is uncoloured";
        if (it->second < 1 || it->second > 3)
            return "vertex " + std::to_string(v) + " has colour out of range";
    }
    for (Vertex v : inst.graph().vertices()) {
        if (!inst.list(v).contains(c.at(v)))
            return "vertex " + std::to_string(v) + " coloured " + std::to_string(c.at(v)) +
                   " outside its list " + inst.list(v).to_string();
    }
    for (auto [u, v] : inst.graph().edges()) {
        if (c.at(u) == c.at(v))
            return "edge (" + std::to_string(u) + "," + std::to_string(v) + ") is monochromatic";
    }
    return std::nullopt;
}

inline bool verify_coloring(const Instance& inst, const Coloring& c) {
    return !coloring_violation(inst, c).has_value();
}

/// Restrict v's list to {c}. No propagation happens here; that is R3's job.
inline Instance assign_colour(const Instance& inst, Vertex v, Colour c) {
    if (!inst.list(v).contains(c))
        throw std::logic_error("assign_colour: colour " + std::to_string(c) + " not in list of vertex " +
                               std::to_string(v));
    return inst.with_list(v, ColourSet::single(c));
}

/// N^(k)_{L_level}(v) and friends: distance-k neighbourhood in the full graph
/// intersected with a level set. The closed variant adds v first, so v is
/// included exactly when v itself lies in the level set.
inline std::vector<Vertex> restricted_neighborhood(const Instance& inst, Vertex v, int k, int level,
                                                   bool exact, bool closed) {
    std::vector<Vertex> base = exact ? neighborhood_exact(inst.graph(), v, k)
                                     : neighborhood_within(inst.graph(), v, k, false);
    if (closed) base = vset::unite(base, {v});
    std::vector<Vertex> out;
    for (Vertex w : base)
        if (inst.list(w).size() == level) out.push_back(w);
    return out;
}

/// Distance-1 restricted neighbourhood: the graph neighbours of v in L_level.
inline std::vector<Vertex> restricted_adj(const Instance& inst, Vertex v, int level) {
    std::vector<Vertex> out;
    for (Vertex w : inst.graph().neighbors(v))
        if (inst.list(w).size() == level) out.push_back(w);
    return out;
}

/// Set version, following the convention that N(S) excludes S itself:
/// vertices of L_level outside S adjacent to some member of S.
inline std::vector<Vertex> restricted_set_neighborhood(const Instance& inst, const std::vector<Vertex>& s,
                                                       int level) {
    std::vector<Vertex> out;
    for (Vertex w : s)
        for (Vertex x : inst.graph().neighbors(w))
            if (!vset::contains(s, x) && inst.list(x).size() == level) out.push_back(x);
    vset::normalize(out);
    return out;
}

inline std::string describe_lists(const Instance& inst) {
    std::ostringstream os;
    for (Vertex v : inst.graph().vertices()) os << v << ":" << inst.list(v).to_string() << " ";
    return os.str();
}

} // namespace l3c
