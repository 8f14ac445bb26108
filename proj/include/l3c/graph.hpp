#pragma once

#include "l3c/common.hpp"

#include <deque>
#include <map>
#include <optional>
#include <utility>

namespace l3c {

/// Undirected simple graph over stable integer vertex labels. Labels survive
/// induced subgraphs and merges, so references into a parent instance stay
/// meaningful in its children. Immutable after construction; all mutation
/// produces a new graph.
class Graph {
public:
    Graph() = default;

    /// n vertices labelled 0..n-1, no edges.
    explicit Graph(int n) {
        if (n < 0) throw std::invalid_argument("negative vertex count");
        verts_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) verts_[static_cast<std::size_t>(i)] = i;
        adj_.resize(static_cast<std::size_t>(n));
    }

    Graph(int n, const std::vector<std::pair<Vertex, Vertex>>& edges) : Graph(n) { add_edges(edges); }

    Graph(std::vector<Vertex> labels, const std::vector<std::pair<Vertex, Vertex>>& edges) {
        vset::normalize(labels);
        verts_ = std::move(labels);
        adj_.resize(verts_.size());
        add_edges(edges);
    }

    int vertex_count() const { return static_cast<int>(verts_.size()); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<Vertex>& vertices() const { return verts_; }

    bool has_vertex(Vertex v) const { return find(v) >= 0; }

    int index_of(Vertex v) const {
        int i = find(v);
        if (i < 0) throw std::invalid_argument("unknown vertex " + std::to_string(v));
        return i;
    }

    const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[static_cast<std::size_t>(index_of(v))]; }
    int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }
    bool adjacent(Vertex u, Vertex v) const { return vset::contains(neighbors(u), v); }

    /// All edges as (u,v) with u < v, lexicographically sorted.
    std::vector<std::pair<Vertex, Vertex>> edges() const {
        std::vector<std::pair<Vertex, Vertex>> out;
        for (std::size_t i = 0; i < verts_.size(); ++i)
            for (Vertex w : adj_[i])
                if (verts_[i] < w) out.emplace_back(verts_[i], w);
        return out;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.verts_ == b.verts_ && a.adj_ == b.adj_;
    }

private:
    void add_edges(const std::vector<std::pair<Vertex, Vertex>>& edges) {
        for (auto [u, v] : edges) {
            if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
            int iu = index_of(u), iv = index_of(v);
            adj_[static_cast<std::size_t>(iu)].push_back(v);
            adj_[static_cast<std::size_t>(iv)].push_back(u);
        }
        edge_count_ = 0;
        for (auto& nb : adj_) {
            vset::normalize(nb); // collapses parallel edges
            edge_count_ += nb.size();
        }
        edge_count_ /= 2;
    }

    int find(Vertex v) const {
        auto it = std::lower_bound(verts_.begin(), verts_.end(), v);
        if (it == verts_.end() || *it != v) return -1;
        return static_cast<int>(it - verts_.begin());
    }

    std::vector<Vertex> verts_;             // sorted ascending
    std::vector<std::vector<Vertex>> adj_;  // parallel to verts_, each sorted
    std::size_t edge_count_ = 0;
};

/// BFS distances from one source. Unreached vertices carry the kUnreachable
/// sentinel, never a large finite number.
struct DistanceMap {
    static constexpr int kUnreachable = -1;

    Vertex source = 0;
    std::vector<Vertex> vertices; // sorted, mirrors the graph
    std::vector<int> dist;        // parallel to vertices

    int at(Vertex v) const {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
        if (it == vertices.end() || *it != v)
            throw std::invalid_argument("unknown vertex " + std::to_string(v));
        return dist[static_cast<std::size_t>(it - vertices.begin())];
    }
    bool reachable(Vertex v) const { return at(v) != kUnreachable; }
};

inline DistanceMap bfs_distances(const Graph& g, Vertex source) {
    DistanceMap dm;
    dm.source = source;
    dm.vertices = g.vertices();
    dm.dist.assign(dm.vertices.size(), DistanceMap::kUnreachable);
    std::deque<int> queue;
    int s = g.index_of(source);
    dm.dist[static_cast<std::size_t>(s)] = 0;
    queue.push_back(s);
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        int d = dm.dist[static_cast<std::size_t>(i)];
        for (Vertex w : g.neighbors(dm.vertices[static_cast<std::size_t>(i)])) {
            int j = g.index_of(w);
            if (dm.dist[static_cast<std::size_t>(j)] == DistanceMap::kUnreachable) {
                dm.dist[static_cast<std::size_t>(j)] = d + 1;
                queue.push_back(j);
            }
        }
    }
    return dm;
}

/// Maximum eccentricity; nullopt when the graph is disconnected.
inline std::optional<int> diameter(const Graph& g) {
    if (g.vertex_count() == 0) throw std::invalid_argument("diameter of empty graph");
    int best = 0;
    for (Vertex v : g.vertices()) {
        DistanceMap dm = bfs_distances(g, v);
        for (int d : dm.dist) {
            if (d == DistanceMap::kUnreachable) return std::nullopt;
            best = std::max(best, d);
        }
    }
    return best;
}

/// N^(k)(v): vertices at distance exactly k.
inline std::vector<Vertex> neighborhood_exact(const Graph& g, Vertex v, int k) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    DistanceMap dm = bfs_distances(g, v);
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < dm.vertices.size(); ++i)
        if (dm.dist[i] == k) out.push_back(dm.vertices[i]);
    return out;
}

/// N^(<=k)(v) open (excludes v) or closed (includes v).
inline std::vector<Vertex> neighborhood_within(const Graph& g, Vertex v, int k, bool closed) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    DistanceMap dm = bfs_distances(g, v);
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < dm.vertices.size(); ++i) {
        int d = dm.dist[i];
        if (d != DistanceMap::kUnreachable && d >= 1 && d <= k) out.push_back(dm.vertices[i]);
    }
    if (closed) out = vset::unite(out, {v});
    return out;
}

struct MergeResult {
    Graph graph;
    Vertex merged = 0;
    std::map<Vertex, Vertex> mapping; // every vertex of the input to its image
};

/// Merge two non-adjacent vertices: one vertex (the smaller label survives)
/// whose neighbourhood is the union of both; the result stays simple.
inline MergeResult merge_vertices(const Graph& g, Vertex u, Vertex v) {
    if (u == v) throw std::invalid_argument("merge_vertices: identical vertices");
    g.index_of(u);
    g.index_of(v);
    if (g.adjacent(u, v)) throw std::logic_error("merge_vertices: vertices are adjacent");

    Vertex kept = std::min(u, v), dropped = std::max(u, v);
    MergeResult res;
    res.merged = kept;
    std::vector<Vertex> labels;
    for (Vertex w : g.vertices()) {
        res.mapping[w] = (w == dropped) ? kept : w;
        if (w != dropped) labels.push_back(w);
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (auto [a, b] : g.edges()) edges.emplace_back(res.mapping.at(a), res.mapping.at(b));
    res.graph = Graph(std::move(labels), edges);
    return res;
}

struct InducedResult {
    Graph graph;
    std::map<Vertex, Vertex> mapping; // identity on the kept vertices
};

inline InducedResult induced_subgraph(const Graph& g, const std::vector<Vertex>& keep) {
    std::vector<Vertex> labels = keep;
    vset::normalize(labels);
    InducedResult res;
    for (Vertex w : labels) {
        g.index_of(w); // validates membership
        res.mapping[w] = w;
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex w : labels)
        for (Vertex x : g.neighbors(w))
            if (w < x && vset::contains(labels, x)) edges.emplace_back(w, x);
    res.graph = Graph(std::move(labels), edges);
    return res;
}

} // namespace l3c
