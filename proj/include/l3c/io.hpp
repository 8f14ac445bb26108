#pragma once

#include "l3c/branch.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace l3c::io {

/// Parse error with a 1-based line and column.
struct ParseError : std::runtime_error {
    ParseError(int line, int column, const std::string& what)
        : std::runtime_error("parse error at line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// Instance file format (DIMACS-inspired), 1-indexed vertices:
///   c <comment>
///   p l3c <n> <m>
///   e <u> <v>
///   l <v> <c1> [<c2> [<c3>]]
/// Vertices without an `l` line default to the full list {1,2,3}.
inline Instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool got_header = false;
    int n = 0;
    long long m = 0;
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::map<Vertex, ColourSet> lists;

    auto fail = [&](int col, const std::string& what) -> void { throw ParseError(lineno, col, what); };

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue; // blank line
        if (kind == "c") continue;
        if (kind == "p") {
            if (got_header) fail(1, "duplicate header");
            std::string fmt;
            if (!(ls >> fmt) || fmt != "l3c") fail(3, "expected format 'l3c'");
            if (!(ls >> n) || n < 0) fail(7, "expected vertex count");
            if (!(ls >> m) || m < 0) fail(9, "expected edge count");
            got_header = true;
            continue;
        }
        if (!got_header) fail(1, "missing 'p l3c <n> <m>' header");
        if (kind == "e") {
            int u = 0, v = 0;
            if (!(ls >> u >> v)) fail(3, "expected two vertex ids");
            if (u < 1 || u > n) fail(3, "vertex " + std::to_string(u) + " out of range 1.." + std::to_string(n));
            if (v < 1 || v > n) fail(3, "vertex " + std::to_string(v) + " out of range 1.." + std::to_string(n));
            if (u == v) fail(3, "self-loop at vertex " + std::to_string(u));
            auto e = std::minmax(u, v);
            for (auto& [a, b] : edges)
                if (a == e.first - 1 && b == e.second - 1)
                    fail(3, "duplicate edge " + std::to_string(e.first) + " " + std::to_string(e.second));
            edges.emplace_back(e.first - 1, e.second - 1);
            continue;
        }
        if (kind == "l") {
            int v = 0;
            if (!(ls >> v)) fail(3, "expected vertex id");
            if (v < 1 || v > n) fail(3, "vertex " + std::to_string(v) + " out of range 1.." + std::to_string(n));
            if (lists.count(v - 1)) fail(3, "duplicate list line for vertex " + std::to_string(v));
            ColourSet s;
            int c = 0;
            int count = 0;
            while (ls >> c) {
                if (c < 1 || c > 3) fail(5, "colour " + std::to_string(c) + " out of range 1..3");
                if (s.contains(c)) fail(5, "duplicate colour " + std::to_string(c));
                s = s.with(c);
                ++count;
            }
            if (count == 0) fail(5, "expected at least one colour");
            lists[v - 1] = s;
            continue;
        }
        fail(1, "unknown line type '" + kind + "'");
    }
    if (!got_header) {
        lineno = std::max(lineno, 1);
        throw ParseError(lineno, 1, "missing 'p l3c <n> <m>' header");
    }
    if (static_cast<long long>(edges.size()) != m)
        throw ParseError(lineno, 1,
                         "header declares " + std::to_string(m) + " edges but " +
                             std::to_string(edges.size()) + " were given");
    return Instance(Graph(n, edges), lists);
}

/// Emit in the same format; list lines only for non-full lists.
inline std::string emit_instance(const Instance& inst) {
    std::ostringstream out;
    const Graph& g = inst.graph();
    out << "p l3c " << g.vertex_count() << " " << g.edge_count() << "\n";
    for (auto [u, v] : g.edges()) out << "e " << (u + 1) << " " << (v + 1) << "\n";
    for (Vertex v : g.vertices()) {
        ColourSet s = inst.list(v);
        if (s == ColourSet::full()) continue;
        out << "l " << (v + 1);
        for (Colour c : s.colours()) out << " " << c;
        out << "\n";
    }
    return out.str();
}

/// Certificate file: `s YES` and one `v <vertex> <colour>` line per vertex.
inline std::string emit_certificate(const Coloring& cert) {
    std::ostringstream out;
    out << "s YES\n";
    for (auto [v, c] : cert) out << "v " << (v + 1) << " " << c << "\n";
    return out.str();
}

inline Coloring parse_certificate(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Coloring cert;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "c" || kind == "s") continue;
        if (kind == "v") {
            int v = 0, c = 0;
            if (!(ls >> v >> c)) throw ParseError(lineno, 3, "expected vertex and colour");
            if (v < 1) throw ParseError(lineno, 3, "vertex ids are 1-based");
            if (c < 1 || c > 3) throw ParseError(lineno, 5, "colour out of range 1..3");
            cert[v - 1] = c;
            continue;
        }
        throw ParseError(lineno, 1, "unknown line type '" + kind + "'");
    }
    return cert;
}

inline nlohmann::json stats_to_json(const SearchStats& st, bool include_timings) {
    nlohmann::json rules = nlohmann::json::object();
    for (const auto& [name, rs] : st.per_rule)
        rules[name] = {{"applications", rs.applications}, {"children", rs.children}};
    nlohmann::json j{{"rules", rules},
                     {"total_instances", st.total_instances},
                     {"max_depth", st.max_depth},
                     {"invariant_violations", st.invariant_violations},
                     {"near_diam3_checks", st.near_diam3_checks},
                     {"b5_shrinkage_checks", st.b5_shrinkage_checks},
                     {"fallback_events", st.fallback_events},
                     {"event_log", st.event_log}};
    if (include_timings) j["wall_seconds"] = st.wall_seconds;
    return j;
}

inline nlohmann::json config_to_json(const BranchConfig& cfg) {
    return {{"epsilon", cfg.epsilon},
            {"r4_cutoff", cfg.r4_cutoff},
            {"threshold_scale", cfg.threshold_scale},
            {"b5_t_size_scale", cfg.b5_t_size_scale},
            {"b5_s_size_scale", cfg.b5_s_size_scale},
            {"diameter_policy", cfg.diameter_policy == DiameterPolicy::Strict ? "strict" : "fallback"},
            {"rng_seed", cfg.rng_seed},
            {"b5_enumeration_budget", cfg.b5_enumeration_budget}};
}

/// The structured run report. Timings are included only on request so that
/// identical (instance, config, seed) runs serialize byte-identically.
inline nlohmann::json run_report(const Instance& inst, const BranchConfig& cfg, const SolveResult& res,
                                 bool include_timings = false) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["answer"] = (res.answer == SolveAnswer::Yes) ? "YES" : "NO";
    j["instance"] = {{"n", inst.graph().vertex_count()}, {"m", inst.graph().edge_count()}};
    j["config"] = config_to_json(cfg);
    j["stats"] = stats_to_json(res.stats, include_timings);
    j["invariants"] = {{"violations", res.stats.invariant_violations},
                       {"near_diam3_checks", res.stats.near_diam3_checks},
                       {"b5_shrinkage_checks", res.stats.b5_shrinkage_checks}};
    if (res.certificate) {
        nlohmann::json cert = nlohmann::json::object();
        for (auto [v, c] : *res.certificate) cert[std::to_string(v + 1)] = c;
        j["certificate"] = cert;
    }
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace l3c::io
