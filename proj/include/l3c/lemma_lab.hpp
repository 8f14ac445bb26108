#pragma once

#include "l3c/branch.hpp"

#include <random>

namespace l3c {

/// Everything the structural-dichotomy laboratory needs about one graph H: epsilon,
/// the anchor maps (same smallest-label construction the solver uses), and
/// optionally a proper 3-colouring phi.
struct DichotomyContext {
    Graph h;
    double epsilon = 0.02;
    AnchorMaps anchors;
    std::optional<Coloring> phi;
};

inline DichotomyContext make_dichotomy_context(Graph h, double epsilon, std::optional<Coloring> phi) {
    DichotomyContext ctx;
    ctx.anchors = fix_anchors_graph(h);
    ctx.h = std::move(h);
    ctx.epsilon = epsilon;
    if (phi && coloring_violation(Instance(ctx.h), *phi))
        throw std::invalid_argument("make_dichotomy_context: phi is not a proper 3-colouring of H");
    ctx.phi = std::move(phi);
    return ctx;
}

struct PrecondReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// The four structural hypotheses on H behind rule B5: per-vertex degree and
/// second-neighbourhood caps, the near-spanning 3-ball, and the pairwise
/// common-neighbourhood cap. Violations name the vertex or pair andceeded bound.
inline PrecondReport check_dichotomy_preconditions(const Graph& h, double epsilon) {
    PrecondReport rep;
    auto mu = static_cast<double>(h.vertex_count());
    if (h.vertex_count() == 0) return rep;
    double deg_bound = std::pow(mu, 1.0 / 3.0 + epsilon);
    double n2_bound = std::pow(mu, 2.0 / 3.0 + 2.0 * epsilon);
    double ball_floor = mu - 4.0 * std::pow(mu, 2.0 / 3.0 + 2.0 * epsilon);

    auto complain = [&](std::string what) {
        rep.ok = false;
        rep.violations.push_back(std::move(what));
    };

    for (Vertex v : h.vertices()) {
        if (!meets_upper(h.degree(v), deg_bound))
            complain("deg(" + std::to_string(v) + ")=" + std::to_string(h.degree(v)) + " > mu^(1/3+eps)=" +
                     std::to_string(deg_bound));
        auto n2 = static_cast<long long>(neighborhood_exact(h, v, 2).size());
        if (!meets_upper(n2, n2_bound))
            complain("|N2(" + std::to_string(v) + ")|=" + std::to_string(n2) + " > mu^(2/3+2eps)=" +
                     std::to_string(n2_bound));
        auto ball = static_cast<long long>(neighborhood_within(h, v, 3, false).size());
        if (!meets_lower(ball, ball_floor))
            complain("|N<=3(" + std::to_string(v) + ")|=" + std::to_string(ball) +
                     " < mu-4mu^(2/3+2eps)=" + std::to_string(ball_floor));
    }
    const auto& verts = h.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
        for (std::size_t j = i + 1; j < verts.size(); ++j) {
            std::vector<Vertex> common = vset::intersect(h.neighbors(verts[i]), h.neighbors(verts[j]));
            if (common.empty()) continue;
            std::vector<Vertex> reach;
            for (Vertex w : common)
                for (Vertex x : h.neighbors(w))
                    if (!vset::contains(common, x)) reach.push_back(x);
            vset::normalize(reach);
            if (!meets_upper(static_cast<long long>(reach.size()), deg_bound))
                complain("|N(N(" + std::to_string(verts[i]) + ")nN(" + std::to_string(verts[j]) + "))|=" +
                         std::to_string(reach.size()) + " > mu^(1/3+eps)=" + std::to_string(deg_bound));
        }
    }
    return rep;
}

struct WitnessSets {
    std::vector<Vertex> s;       // sampled from V(H) w.p. mu^-(1/3+eps)
    std::vector<Vertex> s_tilde; // sampled from N^(2)(r) w.p. mu^-3eps
};

inline WitnessSets sample_witness_sets(const DichotomyContext& ctx, std::mt19937_64& rng) {
    auto mu = static_cast<double>(ctx.h.vertex_count());
    double p_s = std::pow(mu, -(1.0 / 3.0 + ctx.epsilon));
    double p_st = std::pow(mu, -3.0 * ctx.epsilon);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    WitnessSets w;
    for (Vertex v : ctx.h.vertices())
        if (unif(rng) < p_s) w.s.push_back(v);
    for (Vertex v : neighborhood_exact(ctx.h, ctx.anchors.root, 2))
        if (unif(rng) < p_st) w.s_tilde.push_back(v);
    return w;
}

/// V' = vertices at H-distance 3 from the root with few neighbours inside
/// R = V(H) \ N^(3)(r).
inline std::vector<Vertex> compute_v_prime(const DichotomyContext& ctx) {
    auto mu = static_cast<double>(ctx.h.vertex_count());
    DistanceMap dr = bfs_distances(ctx.h, ctx.anchors.root);
    double bound = std::pow(mu, 1.0 / 3.0 - 2.0 * ctx.epsilon);
    std::vector<Vertex> out;
    for (Vertex v : ctx.h.vertices()) {
        if (dr.at(v) != 3) continue;
        long long in_r = 0;
        for (Vertex w : ctx.h.neighbors(v))
            if (dr.at(w) != 3) ++in_r;
        if (meets_upper(in_r, bound)) out.push_back(v);
    }
    return out;
}

/// Per-vertex classification from the proof: buckets of second neighbours by
/// favourite parent, the v-deducing vertices, the v-fruitful parents, and A_v
/// relative to a sample S.
struct DeducingReport {
    std::map<Vertex, std::vector<Vertex>> buckets; // parent a -> bucket B_a^(v)
    std::vector<Vertex> deducing;
    std::vector<Vertex> fruitful;
    std::vector<Vertex> a_v;
};

inline DeducingReport classify_deducing(const DichotomyContext& ctx, Vertex v,
                                        const std::vector<Vertex>& sample = {}) {
    if (!ctx.phi) throw std::logic_error("classify_deducing: phi missing");
    const Coloring& phi = *ctx.phi;
    auto mu = static_cast<double>(ctx.h.vertex_count());
    DistanceMap dr = bfs_distances(ctx.h, ctx.anchors.root);

    DeducingReport rep;
    for (Vertex a : ctx.h.neighbors(v)) rep.buckets[a] = {};
    for (Vertex x : neighborhood_exact(ctx.h, v, 2)) {
        Vertex parent = ctx.anchors.p.at({v, x});
        rep.buckets[parent].push_back(x);
        if (dr.at(parent) == 3 && phi.at(x) != phi.at(ctx.anchors.n_r.at(parent))) rep.deducing.push_back(x);
    }
    vset::normalize(rep.deducing);

    double fruitful_bound = std::pow(mu, 1.0 / 3.0 - 2.0 * ctx.epsilon);
    for (auto& [a, bucket] : rep.buckets) {
        auto deducing_here = static_cast<long long>(vset::intersect(bucket, rep.deducing).size());
        if (meets_lower(deducing_here, fruitful_bound)) rep.fruitful.push_back(a);
    }
    for (Vertex a : rep.fruitful) {
        std::vector<Vertex> hits = vset::intersect(vset::intersect(rep.buckets.at(a), rep.deducing), sample);
        if (!hits.empty()) rep.a_v.push_back(a);
    }
    return rep;
}

/// The pair-witness predicate for concrete (T, T~): disjoint, small,
/// monochromatic under phi with distinct colours, and the closed
/// neighbourhoods intersect in a set dominating at least mu/7 of H.
inline bool verify_pair_witness(const DichotomyContext& ctx, const std::vector<Vertex>& t,
                            const std::vector<Vertex>& t_tilde) {
    if (!ctx.phi) throw std::logic_error("verify_pair_witness: phi missing");
    auto mu = static_cast<long long>(ctx.h.vertex_count());
    double size_bound = 2.0 * std::pow(static_cast<double>(mu), 2.0 / 3.0 - ctx.epsilon);
    if (!vset::intersect(t, t_tilde).empty()) return false;
    if (!meets_upper(static_cast<long long>(t.size()), size_bound)) return false;
    if (!meets_upper(static_cast<long long>(t_tilde.size()), size_bound)) return false;

    auto mono_colour = [&](const std::vector<Vertex>& set) -> std::optional<Colour> {
        std::optional<Colour> c;
        for (Vertex v : set) {
            Colour cv = ctx.phi->at(v);
            if (c && *c != cv) return std::nullopt;
            c = cv;
        }
        return c;
    };
    auto ct = mono_colour(t), ctt = mono_colour(t_tilde);
    if (t.empty() || t_tilde.empty()) {
        // Empty sets dominate nothing; the mu/7 test below fails for mu >= 1.
    } else {
        if (!ct || !ctt || *ct == *ctt) return false;
    }
    std::vector<Vertex> w = vset::intersect(detail::closed_set_neighborhood(ctx.h, t),
                                            detail::closed_set_neighborhood(ctx.h, t_tilde));
    auto measure = static_cast<long long>(detail::open_set_neighborhood(ctx.h, w).size());
    return measure >= std::max<long long>(1, ceil_div(mu, 7));
}

/// Outcome 3 for a vertex v: at most 3*mu^(2/3-eps) second neighbours are
/// exceptional (favourite parent off N^(3)(r), or colour disagreeing with the
/// anchor of the favourite parent).
inline bool verify_anchored_vertex(const DichotomyContext& ctx, Vertex v) {
    if (!ctx.phi) throw std::logic_error("verify_anchored_vertex: phi missing");
    auto mu = static_cast<double>(ctx.h.vertex_count());
    DistanceMap dr = bfs_distances(ctx.h, ctx.anchors.root);
    long long exceptional = 0;
    for (Vertex x : neighborhood_exact(ctx.h, v, 2)) {
        Vertex parent = ctx.anchors.p.at({v, x});
        if (dr.at(parent) != 3 || ctx.phi->at(ctx.anchors.n_r.at(parent)) != ctx.phi->at(x)) ++exceptional;
    }
    return meets_upper(exceptional, 3.0 * std::pow(mu, 2.0 / 3.0 - ctx.epsilon));
}

/// One Monte-Carlo report over a fixed context. Structural facts are counted
/// as violations (they must stay at zero); the asymptotic size bounds are reported
/// as empirical frequencies, never hard failures, because the lemma only
/// promises them for mu beyond an unspecified threshold.
struct DichotomyReport {
    long long mu = 0;
    double epsilon = 0.0;
    long long trials = 0;
    bool colourable = false; // outcome 1 when false; the trial loop is skipped

    // Witness-size bound: |S| <= 2mu^(2/3-eps) and likewise for S~.
    long long s_bound_holds = 0;
    double mean_s_size = 0.0;
    double expected_s_size = 0.0; // mu^(2/3-eps)
    double stderr_s_size = 0.0;   // binomial standard error of the mean

    // V' size bound (deterministic per graph), reported for both constants.
    bool v_prime_bound_c7 = false;
    bool v_prime_bound_c9 = false;
    long long v_prime_size = 0;

    // A_v bound: all v in V' have |A_v| >= mu^(1/3-5eps)/(4 log mu).
    long long a_v_bound_holds = 0;
    // Anchor-image bound: all v in V' have |{n_r(a) : a in A_v}| >= 4mu^(3eps) log mu;
    // the subproof states a 20mu^(3eps) log mu variant, reported separately.
    long long anchor_image_bound_c4 = 0;
    long long anchor_image_bound_c20 = 0;

    long long coverage_all_v = 0;      // every v in V' covered by (S, S~)
    long long pair_witness_holds = 0; // verify_pair_witness on the extracted pair
    bool anchored_vertex_exists = false;         // deterministic given phi
    long long dichotomy = 0;           // pair witness extracted or anchored vertex exists

    long long structural_violations = 0; // must stay 0
};

inline DichotomyReport monte_carlo_dichotomy(const DichotomyContext& ctx, long long trials, std::mt19937_64& rng) {
    DichotomyReport rep;
    rep.mu = ctx.h.vertex_count();
    rep.epsilon = ctx.epsilon;
    rep.colourable = ctx.phi.has_value();
    if (!rep.colourable) return rep; // outcome 1: nothing to sample

    auto mu = static_cast<double>(rep.mu);
    const Coloring& phi = *ctx.phi;
    DistanceMap dr = bfs_distances(ctx.h, ctx.anchors.root);
    std::vector<Vertex> n3r;
    for (Vertex v : ctx.h.vertices())
        if (dr.at(v) == 3) n3r.push_back(v);
    std::vector<Vertex> v_prime = compute_v_prime(ctx);
    rep.v_prime_size = static_cast<long long>(v_prime.size());
    rep.v_prime_bound_c7 =
        meets_lower(rep.v_prime_size, mu - 7.0 * std::pow(mu, 2.0 / 3.0 + 5.0 * ctx.epsilon));
    rep.v_prime_bound_c9 =
        meets_lower(rep.v_prime_size, mu - 9.0 * std::pow(mu, 2.0 / 3.0 + 5.0 * ctx.epsilon));

    for (Vertex v : ctx.h.vertices()) {
        if (verify_anchored_vertex(ctx, v)) {
            rep.anchored_vertex_exists = true;
            break;
        }
    }

    double s_size_bound = 2.0 * std::pow(mu, 2.0 / 3.0 - ctx.epsilon);
    double a_v_size_bound = (rep.mu >= 2) ? std::pow(mu, 1.0 / 3.0 - 5.0 * ctx.epsilon) / (4.0 * std::log(mu)) : 0.0;
    double anchor_image_base = std::pow(mu, 3.0 * ctx.epsilon) * std::log(mu);
    rep.expected_s_size = std::pow(mu, 2.0 / 3.0 - ctx.epsilon);
    double p_s = std::pow(mu, -(1.0 / 3.0 + ctx.epsilon));
    rep.stderr_s_size = std::sqrt(mu * p_s * (1.0 - p_s)) / std::sqrt(static_cast<double>(std::max<long long>(1, trials)));

    double s_size_sum = 0.0;
    for (long long trial = 0; trial < trials; ++trial) {
        ++rep.trials;
        WitnessSets w = sample_witness_sets(ctx, rng);
        s_size_sum += static_cast<double>(w.s.size());
        if (meets_upper(static_cast<long long>(w.s.size()), s_size_bound) &&
            meets_upper(static_cast<long long>(w.s_tilde.size()), s_size_bound))
            ++rep.s_bound_holds;

        bool all_covered = true, a_v_all = true, anchor_image_all_c4 = true, anchor_image_all_c20 = true;
        // Pair-of-colours assignment per covered v, as in the proof's final
        // pigeonhole: counts[i][j] over i != j.
        long long counts[4][4] = {};
        for (Vertex v : v_prime) {
            DeducingReport dv = classify_deducing(ctx, v, w.s);

            // Structural facts: buckets partition N^(2)(v); fruitful parents
            // lie at distance 3 from the root.
            std::vector<Vertex> n2 = neighborhood_exact(ctx.h, v, 2);
            std::vector<Vertex> bucket_union;
            long long bucket_total = 0;
            for (auto& [a, bucket] : dv.buckets) {
                bucket_total += static_cast<long long>(bucket.size());
                for (Vertex x : bucket) bucket_union.push_back(x);
            }
            vset::normalize(bucket_union);
            if (bucket_union != n2 || bucket_total != static_cast<long long>(n2.size()))
                ++rep.structural_violations;
            for (Vertex a : dv.fruitful)
                if (dr.at(a) != 3) ++rep.structural_violations;

            if (!meets_lower(static_cast<long long>(dv.a_v.size()), a_v_size_bound)) a_v_all = false;
            std::vector<Vertex> img;
            for (Vertex a : dv.a_v) img.push_back(ctx.anchors.n_r.at(a));
            vset::normalize(img);
            if (!meets_lower(static_cast<long long>(img.size()), 4.0 * anchor_image_base)) anchor_image_all_c4 = false;
            if (!meets_lower(static_cast<long long>(img.size()), 20.0 * anchor_image_base)) anchor_image_all_c20 = false;

            // v is covered when some a in A_v has its anchor in S~; the proof
            // picks such a and a deducing x in B_a n S (smallest labels here).
            bool covered = false;
            for (Vertex a : dv.a_v) {
                if (!vset::contains(w.s_tilde, ctx.anchors.n_r.at(a))) continue;
                std::vector<Vertex> xs = vset::intersect(vset::intersect(dv.buckets.at(a), dv.deducing), w.s);
                if (xs.empty()) continue;
                Colour i = phi.at(xs.front());
                Colour j = phi.at(ctx.anchors.n_r.at(a));
                if (i == j) {
                    ++rep.structural_violations; // deducing means the colours differ
                    continue;
                }
                ++counts[i][j];
                covered = true;
                break;
            }
            if (!covered) all_covered = false;
        }
        if (a_v_all) ++rep.a_v_bound_holds;
        if (anchor_image_all_c4) ++rep.anchor_image_bound_c4;
        if (anchor_image_all_c20) ++rep.anchor_image_bound_c20;
        if (all_covered && !v_prime.empty()) ++rep.coverage_all_v;

        // Extraction: majority pair (i,j), then T = S n phi^-1(i), T~ = S~ n phi^-1(j).
        bool pair_ok = false;
        long long best = 0;
        Colour bi = 0, bj = 0;
        for (Colour i = 1; i <= 3; ++i)
            for (Colour j = 1; j <= 3; ++j)
                if (i != j && counts[i][j] > best) {
                    best = counts[i][j];
                    bi = i;
                    bj = j;
                }
        if (best > 0) {
            std::vector<Vertex> t, tt;
            for (Vertex v : w.s)
                if (phi.at(v) == bi) t.push_back(v);
            for (Vertex v : w.s_tilde)
                if (phi.at(v) == bj) tt.push_back(v);
            // Structural extraction guarantees, independent of the mu/7 test.
            if (!std::includes(w.s.begin(), w.s.end(), t.begin(), t.end())) ++rep.structural_violations;
            if (!std::includes(w.s_tilde.begin(), w.s_tilde.end(), tt.begin(), tt.end()))
                ++rep.structural_violations;
            for (Vertex v : t)
                if (phi.at(v) != bi) ++rep.structural_violations;
            for (Vertex v : tt)
                if (phi.at(v) != bj) ++rep.structural_violations;
            if (!vset::intersect(t, tt).empty()) ++rep.structural_violations;
            pair_ok = verify_pair_witness(ctx, t, tt);
        }
        if (pair_ok) ++rep.pair_witness_holds;
        if (pair_ok || rep.anchored_vertex_exists) ++rep.dichotomy;
    }
    rep.mean_s_size = (rep.trials > 0) ? s_size_sum / static_cast<double>(rep.trials) : 0.0;
    return rep;
}

} // namespace l3c
