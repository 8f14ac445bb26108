#pragma once

#include "l3c/gen.hpp"
#include "l3c/io.hpp"

#include <CLI11.hpp>

#include <future>
#include <iostream>

namespace l3c::cli {

// Exit codes: 0 = YES / success, 1 = NO / invalid certificate,
// 2 = usage or parse error, 3 = indeterminate or internal error.
inline constexpr int kExitYes = 0;
inline constexpr int kExitNo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

namespace detail {

inline std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    try {
        return io::read_file(path);
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what()); // input problems are usage errors
    }
}

inline void merge_stats(SearchStats& into, const SearchStats& child) {
    for (const auto& [name, rs] : child.per_rule) {
        into.per_rule[name].applications += rs.applications;
        into.per_rule[name].children += rs.children;
    }
    into.total_instances += child.total_instances;
    into.max_depth = std::max(into.max_depth, child.max_depth + 1);
    into.invariant_violations += child.invariant_violations;
    into.near_diam3_checks += child.near_diam3_checks;
    into.b5_shrinkage_checks += child.b5_shrinkage_checks;
    into.fallback_events += child.fallback_events;
    for (const auto& e : child.event_log) into.log_event(e);
}

// Root-level parallel exploration: the root branch set's children are solved
// concurrently, results joined in generation order so the answer, certificate
// and merged stats match the sequential run. Falls back to the sequential
// driver when the root reaches B5.
inline SolveResult solve_parallel(const Instance& inst, const BranchConfig& cfg, int jobs) {
    if (jobs <= 1) return solve(inst, cfg);
    cfg.validate();

    std::optional<int> diam;
    bool diam_ok = true;
    if (inst.graph().vertex_count() > 0) {
        diam = diameter(inst.graph());
        diam_ok = diam.has_value() && *diam <= 3;
    }
    if (!diam_ok && cfg.diameter_policy == DiameterPolicy::Strict) throw DiameterError(diam);

    SolveResult res;
    res.stats.total_instances = 1;
    ReduceOutcome out = reduce_fixpoint(inst, cfg.r4_cutoff);
    for (const TraceEntry& t : out.trace) ++res.stats.per_rule[rule_name(t.rule)].applications;
    if (out.kind != ReduceKind::Reduced) {
        if (out.kind == ReduceKind::SolvedYes) {
            res.answer = SolveAnswer::Yes;
            res.certificate = out.certificate;
        }
        return res;
    }
    const Instance& red = *out.reduced;
    if (diam_ok) {
        ++res.stats.near_diam3_checks;
        if (!check_near_diameter3(red, cfg)) ++res.stats.invariant_violations;
    }

    BranchSet bs;
    if (auto v1 = find_b1(red, cfg))
        bs = branch_on_vertex(red, *v1, RuleId::B1);
    else if (auto v2 = find_b2(red, cfg))
        bs = branch_on_vertex(red, *v2, RuleId::B2);
    else if (auto b3 = find_b3(red, cfg))
        bs = branch_b3(red, *b3);
    else if (auto b4 = find_b4(red, cfg))
        bs = branch_b4(red, b4->first, b4->second);
    else
        return solve(inst, cfg); // B5 at the root: stay sequential

    auto& rs = res.stats.per_rule[rule_name(bs.rule)];
    ++rs.applications;
    {
        std::ostringstream ev;
        ev << rule_name(bs.rule) << " children=" << bs.children.size();
        if (!bs.children.empty()) ev << " [" << bs.children.front().note << "]";
        res.stats.log_event(ev.str());
    }

    std::vector<std::future<SolveResult>> futures;
    futures.reserve(bs.children.size());
    for (const BranchChild& child : bs.children) {
        Instance ci = child.instance;
        futures.push_back(std::async(std::launch::async, [ci, &cfg] { return solve(ci, cfg); }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) {
        SolveResult child_res = futures[i].get();
        ++rs.children; // explored children only, matching the sequential count
        merge_stats(res.stats, child_res.stats);
        if (child_res.answer == SolveAnswer::Yes) {
            Coloring cert = *child_res.certificate;
            if (bs.children[i].merge_lift)
                cert[bs.children[i].merge_lift->second] = cert.at(bs.children[i].merge_lift->first);
            if (auto why = coloring_violation(inst, cert))
                throw std::logic_error("internal: certificate rejected: " + *why);
            res.answer = SolveAnswer::Yes;
            res.certificate = std::move(cert);
            return res; // remaining futures drain on destruction
        }
    }
    res.answer = SolveAnswer::No;
    return res;
}

inline ListProfile parse_profile(const std::string& spec) {
    if (spec == "full") return ListProfile::full();
    if (spec == "mixed") return ListProfile::mixed();
    if (spec == "twos") return ListProfile::twos();
    if (spec == "ones") return ListProfile::ones();
    ListProfile p{};
    char comma1 = 0, comma2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> p.p1 >> comma1 >> p.p2 >> comma2 >> p.p3) || comma1 != ',' || comma2 != ',')
        throw CLI::ValidationError("--profile", "expected full|mixed|twos|ones or p1,p2,p3");
    p.validate();
    return p;
}

inline nlohmann::json dichotomy_report_json(const DichotomyReport& rep) {
    auto freq = [&](long long k) {
        return rep.trials > 0 ? static_cast<double>(k) / static_cast<double>(rep.trials) : 0.0;
    };
    return {{"mu", rep.mu},
            {"epsilon", rep.epsilon},
            {"trials", rep.trials},
            {"colourable", rep.colourable},
            {"s_bound_freq", freq(rep.s_bound_holds)},
            {"mean_s_size", rep.mean_s_size},
            {"expected_s_size", rep.expected_s_size},
            {"stderr_s_size", rep.stderr_s_size},
            {"v_prime_bound_c7", rep.v_prime_bound_c7},
            {"v_prime_bound_c9", rep.v_prime_bound_c9},
            {"v_prime_size", rep.v_prime_size},
            {"a_v_bound_freq", freq(rep.a_v_bound_holds)},
            {"anchor_image_freq_c4", freq(rep.anchor_image_bound_c4)},
            {"anchor_image_freq_c20", freq(rep.anchor_image_bound_c20)},
            {"coverage_freq", freq(rep.coverage_all_v)},
            {"pair_witness_freq", freq(rep.pair_witness_holds)},
            {"anchored_vertex_exists", rep.anchored_vertex_exists},
            {"dichotomy_freq", freq(rep.dichotomy)},
            {"structural_violations", rep.structural_violations}};
}

} // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"list-3-colouring solver for diameter-3 graphs"};
    app.require_subcommand(1);

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
    std::string solve_input;
    BranchConfig cfg;
    std::string policy = "strict";
    std::string stats_out;
    bool verify_certificate = false, timings = false;
    int jobs = 1;
    solve_cmd->add_option("input", solve_input, "instance file ('-' for stdin)")->required();
    solve_cmd->add_option("--epsilon", cfg.epsilon, "epsilon in (0, 1/33)");
    solve_cmd->add_option("--r4-cutoff", cfg.r4_cutoff, "R4 fires while |L3| < cutoff");
    solve_cmd->add_option("--threshold-scale", cfg.threshold_scale, "scale on mu^(1/3+eps) thresholds");
    solve_cmd->add_option("--b5-t-scale", cfg.b5_t_size_scale, "scale on the B5 |T| bound");
    solve_cmd->add_option("--b5-s-scale", cfg.b5_s_size_scale, "scale on the B5 |S| bound");
    solve_cmd->add_option("--b5-budget", cfg.b5_enumeration_budget, "B5 enumeration budget (3^mu gate)");
    solve_cmd->add_option("--diameter-policy", policy, "strict|fallback")
        ->check(CLI::IsMember({"strict", "fallback"}));
    solve_cmd->add_option("--seed", cfg.rng_seed, "seed echoed into reports");
    solve_cmd->add_option("--stats-out", stats_out, "write the structured report to this path");
    solve_cmd->add_flag("--verify-certificate", verify_certificate, "re-verify the certificate on YES");
    solve_cmd->add_flag("--timings", timings, "include wall-clock times in outputs");
    solve_cmd->add_option("--jobs", jobs, "explore root branches concurrently when > 1");

    // ---- oracle ----
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force an instance file");
    std::string oracle_input;
    long long oracle_budget = 0;
    std::string oracle_stats_out;
    oracle_cmd->add_option("input", oracle_input, "instance file ('-' for stdin)")->required();
    oracle_cmd->add_option("--budget", oracle_budget, "node budget (0 = unlimited)");
    oracle_cmd->add_option("--stats-out", oracle_stats_out, "write a small JSON report");

    // ---- gen ----
    auto* gen_cmd = app.add_subcommand("gen", "generate instances");
    std::string family = "diam3", gen_out, profile_spec = "full";
    int gen_n = 12, gen_count = 1, gen_margin = 2;
    std::uint64_t gen_seed = 1;
    BranchConfig gen_cfg;
    gen_cmd->add_option("--family", family, "diam3|planted|b1|b2|b3|b4|b5|precond")
        ->check(CLI::IsMember({"diam3", "planted", "b1", "b2", "b3", "b4", "b5", "precond"}));
    gen_cmd->add_option("--n", gen_n, "vertex count (mu for gadgets and precond graphs)");
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--count", gen_count, "number of instances (seeds seed..seed+count-1)");
    gen_cmd->add_option("--profile", profile_spec, "list profile: full|mixed|twos|ones|p1,p2,p3");
    gen_cmd->add_option("--out", gen_out, "output path (single instance only; default stdout)");
    gen_cmd->add_option("--epsilon", gen_cfg.epsilon, "epsilon for gadget thresholds");
    gen_cmd->add_option("--r4-cutoff", gen_cfg.r4_cutoff, "cutoff for gadget thresholds");
    gen_cmd->add_option("--threshold-scale", gen_cfg.threshold_scale, "threshold scale for gadgets");
    gen_cmd->add_option("--margin", gen_margin, "gadget margin above the threshold");

    // ---- lemma-lab ----
    auto* lab_cmd = app.add_subcommand("lemma-lab", "Monte-Carlo laboratory for the structural lemma");
    int lab_mu = 60, lab_graphs = 1;
    long long lab_trials = 200;
    double lab_epsilon = 0.02;
    std::uint64_t lab_seed = 1;
    std::string lab_stats_out;
    lab_cmd->add_option("--mu", lab_mu, "vertex count of the generated graphs");
    lab_cmd->add_option("--trials", lab_trials, "Monte-Carlo trials per graph");
    lab_cmd->add_option("--epsilon", lab_epsilon, "epsilon in (0, 1/33)");
    lab_cmd->add_option("--seed", lab_seed, "master seed");
    lab_cmd->add_option("--graphs", lab_graphs, "number of graphs");
    lab_cmd->add_option("--stats-out", lab_stats_out, "write the JSON report to this path");

    // ---- bench ----
    auto* bench_cmd = app.add_subcommand("bench", "node-count scaling on planted yes-instances");
    std::string sizes_spec = "20,30,40,60,80";
    int per_size = 3;
    std::uint64_t bench_seed = 1;
    std::string bench_stats_out;
    BranchConfig bench_cfg;
    bool bench_timings = false;
    bench_cmd->add_option("--sizes", sizes_spec, "comma-separated vertex counts");
    bench_cmd->add_option("--per-size", per_size, "instances per size");
    bench_cmd->add_option("--seed", bench_seed, "master seed");
    bench_cmd->add_option("--stats-out", bench_stats_out, "write the JSON table to this path");
    bench_cmd->add_option("--epsilon", bench_cfg.epsilon, "solver epsilon");
    bench_cmd->add_option("--r4-cutoff", bench_cfg.r4_cutoff, "solver R4 cutoff");
    bench_cmd->add_flag("--timings", bench_timings, "include wall-clock times");

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand("verify", "check a certificate against an instance");
    std::string verify_input, certificate_path;
    verify_cmd->add_option("input", verify_input, "instance file ('-' for stdin)")->required();
    verify_cmd->add_option("--certificate", certificate_path, "certificate file with v-lines")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("l3c");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream dummy;
        int code = app.exit(e, dummy, dummy);
        (code == 0 ? out : err) << dummy.str();
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve_cmd) {
            cfg.diameter_policy = (policy == "strict") ? DiameterPolicy::Strict : DiameterPolicy::Fallback;
            Instance inst = io::parse_instance(detail::read_input(solve_input));
            SolveResult res;
            try {
                res = detail::solve_parallel(inst, cfg, jobs);
            } catch (const DiameterError& e) {
                err << "error: " << e.what() << "\n";
                return kExitUsage;
            }
            if (res.answer == SolveAnswer::Yes) {
                out << io::emit_certificate(*res.certificate);
                if (verify_certificate) {
                    if (auto why = coloring_violation(inst, *res.certificate)) {
                        err << "error: certificate verification failed: " << *why << "\n";
                        return kExitInternal;
                    }
                    out << "c certificate verified\n";
                }
            } else {
                out << "s NO\n";
            }
            out << "c instances " << res.stats.total_instances << " max-depth " << res.stats.max_depth
                << " fallbacks " << res.stats.fallback_events << " violations "
                << res.stats.invariant_violations << "\n";
            for (const auto& [name, rs] : res.stats.per_rule)
                out << "c rule " << name << " applications " << rs.applications << " children " << rs.children
                    << "\n";
            if (timings) out << "c wall-seconds " << res.stats.wall_seconds << "\n";
            if (!stats_out.empty()) io::write_file(stats_out, io::run_report(inst, cfg, res, timings).dump(2) + "\n");
            if (res.stats.invariant_violations > 0) return kExitInternal;
            return res.answer == SolveAnswer::Yes ? kExitYes : kExitNo;
        }

        if (*oracle_cmd) {
            Instance inst = io::parse_instance(detail::read_input(oracle_input));
            std::optional<long long> budget;
            if (oracle_budget > 0) budget = oracle_budget;
            OracleResult res;
            try {
                res = brute_force(inst, budget);
            } catch (const OracleBudgetExceeded& e) {
                err << "error: " << e.what() << "\n";
                return kExitInternal;
            }
            if (res.feasible)
                out << io::emit_certificate(*res.certificate);
            else
                out << "s NO\n";
            out << "c nodes " << res.nodes_explored << "\n";
            if (!oracle_stats_out.empty()) {
                nlohmann::json j{{"feasible", res.feasible}, {"nodes_explored", res.nodes_explored}};
                io::write_file(oracle_stats_out, j.dump(2) + "\n");
            }
            return res.feasible ? kExitYes : kExitNo;
        }

        if (*gen_cmd) {
            gen_cfg.validate();
            ListProfile profile = detail::parse_profile(profile_spec);
            if (gen_count > 1 && !gen_out.empty())
                throw CLI::ValidationError("--out", "use stdout when emitting multiple instances");
            for (int k = 0; k < gen_count; ++k) {
                std::uint64_t seed = gen_seed + static_cast<std::uint64_t>(k);
                Instance inst;
                std::string comment;
                if (family == "diam3") {
                    inst = gen_lists(gen_diameter3(gen_n, seed), profile, derive_seed(seed, 1));
                    comment = "diam3 n=" + std::to_string(gen_n);
                } else if (family == "planted") {
                    PlantedResult pr = gen_planted_3col_diam3(gen_n, seed);
                    inst = Instance(pr.graph);
                    comment = std::string("planted diam") + (pr.exact_diameter3 ? "3" : "2");
                } else if (family == "precond") {
                    Coloring planted;
                    inst = Instance(gen_dichotomy_precond(gen_n, gen_cfg.epsilon, seed, &planted));
                    comment = "precond mu=" + std::to_string(gen_n);
                } else {
                    RuleId rule = family == "b1"   ? RuleId::B1
                                  : family == "b2" ? RuleId::B2
                                  : family == "b3" ? RuleId::B3
                                  : family == "b4" ? RuleId::B4
                                                   : RuleId::B5;
                    GadgetParams gp{gen_n, gen_cfg, false, gen_margin};
                    inst = gen_rule_gadget(rule, gp, seed);
                    comment = family + " gadget mu=" + std::to_string(gen_n);
                }
                std::string text = "c " + comment + " seed=" + std::to_string(seed) + "\n" + io::emit_instance(inst);
                if (!gen_out.empty())
                    io::write_file(gen_out, text);
                else
                    out << text;
            }
            return kExitYes;
        }

        if (*lab_cmd) {
            nlohmann::json reports = nlohmann::json::array();
            long long violations = 0;
            for (int k = 0; k < lab_graphs; ++k) {
                std::uint64_t gseed = derive_seed(lab_seed, static_cast<std::uint64_t>(k));
                Coloring planted;
                Graph h = gen_dichotomy_precond(lab_mu, lab_epsilon, gseed, &planted);
                DichotomyContext ctx = make_dichotomy_context(h, lab_epsilon, planted);
                std::mt19937_64 rng(derive_seed(gseed, 1));
                DichotomyReport rep = monte_carlo_dichotomy(ctx, lab_trials, rng);
                violations += rep.structural_violations;
                auto j = detail::dichotomy_report_json(rep);
                j["graph_seed"] = gseed;
                reports.push_back(j);
                out << "lemma-lab mu=" << rep.mu << " trials=" << rep.trials << " dichotomy="
                    << (rep.trials ? static_cast<double>(rep.dichotomy) / static_cast<double>(rep.trials) : 0)
                    << " mean|S|=" << rep.mean_s_size << " (expected " << rep.expected_s_size << ")"
                    << " structural-violations=" << rep.structural_violations << "\n";
            }
            if (!lab_stats_out.empty()) io::write_file(lab_stats_out, reports.dump(2) + "\n");
            return violations == 0 ? kExitYes : kExitInternal;
        }

        if (*bench_cmd) {
            bench_cfg.validate();
            std::vector<int> sizes;
            std::istringstream ss(sizes_spec);
            for (std::string tok; std::getline(ss, tok, ',');) sizes.push_back(std::stoi(tok));
            nlohmann::json rows = nlohmann::json::array();
            bool all_ok = true;
            out << "n seed answer nodes cap ok fallbacks\n";
            for (int n : sizes) {
                for (int k = 0; k < per_size; ++k) {
                    std::uint64_t seed = derive_seed(bench_seed, static_cast<std::uint64_t>(1000 * n + k));
                    PlantedResult pr = gen_planted_3col_diam3(n, seed);
                    Instance inst(pr.graph);
                    SolveResult res = solve(inst, bench_cfg);
                    double cap = std::pow(3.0, static_cast<double>(n) / 4.0);
                    bool ok = res.answer == SolveAnswer::Yes &&
                              static_cast<double>(res.stats.total_instances) < cap &&
                              res.stats.fallback_events == 0;
                    all_ok = all_ok && ok;
                    out << n << " " << seed << " " << (res.answer == SolveAnswer::Yes ? "YES" : "NO") << " "
                        << res.stats.total_instances << " " << static_cast<long long>(cap) << " "
                        << (ok ? "yes" : "NO") << " " << res.stats.fallback_events << "\n";
                    nlohmann::json row{{"n", n},
                                       {"seed", seed},
                                       {"answer", res.answer == SolveAnswer::Yes ? "YES" : "NO"},
                                       {"nodes", res.stats.total_instances},
                                       {"cap_3_pow_n_over_4", cap},
                                       {"fallback_events", res.stats.fallback_events},
                                       {"ok", ok}};
                    if (bench_timings) row["wall_seconds"] = res.stats.wall_seconds;
                    rows.push_back(row);
                }
            }
            if (!bench_stats_out.empty()) io::write_file(bench_stats_out, rows.dump(2) + "\n");
            return all_ok ? kExitYes : kExitInternal;
        }

        if (*verify_cmd) {
            Instance inst = io::parse_instance(detail::read_input(verify_input));
            Coloring cert = io::parse_certificate(io::read_file(certificate_path));
            if (auto why = coloring_violation(inst, cert)) {
                out << "s INVALID\nc " << *why << "\n";
                return kExitNo;
            }
            out << "s VALID\n";
            return kExitYes;
        }
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

} // namespace l3c::cli
