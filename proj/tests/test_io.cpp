#include <doctest.h>

#include "l3c/cli.hpp"
#include "l3c/io.hpp"
#include "test_util.hpp"

#include <cstdio>
#include <filesystem>

using namespace l3c;

namespace {

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out, err;
    int code = cli::run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        static int counter = 0;
        path = (std::filesystem::temp_directory_path() / ("l3c_test_" + std::to_string(::getpid()) + "_" +
                                                           std::to_string(counter++) + ".tmp"))
                   .string();
        io::write_file(path, content);
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("parse_instance") {
    SUBCASE("minimal edge graph with default lists") {
        Instance inst = io::parse_instance("p l3c 2 1\ne 1 2\n");
        CHECK(inst.graph().vertex_count() == 2);
        CHECK(inst.graph().adjacent(0, 1));
        CHECK(inst.list(0) == ColourSet::full());
    }
    SUBCASE("list lines restrict") {
        Instance inst = io::parse_instance("p l3c 2 1\ne 1 2\nl 1 1 2\n");
        CHECK(inst.list(0) == ColourSet::of({1, 2}));
        CHECK(inst.list(1) == ColourSet::full());
    }
    SUBCASE("out-of-range vertex names the line") {
        try {
            io::parse_instance("p l3c 2 1\ne 1 3\n");
            FAIL("expected ParseError");
        } catch (const io::ParseError& e) {
            CHECK(e.line == 2);
            CHECK(std::string(e.what()).find("out of range") != std::string::npos);
        }
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(io::parse_instance(""), io::ParseError);
        CHECK_THROWS_AS(io::parse_instance("e 1 2\n"), io::ParseError);           // header first
        CHECK_THROWS_AS(io::parse_instance("p l3c 2 2\ne 1 2\n"), io::ParseError); // count mismatch
        CHECK_THROWS_AS(io::parse_instance("p l3c 2 2\ne 1 2\ne 2 1\n"), io::ParseError); // duplicate
        CHECK_THROWS_AS(io::parse_instance("p l3c 2 1\ne 1 1\n"), io::ParseError); // self-loop
        CHECK_THROWS_AS(io::parse_instance("p l3c 2 0\nl 1 4\n"), io::ParseError); // bad colour
        CHECK_THROWS_AS(io::parse_instance("p l3c 2 0\nl 1\n"), io::ParseError);   // empty list line
        CHECK_THROWS_AS(io::parse_instance("p l3c 2 0\nl 1 1\nl 1 2\n"), io::ParseError); // dup list
        CHECK_THROWS_AS(io::parse_instance("p l3c 2 0\nx 1\n"), io::ParseError);   // unknown type
    }
    SUBCASE("comments are ignored") {
        CHECK_NOTHROW(io::parse_instance("c hello\np l3c 1 0\nc bye\n"));
    }
}

TEST_CASE("round-trip: parse(emit(parse(t))) == parse(t)") {
    std::mt19937_64 rng(83);
    for (int it = 0; it < 40; ++it) {
        Instance inst = testutil::random_instance(9, 0.3, rng);
        std::string text = io::emit_instance(inst);
        Instance again = io::parse_instance(text);
        CHECK(again == inst);
        CHECK(io::emit_instance(again) == text);
    }
}

TEST_CASE("certificates parse and emit") {
    Coloring cert{{0, 1}, {1, 2}};
    std::string text = io::emit_certificate(cert);
    CHECK(text == "s YES\nv 1 1\nv 2 2\n");
    CHECK(io::parse_certificate(text) == cert);
}

TEST_CASE("cli solve") {
    SUBCASE("K4 exits 1 with s NO") {
        TempFile f(io::emit_instance(Instance(testutil::complete(4))));
        std::string out;
        CHECK(run({"solve", f.path}, &out) == 1);
        CHECK(out.find("s NO") == 0);
    }
    SUBCASE("planted instance exits 0, verifies, reports") {
        PlantedResult pr = gen_planted_3col_diam3(10, 3);
        TempFile f(io::emit_instance(Instance(pr.graph)));
        TempFile stats("");
        std::string out;
        int code = run({"solve", f.path, "--verify-certificate", "--stats-out", stats.path}, &out);
        CHECK(code == 0);
        CHECK(out.find("s YES") == 0);
        CHECK(out.find("c certificate verified") != std::string::npos);
        auto j = nlohmann::json::parse(io::read_file(stats.path));
        CHECK(j["answer"] == "YES");
        CHECK(j["stats"]["total_instances"].get<long long>() >= 1);
        CHECK(j["invariants"]["violations"] == 0);
    }
    SUBCASE("strict policy rejects a long path with the measured diameter") {
        TempFile f(io::emit_instance(Instance(testutil::path(6))));
        std::string out, err;
        CHECK(run({"solve", f.path, "--diameter-policy", "strict"}, &out, &err) == 2);
        CHECK(err.find("diameter 5") != std::string::npos);
    }
    SUBCASE("fallback policy solves it") {
        TempFile f(io::emit_instance(Instance(testutil::path(6))));
        CHECK(run({"solve", f.path, "--diameter-policy", "fallback"}) == 0);
    }
    SUBCASE("jobs > 1 returns the same report") {
        PlantedResult pr = gen_planted_3col_diam3(12, 5);
        TempFile f(io::emit_instance(Instance(pr.graph)));
        TempFile s1(""), s2("");
        CHECK(run({"solve", f.path, "--stats-out", s1.path}) == 0);
        CHECK(run({"solve", f.path, "--jobs", "4", "--stats-out", s2.path}) == 0);
        CHECK(io::read_file(s1.path) == io::read_file(s2.path));
    }
    SUBCASE("byte-identical structured reports across runs") {
        Instance inst = gen_lists(gen_diameter3(11, 9), ListProfile::mixed(), 10);
        TempFile f(io::emit_instance(inst));
        TempFile s1(""), s2("");
        CHECK(run({"solve", f.path, "--seed", "7", "--stats-out", s1.path}) ==
              run({"solve", f.path, "--seed", "7", "--stats-out", s2.path}));
        CHECK(io::read_file(s1.path) == io::read_file(s2.path));
    }
}

TEST_CASE("cli oracle and verify") {
    PlantedResult pr = gen_planted_3col_diam3(8, 11);
    TempFile f(io::emit_instance(Instance(pr.graph)));
    std::string out;
    REQUIRE(run({"oracle", f.path}, &out) == 0);
    TempFile cert(out.substr(0, out.find("c ")));
    CHECK(run({"verify", f.path, "--certificate", cert.path}) == 0);

    SUBCASE("corrupted certificate fails verification") {
        Coloring bad = io::parse_certificate(io::read_file(cert.path));
        bad[0] = (bad[0] % 3) + 1;
        TempFile badf(io::emit_certificate(bad));
        CHECK(run({"verify", f.path, "--certificate", badf.path}) == 1);
    }
    SUBCASE("oracle budget exhaustion exits 3") {
        std::string err;
        CHECK(run({"oracle", f.path, "--budget", "2"}, nullptr, &err) == 3);
        CHECK(err.find("budget") != std::string::npos);
    }
}

TEST_CASE("cli gen") {
    std::string out;
    CHECK(run({"gen", "--family", "diam3", "--n", "9", "--seed", "4"}, &out) == 0);
    Instance inst = io::parse_instance(out);
    CHECK(diameter(inst.graph()) == 3);
    SUBCASE("same seed, same bytes") {
        std::string again;
        run({"gen", "--family", "diam3", "--n", "9", "--seed", "4"}, &again);
        CHECK(out == again);
    }
    SUBCASE("gadget emission respects the rule") {
        std::string b1;
        CHECK(run({"gen", "--family", "b1", "--n", "12", "--seed", "2"}, &b1) == 0);
        BranchConfig cfg;
        CHECK(find_b1(io::parse_instance(b1), cfg).has_value());
    }
    SUBCASE("usage errors exit 2") {
        std::string err;
        CHECK(run({"gen", "--family", "nope"}, nullptr, &err) == 2);
        CHECK(run({"nonsense"}, nullptr, &err) == 2);
    }
}

TEST_CASE("cli lemma-lab emits a structured report") {
    TempFile stats("");
    std::string out;
    int code = run({"lemma-lab", "--mu", "30", "--trials", "10", "--graphs", "1", "--seed", "5",
                    "--stats-out", stats.path},
                   &out);
    CHECK(code == 0);
    auto j = nlohmann::json::parse(io::read_file(stats.path));
    REQUIRE(j.is_array());
    CHECK(j[0]["mu"] == 30);
    CHECK(j[0]["structural_violations"] == 0);
    CHECK(out.find("dichotomy") != std::string::npos);
}

TEST_CASE("cli bench runs a tiny sweep") {
    TempFile stats("");
    std::string out;
    int code = run({"bench", "--sizes", "12,16", "--per-size", "1", "--seed", "3", "--stats-out", stats.path},
                   &out);
    CHECK(code == 0);
    auto j = nlohmann::json::parse(io::read_file(stats.path));
    REQUIRE(j.is_array());
    CHECK(j.size() == 2);
    for (const auto& row : j) {
        CHECK(row["answer"] == "YES");
        CHECK(row["ok"] == true);
    }
}
