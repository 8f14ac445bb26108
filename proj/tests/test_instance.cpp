#include <doctest.h>

#include "l3c/instance.hpp"
#include "l3c/oracle.hpp"
#include "test_util.hpp"

#include <random>

using namespace l3c;
using namespace l3c::testutil;

namespace {

Instance path3_mixed() {
    // a-b-c with L(a)={1,2,3}, L(b)={1,2}, L(c)={1,2,3}
    return Instance(path(3), {{1, ColourSet::of({1, 2})}});
}

} // namespace

TEST_CASE("colour sets") {
    ColourSet s = ColourSet::of({1, 3});
    CHECK(s.size() == 2);
    CHECK(s.contains(1));
    CHECK_FALSE(s.contains(2));
    CHECK(s.without(1) == ColourSet::single(3));
    CHECK(s.first() == 1);
    CHECK(ColourSet::single(2).only() == 2);
    CHECK_THROWS_AS(ColourSet::none().first(), std::logic_error);
    CHECK_THROWS_AS(ColourSet::of({4}), std::invalid_argument);
    CHECK(s.to_string() == "{1,3}");
}

TEST_CASE("level_sets") {
    SUBCASE("all full lists") {
        Instance inst(complete(3));
        LevelSets ls = level_sets(inst);
        CHECK(ls.l3 == inst.graph().vertices());
        CHECK(ls.l1.empty());
        CHECK(ls.l2.empty());
    }
    SUBCASE("one of each size on a triangle") {
        Instance inst(complete(3), {{0, ColourSet::single(1)}, {1, ColourSet::of({1, 2})}});
        LevelSets ls = level_sets(inst);
        CHECK(ls.l1 == std::vector<Vertex>{0});
        CHECK(ls.l2 == std::vector<Vertex>{1});
        CHECK(ls.l3 == std::vector<Vertex>{2});
    }
    SUBCASE("empty list appears in no level set") {
        Instance inst(path(2), {{0, ColourSet::none()}});
        LevelSets ls = level_sets(inst);
        CHECK(ls.l1.size() + ls.l2.size() + ls.l3.size() == 1);
    }
}

TEST_CASE("restricted neighbourhoods on the mixed path") {
    Instance inst = path3_mixed();
    CHECK(restricted_neighborhood(inst, 0, 1, 2, true, false) == std::vector<Vertex>{1});
    CHECK(restricted_neighborhood(inst, 0, 2, 3, true, false) == std::vector<Vertex>{2});
    CHECK(restricted_neighborhood(inst, 0, 1, 3, true, false).empty());
    // closed variant includes v only when v sits in the level set
    CHECK(restricted_neighborhood(inst, 0, 1, 3, true, true) == std::vector<Vertex>{0});
    CHECK(restricted_neighborhood(inst, 0, 1, 2, true, true) == std::vector<Vertex>{1});
    CHECK(restricted_adj(inst, 1, 3) == std::vector<Vertex>{0, 2});
}

TEST_CASE("potential") {
    CHECK(potential(Instance(Graph(3))) == 9);
    CHECK(potential(Instance(Graph(0))) == 0);
    CHECK(potential(Instance(Graph(2), {{0, ColourSet::single(1)}, {1, ColourSet::of({2, 3})}})) == 3);
}

TEST_CASE("verify_coloring") {
    Instance inst(path(2), {{0, ColourSet::of({1, 2})}, {1, ColourSet::of({1, 2})}});
    CHECK(verify_coloring(inst, {{0, 1}, {1, 2}}));
    CHECK_FALSE(verify_coloring(inst, {{0, 1}, {1, 1}}));
    CHECK_FALSE(verify_coloring(inst, {{0, 3}, {1, 1}}));
    SUBCASE("diagnostics name the first violation") {
        auto why = coloring_violation(inst, {{0, 3}, {1, 1}});
        REQUIRE(why.has_value());
        CHECK(why->find("vertex 0") != std::string::npos);
        CHECK(coloring_violation(inst, {{0, 1}}).value().find("uncoloured") != std::string::npos);
    }
}

TEST_CASE("assign_colour") {
    Instance inst(Graph(1));
    CHECK(assign_colour(inst, 0, 2).list(0) == ColourSet::single(2));
    Instance single(Graph(1), {{0, ColourSet::single(3)}});
    CHECK(assign_colour(single, 0, 3).list(0) == ColourSet::single(3));
    Instance two(Graph(1), {{0, ColourSet::of({1, 2})}});
    CHECK_THROWS_AS(assign_colour(two, 0, 3), std::logic_error);
}

TEST_CASE("potential is monotone under assign_colour") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 40; ++it) {
        Instance inst = random_instance(8, 0.3, rng);
        for (Vertex v : inst.graph().vertices()) {
            for (Colour c : inst.list(v).colours()) {
                Instance after = assign_colour(inst, v, c);
                CHECK(potential(after) <= potential(inst));
                if (inst.list(v).size() >= 2) CHECK(potential(after) < potential(inst));
            }
        }
    }
}

TEST_CASE("feasibility is monotone under pointwise list enlargement") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> colour_pick(1, 3);
    for (int it = 0; it < 60; ++it) {
        Instance inst = random_instance(7, 0.35, rng);
        OracleResult base = brute_force(inst);
        if (!base.feasible) continue;
        Instance larger = inst;
        for (Vertex v : inst.graph().vertices())
            if (colour_pick(rng) == 1) larger = larger.with_list(v, larger.list(v).with(colour_pick(rng)));
        CHECK(verify_coloring(larger, *base.certificate));
    }
}

TEST_CASE("restricted_set_neighborhood excludes the set itself") {
    Instance inst = path3_mixed();
    // N_{L3}(N_{L2}(a)) on the path: the midpoint's neighbours are a and c.
    std::vector<Vertex> mids = restricted_adj(inst, 0, 2);
    CHECK(mids == std::vector<Vertex>{1});
    CHECK(restricted_set_neighborhood(inst, mids, 3) == std::vector<Vertex>{0, 2});
}
