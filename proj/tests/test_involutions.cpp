#include "fbarlab/involutions.hpp"

#include <doctest.h>

using namespace fbarlab;

TEST_CASE("group generators are the level-s nodes up to n") {
    TreeApproximation t = full_binary_tree(2);
    InvolutionGroup g1 = build_group(t, 1, 2);
    REQUIRE(g1.generators.size() == 2);
    CHECK(g1.generators[0] == FiniteSequence{0});
    CHECK(g1.generators[1] == FiniteSequence{1});
    InvolutionGroup g1_cut = build_group(t, 1, 1);
    CHECK(g1_cut.generators.size() == 1);
    CHECK(build_group(t, 0, 2).generators.empty());
}

TEST_CASE("composition is symmetric difference, every element an involution") {
    GroupElement a = make_element({{0}, {1}});
    GroupElement b = make_element({{1}, {2}});
    GroupElement ab = compose(a, b);
    CHECK(ab.generator_subset == std::vector<FiniteSequence>{{0}, {2}});
    CHECK(compose(a, a).is_identity());
    CHECK(parity_odd(make_element({{0}})));
    CHECK(!parity_odd(ab));
    CHECK_THROWS(make_element({{0}, {0}}));
    CHECK_THROWS(make_element({{0}, {0, 1}}));
}

TEST_CASE("rho maps to prefixes modulo 2") {
    GroupElement e = make_element({{0, 0}, {0, 1}, {1, 0}});
    GroupElement r = rho(e, 2, 1);
    // (0,0) and (0,1) collapse to (0) twice, cancelling.
    CHECK(r.generator_subset == std::vector<FiniteSequence>{{1}});
    CHECK(rho(e, 2, 0).is_identity());  // level 0 drops everything
    CHECK_THROWS(rho(e, 2, 2));
}

TEST_CASE("bijection validation") {
    CHECK_NOTHROW(validate_bijective({2, 0, 1}));
    CHECK_THROWS(validate_bijective({0, 0, 1}));
    CHECK_THROWS(validate_bijective({0, 3, 1}));
}

TEST_CASE("skew diagonal action reverses for odd elements only") {
    ClassTable base = {1, 0, 3, 2};
    std::vector<std::uint32_t> tuple = {0, 2, 3};
    GroupElement odd = make_element({{0}});
    GroupElement even = make_element({{0}, {1}});
    CHECK(skew_diagonal_apply(even, tuple, base) ==
          std::vector<std::uint32_t>{1, 3, 2});
    CHECK(skew_diagonal_apply(odd, tuple, base) ==
          std::vector<std::uint32_t>{2, 3, 1});
    CHECK_THROWS(skew_diagonal_apply(odd, {7}, base));
}

TEST_CASE("element tables fold generator tables") {
    GeneratorActions a;
    a.level = 1;
    a.by_generator[{0}] = {1, 0, 3, 2};
    a.by_generator[{1}] = {2, 3, 0, 1};
    GroupElement e = make_element({{0}, {1}});
    ClassTable t = a.element_table(e, 4);
    CHECK(t == ClassTable{3, 2, 1, 0});
    CHECK(a.element_table(GroupElement{}, 4) == ClassTable{0, 1, 2, 3});
    CHECK_THROWS(a.element_table(make_element({{5}}), 4));
}

TEST_CASE("actions json round trip") {
    GeneratorActions a;
    a.level = 1;
    a.by_generator[{0}] = {1, 0};
    a.by_generator[{1}] = {0, 1};
    GeneratorActions b = actions_from_json(actions_to_json(a));
    CHECK(b.level == a.level);
    CHECK(b.by_generator == a.by_generator);
    // Non-bijective tables are rejected on load.
    CHECK_THROWS(actions_from_json(
        R"({"level":1,"entries":[[[0],0,0],[[0],1,0]]})"));
}
