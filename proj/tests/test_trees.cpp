#include "fbarlab/trees.hpp"

#include <doctest.h>

using namespace fbarlab;

TEST_CASE("canonical enumeration starts with the empty sequence") {
    CHECK(canonical_enumeration(0) == FiniteSequence{});
    CHECK(canonical_enumeration(1) == FiniteSequence{0});
    CHECK(canonical_enumeration(2) == FiniteSequence{1});
}

TEST_CASE("canonical enumeration is prefix monotone") {
    for (std::uint64_t m = 0; m < 200; ++m) {
        FiniteSequence s = canonical_enumeration(m);
        CHECK(enumeration_index(s) == m);
        if (!s.empty()) {
            FiniteSequence parent(s.begin(), s.end() - 1);
            CHECK(enumeration_index(parent) < m);
        }
    }
}

TEST_CASE("enumeration lists every short sequence exactly once") {
    std::set<FiniteSequence> seen;
    for (std::uint64_t m = 0; m < 500; ++m)
        CHECK(seen.insert(canonical_enumeration(m)).second);
}

TEST_CASE("standard shapes validate") {
    for (auto t : {chain_tree(3), full_binary_tree(2), root_only_tree()}) {
        validate_tree(t);
        CHECK(t.contains(0));
    }
}

TEST_CASE("is_tree rejects a prefix-open set") {
    std::set<std::uint64_t> nodes = {0, 3};  // (0,0) without (0)
    CHECK(canonical_enumeration(3).size() == 2);
    CHECK(!is_tree(nodes));
    nodes.insert(1);
    CHECK(is_tree(nodes));
}

TEST_CASE("level maps on the chain") {
    TreeApproximation t = chain_tree(2);
    CHECK(level_map_M(t, 1).has_value());
    CHECK(level_map_M(t, 2).has_value());
    CHECK(!level_map_M(t, 3).has_value());
    CHECK(level_map_s(t, 0) == 0);
    CHECK(level_map_s(t, *level_map_M(t, 1)) == 1);
    CHECK(level_map_s(t, *level_map_M(t, 2)) == 2);
}

TEST_CASE("level map beyond the horizon sees no extra nodes") {
    TreeApproximation t = root_only_tree();
    CHECK(level_map_s(t, 100) == 0);
}

TEST_CASE("longest branch prefers lexicographically least ties") {
    CHECK(longest_branch(full_binary_tree(1)) == Branch{0});
    CHECK(longest_branch(chain_tree(2)) == Branch{0, 0});
    CHECK(longest_branch(root_only_tree()).empty());
}

TEST_CASE("tree json round trip") {
    TreeApproximation t = full_binary_tree(2);
    TreeApproximation u = tree_from_json(tree_to_json(t));
    CHECK(t == u);
}

TEST_CASE("tree json loader rejects prefix-open node sets") {
    CHECK_THROWS(tree_from_json(R"({"horizon": 3, "nodes": [[], [0,0]]})"));
}
