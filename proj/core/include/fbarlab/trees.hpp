#ifndef FBARLAB_TREES_HPP
#define FBARLAB_TREES_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fbarlab {

// A node of the ambient tree of finite sequences of naturals.
using FiniteSequence = std::vector<std::uint64_t>;

// Canonical enumeration: stage k = 1,2,... appends, in length-then-lex
// order, every sequence of length <= k with entries < k not yet listed.
// Index 0 is the empty sequence; every proper initial segment of a
// sequence precedes it.
FiniteSequence canonical_enumeration(std::uint64_t m);
std::uint64_t enumeration_index(const FiniteSequence& seq);

// Finite truncation of a tree: the member node indices among indices
// <= horizon.
struct TreeApproximation {
    std::uint64_t horizon = 0;
    std::set<std::uint64_t> node_indices;

    bool contains(std::uint64_t index) const {
        return node_indices.count(index) != 0;
    }
    bool operator==(const TreeApproximation&) const = default;
};

using Branch = std::vector<std::uint64_t>;

bool is_tree(const std::set<std::uint64_t>& node_indices);

// Validates prefix-closure, presence of the root, horizon bound.
void validate_tree(const TreeApproximation& t);

// Least index n with sigma_n in t of length s, or absent.
std::optional<std::uint64_t> level_map_M(const TreeApproximation& t,
                                         std::uint64_t s);

// Length of the longest sigma_m in t with m <= n.
std::uint64_t level_map_s(const TreeApproximation& t, std::uint64_t n);

// A maximal-length branch; ties broken lexicographically.
Branch longest_branch(const TreeApproximation& t);

// Standard shapes.
TreeApproximation chain_tree(std::uint64_t depth);
TreeApproximation full_binary_tree(std::uint64_t depth);
TreeApproximation root_only_tree();

// JSON {"horizon": M, "nodes": [[..], ..]}; loader validates prefix-closure.
std::string tree_to_json(const TreeApproximation& t);
TreeApproximation tree_from_json(const std::string& json_text);

}  // namespace fbarlab

#endif
