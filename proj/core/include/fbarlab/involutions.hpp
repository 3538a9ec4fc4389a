#ifndef FBARLAB_INVOLUTIONS_HPP
#define FBARLAB_INVOLUTIONS_HPP

#include "trees.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fbarlab {

// Direct sum of order-2 groups, one per tree node of the given length.
struct InvolutionGroup {
    std::uint64_t level = 0;
    std::vector<FiniteSequence> generators;  // sorted, all of length == level
};

// Canonical form: sorted set of generator nodes; parity is derived.
struct GroupElement {
    std::vector<FiniteSequence> generator_subset;  // sorted

    bool is_identity() const { return generator_subset.empty(); }
    bool operator==(const GroupElement&) const = default;
};

InvolutionGroup build_group(const TreeApproximation& t, std::uint64_t s,
                            std::uint64_t n);

GroupElement make_element(std::vector<FiniteSequence> generators);

// Symmetric difference: the group operation.
GroupElement compose(const GroupElement& a, const GroupElement& b);

bool parity_odd(const GroupElement& e);

// Homomorphism rho_{t,s}: each generator maps to its length-s prefix,
// summed mod 2. Requires s < t.
GroupElement rho(const GroupElement& e, std::uint64_t from_level,
                 std::uint64_t to_level);

// Per-class permutation table; validated bijective on load.
using ClassTable = std::vector<std::uint32_t>;
void validate_bijective(const ClassTable& table);

// Even elements act componentwise, odd elements act componentwise with
// the tuple order reversed.
std::vector<std::uint32_t> skew_diagonal_apply(const GroupElement& g,
                                               const std::vector<std::uint32_t>& tuple,
                                               const ClassTable& base_action);

// Serialized action tables: one table per generator node at a level.
struct GeneratorActions {
    std::uint64_t level = 0;
    std::map<FiniteSequence, ClassTable> by_generator;

    // Composite action of an element: XOR-fold of generator tables applied
    // in canonical order (tables must commute; validated by callers).
    ClassTable element_table(const GroupElement& e, std::uint32_t class_count) const;
};

std::string actions_to_json(const GeneratorActions& a);
GeneratorActions actions_from_json(const std::string& text);

}  // namespace fbarlab

#endif
