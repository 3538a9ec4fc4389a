#ifndef FBARLAB_CONSTRUCTION_HPP
#define FBARLAB_CONSTRUCTION_HPP

#include "involutions.hpp"
#include "symbols.hpp"
#include "trees.hpp"
#include "util.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fbarlab {

// Desk-scale parameter schedule. The alphabet has 16 symbols, every class
// splits 16-fold per level (e(n) = 1), the prime schedule starts at 3 and
// epsilon_n = 2^-n. Any schedule respecting the same monotonicity
// constraints is admissible; only e(n) = 1 layouts are implemented.
struct ConstructionParams {
    std::uint32_t alphabet_size = 16;
    std::uint32_t e_value = 1;
    std::vector<std::uint64_t> prime_schedule = {3, 5, 7, 11, 13, 17};
    std::uint64_t pattern_budget = 8000000;  // max symbols per word
    std::uint64_t seed = 1;

    std::uint64_t prime(std::uint64_t n) const;
    Rational epsilon(std::uint64_t n) const;  // 2^-n
    std::uint64_t separation_R(std::uint64_t n) const;  // 2^n
    void validate() const;
};

// Per finest-level class: the pattern structure it was built from.
struct ClassPatternMeta {
    std::vector<std::uint64_t> type_sig;                 // one signature per segment
    std::vector<std::vector<std::uint16_t>> tuples;      // ordered building tuple per segment
    bool operator==(const ClassPatternMeta&) const = default;
};

// One level n of the construction sequence. Word ids are structured as
// base-16 digits D_1 ... D_S (class digits, coarse to fine) followed by a
// member digit; the level-s class of a word is its top s digits.
struct Stage {
    std::uint64_t n = 0;
    std::uint64_t level = 0;  // s(n)
    std::uint64_t h = 1;      // symbols per word
    std::uint64_t k = 0;      // components per word (0 at stage 0)
    std::uint64_t f = 0;      // occurrences of each previous word
    std::uint64_t prime_used = 0;
    std::uint32_t alphabet = 16;
    std::uint32_t word_count = 16;

    // Component ids into the previous stage (stage 0: the symbol itself).
    std::vector<std::vector<std::uint16_t>> words;

    // Word-id involution realizing reversal: the word whose symbols are
    // rev(P(symbols)), P the level-1 symbol involution (xor 8).
    std::vector<std::uint32_t> rmap;

    struct LevelGens {
        std::vector<FiniteSequence> nodes;       // tree nodes of this level, index <= n
        std::vector<std::uint32_t> class_masks;  // XOR masks on level-s class ids
    };
    std::vector<LevelGens> level_gens;  // [0] is level 1, ..., [level-1] is level S
    int spine_gen = -1;                  // index into level_gens[0] of the realized generator

    std::uint64_t segment_count = 0;  // Feldman-style segments per word
    std::uint64_t segment_len = 0;    // components per segment
    std::vector<ClassPatternMeta> pattern_meta;  // per finest class

    std::uint32_t class_count(std::uint64_t s) const { return 1u << (4 * s); }
    std::uint32_t class_of(std::uint32_t word_id, std::uint64_t s) const;
    std::uint32_t member_of(std::uint32_t word_id) const { return word_id & 15u; }

    // XOR mask of a group element on level-s class ids.
    std::uint32_t element_class_mask(const GroupElement& e, std::uint64_t s) const;
};

struct ConstructionSequence {
    TreeApproximation tree;
    ConstructionParams params;
    std::vector<Stage> stages;  // stages[0] is stage 0

    const Stage& stage(std::uint64_t n) const { return stages.at(n); }
    // Full symbol string of one word; stages with small h are cached.
    Word materialize(std::uint64_t n, std::uint32_t word_id) const;
    // Component ids of a word at the resolution of stage m <= n.
    std::vector<std::uint32_t> flatten(std::uint64_t n, std::uint32_t word_id,
                                       std::uint64_t m) const;

private:
    mutable std::vector<std::vector<Word>> cache_;
};

ConstructionSequence build_construction_sequence(const TreeApproximation& t,
                                                 std::uint64_t n_max,
                                                 const ConstructionParams& params);

struct ValidationReport {
    struct Item {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Item> items;
    bool all_pass() const;
    std::string summary() const;
};

// Validates stage n against stage n-1 (E1-E3, Q4-Q6, A7, A8, uniform
// substitution, pattern injectivity, reversal realization).
ValidationReport validate_stage(const ConstructionSequence& seq, std::uint64_t n);

struct ClassId {
    std::uint64_t stage_n;
    std::uint64_t level;
    std::uint32_t ordinal;
    bool operator==(const ClassId&) const = default;
};

ClassId class_of(const ConstructionSequence& seq, std::uint64_t n,
                 std::uint32_t word_id, std::uint64_t s);

// The class of rev(w) in rev(W_n)/Q_s, under the canonical identification
// of rev-classes with the classes of the underlying words.
ClassId rev_class_of(const ConstructionSequence& seq, std::uint64_t n,
                     std::uint32_t word_id, std::uint64_t s);

// eta_g: classes of W_n/Q_s to classes of rev(W_n)/Q_s, for odd g.
std::uint32_t eta_apply(const ConstructionSequence& seq, std::uint64_t n,
                        const GroupElement& g, std::uint64_t s,
                        std::uint32_t class_id);

// For a tree with a longest branch of length S >= 1: the branch generators
// g_1, ..., g_S (odd, coherent under rho), with eta verified word-level
// wherever the stages realize it. Absent when S = 0.
std::optional<std::vector<GroupElement>> coherent_branch_isomorphism(
    const ConstructionSequence& seq);

// Stage directory IO: manifest.json plus one component file per stage.
void save_sequence(const ConstructionSequence& seq, const std::string& dir);
ConstructionSequence load_sequence(const std::string& dir);

}  // namespace fbarlab

#endif
