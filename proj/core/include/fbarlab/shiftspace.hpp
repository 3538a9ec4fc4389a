#ifndef FBARLAB_SHIFTSPACE_HPP
#define FBARLAB_SHIFTSPACE_HPP

#include "construction.hpp"
#include "fbar.hpp"
#include "util.hpp"

#include <cstdint>
#include <vector>

namespace fbarlab {

// An n-word with a shading bit per symbol.
struct ShadedWord {
    std::uint32_t word_id = 0;
    std::vector<std::uint8_t> shading;
};

// A finite window of a point of the shaded shift space: uniformly chosen
// n-words concatenated, with independent fair-coin shading. Deterministic
// in the seed.
SString sample_point(const ConstructionSequence& seq, std::uint64_t n,
                     std::uint64_t length, std::uint64_t seed);

// Aligned-block weight of the symbol cylinder: uniform over W_n.
Rational nu_prime(const ConstructionSequence& seq, std::uint64_t n);

// nu(<(w, shading)>) = nu'(<w>) / 2^{h_n}, exact.
Rational cylinder_measure(const ConstructionSequence& seq, std::uint64_t n,
                          const ShadedWord& w);

// Gaps between successive unshaded positions (shading bit 0).
std::vector<std::uint64_t> induced_return_times(const SString& segment);

// Index reversal of a finite window.
SString reverse_point(const SString& segment);

// Unique-readability parse: the offset and word ids of the full n-word
// blocks inside the segment. Errors if no alignment or more than one
// alignment parses.
struct ParseResult {
    std::uint64_t offset = 0;
    std::vector<std::uint32_t> word_ids;
};
ParseResult parse_segment(const ConstructionSequence& seq, std::uint64_t n,
                          const Word& symbols);

// R9 equidistribution check on one stage-(n+1) word: for the given shading,
// every (previous word, previous shading) pair occurs among the f_n
// occurrences with frequency within 2^{-h_n}/2 of 2^{-h_n}. Exhaustive over
// previous shadings; requires h_n <= 20.
bool check_R9_single(const ConstructionSequence& seq, std::uint64_t n_plus_1,
                     std::uint32_t word_id,
                     const std::vector<std::uint8_t>& shading);

struct R9Report {
    std::uint64_t shadings_tested = 0;
    std::uint64_t passing = 0;
};

// Samples random shadings of a stage-(n+1) word and reports the passing
// proportion. The asymptotic-scale threshold is reported, never asserted.
R9Report check_R9(const ConstructionSequence& seq, std::uint64_t n_plus_1,
                  std::uint32_t word_id, std::uint64_t samples,
                  std::uint64_t seed);

}  // namespace fbarlab

#endif
