#ifndef FBARLAB_FELDMAN_HPP
#define FBARLAB_FELDMAN_HPP

#include "fbar.hpp"
#include "symbols.hpp"
#include "util.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace fbarlab {

// Pattern family over N building blocks of common length L: type r is
//   (A_1^{T N^{2r}} ... A_N^{T N^{2r}}) ^ (N^{2(M+1-r)}),
// giving M types of equal length T N^{2M+3} L.
struct FeldmanSpec {
    std::uint64_t T = 1;
    std::uint64_t N = 2;
    std::uint64_t M = 1;
    std::uint64_t L = 1;
    std::vector<Word> blocks;

    void validate() const;
};

std::uint64_t pattern_length(const FeldmanSpec& spec);
std::uint64_t block_repeat(const FeldmanSpec& spec, std::uint64_t r);
std::uint64_t cycle_count(const FeldmanSpec& spec, std::uint64_t r);
std::uint64_t cycle_length(const FeldmanSpec& spec, std::uint64_t r);

// Full materialization, guarded by a length budget.
Word build_pattern(const FeldmanSpec& spec, std::uint64_t r,
                   std::uint64_t budget = 1000000);

// Lazy window extraction in run-length form; never materializes the
// pattern. start + len must not exceed the pattern length.
RleWord pattern_substring_rle(const FeldmanSpec& spec, std::uint64_t r,
                              std::uint64_t start, std::uint64_t len);

// Concatenation replacing each skeleton symbol by its mapped block.
Word substitute_blocks(const Word& skeleton,
                       const std::map<Symbol, Word>& block_map);

struct SeparationReport {
    Rational alpha_measured;       // min over all tested pairs
    bool alpha_exact = true;       // false if any sample used a certified lower bound
    std::uint64_t sample_count = 0;
    std::uint64_t min_substring_length = 0;
    struct PairStat {
        std::uint64_t type_r, type_k;
        Rational min_fbar;
        bool exact;
        std::uint64_t samples;
    };
    std::vector<PairStat> pairs_tested;
};

// Samples substring pairs of length min_len from distinct pattern types
// and records exact fbar minima (certified lower bounds at scales where
// the run-length engine cannot certify exactness). Deterministic in seed.
SeparationReport separation_report(const FeldmanSpec& spec,
                                   std::uint64_t min_len,
                                   std::uint64_t samples,
                                   std::uint64_t seed);

}  // namespace fbarlab

#endif
