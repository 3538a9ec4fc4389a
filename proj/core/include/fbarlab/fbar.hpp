#ifndef FBARLAB_FBAR_HPP
#define FBARLAB_FBAR_HPP

#include "symbols.hpp"
#include "util.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace fbarlab {

// A string with an optional shading bit per position.
struct SString {
    Word symbols;
    std::vector<std::uint8_t> shading;  // empty or one bit per symbol
    bool shaded() const { return !shading.empty(); }

    SString() = default;
    explicit SString(Word s) : symbols(std::move(s)) {}
    SString(Word s, std::vector<std::uint8_t> bits)
        : symbols(std::move(s)), shading(std::move(bits)) {}
    std::size_t size() const { return symbols.size(); }
    bool operator==(const SString&) const = default;
};

// Monotone pairing of equal symbols; 1-based index pairs.
using Match = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

// Exact longest-common-subsequence engines. All agree on all inputs.
std::uint64_t lcs_dp(const Word& a, const Word& b);
std::uint64_t lcs_bitparallel(const Word& a, const Word& b);
std::uint64_t lcs(const Word& a, const Word& b);  // dispatches by size

// LCS over run-length-encoded inputs. The boundary dynamic program
// evaluates the table only at run boundaries of the side with more runs;
// values that depend on mid-run table entries are tracked as intervals.
// lo == up certifies the result exact.
struct LcsInterval {
    std::uint64_t lo = 0;
    std::uint64_t up = 0;
    bool exact() const { return lo == up; }
};
LcsInterval lcs_rle_bounded(const RleWord& a, const RleWord& b);
// Exact, O(total length x min run count); throws if work exceeds budget.
std::uint64_t lcs_rle_dense(const RleWord& a, const RleWord& b,
                            std::uint64_t work_budget = (1ull << 33));
// Bounded pass first, dense only if the bound did not certify.
LcsInterval lcs_rle(const RleWord& a, const RleWord& b,
                    std::uint64_t dense_work_budget = (1ull << 33));

// fbar(a,b) = 1 - 2 lcs / (|a|+|b|), exact. Both inputs empty is an error.
Rational fbar(const Word& a, const Word& b);
// Shading-aware: when both strings carry shading, matched positions must
// agree on the shading bit too; otherwise symbols alone are compared.
Rational fbar(const SString& a, const SString& b);

struct FbarInterval {
    Rational lo;
    Rational up;
    bool exact = false;
};
FbarInterval fbar_rle(const RleWord& a, const RleWord& b,
                      std::uint64_t dense_work_budget = (1ull << 33));

// Exhaustive-match oracle; requires |a|+|b| <= 24. Deliberately avoids the
// DP so that it is an independent route to the same value.
Rational fbar_oracle(const Word& a, const Word& b);
Rational fbar_oracle(const SString& a, const SString& b);

// One maximal match, lexicographically least as a pair list.
Match best_match(const Word& a, const Word& b);
Match best_match(const SString& a, const SString& b);

// fbar of the symbol projections, ignoring shading on either side. Equals
// the minimum of shaded fbar over all shadings of b when a is shaded.
Rational fbar_symbol_projection(const SString& a, const SString& b);

}  // namespace fbarlab

#endif
