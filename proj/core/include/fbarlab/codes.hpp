#ifndef FBARLAB_CODES_HPP
#define FBARLAB_CODES_HPP

#include "construction.hpp"
#include "fbar.hpp"
#include "involutions.hpp"
#include "util.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbarlab {

// A stationary code of window 2K+1. Builtin rules cover the audits; an
// explicit table maps serialized windows to outputs.
struct StationaryCode {
    std::uint64_t half_width = 0;
    // "identity": center pair unchanged.
    // "preverse": center symbol xor 8, bit unchanged.
    // "constant": fixed output, taken from constant_symbol / constant_bit.
    // "table": exact window lookup in entries.
    std::string rule = "identity";
    Symbol constant_symbol = 0;
    std::uint8_t constant_bit = 0;
    struct Entry {
        SString window;  // length 2K+1
        Symbol out_symbol = 0;
        std::uint8_t out_bit = 0;
    };
    std::vector<Entry> entries;
};

std::string code_to_json(const StationaryCode& code);
StationaryCode code_from_json(const std::string& text);

// Applies the code to every position with a full window; the K positions
// at each end are dropped.
SString apply_stationary_code(const StationaryCode& code,
                              const SString& segment);

// Shading reshuffle between two same-length segments of one word: for each
// substitution instance, the l-th occurrence in the source segment swaps
// its shading block with the l-th occurrence in the target segment.
// Instances must occur equally often in both segments.
std::vector<std::uint8_t> reshuffle_shading(const ConstructionSequence& seq,
                                            std::uint64_t n,
                                            std::uint32_t word_id,
                                            const std::vector<std::uint8_t>& shading,
                                            std::uint64_t source_segment,
                                            std::uint64_t target_segment);

struct AuditSample {
    std::uint32_t word_id = 0;
    std::uint32_t best_candidate = 0;  // word id of the best rev(W_n) match
    Rational fbar_value = 1;
    bool under_epsilon = false;
    std::optional<GroupElement> inferred;
};

struct AuditReport {
    std::uint64_t n = 0;
    std::uint64_t s = 0;
    std::vector<AuditSample> samples;
    std::optional<GroupElement> modal;  // most frequent inferred element
    double agree_fraction = 0.0;        // samples inferring the modal element
};

// Audits a code against rev(W_n)/Q_s: applies the code to sampled shaded
// words, matches the output to every reversed word by shading-free fbar,
// and infers the group element whose eta sends the input class to the best
// candidate's class. Long words are compared on a centered window of at
// most window_cap symbols.
AuditReport audit_code(const StationaryCode& code,
                       const ConstructionSequence& seq, std::uint64_t n,
                       std::uint64_t s, std::uint64_t samples,
                       std::uint64_t shadings_per_word, const Rational& epsilon,
                       std::uint64_t seed,
                       std::uint64_t window_cap = 4096);

}  // namespace fbarlab

#endif
