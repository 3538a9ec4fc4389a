#include "fbarlab/feldman.hpp"

#include <algorithm>
#include <stdexcept>

namespace fbarlab {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    if (p > ~0ull) throw std::overflow_error("feldman: parameter overflow");
    return static_cast<std::uint64_t>(p);
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

}  // namespace

void FeldmanSpec::validate() const {
    if (T == 0 || N == 0 || M == 0 || L == 0)
        throw std::invalid_argument("feldman: parameters must be positive");
    if (blocks.size() != N)
        throw std::invalid_argument("feldman: block count must equal N");
    for (const Word& b : blocks)
        if (b.size() != L)
            throw std::invalid_argument("feldman: all blocks must have length L");
}

std::uint64_t pattern_length(const FeldmanSpec& spec) {
    return checked_mul(checked_mul(spec.T, checked_pow(spec.N, 2 * spec.M + 3)),
                       spec.L);
}

std::uint64_t block_repeat(const FeldmanSpec& spec, std::uint64_t r) {
    if (r < 1 || r > spec.M) throw std::invalid_argument("feldman: bad type r");
    return checked_mul(spec.T, checked_pow(spec.N, 2 * r));
}

std::uint64_t cycle_count(const FeldmanSpec& spec, std::uint64_t r) {
    if (r < 1 || r > spec.M) throw std::invalid_argument("feldman: bad type r");
    return checked_pow(spec.N, 2 * (spec.M + 1 - r));
}

std::uint64_t cycle_length(const FeldmanSpec& spec, std::uint64_t r) {
    return checked_mul(checked_mul(spec.N, block_repeat(spec, r)), spec.L);
}

Word build_pattern(const FeldmanSpec& spec, std::uint64_t r, std::uint64_t budget) {
    spec.validate();
    const std::uint64_t len = pattern_length(spec);
    if (len > budget)
        throw std::runtime_error("build_pattern: length " + std::to_string(len) +
                                 " exceeds budget " + std::to_string(budget));
    const std::uint64_t rep = block_repeat(spec, r);
    const std::uint64_t cycles = cycle_count(spec, r);
    Word out;
    out.reserve(len);
    for (std::uint64_t c = 0; c < cycles; ++c)
        for (std::uint64_t b = 0; b < spec.N; ++b)
            for (std::uint64_t k = 0; k < rep; ++k)
                out.insert(out.end(), spec.blocks[b].begin(), spec.blocks[b].end());
    return out;
}

RleWord pattern_substring_rle(const FeldmanSpec& spec, std::uint64_t r,
                              std::uint64_t start, std::uint64_t len) {
    spec.validate();
    const std::uint64_t total = pattern_length(spec);
    if (start > total || len > total - start)
        throw std::invalid_argument("pattern_substring_rle: window out of range");
    const std::uint64_t rep = block_repeat(spec, r);
    const std::uint64_t seg = checked_mul(rep, spec.L);  // one repeated block
    const std::uint64_t cyc = checked_mul(spec.N, seg);

    RleWord out;
    auto emit = [&out](Symbol s, std::uint64_t count) {
        if (count == 0) return;
        if (!out.empty() && out.back().symbol == s)
            out.back().length += count;
        else
            out.push_back({s, count});
    };

    std::uint64_t pos = start, remaining = len;
    while (remaining > 0) {
        const std::uint64_t in_cycle = pos % cyc;
        const std::uint64_t block_idx = in_cycle / seg;
        const std::uint64_t in_seg = in_cycle % seg;
        const Word& block = spec.blocks[block_idx];
        const std::uint64_t seg_left = seg - in_seg;
        std::uint64_t take = std::min(remaining, seg_left);
        if (spec.L == 1) {
            emit(block[0], take);
        } else {
            std::uint64_t off = in_seg % spec.L;
            for (std::uint64_t i = 0; i < take; ++i)
                emit(block[(off + i) % spec.L], 1);
        }
        pos += take;
        remaining -= take;
    }
    return out;
}

Word substitute_blocks(const Word& skeleton,
                       const std::map<Symbol, Word>& block_map) {
    std::size_t block_len = 0;
    bool first = true;
    for (const auto& [sym, block] : block_map) {
        if (first) {
            block_len = block.size();
            first = false;
        } else if (block.size() != block_len) {
            throw std::invalid_argument("substitute_blocks: unequal block lengths");
        }
    }
    Word out;
    for (Symbol s : skeleton) {
        auto it = block_map.find(s);
        if (it == block_map.end())
            throw std::invalid_argument("substitute_blocks: unmapped index " +
                                        std::to_string(s));
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

SeparationReport separation_report(const FeldmanSpec& spec,
                                   std::uint64_t min_len,
                                   std::uint64_t samples,
                                   std::uint64_t seed) {
    spec.validate();
    if (spec.M < 2)
        throw std::invalid_argument("separation_report: needs at least two types");
    const std::uint64_t total = pattern_length(spec);
    if (min_len > total)
        throw std::invalid_argument("separation_report: min_len beyond pattern length");

    Rng rng(seed);
    SeparationReport rep;
    rep.sample_count = samples;
    rep.min_substring_length = min_len;
    std::map<std::pair<std::uint64_t, std::uint64_t>, SeparationReport::PairStat> stats;

    for (std::uint64_t i = 0; i < samples; ++i) {
        const std::uint64_t r = 1 + rng.below(spec.M);
        std::uint64_t k = 1 + rng.below(spec.M - 1);
        if (k >= r) ++k;
        const std::uint64_t lo_t = std::min(r, k), hi_t = std::max(r, k);
        const std::uint64_t s1 = rng.below(total - min_len + 1);
        const std::uint64_t s2 = rng.below(total - min_len + 1);
        const RleWord a = pattern_substring_rle(spec, r, s1, min_len);
        const RleWord b = pattern_substring_rle(spec, k, s2, min_len);

        Rational value;
        bool exact;
        if (min_len <= 4096) {
            value = fbar(rle_decode(a), rle_decode(b));
            exact = true;
        } else {
            const FbarInterval iv = fbar_rle(a, b);
            value = iv.lo;  // certified lower bound; exact when flagged
            exact = iv.exact;
        }

        auto key = std::make_pair(lo_t, hi_t);
        auto it = stats.find(key);
        if (it == stats.end()) {
            stats[key] = {lo_t, hi_t, value, exact, 1};
        } else {
            if (value < it->second.min_fbar) {
                it->second.min_fbar = value;
                it->second.exact = exact;
            }
            ++it->second.samples;
        }
    }

    bool have = false;
    for (auto& [key, st] : stats) {
        rep.pairs_tested.push_back(st);
        if (!have || st.min_fbar < rep.alpha_measured) {
            rep.alpha_measured = st.min_fbar;
            have = true;
        }
        if (!st.exact) rep.alpha_exact = false;
    }
    if (!have) rep.alpha_measured = Rational(1);
    return rep;
}

}  // namespace fbarlab
