#include "fbarlab/shiftspace.hpp"

#include <algorithm>
#include <stdexcept>

namespace fbarlab {

SString sample_point(const ConstructionSequence& seq, std::uint64_t n,
                     std::uint64_t length, std::uint64_t seed) {
    const Stage& st = seq.stage(n);
    Rng rng(seed);
    SString out;
    out.symbols.reserve(length);
    out.shading.reserve(length);
    // Random phase inside the first word, as in a stationary window.
    std::uint64_t phase = rng.below(st.h);
    while (out.symbols.size() < length) {
        std::uint32_t id = static_cast<std::uint32_t>(rng.below(st.word_count));
        Word w = seq.materialize(n, id);
        for (std::uint64_t i = phase; i < w.size(); ++i) {
            if (out.symbols.size() >= length) break;
            out.symbols.push_back(w[i]);
            out.shading.push_back(static_cast<std::uint8_t>(rng.next() & 1));
        }
        phase = 0;
    }
    return out;
}

Rational nu_prime(const ConstructionSequence& seq, std::uint64_t n) {
    return Rational(1, seq.stage(n).word_count);
}

Rational cylinder_measure(const ConstructionSequence& seq, std::uint64_t n,
                          const ShadedWord& w) {
    const Stage& st = seq.stage(n);
    if (w.word_id >= st.word_count)
        throw std::invalid_argument("word id out of range");
    if (w.shading.size() != st.h)
        throw std::invalid_argument("shading length must be h_n");
    return nu_prime(seq, n) / (BigInt(1) << st.h);
}

std::vector<std::uint64_t> induced_return_times(const SString& segment) {
    if (segment.shading.empty())
        throw std::invalid_argument("segment must be nonempty");
    std::vector<std::uint64_t> gaps;
    std::uint64_t last = UINT64_MAX;
    for (std::uint64_t i = 0; i < segment.shading.size(); ++i) {
        if (segment.shading[i] != 0) continue;
        if (last != UINT64_MAX) gaps.push_back(i - last);
        last = i;
    }
    return gaps;
}

SString reverse_point(const SString& segment) {
    SString out;
    out.symbols.assign(segment.symbols.rbegin(), segment.symbols.rend());
    out.shading.assign(segment.shading.rbegin(), segment.shading.rend());
    return out;
}

ParseResult parse_segment(const ConstructionSequence& seq, std::uint64_t n,
                          const Word& symbols) {
    const Stage& st = seq.stage(n);
    if (symbols.size() < 2 * st.h - 1)
        throw std::invalid_argument("segment too short for one full block");
    std::vector<Word> words;
    words.reserve(st.word_count);
    for (std::uint32_t id = 0; id < st.word_count; ++id)
        words.push_back(seq.materialize(n, id));

    std::vector<ParseResult> hits;
    for (std::uint64_t off = 0; off < st.h; ++off) {
        ParseResult res;
        res.offset = off;
        bool ok = true;
        for (std::uint64_t pos = off; pos + st.h <= symbols.size();
             pos += st.h) {
            std::int64_t match = -1;
            for (std::uint32_t id = 0; id < st.word_count; ++id) {
                if (std::equal(words[id].begin(), words[id].end(),
                               symbols.begin() + pos)) {
                    match = id;
                    break;
                }
            }
            if (match < 0) { ok = false; break; }
            res.word_ids.push_back(static_cast<std::uint32_t>(match));
        }
        if (ok && !res.word_ids.empty()) hits.push_back(std::move(res));
    }
    if (hits.empty()) throw std::runtime_error("segment does not parse");
    if (hits.size() > 1)
        throw std::runtime_error("ambiguous parse; unique readability violated");
    return hits[0];
}

bool check_R9_single(const ConstructionSequence& seq, std::uint64_t n_plus_1,
                     std::uint32_t word_id,
                     const std::vector<std::uint8_t>& shading) {
    if (n_plus_1 == 0) throw std::invalid_argument("needs a composite stage");
    const Stage& st = seq.stage(n_plus_1);
    const Stage& prev = seq.stage(n_plus_1 - 1);
    if (prev.h > 20)
        throw std::invalid_argument("previous shading space beyond budget");
    if (shading.size() != st.h)
        throw std::invalid_argument("shading length must be h_{n+1}");
    const std::uint64_t hp = prev.h;
    const std::uint64_t variants = std::uint64_t(1) << hp;
    // counts[i][j]: occurrences of previous word i with shading pattern j.
    std::vector<std::vector<std::uint64_t>> counts(
        prev.word_count, std::vector<std::uint64_t>(variants, 0));
    const auto& comps = st.words[word_id];
    for (std::uint64_t c = 0; c < comps.size(); ++c) {
        std::uint64_t pat = 0;
        for (std::uint64_t b = 0; b < hp; ++b)
            pat = (pat << 1) | shading[c * hp + b];
        ++counts[comps[c]][pat];
    }
    // |R/f - 2^-hp| < 2^-hp / 2, i.e. |2 variants R - 2 f| < f.
    for (const auto& row : counts)
        for (std::uint64_t rij : row) {
            BigInt lhs = BigInt(2) * variants * rij - BigInt(2) * st.f;
            if (lhs < 0) lhs = -lhs;
            if (lhs >= st.f) return false;
        }
    return true;
}

R9Report check_R9(const ConstructionSequence& seq, std::uint64_t n_plus_1,
                  std::uint32_t word_id, std::uint64_t samples,
                  std::uint64_t seed) {
    const Stage& st = seq.stage(n_plus_1);
    Rng rng(seed);
    R9Report rep;
    std::vector<std::uint8_t> shading(st.h);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (auto& bit : shading)
            bit = static_cast<std::uint8_t>(rng.next() & 1);
        ++rep.shadings_tested;
        if (check_R9_single(seq, n_plus_1, word_id, shading)) ++rep.passing;
    }
    return rep;
}

}  // namespace fbarlab
