#include "fbarlab/construction.hpp"

#include "fbarlab/wordio.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fbarlab {

namespace {

std::uint32_t tri(std::uint64_t x, std::uint32_t mod) {
    return static_cast<std::uint32_t>((x * (x + 1) / 2) % mod);
}

// Compress the bits of v selected by mask into the low positions.
std::uint32_t compress_bits(std::uint32_t v, std::uint32_t mask) {
    std::uint32_t out = 0, bit = 1;
    for (std::uint32_t m = 1; m < 16; m <<= 1) {
        if (mask & m) {
            if (v & m) out |= bit;
            bit <<= 1;
        }
    }
    return out;
}

struct GenInfo {
    FiniteSequence node;
    std::uint64_t index = 0;
    std::uint32_t nib = 0;         // birth digit within the parent
    std::uint32_t class_mask = 0;  // cumulative mask on level-s class ids
};

// Generators with index <= n, grouped by level (entry [s-1] is level s).
std::vector<std::vector<GenInfo>> collect_gens(const TreeApproximation& t,
                                               std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, FiniteSequence>> nodes;
    for (std::uint64_t m : t.node_indices)
        if (m >= 1 && m <= n) nodes.push_back({m, canonical_enumeration(m)});
    std::sort(nodes.begin(), nodes.end());

    std::vector<std::vector<GenInfo>> by_level;
    std::map<FiniteSequence, std::uint32_t> mask_of;   // cumulative masks
    std::map<FiniteSequence, std::uint32_t> children;  // birth counters
    mask_of[{}] = 0;
    for (auto& [m, seq] : nodes) {
        FiniteSequence parent(seq.begin(), seq.end() - 1);
        auto pm = mask_of.find(parent);
        if (pm == mask_of.end())
            throw std::runtime_error("tree nodes not prefix-closed at index " +
                                     std::to_string(m));
        std::uint32_t order = children[parent]++;
        if (order >= 4)
            throw std::runtime_error(
                "capacity: more than 4 generators under one parent (index " +
                std::to_string(m) + ")");
        GenInfo g;
        g.node = seq;
        g.index = m;
        g.nib = 8u >> order;
        g.class_mask = (pm->second << 4) | g.nib;
        mask_of[seq] = g.class_mask;
        if (by_level.size() < seq.size()) by_level.resize(seq.size());
        by_level[seq.size() - 1].push_back(g);
    }
    return by_level;
}

void install_gens(Stage& st, const std::vector<std::vector<GenInfo>>& gens) {
    st.level_gens.clear();
    for (std::uint64_t s = 1; s <= st.level; ++s) {
        Stage::LevelGens lg;
        if (s <= gens.size())
            for (const GenInfo& g : gens[s - 1]) {
                lg.nodes.push_back(g.node);
                lg.class_masks.push_back(g.class_mask);
            }
        st.level_gens.push_back(std::move(lg));
    }
    st.spine_gen = (st.level >= 1 && !st.level_gens[0].nodes.empty()) ? 0 : -1;
}

void check_budget(std::uint64_t n, std::uint64_t h, std::uint64_t budget) {
    if (h > budget)
        throw std::runtime_error("pattern budget exceeded at stage " +
                                 std::to_string(n) + ": words need " +
                                 std::to_string(h) + " symbols, budget " +
                                 std::to_string(budget));
}

// New-level stage (n = M(s) with s = prev level + 1). The previous stage
// has a single finest class of 16 words; this stage introduces 16 classes
// of 16 members each. Members of one class differ only by rotations of the
// first and last RM components of every segment, which realizes Q4.
Stage build_stage_new_level(const Stage& prev, std::uint64_t n,
                            const ConstructionParams& params) {
    const std::uint64_t p = params.prime(n - 1);
    Stage st;
    st.n = n;
    st.level = prev.level + 1;
    st.prime_used = p;
    st.f = p * p;
    st.k = 16 * st.f;
    st.h = st.k * prev.h;
    check_budget(n, st.h, params.pattern_budget);
    if (st.level >= 2)
        throw std::runtime_error(
            "capacity: word realization implemented for one class level "
            "(stage " + std::to_string(n) + " would need level " +
            std::to_string(st.level) + ")");
    if (prev.word_count != 16)
        throw std::runtime_error("new-level stage expects 16 previous words");
    st.word_count = 256;
    st.segment_count = p;
    st.segment_len = 16 * p;
    const std::uint64_t rm = (8 * p) >> n;  // epsilon_n * segment_len / 2
    if (rm < 4)
        throw std::runtime_error("capacity: margin too small at stage " +
                                 std::to_string(n));

    st.words.assign(256, {});
    st.pattern_meta.assign(16, {});
    // Seed classes 0..7.
    for (std::uint32_t d = 0; d < 8; ++d) {
        ClassPatternMeta& meta = st.pattern_meta[d];
        std::vector<std::uint16_t> base;
        base.reserve(st.k);
        for (std::uint64_t seg = 0; seg < p; ++seg) {
            // Quadratic in seg: a segment-aligned shift by o would need
            // 3*o*seg constant mod 16 across segments, forcing o = 0.
            std::uint32_t r = static_cast<std::uint32_t>(
                (d + 5 * seg + 3 * seg * (seg + 1) / 2) % 16);
            std::uint64_t m = (((d >> 1) + seg) % 2 == 0) ? p : 1;
            std::uint64_t cycles = p / m;
            meta.type_sig.push_back((seg << 32) | (r << 8) | m);
            std::vector<std::uint16_t> tuple;
            for (std::uint32_t b = 0; b < 16; ++b)
                tuple.push_back(static_cast<std::uint16_t>((r + b) % 16));
            meta.tuples.push_back(tuple);
            for (std::uint64_t c = 0; c < cycles; ++c)
                for (std::uint32_t b = 0; b < 16; ++b)
                    for (std::uint64_t rep = 0; rep < m; ++rep)
                        base.push_back(tuple[b]);
        }
        for (std::uint32_t v = 0; v < 16; ++v) {
            std::vector<std::uint16_t> w = base;
            for (std::uint64_t seg = 0; seg < p; ++seg) {
                auto first = w.begin() + seg * st.segment_len;
                std::rotate(first, first + (v % 4), first + rm);
                auto last = w.begin() + (seg + 1) * st.segment_len;
                std::rotate(last - rm, last - rm + (v / 4), last);
            }
            st.words[(d << 4) | v] = std::move(w);
        }
    }
    // Image classes 8..15 realize reversal: word(D^8, v) has the reversed
    // P-image symbols of word(D, v).
    for (std::uint32_t d = 0; d < 8; ++d) {
        for (std::uint32_t v = 0; v < 16; ++v) {
            const std::vector<std::uint16_t>& src = st.words[(d << 4) | v];
            std::vector<std::uint16_t> w(src.rbegin(), src.rend());
            for (auto& x : w) x = static_cast<std::uint16_t>(prev.rmap[x]);
            st.words[((d ^ 8) << 4) | v] = std::move(w);
        }
        const ClassPatternMeta& sm = st.pattern_meta[d];
        ClassPatternMeta& im = st.pattern_meta[d ^ 8];
        for (std::uint64_t seg = 0; seg < p; ++seg) {
            std::uint64_t mirror = p - 1 - seg;
            im.type_sig.push_back(sm.type_sig[mirror] | (1ull << 63));
            std::vector<std::uint16_t> tuple(sm.tuples[mirror].rbegin(),
                                             sm.tuples[mirror].rend());
            for (auto& c : tuple)
                c = static_cast<std::uint16_t>(prev.rmap[c] >> 4 * prev.level);
            im.tuples.push_back(tuple);
        }
    }
    st.rmap.resize(256);
    for (std::uint32_t w = 0; w < 256; ++w) st.rmap[w] = w ^ 0x80u;
    return st;
}

// Level-free stage (s(n) = 0): 16 words, ids are the member digit alone.
Stage build_stage_flat(const Stage& prev, std::uint64_t n,
                       const ConstructionParams& params) {
    const std::uint64_t p = params.prime(n - 1);
    Stage st;
    st.n = n;
    st.level = 0;
    st.prime_used = p;
    st.f = 2 * p * p;
    st.k = st.f * 16;
    st.h = st.k * prev.h;
    check_budget(n, st.h, params.pattern_budget);
    st.word_count = 16;
    st.segment_count = st.f / 2;
    st.segment_len = 32;
    st.words.assign(16, {});
    st.pattern_meta.assign(1, {});
    for (std::uint32_t v = 0; v < 8; ++v) {
        std::vector<std::uint16_t> w;
        w.reserve(st.k);
        for (std::uint64_t seg = 0; seg < st.segment_count; ++seg)
            for (std::uint32_t y = 0; y < 2; ++y)
                for (std::uint32_t u = 0; u < 16; ++u)
                    w.push_back(
                        static_cast<std::uint16_t>((u + v + tri(seg, 16)) % 16));
        st.words[v] = std::move(w);
    }
    for (std::uint32_t v = 0; v < 8; ++v) {
        const std::vector<std::uint16_t>& src = st.words[v];
        std::vector<std::uint16_t> w(src.rbegin(), src.rend());
        for (auto& x : w) x = static_cast<std::uint16_t>(prev.rmap[x]);
        st.words[v ^ 8] = std::move(w);
    }
    ClassPatternMeta& meta = st.pattern_meta[0];
    for (std::uint64_t seg = 0; seg < st.segment_count; ++seg) {
        meta.type_sig.push_back((seg << 32) | tri(seg, 16));
        std::vector<std::uint16_t> tuple;
        for (std::uint32_t u = 0; u < 16; ++u)
            tuple.push_back(static_cast<std::uint16_t>((u + tri(seg, 16)) % 16));
        meta.tuples.push_back(tuple);
    }
    st.rmap.resize(16);
    for (std::uint32_t w = 0; w < 16; ++w) st.rmap[w] = w ^ 8u;
    return st;
}

// Stage with an existing class level (s(n) = s(n-1) = 1, n > M(1)). The
// class skeletons traverse cosets of the kernel subgroup spanned by the
// level-1 generator masks present at stage n-1. The second half of every
// word is the previous stage's reversal map applied to the mirrored first
// half, so rev(P(sym(w))) = sym(w) and the stage is reversal-ready without
// look-ahead. The skeleton family is closed under every generator mask,
// which gives the skew-diagonal closure exactly.
Stage build_stage_continue(const Stage& prev, std::uint64_t n,
                           const ConstructionParams& params,
                           const std::vector<std::vector<GenInfo>>& gens) {
    const std::uint64_t p = params.prime(n - 1);
    Stage st;
    st.n = n;
    st.level = prev.level;
    st.prime_used = p;
    st.f = 2 * p * p;
    st.k = st.f * prev.word_count;
    st.h = st.k * prev.h;
    check_budget(n, st.h, params.pattern_budget);
    if (st.level != 1)
        throw std::runtime_error(
            "capacity: word realization implemented for one class level "
            "(stage " + std::to_string(n) + ")");
    st.word_count = 256;

    std::vector<std::uint32_t> basis;  // level-1 masks present at stage n-1
    if (!gens.empty())
        for (const GenInfo& g : gens[0])
            if (g.index <= n - 1) basis.push_back(g.class_mask);
    std::sort(basis.rbegin(), basis.rend());
    const std::uint32_t t = static_cast<std::uint32_t>(basis.size());
    if (t == 0)
        throw std::runtime_error("continuation stage requires a realized "
                                 "level-1 generator");
    std::uint32_t km = 0;
    for (std::uint32_t m : basis) km |= m;
    const std::uint32_t nn = 16u >> t;  // classes per coset tuple
    st.segment_count = st.f << (t - 1);
    st.segment_len = 32 * nn;

    // e_K: expand a t-bit index onto the basis masks.
    auto expand = [&](std::uint32_t rbits) {
        std::uint32_t out = 0;
        for (std::uint32_t i = 0; i < t; ++i)
            if (rbits & (1u << i)) out |= basis[t - 1 - i];
        return out;
    };
    std::vector<std::uint16_t> reps;  // classes with kernel bits zero
    for (std::uint32_t c = 0; c < 16; ++c)
        if ((c & km) == 0) reps.push_back(static_cast<std::uint16_t>(c));

    const std::uint64_t half = st.segment_count / 2;
    st.words.assign(256, {});
    st.pattern_meta.assign(16, {});
    for (std::uint32_t d = 0; d < 16; ++d) {
        std::uint32_t j = compress_bits(d, ~km & 15u);
        ClassPatternMeta& meta = st.pattern_meta[d];
        meta.type_sig.resize(st.segment_count);
        meta.tuples.resize(st.segment_count);
        for (std::uint64_t seg = 0; seg < half; ++seg) {
            std::uint32_t kappa =
                (d & km) ^ expand(static_cast<std::uint32_t>(seg % (1u << t)));
            std::uint32_t rot = (3 * j + 5 * seg + tri(seg, nn)) % nn;
            meta.type_sig[seg] = (seg << 32) | (j << 8) | rot;
            std::vector<std::uint16_t>& tuple = meta.tuples[seg];
            for (std::uint32_t i = 0; i < nn; ++i)
                tuple.push_back(
                    static_cast<std::uint16_t>(reps[(i + rot) % nn] | kappa));
        }
        for (std::uint64_t seg = half; seg < st.segment_count; ++seg) {
            std::uint64_t mirror = st.segment_count - 1 - seg;
            meta.type_sig[seg] = meta.type_sig[mirror] | (1ull << 63);
            std::vector<std::uint16_t> tuple(meta.tuples[mirror].rbegin(),
                                             meta.tuples[mirror].rend());
            for (auto& c : tuple)
                c = static_cast<std::uint16_t>(
                    prev.rmap[static_cast<std::uint32_t>(c) << 4] >> 4);
            meta.tuples[seg] = std::move(tuple);
        }
        for (std::uint32_t v = 0; v < 16; ++v) {
            std::vector<std::uint16_t> w;
            w.reserve(st.k);
            for (std::uint64_t seg = 0; seg < half; ++seg)
                for (std::uint32_t y = 0; y < 2; ++y)
                    for (std::uint32_t i = 0; i < nn; ++i)
                        for (std::uint32_t u = 0; u < 16; ++u)
                            w.push_back(static_cast<std::uint16_t>(
                                (static_cast<std::uint32_t>(
                                     meta.tuples[seg][i])
                                 << 4) |
                                ((u + v + tri(seg, 16)) % 16)));
            // Mirror half: previous reversal map of the reflected prefix.
            for (std::uint64_t pos = st.k / 2; pos < st.k; ++pos)
                w.push_back(static_cast<std::uint16_t>(
                    prev.rmap[w[st.k - 1 - pos]]));
            st.words[(d << 4) | v] = std::move(w);
        }
    }
    st.rmap.resize(256);
    for (std::uint32_t w = 0; w < 256; ++w) st.rmap[w] = w;  // P-palindromes
    return st;
}

Stage build_stage(const TreeApproximation& t, const Stage& prev,
                  std::uint64_t n, const ConstructionParams& params) {
    std::uint64_t s_n = level_map_s(t, n);
    auto gens = collect_gens(t, n);
    Stage st;
    if (s_n == prev.level + 1)
        st = build_stage_new_level(prev, n, params);
    else if (s_n == 0)
        st = build_stage_flat(prev, n, params);
    else if (s_n == prev.level)
        st = build_stage_continue(prev, n, params, gens);
    else
        throw std::runtime_error("level map not continuous at stage " +
                                 std::to_string(n));
    install_gens(st, gens);
    return st;
}

}  // namespace

std::uint64_t ConstructionParams::prime(std::uint64_t n) const {
    if (n >= prime_schedule.size())
        throw std::runtime_error("prime schedule exhausted at index " +
                                 std::to_string(n));
    return prime_schedule[n];
}

Rational ConstructionParams::epsilon(std::uint64_t n) const {
    return Rational(1, BigInt(1) << n);
}

std::uint64_t ConstructionParams::separation_R(std::uint64_t n) const {
    return std::uint64_t(1) << n;
}

void ConstructionParams::validate() const {
    if (alphabet_size != 16 || e_value != 1)
        throw std::runtime_error(
            "only the 16-symbol, single-split schedule is implemented");
    std::uint64_t last = 2;
    for (std::uint64_t p : prime_schedule) {
        if (p <= last) throw std::runtime_error("prime schedule not increasing");
        last = p;
    }
    if (pattern_budget < 16) throw std::runtime_error("pattern budget too small");
}

std::uint32_t Stage::class_of(std::uint32_t word_id, std::uint64_t s) const {
    if (s > level)
        throw std::invalid_argument("class level " + std::to_string(s) +
                                    " beyond stage level " +
                                    std::to_string(level));
    return word_id >> (4 * (level + 1 - s));
}

std::uint32_t Stage::element_class_mask(const GroupElement& e,
                                        std::uint64_t s) const {
    if (s == 0 || s > level)
        throw std::invalid_argument("no class action at level " +
                                    std::to_string(s));
    std::uint32_t mask = 0;
    for (const FiniteSequence& g : e.generator_subset) {
        if (g.size() != s)
            throw std::invalid_argument("element mixes generator levels");
        const Stage::LevelGens& lg = level_gens[s - 1];
        auto it = std::find(lg.nodes.begin(), lg.nodes.end(), g);
        if (it == lg.nodes.end())
            throw std::invalid_argument("generator not present at this stage");
        mask ^= lg.class_masks[it - lg.nodes.begin()];
    }
    return mask;
}

Word ConstructionSequence::materialize(std::uint64_t n,
                                       std::uint32_t word_id) const {
    const Stage& st = stage(n);
    if (word_id >= st.word_count)
        throw std::invalid_argument("word id out of range");
    if (n == 0) return Word{word_id};
    if (cache_.size() < stages.size()) cache_.resize(stages.size());
    bool cacheable = st.h * st.word_count <= 64000000ull;
    if (cacheable && !cache_[n].empty() && !cache_[n][word_id].empty())
        return cache_[n][word_id];
    Word out;
    out.reserve(st.h);
    for (std::uint16_t comp : st.words[word_id]) {
        Word part = materialize(n - 1, comp);
        out.insert(out.end(), part.begin(), part.end());
    }
    if (cacheable) {
        if (cache_[n].empty()) cache_[n].resize(st.word_count);
        cache_[n][word_id] = out;
    }
    return out;
}

std::vector<std::uint32_t> ConstructionSequence::flatten(
    std::uint64_t n, std::uint32_t word_id, std::uint64_t m) const {
    if (m > n) throw std::invalid_argument("flatten target above stage");
    if (m == n) return {word_id};
    const Stage& st = stage(n);
    std::vector<std::uint32_t> out;
    for (std::uint16_t comp : st.words[word_id]) {
        auto part = flatten(n - 1, comp, m);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

ConstructionSequence build_construction_sequence(
    const TreeApproximation& t, std::uint64_t n_max,
    const ConstructionParams& params) {
    validate_tree(t);
    params.validate();
    ConstructionSequence seq;
    seq.tree = t;
    seq.params = params;

    Stage s0;
    s0.n = 0;
    s0.level = 0;
    s0.h = 1;
    s0.k = 0;
    s0.f = 0;
    s0.word_count = 16;
    s0.words.assign(16, {});
    for (std::uint32_t v = 0; v < 16; ++v) s0.words[v] = {static_cast<std::uint16_t>(v)};
    s0.rmap.resize(16);
    for (std::uint32_t v = 0; v < 16; ++v) s0.rmap[v] = v ^ 8u;
    s0.pattern_meta.assign(1, {});
    seq.stages.push_back(std::move(s0));

    for (std::uint64_t n = 1; n <= n_max; ++n)
        seq.stages.push_back(build_stage(t, seq.stages.back(), n, params));
    return seq;
}

bool ValidationReport::all_pass() const {
    for (const Item& i : items)
        if (!i.pass) return false;
    return true;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const Item& i : items) {
        os << i.name << ": " << (i.pass ? "pass" : "FAIL");
        if (!i.detail.empty()) os << " (" << i.detail << ")";
        os << "\n";
    }
    return os.str();
}

namespace {

void add(ValidationReport& r, const std::string& name, bool pass,
         const std::string& detail = "") {
    r.items.push_back({name, pass, detail});
}

// Spanned subgroup membership over F2 masks, by elimination.
bool in_span(std::uint32_t v, const std::vector<std::uint32_t>& basis) {
    std::vector<std::uint32_t> pivots;
    for (std::uint32_t b : basis) {
        std::uint32_t x = b;
        for (std::uint32_t pv : pivots)
            x = std::min(x, x ^ pv);
        if (x) pivots.push_back(x);
    }
    std::uint32_t x = v;
    for (std::uint32_t pv : pivots) x = std::min(x, x ^ pv);
    return x == 0;
}

}  // namespace

ValidationReport validate_stage(const ConstructionSequence& seq,
                                std::uint64_t n) {
    ValidationReport r;
    const Stage& st = seq.stage(n);
    if (n == 0) {
        add(r, "E1", st.word_count == 16 && st.h == 1, "base alphabet");
        return r;
    }
    const Stage& prev = seq.stage(n - 1);
    const std::uint64_t k = st.k;

    // E1: uniform length, power-of-two count.
    bool e1 = st.h == k * prev.h &&
              (st.word_count & (st.word_count - 1)) == 0;
    for (const auto& w : st.words) e1 = e1 && w.size() == k;
    add(r, "E1", e1);

    // E2: every previous word occurs exactly f times in every word.
    bool e2 = k == st.f * prev.word_count;
    std::uint64_t pp = st.prime_used * st.prime_used;
    std::uint64_t fq = st.f;
    while (fq % 2 == 0) fq /= 2;
    e2 = e2 && fq == pp;
    for (const auto& w : st.words) {
        std::vector<std::uint64_t> counts(prev.word_count, 0);
        for (std::uint16_t c : w) {
            if (c >= prev.word_count) { e2 = false; break; }
            ++counts[c];
        }
        for (std::uint64_t c : counts) e2 = e2 && c == st.f;
        if (!e2) break;
    }
    add(r, "E2", e2);

    // E3: no overlap of >= k/2 component words under any nonzero shift,
    // over all ordered pairs including a word against itself.
    bool e3 = true;
    std::string e3_detail;
    for (std::uint32_t a = 0; a < st.word_count && e3; ++a) {
        const auto& u = st.words[a];
        for (std::uint32_t b = 0; b < st.word_count && e3; ++b) {
            const auto& w = st.words[b];
            std::uint64_t max_shift = k - k / 2;
            for (std::uint64_t delta = 1; delta <= max_shift; ++delta) {
                if (std::equal(u.begin() + delta, u.end(), w.begin())) {
                    e3 = false;
                    e3_detail = "words " + std::to_string(a) + "," +
                                std::to_string(b) + " overlap at shift " +
                                std::to_string(delta);
                    break;
                }
            }
        }
    }
    add(r, "E3", e3, e3_detail);

    const bool new_level = st.level == prev.level + 1;

    // Q4: at a level-creating stage, same-class members agree away from
    // the segment margins, and the margins fit the epsilon bound.
    if (new_level) {
        std::uint64_t rm = (8 * st.prime_used) >> n;
        bool q4 = rm * prev.h * st.segment_count * (std::uint64_t(2) << n) <=
                  st.h;
        for (std::uint32_t cls = 0; cls < 16 && q4; ++cls) {
            const auto& w0 = st.words[cls << 4];
            for (std::uint32_t v = 1; v < 16 && q4; ++v) {
                const auto& wv = st.words[(cls << 4) | v];
                for (std::uint64_t seg = 0; seg < st.segment_count; ++seg) {
                    auto lo = seg * st.segment_len + rm;
                    auto hi = (seg + 1) * st.segment_len - rm;
                    for (std::uint64_t i = lo; i < hi; ++i)
                        if (w0[i] != wv[i]) { q4 = false; break; }
                    if (!q4) break;
                }
            }
        }
        add(r, "Q4", q4);
    }

    if (st.level >= 1) {
        // Q5: beyond the creating stage, the finest classes are exactly the
        // product relation of the previous finest classes over components.
        if (!new_level) {
            bool q5 = true;
            std::map<std::vector<std::uint32_t>, std::set<std::uint32_t>>
                by_skel;
            for (std::uint32_t w = 0; w < st.word_count; ++w) {
                std::vector<std::uint32_t> skel;
                skel.reserve(k);
                for (std::uint16_t c : st.words[w])
                    skel.push_back(prev.class_of(c, prev.level));
                by_skel[skel].insert(st.class_of(w, st.level));
            }
            std::set<std::uint32_t> seen;
            for (auto& [skel, classes] : by_skel) {
                q5 = q5 && classes.size() == 1;
                for (std::uint32_t c : classes) {
                    q5 = q5 && seen.insert(c).second;
                }
            }
            q5 = q5 && seen.size() == st.class_count(st.level);
            add(r, "Q5", q5);
        }

        // Q6: each class splits into exactly 16 finer classes (and each
        // finest class into 16 members).
        bool q6 = st.word_count == (16u << (4 * st.level));
        for (std::uint64_t s = 0; s < st.level; ++s) {
            std::map<std::uint32_t, std::set<std::uint32_t>> split;
            for (std::uint32_t w = 0; w < st.word_count; ++w)
                split[st.class_of(w, s)].insert(st.class_of(w, s + 1));
            q6 = q6 && split.size() == st.class_count(s);
            for (auto& [c, fine] : split) q6 = q6 && fine.size() == 16;
        }
        add(r, "Q6", q6);

        // A7: the groups act freely (every nonidentity element mask is a
        // nonzero class permutation) and subordinately across levels.
        bool a7 = true;
        for (std::uint64_t s = 1; s <= st.level; ++s) {
            const auto& lg = st.level_gens[s - 1];
            std::uint32_t m = static_cast<std::uint32_t>(lg.nodes.size());
            for (std::uint32_t sub = 1; sub < (1u << m); ++sub) {
                std::uint32_t mask = 0;
                for (std::uint32_t i = 0; i < m; ++i)
                    if (sub & (1u << i)) mask ^= lg.class_masks[i];
                a7 = a7 && mask != 0;
            }
            if (s >= 2) {
                const auto& coarse = st.level_gens[s - 2];
                for (std::uint32_t i = 0; i < m; ++i) {
                    FiniteSequence parent(lg.nodes[i].begin(),
                                          lg.nodes[i].end() - 1);
                    auto it = std::find(coarse.nodes.begin(),
                                        coarse.nodes.end(), parent);
                    a7 = a7 && it != coarse.nodes.end() &&
                         coarse.class_masks[it - coarse.nodes.begin()] ==
                             lg.class_masks[i] >> 4;
                }
            }
        }
        add(r, "A7", a7);

        // A8: the level-s skeleton family is closed under the componentwise
        // action of every element of the groups realized at stage n-1.
        for (std::uint64_t s = 1; s <= st.level; ++s) {
            std::vector<std::uint32_t> masks;
            for (std::uint32_t i = 0; i < st.level_gens[s - 1].nodes.size();
                 ++i) {
                if (enumeration_index(st.level_gens[s - 1].nodes[i]) <= n - 1)
                    masks.push_back(st.level_gens[s - 1].class_masks[i]);
            }
            if (masks.empty()) {
                add(r, "A8", true, "level " + std::to_string(s) + " vacuous");
                continue;
            }
            std::set<std::vector<std::uint32_t>> skels;
            std::vector<std::vector<std::uint32_t>> all;
            for (std::uint32_t w = 0; w < st.word_count; ++w) {
                std::vector<std::uint32_t> skel;
                skel.reserve(k);
                for (std::uint16_t c : st.words[w])
                    skel.push_back(prev.class_of(c, s));
                if (skels.insert(skel).second) all.push_back(std::move(skel));
            }
            bool a8 = true;
            std::uint32_t m = static_cast<std::uint32_t>(masks.size());
            for (std::uint32_t sub = 1; sub < (1u << m) && a8; ++sub) {
                std::uint32_t mu = 0;
                for (std::uint32_t i = 0; i < m; ++i)
                    if (sub & (1u << i)) mu ^= masks[i];
                for (const auto& skel : all) {
                    std::vector<std::uint32_t> image = skel;
                    for (auto& c : image) c ^= mu;
                    if (!skels.count(image)) { a8 = false; break; }
                }
            }
            add(r, "A8", a8, "level " + std::to_string(s));
        }
    }

    // Remark 5.2: within every segment of every word, the members of each
    // previous class present occur uniformly, and segments sharing a type
    // signature have identical composition vectors.
    bool r52 = true;
    for (std::uint32_t w = 0; w < st.word_count && r52; ++w) {
        const ClassPatternMeta& meta =
            st.pattern_meta[st.level == 0 ? 0 : st.class_of(w, st.level)];
        std::map<std::uint64_t, std::vector<std::uint64_t>> sig_counts;
        for (std::uint64_t seg = 0; seg < st.segment_count && r52; ++seg) {
            std::vector<std::uint64_t> counts(prev.word_count, 0);
            for (std::uint64_t i = seg * st.segment_len;
                 i < (seg + 1) * st.segment_len; ++i)
                ++counts[st.words[w][i]];
            if (prev.level >= 1) {
                for (std::uint32_t c = 0; c < prev.class_count(prev.level);
                     ++c) {
                    std::uint64_t mn = UINT64_MAX, mx = 0;
                    for (std::uint32_t v = 0; v < 16; ++v) {
                        std::uint64_t cnt = counts[(c << 4) | v];
                        mn = std::min(mn, cnt);
                        mx = std::max(mx, cnt);
                    }
                    r52 = r52 && (mx == 0 || mn == mx);
                }
            }
            auto [it, fresh] =
                sig_counts.try_emplace(meta.type_sig[seg], counts);
            if (!fresh) r52 = r52 && it->second == counts;
        }
    }
    add(r, "R5.2", r52);

    // Reversal realization: sym(rmap(w)) = rev(P(sym(w))) for every word.
    bool rev_ok = true;
    for (std::uint32_t w = 0; w < st.word_count && rev_ok; ++w) {
        Word a = seq.materialize(n, w);
        Word b = seq.materialize(n, st.rmap[w]);
        std::uint64_t len = a.size();
        for (std::uint64_t i = 0; i < len; ++i)
            if (b[i] != (a[len - 1 - i] ^ 8u)) { rev_ok = false; break; }
    }
    add(r, "RMAP", rev_ok);

    // Pattern-structure injectivity: distinct finest classes share a type
    // signature only along a group orbit, and then with disjoint tuples.
    if (st.level >= 1) {
        std::vector<std::uint32_t> masks;
        if (!st.level_gens.empty())
            for (std::uint32_t i = 0; i < st.level_gens[0].nodes.size(); ++i)
                if (enumeration_index(st.level_gens[0].nodes[i]) <= n - 1)
                    masks.push_back(st.level_gens[0].class_masks[i]);
        bool inj = true;
        for (std::uint32_t c1 = 0; c1 < 16 && inj; ++c1)
            for (std::uint32_t c2 = c1 + 1; c2 < 16 && inj; ++c2) {
                if (st.pattern_meta[c1].type_sig !=
                    st.pattern_meta[c2].type_sig)
                    continue;
                inj = in_span(c1 ^ c2, masks);
                for (std::uint64_t seg = 0;
                     seg < st.segment_count && inj; ++seg) {
                    std::set<std::uint16_t> s1(
                        st.pattern_meta[c1].tuples[seg].begin(),
                        st.pattern_meta[c1].tuples[seg].end());
                    for (std::uint16_t c : st.pattern_meta[c2].tuples[seg])
                        inj = inj && !s1.count(c);
                }
            }
        add(r, "PATTERN-INJ", inj);
    }
    return r;
}

ClassId class_of(const ConstructionSequence& seq, std::uint64_t n,
                 std::uint32_t word_id, std::uint64_t s) {
    return {n, s, seq.stage(n).class_of(word_id, s)};
}

ClassId rev_class_of(const ConstructionSequence& seq, std::uint64_t n,
                     std::uint32_t word_id, std::uint64_t s) {
    // rev-classes are identified with the classes of the underlying words.
    return {n, s, seq.stage(n).class_of(word_id, s)};
}

std::uint32_t eta_apply(const ConstructionSequence& seq, std::uint64_t n,
                        const GroupElement& g, std::uint64_t s,
                        std::uint32_t class_id) {
    const Stage& st = seq.stage(n);
    if (!parity_odd(g)) throw std::invalid_argument("eta requires odd parity");
    if (st.spine_gen < 0)
        throw std::invalid_argument("no realized reversal at this stage");
    std::uint32_t mu = st.element_class_mask(g, s);
    std::uint32_t psi = st.rmap[0] >> (4 * (st.level + 1 - s));
    std::uint32_t spine = 8u << (4 * (s - 1));
    return class_id ^ psi ^ spine ^ mu;
}

std::optional<std::vector<GroupElement>> coherent_branch_isomorphism(
    const ConstructionSequence& seq) {
    Branch branch = longest_branch(seq.tree);
    if (branch.empty()) return std::nullopt;
    std::vector<GroupElement> gs;
    for (std::uint64_t s = 1; s <= branch.size(); ++s)
        gs.push_back(make_element({FiniteSequence(branch.begin(),
                                                  branch.begin() + s)}));
    // Verify coherence and the eta tables wherever classes exist.
    for (std::uint64_t s = 1; s < gs.size(); ++s)
        if (!(rho(gs[s], s + 1, s) == gs[s - 1])) return std::nullopt;
    for (std::uint64_t n = 1; n < seq.stages.size(); ++n) {
        const Stage& st = seq.stage(n);
        for (std::uint64_t s = 1; s <= std::min<std::uint64_t>(st.level,
                                                               gs.size());
             ++s) {
            if (enumeration_index(gs[s - 1].generator_subset[0]) > n) continue;
            ClassTable table(st.class_count(s));
            for (std::uint32_t c = 0; c < table.size(); ++c)
                table[c] = eta_apply(seq, n, gs[s - 1], s, c);
            validate_bijective(table);
            if (s >= 2) {
                // Refinement compatibility with the coarser eta.
                for (std::uint32_t c = 0; c < table.size(); ++c)
                    if (table[c] >> 4 !=
                        eta_apply(seq, n, gs[s - 2], s - 1, c >> 4))
                        return std::nullopt;
            }
        }
    }
    return gs;
}

void save_sequence(const ConstructionSequence& seq, const std::string& dir) {
    nlohmann::json j;
    j["tree"] = nlohmann::json::parse(tree_to_json(seq.tree));
    j["params"] = {
        {"alphabet_size", seq.params.alphabet_size},
        {"e_value", seq.params.e_value},
        {"prime_schedule", seq.params.prime_schedule},
        {"pattern_budget", seq.params.pattern_budget},
        {"seed", seq.params.seed},
    };
    j["stages"] = nlohmann::json::array();
    for (std::uint64_t n = 0; n < seq.stages.size(); ++n) {
        const Stage& st = seq.stages[n];
        nlohmann::json js;
        js["n"] = st.n;
        js["level"] = st.level;
        js["h"] = st.h;
        js["k"] = st.k;
        js["f"] = st.f;
        js["prime_used"] = st.prime_used;
        js["word_count"] = st.word_count;
        js["segment_count"] = st.segment_count;
        js["segment_len"] = st.segment_len;
        js["spine_gen"] = st.spine_gen;
        js["rmap"] = st.rmap;
        js["level_gens"] = nlohmann::json::array();
        for (const auto& lg : st.level_gens)
            js["level_gens"].push_back(
                {{"nodes", lg.nodes}, {"class_masks", lg.class_masks}});
        js["pattern_meta"] = nlohmann::json::array();
        for (const auto& m : st.pattern_meta)
            js["pattern_meta"].push_back(
                {{"type_sig", m.type_sig}, {"tuples", m.tuples}});
        std::string words_file = "stage_" + std::to_string(n) + ".comps";
        js["words_file"] = words_file;
        std::vector<SString> lines;
        for (const auto& w : st.words) {
            SString s;
            s.symbols.assign(w.begin(), w.end());
            lines.push_back(std::move(s));
        }
        write_words_file(dir + "/" + words_file, lines);
        j["stages"].push_back(std::move(js));
    }
    write_text_file(dir + "/manifest.json", j.dump(2));
}

ConstructionSequence load_sequence(const std::string& dir) {
    nlohmann::json j = nlohmann::json::parse(read_text_file(dir + "/manifest.json"));
    ConstructionSequence seq;
    seq.tree = tree_from_json(j["tree"].dump());
    const auto& p = j["params"];
    seq.params.alphabet_size = p["alphabet_size"];
    seq.params.e_value = p["e_value"];
    seq.params.prime_schedule =
        p["prime_schedule"].get<std::vector<std::uint64_t>>();
    seq.params.pattern_budget = p["pattern_budget"];
    seq.params.seed = p["seed"];
    for (const auto& js : j["stages"]) {
        Stage st;
        st.n = js["n"];
        st.level = js["level"];
        st.h = js["h"];
        st.k = js["k"];
        st.f = js["f"];
        st.prime_used = js["prime_used"];
        st.word_count = js["word_count"];
        st.segment_count = js["segment_count"];
        st.segment_len = js["segment_len"];
        st.spine_gen = js["spine_gen"];
        st.rmap = js["rmap"].get<std::vector<std::uint32_t>>();
        for (const auto& lg : js["level_gens"]) {
            Stage::LevelGens out;
            out.nodes = lg["nodes"].get<std::vector<FiniteSequence>>();
            out.class_masks =
                lg["class_masks"].get<std::vector<std::uint32_t>>();
            st.level_gens.push_back(std::move(out));
        }
        for (const auto& m : js["pattern_meta"]) {
            ClassPatternMeta meta;
            meta.type_sig = m["type_sig"].get<std::vector<std::uint64_t>>();
            meta.tuples =
                m["tuples"].get<std::vector<std::vector<std::uint16_t>>>();
            st.pattern_meta.push_back(std::move(meta));
        }
        for (const SString& s :
             read_words_file(dir + "/" + js["words_file"].get<std::string>())) {
            std::vector<std::uint16_t> w(s.symbols.begin(), s.symbols.end());
            st.words.push_back(std::move(w));
        }
        seq.stages.push_back(std::move(st));
    }
    return seq;
}

}  // namespace fbarlab
