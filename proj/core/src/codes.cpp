#include "fbarlab/codes.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fbarlab {

std::string code_to_json(const StationaryCode& code) {
    nlohmann::json j;
    j["K"] = code.half_width;
    j["rule"] = code.rule;
    j["constant_symbol"] = code.constant_symbol;
    j["constant_bit"] = code.constant_bit;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : code.entries)
        j["entries"].push_back({{"symbols", e.window.symbols},
                                {"shading", e.window.shading},
                                {"out", {e.out_symbol, e.out_bit}}});
    return j.dump(2);
}

StationaryCode code_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    StationaryCode code;
    code.half_width = j["K"];
    code.rule = j["rule"];
    code.constant_symbol = j.value("constant_symbol", 0u);
    code.constant_bit = static_cast<std::uint8_t>(j.value("constant_bit", 0u));
    for (const auto& e : j.value("entries", nlohmann::json::array())) {
        StationaryCode::Entry entry;
        entry.window.symbols = e["symbols"].get<Word>();
        entry.window.shading = e["shading"].get<std::vector<std::uint8_t>>();
        entry.out_symbol = e["out"][0];
        entry.out_bit = static_cast<std::uint8_t>(e["out"][1].get<unsigned>());
        code.entries.push_back(std::move(entry));
    }
    return code;
}

namespace {

std::pair<Symbol, std::uint8_t> code_at(const StationaryCode& code,
                                        const SString& s, std::uint64_t pos) {
    const std::uint64_t K = code.half_width;
    if (code.rule == "identity") return {s.symbols[pos], s.shading[pos]};
    if (code.rule == "preverse") return {s.symbols[pos] ^ 8u, s.shading[pos]};
    if (code.rule == "constant") return {code.constant_symbol, code.constant_bit};
    if (code.rule == "table") {
        for (const auto& e : code.entries) {
            bool match = true;
            for (std::uint64_t i = 0; i <= 2 * K && match; ++i)
                match = e.window.symbols[i] == s.symbols[pos - K + i] &&
                        e.window.shading[i] == s.shading[pos - K + i];
            if (match) return {e.out_symbol, e.out_bit};
        }
        throw std::runtime_error("code table has no entry for a window");
    }
    throw std::invalid_argument("unknown code rule: " + code.rule);
}

}  // namespace

SString apply_stationary_code(const StationaryCode& code,
                              const SString& segment) {
    const std::uint64_t K = code.half_width;
    if (segment.symbols.size() <= 2 * K)
        throw std::invalid_argument("segment shorter than the code window");
    SString out;
    out.symbols.reserve(segment.symbols.size() - 2 * K);
    out.shading.reserve(segment.symbols.size() - 2 * K);
    for (std::uint64_t pos = K; pos + K < segment.symbols.size(); ++pos) {
        auto [sym, bit] = code_at(code, segment, pos);
        out.symbols.push_back(sym);
        out.shading.push_back(bit);
    }
    return out;
}

std::vector<std::uint8_t> reshuffle_shading(
    const ConstructionSequence& seq, std::uint64_t n, std::uint32_t word_id,
    const std::vector<std::uint8_t>& shading, std::uint64_t source_segment,
    std::uint64_t target_segment) {
    const Stage& st = seq.stage(n);
    if (n == 0) throw std::invalid_argument("needs a composite stage");
    const Stage& prev = seq.stage(n - 1);
    if (shading.size() != st.h)
        throw std::invalid_argument("shading length must be h_n");
    if (source_segment >= st.segment_count || target_segment >= st.segment_count)
        throw std::invalid_argument("segment index out of range");

    // Occurrence lists per substitution instance, in order.
    auto occurrences = [&](std::uint64_t seg) {
        std::map<std::uint16_t, std::vector<std::uint64_t>> occ;
        for (std::uint64_t c = seg * st.segment_len;
             c < (seg + 1) * st.segment_len; ++c)
            occ[st.words[word_id][c]].push_back(c);
        return occ;
    };
    auto src = occurrences(source_segment);
    auto dst = occurrences(target_segment);
    if (src.size() != dst.size())
        throw std::invalid_argument("segments contain different instances");
    std::vector<std::uint8_t> out = shading;
    for (auto& [inst, src_pos] : src) {
        auto it = dst.find(inst);
        if (it == dst.end() || it->second.size() != src_pos.size())
            throw std::invalid_argument(
                "instance counts differ between segments");
        for (std::uint64_t l = 0; l < src_pos.size(); ++l) {
            std::uint64_t a = src_pos[l] * prev.h;
            std::uint64_t b = it->second[l] * prev.h;
            for (std::uint64_t i = 0; i < prev.h; ++i)
                std::swap(out[a + i], out[b + i]);
        }
    }
    return out;
}

AuditReport audit_code(const StationaryCode& code,
                       const ConstructionSequence& seq, std::uint64_t n,
                       std::uint64_t s, std::uint64_t samples,
                       std::uint64_t shadings_per_word, const Rational& epsilon,
                       std::uint64_t seed, std::uint64_t window_cap) {
    const Stage& st = seq.stage(n);
    if (s < 1 || s > st.level)
        throw std::invalid_argument("audit level out of range");
    const std::uint64_t K = code.half_width;
    const std::uint64_t cap = std::min<std::uint64_t>(window_cap, st.h - 2 * K);
    const std::uint64_t start =
        std::max<std::uint64_t>(K, (st.h - cap) / 2);  // window [start, start+cap)

    // Candidate windows of every reversed word, precomputed once.
    std::vector<Word> cand(st.word_count);
    for (std::uint32_t id = 0; id < st.word_count; ++id) {
        Word w = seq.materialize(n, id);
        Word slice;
        slice.reserve(cap);
        for (std::uint64_t i = 0; i < cap; ++i)
            slice.push_back(w[st.h - 1 - (start + i)]);
        cand[id] = std::move(slice);
    }

    // Odd elements of G_s^n.
    const Stage::LevelGens& lg = st.level_gens[s - 1];
    std::vector<GroupElement> odd_elements;
    for (std::uint32_t sub = 1; sub < (1u << lg.nodes.size()); ++sub) {
        if (__builtin_popcount(sub) % 2 == 0) continue;
        std::vector<FiniteSequence> gens;
        for (std::uint32_t i = 0; i < lg.nodes.size(); ++i)
            if (sub & (1u << i)) gens.push_back(lg.nodes[i]);
        odd_elements.push_back(make_element(std::move(gens)));
    }

    Rng rng(seed);
    AuditReport rep;
    rep.n = n;
    rep.s = s;
    std::map<std::string, std::uint64_t> votes;
    for (std::uint64_t sample = 0; sample < samples; ++sample) {
        std::uint32_t id = static_cast<std::uint32_t>(rng.below(st.word_count));
        Word w = seq.materialize(n, id);
        SString input;
        input.symbols.assign(w.begin() + (start - K),
                             w.begin() + (start + cap + K));
        for (std::uint64_t shd = 0; shd < shadings_per_word; ++shd) {
            input.shading.resize(input.symbols.size());
            for (auto& bit : input.shading)
                bit = static_cast<std::uint8_t>(rng.next() & 1);
            SString out = apply_stationary_code(code, input);

            AuditSample res;
            res.word_id = id;
            bool first = true;
            for (std::uint32_t c = 0; c < st.word_count; ++c) {
                // Shading-free projection: exact LCS on the symbol rows.
                std::uint64_t lcs_len = lcs_bitparallel(out.symbols, cand[c]);
                Rational d = Rational(1) -
                             Rational(2 * lcs_len,
                                      out.symbols.size() + cand[c].size());
                if (first || d < res.fbar_value) {
                    res.fbar_value = d;
                    res.best_candidate = c;
                    first = false;
                }
            }
            res.under_epsilon = res.fbar_value < epsilon;
            if (res.under_epsilon) {
                std::uint32_t c_in = st.class_of(id, s);
                std::uint32_t c_out = st.class_of(res.best_candidate, s);
                for (const GroupElement& g : odd_elements) {
                    if (eta_apply(seq, n, g, s, c_in) == c_out) {
                        res.inferred = g;
                        break;
                    }
                }
            }
            if (res.inferred) {
                std::string key;
                for (const auto& gen : res.inferred->generator_subset)
                    key += std::to_string(enumeration_index(gen)) + ",";
                ++votes[key];
            }
            rep.samples.push_back(std::move(res));
        }
    }
    std::uint64_t best_votes = 0;
    std::string best_key;
    for (auto& [key, count] : votes)
        if (count > best_votes) {
            best_votes = count;
            best_key = key;
        }
    if (best_votes > 0) {
        for (const auto& smp : rep.samples)
            if (smp.inferred) {
                std::string key;
                for (const auto& gen : smp.inferred->generator_subset)
                    key += std::to_string(enumeration_index(gen)) + ",";
                if (key == best_key) {
                    rep.modal = smp.inferred;
                    break;
                }
            }
        rep.agree_fraction =
            static_cast<double>(best_votes) / rep.samples.size();
    }
    return rep;
}

}  // namespace fbarlab
