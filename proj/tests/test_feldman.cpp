#include "fbarlab/fbar.hpp"
#include "fbarlab/feldman.hpp"

#include <doctest.h>

using namespace fbarlab;

namespace {

FeldmanSpec tiny_spec() {
    FeldmanSpec spec;
    spec.T = 1;
    spec.N = 2;
    spec.M = 1;
    spec.L = 1;
    spec.blocks = {Word{0}, Word{1}};
    return spec;
}

}  // namespace

TEST_CASE("hand expansion of the smallest spec") {
    FeldmanSpec spec = tiny_spec();
    CHECK(pattern_length(spec) == 32);
    Word p = build_pattern(spec, 1);
    Word cycle = {0, 0, 0, 0, 1, 1, 1, 1};
    Word expect;
    for (int i = 0; i < 4; ++i) expect.insert(expect.end(), cycle.begin(), cycle.end());
    CHECK(p == expect);
    CHECK(cycle_count(spec, 1) == 4);
    CHECK(cycle_length(spec, 1) == 8);
}

TEST_CASE("all types share the pattern length and block counts") {
    FeldmanSpec spec;
    spec.T = 2;
    spec.N = 3;
    spec.M = 2;
    spec.L = 2;
    for (Symbol s = 0; s < 3; ++s) spec.blocks.push_back(Word{s, s});
    for (std::uint64_t r = 1; r <= spec.M; ++r) {
        Word p = build_pattern(spec, r, 10000000);
        CHECK(p.size() == pattern_length(spec));
        CHECK(cycle_count(spec, r) * cycle_length(spec, r) == p.size());
        // Every block occurs T*N^(2M+2) times regardless of type.
        std::uint64_t per_block = spec.T;
        for (std::uint64_t i = 0; i < 2 * spec.M + 2; ++i) per_block *= spec.N;
        std::vector<std::uint64_t> counts(3, 0);
        for (std::size_t i = 0; i < p.size(); i += 2) {
            CHECK(p[i] == p[i + 1]);
            ++counts[p[i]];
        }
        for (auto c : counts) CHECK(c == per_block);
    }
}

TEST_CASE("substring extraction never materializes the pattern") {
    FeldmanSpec spec;
    spec.T = 1;
    spec.N = 4;
    spec.M = 2;
    spec.L = 1;
    for (Symbol s = 0; s < 4; ++s) spec.blocks.push_back(Word{s});
    Word full = build_pattern(spec, 2, 1u << 21);
    for (auto [start, len] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {0, 64}, {1000, 999}, {full.size() - 17, 17}, {12288, 4096}}) {
        RleWord sub = pattern_substring_rle(spec, 2, start, len);
        Word w = rle_decode(sub);
        CHECK(w == Word(full.begin() + start, full.begin() + start + len));
    }
    CHECK_THROWS(pattern_substring_rle(spec, 2, full.size() - 1, 2));
}

TEST_CASE("budget guard") {
    FeldmanSpec spec = tiny_spec();
    spec.M = 8;
    CHECK_THROWS(build_pattern(spec, 1, 1000));
}

TEST_CASE("substitute blocks") {
    std::map<Symbol, Word> bm = {{1, {7, 8}}, {2, {9, 9}}};
    CHECK(substitute_blocks(Word{1, 2, 1}, bm) == Word{7, 8, 9, 9, 7, 8});
    CHECK(substitute_blocks(Word{}, bm).empty());
    CHECK_THROWS(substitute_blocks(Word{3}, bm));
}

TEST_CASE("separation report is deterministic and positive") {
    FeldmanSpec spec;
    spec.T = 1;
    spec.N = 2;
    spec.M = 2;
    spec.L = 1;
    spec.blocks = {Word{0}, Word{1}};
    auto r1 = separation_report(spec, 16, 12, 99);
    auto r2 = separation_report(spec, 16, 12, 99);
    CHECK(r1.alpha_measured == r2.alpha_measured);
    CHECK(r1.sample_count == r2.sample_count);
    CHECK(r1.alpha_measured > 0);
    Rational lo(1);
    for (auto& p : r1.pairs_tested) {
        CHECK(p.type_r != p.type_k);
        if (p.min_fbar < lo) lo = p.min_fbar;
    }
    CHECK(lo == r1.alpha_measured);
}
