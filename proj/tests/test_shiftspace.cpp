#include "fbarlab/shiftspace.hpp"

#include <doctest.h>

using namespace fbarlab;

namespace {

const ConstructionSequence& root_seq() {
    static ConstructionSequence seq = build_construction_sequence(
        root_only_tree(), 1, ConstructionParams{});
    return seq;
}

}  // namespace

TEST_CASE("sampled points are deterministic and fully shaded") {
    const auto& seq = root_seq();
    SString a = sample_point(seq, 1, 5000, 21);
    SString b = sample_point(seq, 1, 5000, 21);
    SString c = sample_point(seq, 1, 5000, 22);
    CHECK(a == b);
    CHECK(a.symbols != c.symbols);
    CHECK(a.size() == 5000);
    CHECK(a.shading.size() == 5000);
}

TEST_CASE("cylinder measures sum to one") {
    const auto& seq = root_seq();
    const Stage& st = seq.stage(1);
    CHECK(nu_prime(seq, 1) == Rational(1, st.word_count));
    ShadedWord w{0, std::vector<std::uint8_t>(st.h, 0)};
    Rational one_cyl = cylinder_measure(seq, 1, w);
    CHECK(one_cyl * st.word_count * (BigInt(1) << st.h) == 1);
}

TEST_CASE("return times are the gaps between unshaded positions") {
    SString s(Word{1, 1, 1, 1, 1, 1}, {0, 1, 1, 0, 0, 1});
    auto gaps = induced_return_times(s);
    CHECK(gaps == std::vector<std::uint64_t>{3, 1});
}

TEST_CASE("reverse point is an involution reversing both layers") {
    SString s(Word{1, 2, 3}, {1, 0, 0});
    SString r = reverse_point(s);
    CHECK(r.symbols == Word{3, 2, 1});
    CHECK(r.shading == std::vector<std::uint8_t>{0, 0, 1});
    CHECK(reverse_point(r) == s);
}

TEST_CASE("parsing recovers the sampled alignment") {
    const auto& seq = root_seq();
    const Stage& st = seq.stage(1);
    SString seg = sample_point(seq, 1, 4 * st.h, 31);
    ParseResult pr = parse_segment(seq, 1, seg.symbols);
    CHECK(pr.word_ids.size() >= 3);
    for (std::size_t b = 0; b < pr.word_ids.size(); ++b) {
        Word w = seq.materialize(1, pr.word_ids[b]);
        for (std::uint64_t i = 0; i < st.h; ++i)
            CHECK(seg.symbols[pr.offset + b * st.h + i] == w[i]);
    }
    // A segment of repeated symbols parses nowhere.
    CHECK_THROWS(parse_segment(seq, 1, Word(4 * st.h, 3)));
}

TEST_CASE("R9 accepts a balanced shading and rejects a constant one") {
    const auto& seq = root_seq();
    const Stage& st = seq.stage(1);
    // Alternate the single previous-stage shading bit per component.
    std::vector<std::uint8_t> balanced(st.h);
    for (std::uint64_t i = 0; i < st.h; ++i)
        balanced[i] = static_cast<std::uint8_t>(i % 2);
    CHECK(check_R9_single(seq, 1, 0, balanced));
    CHECK(!check_R9_single(seq, 1, 0, std::vector<std::uint8_t>(st.h, 0)));
    R9Report rep = check_R9(seq, 1, 0, 10, 3);
    CHECK(rep.shadings_tested == 10);
    CHECK(rep.passing <= rep.shadings_tested);
}
