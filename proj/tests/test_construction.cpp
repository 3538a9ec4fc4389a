#include "fbarlab/construction.hpp"
#include "fbarlab/wordio.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace fbarlab;

namespace {

ConstructionSequence chain_seq(std::uint64_t n_max = 2) {
    return build_construction_sequence(chain_tree(2), n_max, ConstructionParams{});
}

bool item_fails(const ValidationReport& r, const std::string& name) {
    for (const auto& item : r.items)
        if (item.name == name) return !item.pass;
    return false;
}

}  // namespace

TEST_CASE("stage shapes at desk parameters") {
    auto seq = chain_seq();
    const Stage& s0 = seq.stage(0);
    CHECK(s0.h == 1);
    CHECK(s0.word_count == 16);
    const Stage& s1 = seq.stage(1);
    CHECK(s1.level == 1);
    CHECK(s1.f == 9);
    CHECK(s1.k == 144);
    CHECK(s1.h == 144);
    CHECK(s1.word_count == 256);
    const Stage& s2 = seq.stage(2);
    CHECK(s2.f == 50);
    CHECK(s2.k == 12800);
    CHECK(s2.h == s2.k * s1.h);
}

TEST_CASE("budget guard names the offending stage") {
    try {
        build_construction_sequence(chain_tree(2), 3, ConstructionParams{});
        FAIL("expected a budget error");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("stage 3") != std::string::npos);
    }
}

TEST_CASE("classes and members") {
    auto seq = chain_seq(1);
    const Stage& st = seq.stage(1);
    CHECK(st.class_of(0x4b, 1) == 4);
    CHECK(st.member_of(0x4b) == 0xb);
    CHECK_THROWS(st.class_of(0, 2));
    ClassId c = class_of(seq, 1, 0x4b, 1);
    CHECK(c.ordinal == 4);
    // Rev-classes are identified with the classes of the underlying words.
    ClassId rc = rev_class_of(seq, 1, 0x4b, 1);
    CHECK(rc.ordinal == 4);
}

TEST_CASE("materialize and flatten agree with the component tables") {
    auto seq = chain_seq(1);
    const Stage& st = seq.stage(1);
    Word w = seq.materialize(1, 7);
    REQUIRE(w.size() == st.h);
    for (std::uint64_t i = 0; i < st.k; ++i)
        CHECK(w[i] == st.words[7][i]);
    auto flat = seq.flatten(1, 7, 0);
    REQUIRE(flat.size() == st.k);
    for (std::uint64_t i = 0; i < st.k; ++i)
        CHECK(flat[i] == st.words[7][i]);
}

TEST_CASE("rmap realizes reversal of the symbol involution") {
    auto seq = chain_seq(1);
    const Stage& st = seq.stage(1);
    for (std::uint32_t id = 0; id < st.word_count; ++id) {
        Word w = seq.materialize(1, id);
        Word r = seq.materialize(1, st.rmap[id]);
        REQUIRE(w.size() == r.size());
        for (std::uint64_t i = 0; i < w.size(); ++i)
            CHECK(r[i] == (w[w.size() - 1 - i] ^ 8u));
        CHECK(st.rmap[st.rmap[id]] == id);
    }
}

TEST_CASE("validators accept the builder output") {
    auto seq = chain_seq();
    CHECK(validate_stage(seq, 1).all_pass());
    CHECK(validate_stage(seq, 2).all_pass());
}

TEST_CASE("fault injection: corrupt component breaks uniformity") {
    auto seq = chain_seq(1);
    seq.stages[1].words[3][10] =
        static_cast<std::uint16_t>((seq.stages[1].words[3][10] + 1) % 16);
    auto rep = validate_stage(seq, 1);
    CHECK(!rep.all_pass());
    CHECK(item_fails(rep, "E2"));
}

TEST_CASE("fault injection: duplicated word breaks unique readability") {
    auto seq = chain_seq(1);
    // Make word 1 a shifted copy of word 0 on a long stretch.
    auto& w = seq.stages[1].words;
    for (std::uint64_t i = 0; i + 1 < w[0].size(); ++i) w[1][i] = w[0][i + 1];
    auto rep = validate_stage(seq, 1);
    CHECK(item_fails(rep, "E3"));
}

TEST_CASE("fault injection: broken rmap is reported") {
    auto seq = chain_seq(1);
    std::swap(seq.stages[1].rmap[0], seq.stages[1].rmap[1]);
    auto rep = validate_stage(seq, 1);
    CHECK(item_fails(rep, "RMAP"));
}

TEST_CASE("fault injection: colliding pattern metadata is reported") {
    auto seq = chain_seq(1);
    seq.stages[1].pattern_meta[1] = seq.stages[1].pattern_meta[0];
    auto rep = validate_stage(seq, 1);
    CHECK(item_fails(rep, "PATTERN-INJ"));
}

TEST_CASE("fault injection: zero generator mask breaks freeness") {
    auto seq = chain_seq(1);
    seq.stages[1].level_gens[0].class_masks[0] = 0;
    auto rep = validate_stage(seq, 1);
    CHECK(item_fails(rep, "A7"));
}

TEST_CASE("element class masks compose by xor") {
    auto seq = chain_seq(2);
    const Stage& st = seq.stage(2);
    REQUIRE(st.level_gens.size() == 1);
    REQUIRE(st.level_gens[0].nodes.size() == 1);
    GroupElement g = make_element({st.level_gens[0].nodes[0]});
    CHECK(st.element_class_mask(g, 1) == st.level_gens[0].class_masks[0]);
    CHECK(st.element_class_mask(GroupElement{}, 1) == 0);
}

TEST_CASE("eta is a bijection intertwining the class maps") {
    auto seq = chain_seq(2);
    for (std::uint64_t n : {1, 2}) {
        const Stage& st = seq.stage(n);
        GroupElement g = make_element({st.level_gens[0].nodes[st.spine_gen]});
        std::vector<bool> seen(16, false);
        for (std::uint32_t c = 0; c < 16; ++c) {
            std::uint32_t img = eta_apply(seq, n, g, 1, c);
            CHECK(img < 16);
            CHECK(!seen[img]);
            seen[img] = true;
        }
        // eta_g sends the class of w to the class of the realized reversal.
        for (std::uint32_t id = 0; id < st.word_count; ++id)
            CHECK(eta_apply(seq, n, g, 1, st.class_of(id, 1)) ==
                  st.class_of(st.rmap[id], 1));
    }
}

TEST_CASE("coherent branch isomorphism on the chain") {
    auto seq = chain_seq();
    auto iso = coherent_branch_isomorphism(seq);
    REQUIRE(iso.has_value());
    REQUIRE(iso->size() == 2);
    CHECK(parity_odd((*iso)[0]));
    CHECK(parity_odd((*iso)[1]));
    CHECK((*iso)[0].generator_subset == std::vector<FiniteSequence>{{0}});
    CHECK((*iso)[1].generator_subset == std::vector<FiniteSequence>{{0, 0}});
    CHECK(rho((*iso)[1], 2, 1) == (*iso)[0]);
}

TEST_CASE("no branch isomorphism on the root-only tree") {
    auto seq = build_construction_sequence(root_only_tree(), 2,
                                           ConstructionParams{});
    CHECK(!coherent_branch_isomorphism(seq).has_value());
}

TEST_CASE("save and load round trip bit-identically") {
    auto seq = chain_seq(1);
    std::string dir = (std::filesystem::temp_directory_path() /
                       "fbarlab_roundtrip").string();
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    save_sequence(seq, dir);
    auto seq2 = load_sequence(dir);
    CHECK(seq2.tree == seq.tree);
    REQUIRE(seq2.stages.size() == seq.stages.size());
    for (std::size_t n = 0; n < seq.stages.size(); ++n) {
        CHECK(seq2.stages[n].words == seq.stages[n].words);
        CHECK(seq2.stages[n].rmap == seq.stages[n].rmap);
        CHECK(seq2.stages[n].pattern_meta == seq.stages[n].pattern_meta);
        CHECK(seq2.stages[n].h == seq.stages[n].h);
    }
    CHECK(validate_stage(seq2, 1).all_pass());
    std::filesystem::remove_all(dir);
}

TEST_CASE("builder depends only on tree nodes up to n") {
    TreeApproximation a = chain_tree(2);
    TreeApproximation b = chain_tree(1);
    b.horizon = a.horizon;
    // a and b agree on indices <= 2; (0,0) enters at index 3.
    auto sa = build_construction_sequence(a, 2, ConstructionParams{});
    auto sb = build_construction_sequence(b, 2, ConstructionParams{});
    for (std::uint64_t n = 0; n <= 2; ++n) {
        CHECK(sa.stage(n).words == sb.stage(n).words);
        CHECK(sa.stage(n).rmap == sb.stage(n).rmap);
    }
}
