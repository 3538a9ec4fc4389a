#include "fbarlab/involutions.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace fbarlab {

InvolutionGroup build_group(const TreeApproximation& t, std::uint64_t s,
                            std::uint64_t n) {
    InvolutionGroup g;
    g.level = s;
    if (s == 0) return g;  // trivial by definition
    for (std::uint64_t m : t.node_indices) {
        if (m > n) break;
        FiniteSequence seq = canonical_enumeration(m);
        if (seq.size() == s) g.generators.push_back(std::move(seq));
    }
    std::sort(g.generators.begin(), g.generators.end());
    return g;
}

GroupElement make_element(std::vector<FiniteSequence> generators) {
    std::sort(generators.begin(), generators.end());
    for (std::size_t i = 0; i + 1 < generators.size(); ++i)
        if (generators[i] == generators[i + 1])
            throw std::invalid_argument("group element: repeated generator");
    if (!generators.empty()) {
        const std::size_t len = generators.front().size();
        for (const auto& g : generators)
            if (g.size() != len)
                throw std::invalid_argument("group element: mixed generator levels");
    }
    return GroupElement{std::move(generators)};
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
    std::vector<FiniteSequence> out;
    std::set_symmetric_difference(a.generator_subset.begin(), a.generator_subset.end(),
                                  b.generator_subset.begin(), b.generator_subset.end(),
                                  std::back_inserter(out));
    return GroupElement{std::move(out)};
}

bool parity_odd(const GroupElement& e) { return e.generator_subset.size() % 2 == 1; }

GroupElement rho(const GroupElement& e, std::uint64_t from_level,
                 std::uint64_t to_level) {
    if (to_level >= from_level)
        throw std::invalid_argument("rho: target level must be below source level");
    GroupElement out;
    for (const FiniteSequence& g : e.generator_subset) {
        if (g.size() != from_level)
            throw std::invalid_argument("rho: generator level mismatch");
        if (to_level == 0) continue;  // rho to level 0 is trivial
        FiniteSequence prefix(g.begin(), g.begin() + to_level);
        out = compose(out, GroupElement{{std::move(prefix)}});
    }
    return out;
}

void validate_bijective(const ClassTable& table) {
    std::vector<bool> seen(table.size(), false);
    for (std::uint32_t v : table) {
        if (v >= table.size() || seen[v])
            throw std::invalid_argument("action table: not a bijection");
        seen[v] = true;
    }
}

std::vector<std::uint32_t> skew_diagonal_apply(const GroupElement& g,
                                               const std::vector<std::uint32_t>& tuple,
                                               const ClassTable& base_action) {
    std::vector<std::uint32_t> out;
    out.reserve(tuple.size());
    for (std::uint32_t c : tuple) {
        if (c >= base_action.size())
            throw std::invalid_argument("skew_diagonal_apply: class outside domain");
        out.push_back(base_action[c]);
    }
    if (parity_odd(g)) std::reverse(out.begin(), out.end());
    return out;
}

ClassTable GeneratorActions::element_table(const GroupElement& e,
                                           std::uint32_t class_count) const {
    ClassTable out(class_count);
    for (std::uint32_t c = 0; c < class_count; ++c) out[c] = c;
    for (const FiniteSequence& g : e.generator_subset) {
        auto it = by_generator.find(g);
        if (it == by_generator.end())
            throw std::invalid_argument("element_table: unknown generator");
        for (std::uint32_t c = 0; c < class_count; ++c) out[c] = it->second[out[c]];
    }
    return out;
}

std::string actions_to_json(const GeneratorActions& a) {
    nlohmann::json j;
    j["group"] = "involution";
    j["level"] = a.level;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [gen, table] : a.by_generator)
        for (std::uint32_t c = 0; c < table.size(); ++c)
            entries.push_back({gen, c, table[c]});
    j["entries"] = entries;
    return j.dump(2);
}

GeneratorActions actions_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GeneratorActions a;
    a.level = j.at("level").get<std::uint64_t>();
    std::map<FiniteSequence, std::map<std::uint32_t, std::uint32_t>> raw;
    for (const auto& e : j.at("entries")) {
        FiniteSequence gen = e.at(0).get<FiniteSequence>();
        raw[gen][e.at(1).get<std::uint32_t>()] = e.at(2).get<std::uint32_t>();
    }
    for (const auto& [gen, m] : raw) {
        ClassTable t(m.size());
        for (const auto& [c, img] : m) {
            if (c >= t.size())
                throw std::invalid_argument("action json: non-contiguous classes");
            t[c] = img;
        }
        validate_bijective(t);
        a.by_generator[gen] = std::move(t);
    }
    return a;
}

}  // namespace fbarlab
