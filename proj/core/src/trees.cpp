#include "fbarlab/trees.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fbarlab {

namespace {

// Materialized enumeration prefix, extended stage by stage on demand.
struct Enumeration {
    std::vector<FiniteSequence> by_index;
    std::map<FiniteSequence, std::uint64_t> index_of;
    std::uint64_t stages_done = 0;

    Enumeration() {
        by_index.push_back({});
        index_of[{}] = 0;
    }

    // All sequences of length len over entries < k, in lex order, appended
    // if unseen.
    void emit_stage(std::uint64_t k) {
        for (std::uint64_t len = 1; len <= k; ++len) {
            FiniteSequence seq(len, 0);
            while (true) {
                if (index_of.find(seq) == index_of.end()) {
                    index_of[seq] = by_index.size();
                    by_index.push_back(seq);
                }
                std::size_t pos = len;
                while (pos > 0 && seq[pos - 1] + 1 == k) {
                    seq[pos - 1] = 0;
                    --pos;
                }
                if (pos == 0) break;
                ++seq[pos - 1];
            }
        }
    }

    void ensure_index(std::uint64_t m) {
        while (by_index.size() <= m) {
            if (stages_done > 12)
                throw std::runtime_error("canonical_enumeration: index too large");
            emit_stage(++stages_done);
        }
    }

    void ensure_sequence(const FiniteSequence& seq) {
        std::uint64_t need = seq.size();
        for (std::uint64_t e : seq) need = std::max(need, e + 1);
        if (need > 12)
            throw std::runtime_error("enumeration_index: sequence too large");
        while (stages_done < need) emit_stage(++stages_done);
    }
};

Enumeration& enumeration() {
    static Enumeration e;
    return e;
}

std::mutex& enumeration_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

FiniteSequence canonical_enumeration(std::uint64_t m) {
    std::lock_guard<std::mutex> lock(enumeration_mutex());
    Enumeration& e = enumeration();
    e.ensure_index(m);
    return e.by_index[m];
}

std::uint64_t enumeration_index(const FiniteSequence& seq) {
    std::lock_guard<std::mutex> lock(enumeration_mutex());
    Enumeration& e = enumeration();
    e.ensure_sequence(seq);
    return e.index_of.at(seq);
}

bool is_tree(const std::set<std::uint64_t>& node_indices) {
    if (node_indices.count(0) == 0) return false;
    for (std::uint64_t m : node_indices) {
        FiniteSequence seq = canonical_enumeration(m);
        if (seq.empty()) continue;
        FiniteSequence prefix(seq.begin(), seq.end() - 1);
        if (node_indices.count(enumeration_index(prefix)) == 0) return false;
    }
    return true;
}

void validate_tree(const TreeApproximation& t) {
    for (std::uint64_t m : t.node_indices)
        if (m > t.horizon)
            throw std::invalid_argument("tree: node index beyond horizon");
    if (!is_tree(t.node_indices))
        throw std::invalid_argument("tree: not prefix-closed or root missing");
}

std::optional<std::uint64_t> level_map_M(const TreeApproximation& t,
                                         std::uint64_t s) {
    for (std::uint64_t m : t.node_indices)
        if (canonical_enumeration(m).size() == s) return m;
    return std::nullopt;
}

std::uint64_t level_map_s(const TreeApproximation& t, std::uint64_t n) {
    // Indices beyond the horizon carry no nodes, so clamping is exact.
    std::uint64_t best = 0;
    for (std::uint64_t m : t.node_indices) {
        if (m > n) break;
        best = std::max<std::uint64_t>(best, canonical_enumeration(m).size());
    }
    return best;
}

Branch longest_branch(const TreeApproximation& t) {
    Branch best;
    for (std::uint64_t m : t.node_indices) {
        FiniteSequence seq = canonical_enumeration(m);
        if (seq.size() > best.size() ||
            (seq.size() == best.size() && seq < best))
            best = seq;
    }
    return best;
}

TreeApproximation chain_tree(std::uint64_t depth) {
    TreeApproximation t;
    FiniteSequence node;
    t.node_indices.insert(0);
    for (std::uint64_t d = 0; d < depth; ++d) {
        node.push_back(0);
        t.node_indices.insert(enumeration_index(node));
    }
    t.horizon = *t.node_indices.rbegin();
    return t;
}

TreeApproximation full_binary_tree(std::uint64_t depth) {
    TreeApproximation t;
    t.node_indices.insert(0);
    std::vector<FiniteSequence> frontier{{}};
    for (std::uint64_t d = 0; d < depth; ++d) {
        std::vector<FiniteSequence> next;
        for (const FiniteSequence& f : frontier) {
            for (std::uint64_t b = 0; b < 2; ++b) {
                FiniteSequence child = f;
                child.push_back(b);
                t.node_indices.insert(enumeration_index(child));
                next.push_back(child);
            }
        }
        frontier = std::move(next);
    }
    t.horizon = *t.node_indices.rbegin();
    return t;
}

TreeApproximation root_only_tree() {
    TreeApproximation t;
    t.node_indices.insert(0);
    t.horizon = 0;
    return t;
}

std::string tree_to_json(const TreeApproximation& t) {
    nlohmann::json j;
    j["horizon"] = t.horizon;
    nlohmann::json nodes = nlohmann::json::array();
    for (std::uint64_t m : t.node_indices)
        nodes.push_back(canonical_enumeration(m));
    j["nodes"] = nodes;
    return j.dump(2);
}

TreeApproximation tree_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    TreeApproximation t;
    t.horizon = j.at("horizon").get<std::uint64_t>();
    for (const auto& node : j.at("nodes")) {
        FiniteSequence seq = node.get<FiniteSequence>();
        t.node_indices.insert(enumeration_index(seq));
    }
    validate_tree(t);
    return t;
}

}  // namespace fbarlab
