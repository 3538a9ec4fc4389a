#include "fbarlab/circular.hpp"
#include "fbarlab/codes.hpp"
#include "fbarlab/construction.hpp"
#include "fbarlab/fbar.hpp"
#include "fbarlab/feldman.hpp"
#include "fbarlab/shiftspace.hpp"
#include "fbarlab/trees.hpp"
#include "fbarlab/wordio.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

using namespace fbarlab;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "fbar 0.1.0";

// Every run writes <out>.manifest.json (or manifest_run.json inside an
// output directory): command, parameters, seeds, input digests, outputs.
struct ManifestBuilder {
    json j;

    ManifestBuilder(const std::string& command, int argc, char** argv) {
        j["tool_version"] = kToolVersion;
        j["command"] = command;
        j["argv"] = json::array();
        for (int i = 0; i < argc; ++i) j["argv"].push_back(argv[i]);
        j["parameters"] = json::object();
        j["seeds"] = json::array();
        j["input_digests"] = json::object();
        j["outputs"] = json::array();
    }
    void param(const std::string& k, const json& v) { j["parameters"][k] = v; }
    void seed(std::uint64_t s) { j["seeds"].push_back(s); }
    void input(const std::string& path) {
        j["input_digests"][path] = file_digest(path);
    }
    void output(const std::string& path) { j["outputs"].push_back(path); }
    void write(const std::string& primary_out) {
        std::filesystem::path p(primary_out);
        std::string dest = std::filesystem::is_directory(p)
                               ? (p / "manifest_run.json").string()
                               : primary_out + ".manifest.json";
        write_text_file(dest, j.dump(2) + "\n");
    }
};

ConstructionParams params_from_file(const std::string& path) {
    ConstructionParams p;
    if (path.empty()) return p;
    json j = json::parse(read_text_file(path));
    p.alphabet_size = j.value("alphabet_size", p.alphabet_size);
    p.e_value = j.value("e_value", p.e_value);
    if (j.contains("prime_schedule"))
        p.prime_schedule = j["prime_schedule"].get<std::vector<std::uint64_t>>();
    p.pattern_budget = j.value("pattern_budget", p.pattern_budget);
    p.seed = j.value("seed", p.seed);
    return p;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoull(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

int cmd_tree(const std::string& shape, std::uint64_t depth,
             const std::string& out, ManifestBuilder& mf) {
    TreeApproximation t;
    if (shape == "chain")
        t = chain_tree(depth);
    else if (shape == "binary")
        t = full_binary_tree(depth);
    else if (shape == "root")
        t = root_only_tree();
    else
        throw CLI::ValidationError("--shape must be chain, binary or root");
    write_text_file(out, tree_to_json(t) + "\n");
    mf.output(out);
    return 0;
}

int cmd_build(const std::string& tree_path, std::uint64_t n_max,
              const std::string& params_path, std::uint64_t budget,
              const std::string& out, ManifestBuilder& mf) {
    mf.input(tree_path);
    if (!params_path.empty()) mf.input(params_path);
    TreeApproximation t = tree_from_json(read_text_file(tree_path));
    ConstructionParams p = params_from_file(params_path);
    if (budget != 0) p.pattern_budget = budget;
    mf.seed(p.seed);
    auto seq = build_construction_sequence(t, n_max, p);
    std::filesystem::create_directories(out);
    save_sequence(seq, out);
    mf.output(out);
    return 0;
}

int cmd_validate(const std::string& stages_dir, ManifestBuilder& mf,
                 const std::string& out) {
    auto seq = load_sequence(stages_dir);
    json rep;
    rep["stages"] = json::array();
    bool ok = true;
    std::vector<std::string> failures;
    for (std::uint64_t n = 1; n < seq.stages.size(); ++n) {
        auto r = validate_stage(seq, n);
        json stage;
        stage["n"] = n;
        stage["items"] = json::array();
        for (const auto& item : r.items) {
            stage["items"].push_back(
                {{"name", item.name}, {"pass", item.pass}, {"detail", item.detail}});
            if (!item.pass)
                failures.push_back("stage " + std::to_string(n) + ": " + item.name);
        }
        ok = ok && r.all_pass();
        rep["stages"].push_back(stage);
    }
    rep["all_pass"] = ok;
    rep["failures"] = failures;
    write_text_file(out, rep.dump(2) + "\n");
    mf.output(out);
    if (!ok) {
        std::cerr << "validation failed:" << std::endl;
        for (const auto& f : failures) std::cerr << "  " << f << std::endl;
    }
    return ok ? 0 : 1;
}

int cmd_dist(const std::string& a_path, const std::string& b_path,
             const std::string& pairs, std::uint64_t seed,
             const std::string& out, ManifestBuilder& mf) {
    mf.input(a_path);
    mf.input(b_path);
    mf.seed(seed);
    auto as = read_words_file(a_path);
    auto bs = read_words_file(b_path);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> idx;
    if (pairs == "all") {
        for (std::uint64_t i = 0; i < as.size(); ++i)
            for (std::uint64_t j = 0; j < bs.size(); ++j) idx.push_back({i, j});
    } else if (pairs.rfind("sampled:", 0) == 0) {
        std::uint64_t count = std::stoull(pairs.substr(8));
        Rng rng(seed);
        for (std::uint64_t s = 0; s < count; ++s)
            idx.push_back({rng.below(as.size()), rng.below(bs.size())});
    } else {
        throw CLI::ValidationError("--pairs must be all or sampled:N");
    }
    json rep;
    rep["pairs"] = json::array();
    for (auto [i, j] : idx) {
        Rational d = fbar(as[i], bs[j]);
        rep["pairs"].push_back(
            {{"a", i}, {"b", j}, {"fbar", rational_to_string(d)}});
    }
    write_text_file(out, rep.dump(2) + "\n");
    mf.output(out);
    return 0;
}

FeldmanSpec feldman_spec(std::uint64_t T, std::uint64_t N, std::uint64_t M,
                         const std::string& blocks_path) {
    FeldmanSpec spec;
    spec.T = T;
    spec.N = N;
    spec.M = M;
    for (const SString& s : read_words_file(blocks_path))
        spec.blocks.push_back(s.symbols);
    if (spec.blocks.empty())
        throw CLI::ValidationError("blocks file is empty");
    spec.L = spec.blocks[0].size();
    spec.validate();
    return spec;
}

int cmd_feldman(std::uint64_t T, std::uint64_t N, std::uint64_t M,
                const std::string& blocks_path, std::uint64_t r,
                std::uint64_t budget, const std::string& out,
                ManifestBuilder& mf) {
    mf.input(blocks_path);
    FeldmanSpec spec = feldman_spec(T, N, M, blocks_path);
    Word w = build_pattern(spec, r, budget ? budget : 1000000);
    write_words_file(out, {SString(std::move(w))});
    mf.output(out);
    return 0;
}

int cmd_feldman_sep(std::uint64_t T, std::uint64_t N, std::uint64_t M,
                    const std::string& blocks_path, std::uint64_t min_len,
                    std::uint64_t samples, std::uint64_t seed,
                    const std::string& out, ManifestBuilder& mf) {
    mf.input(blocks_path);
    mf.seed(seed);
    FeldmanSpec spec = feldman_spec(T, N, M, blocks_path);
    SeparationReport rep = separation_report(spec, min_len, samples, seed);
    json j;
    j["alpha_measured"] = rational_to_string(rep.alpha_measured);
    j["alpha_exact"] = rep.alpha_exact;
    j["sample_count"] = rep.sample_count;
    j["min_substring_length"] = rep.min_substring_length;
    j["pairs"] = json::array();
    for (const auto& pr : rep.pairs_tested)
        j["pairs"].push_back({{"type_r", pr.type_r},
                              {"type_k", pr.type_k},
                              {"min_fbar", rational_to_string(pr.min_fbar)},
                              {"exact", pr.exact},
                              {"samples", pr.samples}});
    write_text_file(out, j.dump(2) + "\n");
    mf.output(out);
    return 0;
}

int cmd_circ(const std::string& stages_dir, const std::string& l_seq_text,
             std::uint64_t n_max, std::uint64_t budget, const std::string& out,
             ManifestBuilder& mf) {
    auto seq = load_sequence(stages_dir);
    auto l_seq = parse_u64_list(l_seq_text);
    if (n_max == 0 || n_max > seq.stages.size() - 1)
        n_max = seq.stages.size() - 1;
    auto circ = circularize_sequence(seq, l_seq, n_max,
                                     budget ? budget : (1ull << 27));
    std::filesystem::create_directories(out);
    json man;
    man["k_seq"] = circ.k_seq;
    man["l_seq"] = circ.l_seq;
    man["stage_files"] = json::array();
    for (std::uint64_t n = 0; n < circ.stages.size(); ++n) {
        std::string file = "circ_stage_" + std::to_string(n) + ".words";
        std::vector<SString> rows;
        for (const Word& w : circ.stages[n].words) rows.push_back(SString(w));
        write_words_file((std::filesystem::path(out) / file).string(), rows);
        man["stage_files"].push_back(file);
    }
    write_text_file((std::filesystem::path(out) / "manifest.json").string(),
                    man.dump(2) + "\n");
    mf.output(out);
    return 0;
}

int cmd_sample(const std::string& stages_dir, std::uint64_t n,
               std::uint64_t len, std::uint64_t seed, bool shaded,
               const std::string& out, ManifestBuilder& mf) {
    mf.seed(seed);
    auto seq = load_sequence(stages_dir);
    SString seg = sample_point(seq, n, len, seed);
    if (!shaded) seg.shading.clear();
    write_words_file(out, {seg});
    mf.output(out);
    return 0;
}

int cmd_returns(const std::string& seg_path, const std::string& out,
                ManifestBuilder& mf) {
    mf.input(seg_path);
    auto rows = read_words_file(seg_path);
    if (rows.size() != 1 || !rows[0].shaded())
        throw CLI::ValidationError("expects one shaded string");
    auto gaps = induced_return_times(rows[0]);
    json j;
    j["length"] = rows[0].size();
    j["gap_count"] = gaps.size();
    json hist = json::object();
    for (std::uint64_t g : gaps) {
        std::string key = std::to_string(g);
        hist[key] = hist.value(key, 0) + 1;
    }
    j["gap_histogram"] = hist;
    write_text_file(out, j.dump(2) + "\n");
    mf.output(out);
    return 0;
}

int cmd_audit(const std::string& code_path, const std::string& stages_dir,
              std::uint64_t n, std::uint64_t s, std::uint64_t samples,
              const std::string& epsilon_text, std::uint64_t seed,
              const std::string& out, ManifestBuilder& mf) {
    mf.input(code_path);
    mf.seed(seed);
    StationaryCode code = code_from_json(read_text_file(code_path));
    auto seq = load_sequence(stages_dir);
    Rational eps = rational_from_string(epsilon_text);
    AuditReport rep = audit_code(code, seq, n, s, samples, 1, eps, seed);
    json j;
    j["n"] = rep.n;
    j["s"] = rep.s;
    j["samples"] = json::array();
    for (const auto& smp : rep.samples) {
        json e;
        e["word_id"] = smp.word_id;
        e["best_candidate"] = smp.best_candidate;
        e["fbar"] = rational_to_string(smp.fbar_value);
        e["under_epsilon"] = smp.under_epsilon;
        if (smp.inferred) {
            e["inferred"] = json::array();
            for (const auto& g : smp.inferred->generator_subset)
                e["inferred"].push_back(g);
        }
        j["samples"].push_back(e);
    }
    if (rep.modal) {
        j["modal"] = json::array();
        for (const auto& g : rep.modal->generator_subset) j["modal"].push_back(g);
    }
    j["agree_fraction"] = rep.agree_fraction;
    write_text_file(out, j.dump(2) + "\n");
    mf.output(out);
    return 0;
}

int cmd_report(const std::string& stages_dir, const std::string& out,
               ManifestBuilder& mf) {
    auto seq = load_sequence(stages_dir);
    json j;
    j["tree"] = json::parse(tree_to_json(seq.tree));
    j["stages"] = json::array();
    for (const Stage& st : seq.stages) {
        j["stages"].push_back({{"n", st.n},
                               {"level", st.level},
                               {"h", st.h},
                               {"k", st.k},
                               {"f", st.f},
                               {"prime", st.prime_used},
                               {"word_count", st.word_count},
                               {"segments", st.segment_count},
                               {"segment_len", st.segment_len}});
    }
    auto iso = coherent_branch_isomorphism(seq);
    j["branch_isomorphism"] = json::array();
    if (iso)
        for (const auto& e : *iso) {
            json gens = json::array();
            for (const auto& g : e.generator_subset) gens.push_back(g);
            j["branch_isomorphism"].push_back(gens);
        }
    write_text_file(out, j.dump(2) + "\n");
    mf.output(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"construction-sequence laboratory"};
    app.require_subcommand(1);
    unsigned threads = 1;  // recorded in the manifest; outputs never depend on it
    std::uint64_t budget = 0;
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--budget", budget, "size cap override");

    std::string out, stages_dir, tree_path = "tree.json", params_path;
    std::string shape = "chain", a_path, b_path, pairs = "all", blocks_path;
    std::string l_seq_text, seg_path, code_path, epsilon_text = "1/20";
    std::uint64_t depth = 1, n_max = 1, seed = 1, n = 1, s = 1;
    std::uint64_t len = 1000, samples = 100, T = 1, N = 2, M = 1, r = 1;
    std::uint64_t min_len = 16;
    bool shaded = false;

    auto* c_tree = app.add_subcommand("tree", "emit a standard tree file");
    c_tree->add_option("--shape", shape)->required();
    c_tree->add_option("--depth", depth);
    c_tree->add_option("--out", out)->required();

    auto* c_build = app.add_subcommand("build", "build a stage directory");
    c_build->add_option("--tree", tree_path)->required();
    c_build->add_option("--n-max", n_max)->required();
    c_build->add_option("--params", params_path);
    c_build->add_option("--out", out)->required();

    auto* c_val = app.add_subcommand("validate", "check a stage directory");
    c_val->add_option("--stages", stages_dir)->required();
    c_val->add_option("--out", out)->required();

    auto* c_dist = app.add_subcommand("dist", "pairwise fbar distances");
    c_dist->add_option("a", a_path)->required();
    c_dist->add_option("b", b_path)->required();
    c_dist->add_option("--pairs", pairs);
    c_dist->add_option("--seed", seed);
    c_dist->add_option("--out", out)->required();

    auto* c_fel = app.add_subcommand("feldman", "emit one pattern type");
    c_fel->add_option("--T", T)->required();
    c_fel->add_option("--N", N)->required();
    c_fel->add_option("--M", M)->required();
    c_fel->add_option("--blocks", blocks_path)->required();
    c_fel->add_option("--type", r)->required();
    c_fel->add_option("--emit", out)->required();

    auto* c_sep = app.add_subcommand("feldman-sep", "pattern separation report");
    c_sep->add_option("--T", T)->required();
    c_sep->add_option("--N", N)->required();
    c_sep->add_option("--M", M)->required();
    c_sep->add_option("--blocks", blocks_path)->required();
    c_sep->add_option("--min-len", min_len)->required();
    c_sep->add_option("--samples", samples);
    c_sep->add_option("--seed", seed);
    c_sep->add_option("--out", out)->required();

    auto* c_circ = app.add_subcommand("circ", "circularize a stage directory");
    c_circ->add_option("--stages", stages_dir)->required();
    c_circ->add_option("--l-seq", l_seq_text)->required();
    c_circ->add_option("--n-max", n_max);
    c_circ->add_option("--out", out)->required();

    auto* c_sample = app.add_subcommand("sample", "sample a point window");
    c_sample->add_option("--stages", stages_dir)->required();
    c_sample->add_option("--n", n)->required();
    c_sample->add_option("--len", len)->required();
    c_sample->add_option("--seed", seed);
    c_sample->add_flag("--shaded", shaded);
    c_sample->add_option("--out", out)->required();

    auto* c_ret = app.add_subcommand("returns", "return-time histogram");
    c_ret->add_option("segment", seg_path)->required();
    c_ret->add_option("--report", out)->required();

    auto* c_audit = app.add_subcommand("audit", "audit a stationary code");
    c_audit->add_option("--code", code_path)->required();
    c_audit->add_option("--stages", stages_dir)->required();
    c_audit->add_option("--n", n)->required();
    c_audit->add_option("--s", s);
    c_audit->add_option("--samples", samples);
    c_audit->add_option("--epsilon", epsilon_text);
    c_audit->add_option("--seed", seed);
    c_audit->add_option("--out", out)->required();

    auto* c_rep = app.add_subcommand("report", "stage directory summary");
    c_rep->add_option("--stages", stages_dir)->required();
    c_rep->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ManifestBuilder mf(app.get_subcommands()[0]->get_name(), argc, argv);
        mf.param("threads", threads);
        if (budget) mf.param("budget", budget);
        int rc = 0;
        if (c_tree->parsed()) {
            mf.param("shape", shape);
            mf.param("depth", depth);
            rc = cmd_tree(shape, depth, out, mf);
        } else if (c_build->parsed()) {
            mf.param("n_max", n_max);
            rc = cmd_build(tree_path, n_max, params_path, budget, out, mf);
        } else if (c_val->parsed()) {
            mf.param("stages", stages_dir);
            rc = cmd_validate(stages_dir, mf, out);
        } else if (c_dist->parsed()) {
            mf.param("pairs", pairs);
            rc = cmd_dist(a_path, b_path, pairs, seed, out, mf);
        } else if (c_fel->parsed()) {
            mf.param("T", T); mf.param("N", N); mf.param("M", M);
            mf.param("type", r);
            rc = cmd_feldman(T, N, M, blocks_path, r, budget, out, mf);
        } else if (c_sep->parsed()) {
            mf.param("T", T); mf.param("N", N); mf.param("M", M);
            mf.param("min_len", min_len);
            mf.param("samples", samples);
            rc = cmd_feldman_sep(T, N, M, blocks_path, min_len, samples, seed,
                                 out, mf);
        } else if (c_circ->parsed()) {
            mf.param("stages", stages_dir);
            mf.param("l_seq", l_seq_text);
            mf.param("n_max", n_max);
            rc = cmd_circ(stages_dir, l_seq_text, n_max, budget, out, mf);
        } else if (c_sample->parsed()) {
            mf.param("stages", stages_dir);
            mf.param("n", n); mf.param("len", len); mf.param("shaded", shaded);
            rc = cmd_sample(stages_dir, n, len, seed, shaded, out, mf);
        } else if (c_ret->parsed()) {
            rc = cmd_returns(seg_path, out, mf);
        } else if (c_audit->parsed()) {
            mf.param("stages", stages_dir);
            mf.param("n", n); mf.param("s", s);
            mf.param("samples", samples);
            mf.param("epsilon", epsilon_text);
            rc = cmd_audit(code_path, stages_dir, n, s, samples, epsilon_text,
                           seed, out, mf);
        } else if (c_rep->parsed()) {
            mf.param("stages", stages_dir);
            rc = cmd_report(stages_dir, out, mf);
        }
        mf.write(out);
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
}
