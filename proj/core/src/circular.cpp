#include "fbarlab/circular.hpp"

#include <algorithm>
#include <stdexcept>

namespace fbarlab {

namespace {

// Extended Euclid; requires gcd(a, m) = 1.
BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt old_r = a % m, r = m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        BigInt quot = old_r / r;
        BigInt tmp = old_r - quot * r;
        old_r = r;
        r = tmp;
        tmp = old_s - quot * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1)
        throw std::logic_error("p_n and q_n not coprime; recursion violated");
    BigInt inv = old_s % m;
    if (inv < 0) inv += m;
    return inv;
}

std::uint64_t to_size(const BigInt& v, std::uint64_t budget,
                      const char* what) {
    if (v > budget)
        throw std::runtime_error(std::string(what) +
                                 " exceeds materialization budget (" +
                                 v.str() + " symbols)");
    return v.convert_to<std::uint64_t>();
}

void append_run(Word& out, Symbol s, std::uint64_t count) {
    out.insert(out.end(), count, s);
}

}  // namespace

BigInt CircularParams::j(const BigInt& i) const {
    if (n == 0) {
        if (i == 0) return 0;
        if (i == 1) return 1;  // j_{q_0} = q_0
        throw std::invalid_argument("j index out of range");
    }
    const BigInt& qn_ = q[n];
    if (i == qn_) return qn_;
    if (i < 0 || i > qn_) throw std::invalid_argument("j index out of range");
    return (p_inv * i) % qn_;
}

CircularParams circular_params(const std::vector<std::uint64_t>& k_seq,
                               const std::vector<std::uint64_t>& l_seq,
                               std::uint64_t n) {
    if (k_seq.size() < n || l_seq.size() < n)
        throw std::invalid_argument("k/l schedules shorter than stage");
    for (std::uint64_t l : l_seq)
        if (l < 2) throw std::invalid_argument("l_n must be at least 2");
    for (std::uint64_t k : k_seq)
        if (k < 1) throw std::invalid_argument("k_n must be positive");
    CircularParams pr;
    pr.n = n;
    pr.k_seq = k_seq;
    pr.l_seq = l_seq;
    pr.q = {1};
    pr.p = {0};
    for (std::uint64_t m = 0; m < n; ++m) {
        BigInt klq = BigInt(k_seq[m]) * l_seq[m] * pr.q[m];
        pr.q.push_back(klq * pr.q[m]);
        pr.p.push_back(pr.p[m] * klq + 1);
    }
    if (n >= 1) pr.p_inv = mod_inverse(pr.p[n], pr.q[n]);
    return pr;
}

BigInt circular_R(const CircularParams& pr, std::uint64_t n,
                  std::uint64_t r1) {
    if (n < 2) return r1;
    BigInt kq2 = BigInt(pr.k_seq.at(n - 2)) * pr.q.at(n - 2) * pr.q.at(n - 2);
    return boost::multiprecision::sqrt(BigInt(pr.l_seq.at(n - 2)) * kq2 * kq2);
}

Word circular_op(const CircularParams& pr, const std::vector<Word>& components,
                 std::uint64_t budget) {
    if (components.size() != pr.k())
        throw std::invalid_argument("expected k_n components");
    std::uint64_t qn = to_size(pr.qn(), budget, "q_n");
    for (const Word& c : components)
        if (c.size() != qn)
            throw std::invalid_argument("component length must be q_n");
    std::uint64_t total = to_size(pr.next_q(), budget, "q_{n+1}");
    Word out;
    out.reserve(total);
    for (std::uint64_t i = 0; i < qn; ++i) {
        std::uint64_t ji = pr.j(i).convert_to<std::uint64_t>();
        for (const Word& c : components) {
            append_run(out, kSpacerB, qn - ji);
            for (std::uint64_t rep = 0; rep + 1 < pr.l(); ++rep)
                out.insert(out.end(), c.begin(), c.end());
            append_run(out, kSpacerE, ji);
        }
    }
    return out;
}

Word circular_rev_op(const CircularParams& pr,
                     const std::vector<Word>& components,
                     std::uint64_t budget) {
    if (components.size() != pr.k())
        throw std::invalid_argument("expected k_n components");
    std::uint64_t qn = to_size(pr.qn(), budget, "q_n");
    for (const Word& c : components)
        if (c.size() != qn)
            throw std::invalid_argument("component length must be q_n");
    std::uint64_t total = to_size(pr.next_q(), budget, "q_{n+1}");
    Word out;
    out.reserve(total);
    for (std::uint64_t i = 0; i < qn; ++i) {
        std::uint64_t ji1 = pr.j(BigInt(i) + 1).convert_to<std::uint64_t>();
        for (std::uint64_t j = 0; j < components.size(); ++j) {
            Word rc = reversed(components[components.size() - 1 - j]);
            append_run(out, kSpacerE, qn - ji1);
            for (std::uint64_t rep = 0; rep + 1 < pr.l(); ++rep)
                out.insert(out.end(), rc.begin(), rc.end());
            append_run(out, kSpacerB, ji1);
        }
    }
    return out;
}

Word circular_partial(const CircularParams& pr, std::uint64_t i,
                      const std::vector<Word>& components, bool rev_form,
                      std::uint64_t budget) {
    std::uint64_t qn = to_size(pr.qn(), budget, "q_n");
    if (i >= qn) throw std::invalid_argument("partial index out of range");
    if (components.empty() || components.size() > pr.k())
        throw std::invalid_argument("component range out of bounds");
    Word out;
    if (!rev_form) {
        std::uint64_t ji = pr.j(i).convert_to<std::uint64_t>();
        for (const Word& c : components) {
            if (c.size() != qn)
                throw std::invalid_argument("component length must be q_n");
            append_run(out, kSpacerB, qn - ji);
            for (std::uint64_t rep = 0; rep + 1 < pr.l(); ++rep)
                out.insert(out.end(), c.begin(), c.end());
            append_run(out, kSpacerE, ji);
        }
    } else {
        std::uint64_t ji1 = pr.j(BigInt(i) + 1).convert_to<std::uint64_t>();
        for (std::uint64_t j = 0; j < components.size(); ++j) {
            const Word& c = components[components.size() - 1 - j];
            if (c.size() != qn)
                throw std::invalid_argument("component length must be q_n");
            append_run(out, kSpacerE, qn - ji1);
            Word rc = reversed(c);
            for (std::uint64_t rep = 0; rep + 1 < pr.l(); ++rep)
                out.insert(out.end(), rc.begin(), rc.end());
            append_run(out, kSpacerB, ji1);
        }
    }
    return out;
}

std::vector<Word> de_circularize(const CircularParams& pr, const Word& w) {
    std::uint64_t qn = pr.qn().convert_to<std::uint64_t>();
    std::uint64_t kn = pr.k();
    std::uint64_t ln = pr.l();
    if (w.size() != pr.next_q())
        throw std::invalid_argument("word length is not q_{n+1}");
    std::vector<Word> components(kn);
    std::uint64_t pos = 0;
    for (std::uint64_t i = 0; i < qn; ++i) {
        std::uint64_t ji = pr.j(i).convert_to<std::uint64_t>();
        for (std::uint64_t j = 0; j < kn; ++j) {
            for (std::uint64_t r = 0; r < qn - ji; ++r)
                if (w[pos++] != kSpacerB)
                    throw std::runtime_error("malformed circular word (b run)");
            Word block(w.begin() + pos, w.begin() + pos + qn);
            pos += qn;
            for (std::uint64_t rep = 1; rep + 1 < ln; ++rep) {
                if (!std::equal(block.begin(), block.end(), w.begin() + pos))
                    throw std::runtime_error(
                        "malformed circular word (repetition)");
                pos += qn;
            }
            for (std::uint64_t r = 0; r < ji; ++r)
                if (w[pos++] != kSpacerE)
                    throw std::runtime_error("malformed circular word (e run)");
            if (i == 0)
                components[j] = block;
            else if (components[j] != block)
                throw std::runtime_error("inconsistent component blocks");
        }
    }
    return components;
}

CircularSequence circularize_sequence(const ConstructionSequence& seq,
                                      const std::vector<std::uint64_t>& l_seq,
                                      std::uint64_t n_max,
                                      std::uint64_t budget) {
    if (n_max >= seq.stages.size())
        throw std::invalid_argument("n_max beyond built stages");
    if (l_seq.size() < n_max)
        throw std::invalid_argument("l schedule shorter than n_max");
    CircularSequence out;
    out.l_seq = l_seq;
    for (std::uint64_t m = 0; m + 1 <= n_max; ++m)
        out.k_seq.push_back(seq.stage(m + 1).k);

    CircularStage base;
    base.n = 0;
    for (std::uint32_t v = 0; v < seq.stage(0).word_count; ++v)
        base.words.push_back({v});
    out.stages.push_back(std::move(base));

    for (std::uint64_t m = 0; m < n_max; ++m) {
        CircularParams pr = circular_params(out.k_seq, out.l_seq, m);
        const Stage& st = seq.stage(m + 1);
        CircularStage cs;
        cs.n = m + 1;
        for (std::uint32_t w = 0; w < st.word_count; ++w) {
            std::vector<Word> comps;
            comps.reserve(st.k);
            for (std::uint16_t c : st.words[w])
                comps.push_back(out.stages[m].words[c]);
            cs.words.push_back(circular_op(pr, comps, budget));
        }
        out.stages.push_back(std::move(cs));
    }
    return out;
}

}  // namespace fbarlab
