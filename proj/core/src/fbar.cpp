#include "fbarlab/fbar.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace fbarlab {

namespace {

// Symbols paired with shading bits, for shading-aware comparison.
Word fuse_shading(const SString& s) {
    Word out(s.symbols.size());
    for (std::size_t i = 0; i < s.symbols.size(); ++i)
        out[i] = s.symbols[i] * 2 + (s.shading[i] ? 1 : 0);
    return out;
}

Rational fbar_from_lcs(std::uint64_t l, std::uint64_t n, std::uint64_t m) {
    if (n + m == 0) throw std::invalid_argument("fbar: both strings empty");
    return Rational(1) - Rational(BigInt(2) * l, BigInt(n + m));
}

}  // namespace

std::uint64_t lcs_dp(const Word& a, const Word& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 || m == 0) return 0;
    std::vector<std::uint64_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

// Row-vector LCS: one bit per position of a, a zero bit marking a position
// that extends the common subsequence. Per symbol c of b:
//   u = v & mask[c];  v = (v + u) | (v - u)   computed with carry/borrow.
// The count of zero bits among the first |a| positions is the LCS.
std::uint64_t lcs_bitparallel(const Word& a, const Word& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 || m == 0) return 0;
    const std::size_t words = (n + 63) / 64;

    std::unordered_map<Symbol, std::size_t> sym_slot;
    sym_slot.reserve(64);
    for (Symbol s : a) sym_slot.emplace(s, sym_slot.size());
    std::vector<std::uint64_t> masks(sym_slot.size() * words, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t slot = sym_slot[a[i]];
        masks[slot * words + i / 64] |= 1ull << (i % 64);
    }

    std::vector<std::uint64_t> v(words, ~0ull), u(words), sum(words);
    for (std::size_t j = 0; j < m; ++j) {
        auto it = sym_slot.find(b[j]);
        if (it == sym_slot.end()) continue;
        const std::uint64_t* mk = &masks[it->second * words];
        unsigned char carry = 0, borrow = 0;
        for (std::size_t w = 0; w < words; ++w) {
            u[w] = v[w] & mk[w];
            const std::uint64_t s1 = v[w] + u[w];
            const std::uint64_t s2 = s1 + carry;
            carry = (s1 < v[w]) || (s2 < s1);
            sum[w] = s2;
        }
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t d1 = v[w] - u[w];
            const std::uint64_t d2 = d1 - borrow;
            borrow = (v[w] < u[w]) || (d1 < static_cast<std::uint64_t>(borrow));
            v[w] = sum[w] | d2;
        }
    }
    std::uint64_t zeros = 0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = ~v[w];
        if (w == words - 1 && n % 64 != 0) bits &= (1ull << (n % 64)) - 1;
        zeros += static_cast<std::uint64_t>(__builtin_popcountll(bits));
    }
    return zeros;
}

std::uint64_t lcs(const Word& a, const Word& b) {
    if (a.size() > 10000 || b.size() > 10000) return lcs_bitparallel(a, b);
    return lcs_dp(a, b);
}

namespace {

// Boundary DP internals. F values are tracked as [lo, up] intervals at the
// run boundaries of side A; B is consumed one run per column.
struct BoundColumnState {
    std::vector<std::int64_t> lo, up;
};

struct MaxDeque {
    // Monotone non-increasing deque over (index, value).
    std::deque<std::pair<std::size_t, std::int64_t>> d;
    void push(std::size_t idx, std::int64_t val) {
        while (!d.empty() && d.back().second <= val) d.pop_back();
        d.emplace_back(idx, val);
    }
    void drop_before(std::size_t idx) {
        while (!d.empty() && d.front().first < idx) d.pop_front();
    }
    bool empty() const { return d.empty(); }
    std::int64_t max() const { return d.front().second; }
};

}  // namespace

LcsInterval lcs_rle_bounded(const RleWord& a_in, const RleWord& b_in) {
    const RleWord a = rle_normalize(a_in);
    const RleWord b = rle_normalize(b_in);
    if (a.empty() || b.empty()) return {0, 0};
    // Boundaries on the side with more runs, columns on the other.
    const RleWord& A = (a.size() >= b.size()) ? a : b;
    const RleWord& B = (a.size() >= b.size()) ? b : a;

    const std::size_t p = A.size();
    std::vector<std::uint64_t> bpos(p + 1, 0);  // boundary positions in A
    for (std::size_t i = 0; i < p; ++i) bpos[i + 1] = bpos[i] + A[i].length;

    BoundColumnState prev{std::vector<std::int64_t>(p + 1, 0),
                          std::vector<std::int64_t>(p + 1, 0)};
    BoundColumnState cur{std::vector<std::int64_t>(p + 1, 0),
                         std::vector<std::int64_t>(p + 1, 0)};

    std::vector<std::uint64_t> cum(p + 1);  // per-column: count of v before each boundary
    for (const Run& col : B) {
        const Symbol v = col.symbol;
        const std::int64_t Y = static_cast<std::int64_t>(col.length);
        cum[0] = 0;
        for (std::size_t i = 0; i < p; ++i)
            cum[i + 1] = cum[i] + (A[i].symbol == v ? A[i].length : 0);

        MaxDeque glo, gup;
        // Pointer over v-runs of A for occurrence-position lookup.
        std::size_t vrun = 0;          // index of A-run holding occurrence #occ_base and up
        std::uint64_t occ_before = 0;  // v occurrences strictly before run vrun
        std::size_t next_boundary = 0;  // boundaries not yet pushed into the deques

        for (std::size_t i = 0; i <= p; ++i) {
            const std::int64_t ci = static_cast<std::int64_t>(cum[i]);
            std::int64_t cap_lo = std::numeric_limits<std::int64_t>::min();
            std::int64_t cap_up = std::numeric_limits<std::int64_t>::min();
            std::uint64_t window_start = 0;
            if (ci >= Y) {
                // tau = position of v occurrence number (ci - Y), 0-based.
                const std::uint64_t want = static_cast<std::uint64_t>(ci - Y);
                while (true) {
                    while (vrun < p && A[vrun].symbol != v) ++vrun;
                    if (vrun >= p) throw std::logic_error("lcs_rle: occurrence lookup");
                    if (occ_before + A[vrun].length > want) break;
                    occ_before += A[vrun].length;
                    ++vrun;
                }
                const std::uint64_t tau = bpos[vrun] + (want - occ_before);
                window_start = tau;
                // F_prev at tau, sandwiched by the enclosing boundaries.
                const std::uint64_t bl = bpos[vrun], br = bpos[vrun + 1];
                const std::int64_t flo =
                    std::max(prev.lo[vrun],
                             prev.lo[vrun + 1] - static_cast<std::int64_t>(br - tau));
                const std::int64_t fup =
                    std::min(prev.up[vrun + 1],
                             prev.up[vrun] + static_cast<std::int64_t>(tau - bl));
                cap_lo = Y + flo;
                cap_up = Y + fup;
            }
            while (next_boundary <= i) {
                const std::int64_t g = static_cast<std::int64_t>(cum[next_boundary]);
                glo.push(next_boundary, prev.lo[next_boundary] - g);
                gup.push(next_boundary, prev.up[next_boundary] - g);
                ++next_boundary;
            }
            // Drop boundaries strictly left of the window start position.
            while (!glo.d.empty() && bpos[glo.d.front().first] < window_start)
                glo.d.pop_front();
            while (!gup.d.empty() && bpos[gup.d.front().first] < window_start)
                gup.d.pop_front();

            std::int64_t lo = glo.empty() ? cap_lo : ci + glo.max();
            std::int64_t up = gup.empty() ? cap_up : ci + gup.max();
            lo = std::max(lo, cap_lo);
            up = std::max(up, cap_up);
            cur.lo[i] = lo;
            cur.up[i] = up;
        }
        std::swap(prev, cur);
    }
    return {static_cast<std::uint64_t>(prev.lo[p]),
            static_cast<std::uint64_t>(prev.up[p])};
}

std::uint64_t lcs_rle_dense(const RleWord& a_in, const RleWord& b_in,
                            std::uint64_t work_budget) {
    const RleWord a = rle_normalize(a_in);
    const RleWord b = rle_normalize(b_in);
    if (a.empty() || b.empty()) return 0;
    const RleWord& A = (rle_length(a) >= rle_length(b)) ? a : b;
    const RleWord& B = (rle_length(a) >= rle_length(b)) ? b : a;
    const std::uint64_t n = rle_length(A);
    if (n * B.size() > work_budget)
        throw std::runtime_error("lcs_rle_dense: work budget exceeded");

    Word as = rle_decode(A);
    std::vector<std::int64_t> prev(n + 1, 0), cur(n + 1, 0);
    std::vector<std::uint64_t> vocc;  // positions of v in A, filled per column
    for (const Run& col : B) {
        const Symbol v = col.symbol;
        const std::uint64_t Y = col.length;
        // F_col(t) = C_v(t) + max over t' in [tau(t), t] of (F_prev(t') - C_v(t')),
        // with tau(t) the position of v occurrence number C_v(t) - Y; the window
        // max is maintained with a monotone deque.
        std::uint64_t cvt = 0;
        MaxDeque gm;
        vocc.clear();
        for (std::uint64_t t = 0; t <= n; ++t) {
            gm.push(static_cast<std::size_t>(t),
                    prev[t] - static_cast<std::int64_t>(cvt));
            std::uint64_t ws = 0;
            if (cvt >= Y) ws = vocc[cvt - Y];
            gm.drop_before(static_cast<std::size_t>(ws));
            cur[t] = static_cast<std::int64_t>(cvt) + gm.max();
            if (t < n && as[t] == v) {
                vocc.push_back(t);
                ++cvt;
            }
        }
        std::swap(prev, cur);
    }
    return static_cast<std::uint64_t>(prev[n]);
}

LcsInterval lcs_rle(const RleWord& a, const RleWord& b,
                    std::uint64_t dense_work_budget) {
    LcsInterval iv = lcs_rle_bounded(a, b);
    if (iv.exact()) return iv;
    const std::uint64_t n = std::max(rle_length(a), rle_length(b));
    const std::uint64_t cols = std::min(rle_normalize(a).size(), rle_normalize(b).size());
    if (n * cols <= dense_work_budget) {
        const std::uint64_t exact = lcs_rle_dense(a, b, dense_work_budget);
        return {exact, exact};
    }
    return iv;
}

Rational fbar(const Word& a, const Word& b) {
    return fbar_from_lcs(lcs(a, b), a.size(), b.size());
}

Rational fbar(const SString& a, const SString& b) {
    if (a.shaded() && b.shaded())
        return fbar_from_lcs(lcs(fuse_shading(a), fuse_shading(b)), a.size(), b.size());
    return fbar(a.symbols, b.symbols);
}

FbarInterval fbar_rle(const RleWord& a, const RleWord& b,
                      std::uint64_t dense_work_budget) {
    const std::uint64_t n = rle_length(a), m = rle_length(b);
    if (n + m == 0) throw std::invalid_argument("fbar_rle: both strings empty");
    LcsInterval iv = lcs_rle(a, b, dense_work_budget);
    FbarInterval out;
    out.lo = fbar_from_lcs(iv.up, n, m);  // larger match -> smaller fbar
    out.up = fbar_from_lcs(iv.lo, n, m);
    out.exact = iv.exact();
    return out;
}

namespace {

std::uint64_t oracle_rec(const Word& a, const Word& b, std::size_t i, std::size_t j) {
    if (i == a.size() || j == b.size()) return 0;
    std::uint64_t best = oracle_rec(a, b, i + 1, j);
    best = std::max(best, oracle_rec(a, b, i, j + 1));
    if (a[i] == b[j]) best = std::max(best, 1 + oracle_rec(a, b, i + 1, j + 1));
    return best;
}

}  // namespace

Rational fbar_oracle(const Word& a, const Word& b) {
    if (a.size() + b.size() > 24)
        throw std::invalid_argument("fbar_oracle: inputs too long");
    return fbar_from_lcs(oracle_rec(a, b, 0, 0), a.size(), b.size());
}

Rational fbar_oracle(const SString& a, const SString& b) {
    if (a.shaded() && b.shaded())
        return fbar_oracle(fuse_shading(a), fuse_shading(b));
    return fbar_oracle(a.symbols, b.symbols);
}

Match best_match(const Word& a, const Word& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n + m == 0) throw std::invalid_argument("best_match: both strings empty");
    if ((n + 1) * (m + 1) > 30000000ull)
        throw std::runtime_error("best_match: inputs too large for suffix table");
    // Suffix LCS table, then a greedy walk choosing the least next pair.
    std::vector<std::vector<std::uint32_t>> L(n + 1,
                                              std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            L[i][j] = (a[i] == b[j]) ? L[i + 1][j + 1] + 1
                                     : std::max(L[i + 1][j], L[i][j + 1]);
    Match out;
    std::size_t i = 0, j = 0;
    while (L[i][j] > 0) {
        bool placed = false;
        for (std::size_t ii = i; ii < n && !placed; ++ii) {
            for (std::size_t jj = j; jj < m; ++jj) {
                if (a[ii] == b[jj] && 1 + L[ii + 1][jj + 1] == L[i][j]) {
                    out.emplace_back(ii + 1, jj + 1);
                    i = ii + 1;
                    j = jj + 1;
                    placed = true;
                    break;
                }
            }
        }
        if (!placed) break;  // unreachable if the table is consistent
    }
    return out;
}

Match best_match(const SString& a, const SString& b) {
    if (a.shaded() && b.shaded()) return best_match(fuse_shading(a), fuse_shading(b));
    return best_match(a.symbols, b.symbols);
}

Rational fbar_symbol_projection(const SString& a, const SString& b) {
    return fbar(a.symbols, b.symbols);
}

}  // namespace fbarlab
