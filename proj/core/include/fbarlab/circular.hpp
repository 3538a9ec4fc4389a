#ifndef FBARLAB_CIRCULAR_HPP
#define FBARLAB_CIRCULAR_HPP

#include "construction.hpp"
#include "symbols.hpp"
#include "util.hpp"

#include <cstdint>
#include <vector>

namespace fbarlab {

// Spacer symbols appended after the 16-symbol base alphabet.
inline constexpr Symbol kSpacerB = 16;
inline constexpr Symbol kSpacerE = 17;

// Arithmetic of the circular functor at one stage. q and p hold the full
// recursion prefix; j indices are computed on demand from the stored
// modular inverse, never materialized as a vector.
struct CircularParams {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> k_seq;
    std::vector<std::uint64_t> l_seq;
    std::vector<BigInt> q;  // q[0] = 1
    std::vector<BigInt> p;  // p[0] = 0
    BigInt p_inv = 0;       // inverse of p[n] mod q[n] (n >= 1)

    // j_i = p_n^{-1} i mod q_n for i < q_n; j_{q_n} = q_n; j_0 = 0 at n = 0.
    BigInt j(const BigInt& i) const;
    std::uint64_t k() const { return k_seq.at(n); }
    std::uint64_t l() const { return l_seq.at(n); }
    const BigInt& qn() const { return q.at(n); }
    BigInt next_q() const { return BigInt(k()) * l() * qn() * qn(); }
};

CircularParams circular_params(const std::vector<std::uint64_t>& k_seq,
                               const std::vector<std::uint64_t>& l_seq,
                               std::uint64_t n);

// Substring-separation radius R_n^c: R_1^c = r1, then
// floor(sqrt(l_{n-2}) k_{n-2} q_{n-2}^2).
BigInt circular_R(const CircularParams& pr, std::uint64_t n,
                  std::uint64_t r1 = 2);

// The operator C_n. Components are stage-n circular words of length q_n;
// the output has length q_{n+1} and must fit the materialization budget.
Word circular_op(const CircularParams& pr, const std::vector<Word>& components,
                 std::uint64_t budget = std::uint64_t(1) << 27);

// The reversed operator C_n^r: component order and each component are
// reversed internally, so circular_rev_op(pr, c) is the exact reversal of
// circular_op(pr, c).
Word circular_rev_op(const CircularParams& pr,
                     const std::vector<Word>& components,
                     std::uint64_t budget = std::uint64_t(1) << 27);

// Partial operator C_{n,i} (or C^r_{n,i} when reversed): the factor of the
// full product at outer index i over the given consecutive components.
Word circular_partial(const CircularParams& pr, std::uint64_t i,
                      const std::vector<Word>& components, bool rev_form,
                      std::uint64_t budget = std::uint64_t(1) << 27);

// Inverse parse of circular_op output: recovers the component sequence.
std::vector<Word> de_circularize(const CircularParams& pr, const Word& w);

struct CircularStage {
    std::uint64_t n = 0;
    std::vector<Word> words;  // indexed by stage word id (c_n is id-preserving)
};

struct CircularSequence {
    std::vector<std::uint64_t> k_seq;  // k_n = components of stage n+1
    std::vector<std::uint64_t> l_seq;
    std::vector<CircularStage> stages;
};

// Circularizes the first n_max stages of a construction sequence.
CircularSequence circularize_sequence(const ConstructionSequence& seq,
                                      const std::vector<std::uint64_t>& l_seq,
                                      std::uint64_t n_max,
                                      std::uint64_t budget = std::uint64_t(1)
                                                             << 27);

}  // namespace fbarlab

#endif
