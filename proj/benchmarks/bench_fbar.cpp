#include "fbarlab/fbar.hpp"
#include "fbarlab/util.hpp"

#include <benchmark/benchmark.h>

using namespace fbarlab;

namespace {

Word random_word(std::uint64_t len, std::uint64_t seed) {
    Rng rng(seed);
    Word w(len);
    for (auto& s : w) s = static_cast<Symbol>(rng.below(16));
    return w;
}

void bm_lcs_dp(benchmark::State& state) {
    Word a = random_word(state.range(0), 1);
    Word b = random_word(state.range(0), 2);
    for (auto _ : state) benchmark::DoNotOptimize(lcs_dp(a, b));
}

void bm_lcs_bitparallel(benchmark::State& state) {
    Word a = random_word(state.range(0), 1);
    Word b = random_word(state.range(0), 2);
    for (auto _ : state) benchmark::DoNotOptimize(lcs_bitparallel(a, b));
}

void bm_lcs_rle(benchmark::State& state) {
    // Runny inputs, the case the boundary engine exists for.
    Rng rng(7);
    RleWord a, b;
    for (std::uint64_t i = 0; i < state.range(0); ++i) {
        a.push_back({static_cast<Symbol>(rng.below(16)), rng.below(64) + 1});
        b.push_back({static_cast<Symbol>(rng.below(16)), rng.below(64) + 1});
    }
    a = rle_normalize(a);
    b = rle_normalize(b);
    for (auto _ : state) benchmark::DoNotOptimize(lcs_rle_bounded(a, b));
}

void bm_fbar_oracle(benchmark::State& state) {
    Word a = random_word(state.range(0), 1);
    Word b = random_word(state.range(0), 2);
    for (auto _ : state) benchmark::DoNotOptimize(fbar_oracle(a, b));
}

}  // namespace

BENCHMARK(bm_lcs_dp)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(bm_lcs_bitparallel)->Arg(256)->Arg(1024)->Arg(4096)->Arg(16384);
BENCHMARK(bm_lcs_rle)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_fbar_oracle)->Arg(6)->Arg(10);

BENCHMARK_MAIN();
