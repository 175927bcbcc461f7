// Serial reference vs OpenMP field kernels.

#include "tfac/field_kernels.hpp"
#include "tfac/random.hpp"

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    const tfac::CounterRng rng(seed);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = rng.uniform(i, -1.0, 1.0);
    }
    return v;
}

template <bool Parallel>
void BM_Laplacian(benchmark::State& st) {
    const auto m1 = static_cast<std::size_t>(st.range(0));
    const auto u = noise(m1 * m1, 1);
    std::vector<double> out(m1 * m1);
    for (auto _ : st) {
        if constexpr (Parallel) {
            tfac::kernels::laplacian(u, out, m1, 1.0);
        } else {
            tfac::kernels::serial::laplacian(u, out, m1, 1.0);
        }
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(m1 * m1));
}

template <bool Parallel>
void BM_Dot(benchmark::State& st) {
    const auto m1 = static_cast<std::size_t>(st.range(0));
    const auto a = noise(m1 * m1, 2);
    const auto b = noise(m1 * m1, 3);
    for (auto _ : st) {
        double r = Parallel ? tfac::kernels::dot(a, b, m1) : tfac::kernels::serial::dot(a, b, m1);
        benchmark::DoNotOptimize(r);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(m1 * m1));
}

template <bool Parallel>
void BM_HistorySum(benchmark::State& st) {
    const auto m1 = static_cast<std::size_t>(st.range(0));
    const auto depth = static_cast<std::size_t>(st.range(1));
    std::vector<std::vector<double>> hist;
    for (std::size_t k = 0; k < depth; ++k) {
        hist.push_back(noise(m1 * m1, 10 + k));
    }
    const auto coef = noise(depth, 4);
    std::vector<double> out(m1 * m1);
    for (auto _ : st) {
        if constexpr (Parallel) {
            tfac::kernels::weighted_history_sum(coef, hist, out);
        } else {
            tfac::kernels::serial::weighted_history_sum(coef, hist, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(m1 * m1 * depth));
}

template <bool Parallel>
void BM_SoeUpdateContract(benchmark::State& st) {
    const auto m1 = static_cast<std::size_t>(st.range(0));
    const auto nq = static_cast<std::size_t>(st.range(1));
    auto H = noise(m1 * m1 * nq, 5);
    const auto v = noise(m1 * m1, 6);
    const auto decay = noise(nq, 7);
    const auto inject = noise(nq, 8);
    const auto coef = noise(nq, 9);
    std::vector<double> out(m1 * m1);
    for (auto _ : st) {
        if constexpr (Parallel) {
            tfac::kernels::soe_update_contract(H, v, decay, inject, coef, out);
        } else {
            tfac::kernels::serial::soe_update_contract(H, v, decay, inject, coef, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(m1 * m1 * nq));
}

}  // namespace

BENCHMARK(BM_Laplacian<false>)->Arg(128)->Arg(512);
BENCHMARK(BM_Laplacian<true>)->Arg(128)->Arg(512);
BENCHMARK(BM_Dot<false>)->Arg(128)->Arg(512);
BENCHMARK(BM_Dot<true>)->Arg(128)->Arg(512);
BENCHMARK(BM_HistorySum<false>)->Args({128, 400});
BENCHMARK(BM_HistorySum<true>)->Args({128, 400});
BENCHMARK(BM_SoeUpdateContract<false>)->Args({128, 500});
BENCHMARK(BM_SoeUpdateContract<true>)->Args({128, 500});

BENCHMARK_MAIN();
