#include "tfac/field_kernels.hpp"
#include "tfac/random.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace {

namespace k = tfac::kernels;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    const tfac::CounterRng rng(seed, 7);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = rng.uniform(i, -1.0, 1.0);
    }
    return v;
}

class ParallelKernels : public ::testing::TestWithParam<std::size_t> {
protected:
    void SetUp() override { k::set_num_threads(4); }
    void TearDown() override { k::set_num_threads(0); }
};

TEST_P(ParallelKernels, LaplacianMatchesSerial) {
    const std::size_t m1 = GetParam();
    const auto u = noise(m1 * m1, 1);
    std::vector<double> a(m1 * m1), b(m1 * m1);
    k::laplacian(u, a, m1, 3.5);
    k::serial::laplacian(u, b, m1, 3.5);
    EXPECT_EQ(a, b);
}

TEST_P(ParallelKernels, ReductionsBitIdentical) {
    const std::size_t m1 = GetParam();
    const auto x = noise(m1 * m1, 2);
    const auto y = noise(m1 * m1, 3);
    EXPECT_EQ(k::dot(x, y, m1), k::serial::dot(x, y, m1));
    EXPECT_EQ(k::sum(x, m1), k::serial::sum(x, m1));
    EXPECT_EQ(k::max_abs(x), k::serial::max_abs(x));
}

TEST_P(ParallelKernels, HistorySumMatchesSerial) {
    const std::size_t m1 = GetParam();
    std::vector<std::vector<double>> hist;
    for (std::uint64_t s = 0; s < 7; ++s) {
        hist.push_back(noise(m1 * m1, 10 + s));
    }
    const auto coef = noise(7, 4);
    std::vector<double> a(m1 * m1), b(m1 * m1);
    k::weighted_history_sum(coef, hist, a);
    k::serial::weighted_history_sum(coef, hist, b);
    EXPECT_EQ(a, b);
}

TEST_P(ParallelKernels, SoeKernelsMatchSerial) {
    const std::size_t m1 = GetParam();
    const std::size_t nq = 13;
    auto H1 = noise(m1 * m1 * nq, 5);
    auto H2 = H1;
    auto H3 = H1;
    const auto v = noise(m1 * m1, 6);
    const auto decay = noise(nq, 7);
    const auto inject = noise(nq, 8);
    const auto coef = noise(nq, 9);
    std::vector<double> o1(m1 * m1), o2(m1 * m1), o3(m1 * m1);
    k::soe_update_contract(H1, v, decay, inject, coef, o1);
    k::serial::soe_update_contract(H2, v, decay, inject, coef, o2);
    k::soe_update(H3, v, decay, inject);
    k::soe_contract(H3, coef, o3);
    EXPECT_EQ(H1, H2);
    EXPECT_EQ(H1, H3);
    EXPECT_EQ(o1, o2);
    EXPECT_EQ(o1, o3);
}

INSTANTIATE_TEST_SUITE_P(Sizes, ParallelKernels, ::testing::Values(8u, 64u, 130u));

TEST(FieldKernels, LaplacianStencilValues) {
    const std::size_t m1 = 4;
    std::vector<double> u(16, 0.0), out(16);
    u[5] = 1.0;  // (1, 1)
    k::laplacian(u, out, m1, 1.0);
    EXPECT_EQ(out[5], -4.0);
    EXPECT_EQ(out[1], 1.0);
    EXPECT_EQ(out[9], 1.0);
    EXPECT_EQ(out[4], 1.0);
    EXPECT_EQ(out[6], 1.0);
    EXPECT_EQ(out[0], 0.0);
}

TEST(FieldKernels, CompensatedSumIsAccurate) {
    const std::size_t m1 = 64;
    std::vector<double> x(m1 * m1, 1e-16);
    x[0] = 1.0;
    x[1] = -1.0;
    EXPECT_NEAR(k::sum(x, m1), 1e-16 * static_cast<double>(m1 * m1 - 2), 1e-28);
}

TEST(FieldKernels, ThreadControl) {
    k::set_num_threads(2);
    if (k::parallel_enabled()) {
        EXPECT_EQ(k::num_threads(), 2);
    } else {
        EXPECT_EQ(k::num_threads(), 1);
    }
    k::set_num_threads(0);
    EXPECT_GE(k::num_threads(), 1);
}

}  // namespace
