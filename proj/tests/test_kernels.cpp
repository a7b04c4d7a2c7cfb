#include <gtest/gtest.h>

#include <random>

#include "schro/kernels.hpp"

using namespace schro;

namespace {

CVec rand_vec(std::size_t n, unsigned seed) {
    std::mt19937 g(seed);
    std::normal_distribution<double> d;
    CVec v(n);
    for (auto& x : v) x = {d(g), d(g)};
    return v;
}

std::vector<double> rand_real(std::size_t n, unsigned seed) {
    std::mt19937 g(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(g);
    return v;
}

double max_diff(const CVec& a, const CVec& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST(Kernels, ScalarTableIsComplete) {
    const auto& s = kern::scalar();
    EXPECT_NE(s.axpy, nullptr);
    EXPECT_NE(s.norm2, nullptr);
    EXPECT_STREQ(s.name, "scalar");
}

// every AVX2 entry against the scalar reference, including ragged tails
TEST(Kernels, Avx2MatchesScalar) {
    const kern::Table* v = kern::avx2();
    if (!v) GTEST_SKIP() << "no AVX2 on this host/build";
    const auto& s = kern::scalar();
    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 64u, 1001u}) {
        auto x = rand_vec(n, 1), y0 = rand_vec(n, 2), a = rand_vec(n, 3);
        auto r = rand_real(n, 4);
        const cplx c(0.3, -1.7);
        CVec y1 = y0, y2 = y0;
        s.axpy(n, c, x.data(), y1.data());
        v->axpy(n, c, x.data(), y2.data());
        EXPECT_LT(max_diff(y1, y2), 1e-14);
        y1 = x, y2 = x;
        s.scale(n, c, y1.data());
        v->scale(n, c, y2.data());
        EXPECT_LT(max_diff(y1, y2), 1e-14);
        y1 = y0, y2 = y0;
        s.mul(n, a.data(), x.data(), y1.data());
        v->mul(n, a.data(), x.data(), y2.data());
        EXPECT_LT(max_diff(y1, y2), 1e-13);
        y1 = y0, y2 = y0;
        s.mul_acc(n, a.data(), x.data(), y1.data());
        v->mul_acc(n, a.data(), x.data(), y2.data());
        EXPECT_LT(max_diff(y1, y2), 1e-13);
        y1 = y0, y2 = y0;
        s.rmul(n, r.data(), x.data(), y1.data());
        v->rmul(n, r.data(), x.data(), y2.data());
        EXPECT_LT(max_diff(y1, y2), 1e-14);
        y1 = y0, y2 = y0;
        s.rmul_acc(n, c, r.data(), x.data(), y1.data());
        v->rmul_acc(n, c, r.data(), x.data(), y2.data());
        EXPECT_LT(max_diff(y1, y2), 1e-13);
        EXPECT_NEAR(std::abs(s.dot(n, x.data(), a.data()) - v->dot(n, x.data(), a.data())), 0.0, 1e-11);
        EXPECT_NEAR(s.norm2(n, x.data()), v->norm2(n, x.data()), 1e-11);
    }
}

TEST(Kernels, ForceScalarRoutesActive) {
    kern::force_scalar(true);
    EXPECT_EQ(&kern::active(), &kern::scalar());
    kern::force_scalar(false);
    if (kern::avx2()) EXPECT_EQ(&kern::active(), kern::avx2());
}

TEST(Kernels, Avx2ReductionIsRepeatable) {
    const kern::Table* v = kern::avx2();
    if (!v) GTEST_SKIP();
    auto x = rand_vec(999, 9);
    const double a = v->norm2(x.size(), x.data()), b = v->norm2(x.size(), x.data());
    EXPECT_EQ(a, b);
}
