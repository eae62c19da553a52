#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "statman/tensor.hpp"

using namespace statman;

namespace {
const Variance U = Variance::upper;
const Variance L = Variance::lower;
}  // namespace

TEST_CASE("contract: trace of the identity is the dimension") {
    Tensor id(3, {U, L});
    for (int i = 0; i < 3; ++i) id({i, i}) = 1.0;
    Tensor tr = contract(id, 0, 1);
    CHECK(tr.rank() == 0);
    CHECK(tr.data()[0] == doctest::Approx(3.0));
}

TEST_CASE("contract: diag(1,2) traces to 3; same-variance slots rejected") {
    Tensor t(2, {U, L});
    t({0, 0}) = 1.0;
    t({1, 1}) = 2.0;
    CHECK(contract(t, 0, 1).data()[0] == doctest::Approx(3.0));
    Tensor s(2, {L, L}, {1, 0, 0, 2});
    CHECK_THROWS_AS(contract(s, 0, 1), VarianceError);
}

TEST_CASE("contract is linear") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    Tensor a(3, {U, L, L}), b(3, {U, L, L});
    for (double& v : a.data()) v = u(rng);
    for (double& v : b.data()) v = u(rng);
    Tensor lhs = contract(a + b * 2.0, 0, 1);
    Tensor rhs = contract(a, 0, 1) + contract(b, 0, 1) * 2.0;
    CHECK(rel_defect(lhs, rhs) < 1e-14);
}

TEST_CASE("raise/lower: Euclidean metric leaves components unchanged") {
    Tensor g(2, {L, L}, {1, 0, 0, 1});
    Metric m = Metric::from(g);
    Tensor v(2, {L}, {3.0, -4.0});
    Tensor up = raise_slot(v, 0, m);
    CHECK(up.variance()[0] == U);
    CHECK(up({0}) == doctest::Approx(3.0));
    CHECK(up({1}) == doctest::Approx(-4.0));
}

TEST_CASE("lower then raise is the identity on a random SPD metric") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    Tensor g(3, {L, L});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = (i == j) ? 1.0 + std::abs(u(rng)) : u(rng);
            g({i, j}) = v;
            g({j, i}) = v;
        }
    Metric m = Metric::from(g);
    Tensor t(3, {U, L, L});
    for (double& v : t.data()) v = u(rng);
    Tensor round = raise_slot(lower_slot(t, 0, m), 0, m);
    CHECK(rel_defect(t, round) < 1e-12);
}

TEST_CASE("metric inverse is accurate and signature counts eigenvalues") {
    Tensor g(2, {L, L}, {2, 0.5, 0.5, 1});
    Metric m = Metric::from(g);
    // g * g_inv = identity
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0;
            for (int k = 0; k < 2; ++k) s += g({i, k}) * m.g_inv({k, j});
            CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
    CHECK(m.signature == std::pair<int, int>(2, 0));
    Tensor lorentz(2, {L, L}, {1, 0, 0, -1});
    CHECK(Metric::from(lorentz).signature == std::pair<int, int>(1, 1));
    Tensor sing(2, {L, L}, {1, 1, 1, 1});
    CHECK_THROWS_AS(Metric::from(sing), SingularMetric);
}

TEST_CASE("symmetrize is idempotent and its result is totally symmetric") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    Tensor t(2, {L, L, L});
    for (double& v : t.data()) v = u(rng);
    Tensor s = symmetrize(t, {0, 1, 2});
    CHECK(is_totally_symmetric(s, {0, 1, 2}, 1e-13));
    CHECK(rel_defect(s, symmetrize(s, {0, 1, 2})) < 1e-14);
}

TEST_CASE("explicit asymmetry is detected") {
    Tensor c(2, {L, L, L});
    c({0, 0, 1}) = 1.0;  // C_112 = 1, C_121 = 0
    CHECK_FALSE(is_totally_symmetric(c, {0, 1, 2}, 1e-10));
    CHECK(symmetry_defect(c, {0, 1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("rel_defect: zero against a single entry of 2 gives 1") {
    Tensor a(2, {L}), b(2, {L});
    b({0}) = 2.0;
    CHECK(rel_defect(a, b) == doctest::Approx(1.0));
    CHECK(rel_defect(a, a) == 0.0);
    CHECK(max_norm(b) == doctest::Approx(2.0));
    Tensor wrong(3, {L});
    CHECK_THROWS_AS(rel_defect(a, wrong), ShapeError);
}
