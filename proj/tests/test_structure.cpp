#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "statman/chart.hpp"
#include "statman/models.hpp"

using namespace statman;

namespace {

Chart polar_plane() {
    return custom_chart(2, {"r", "theta"}, {{{0, 0}, "1"}, {{0, 1}, "0"}, {{1, 1}, "r^2"}}, {},
                        JetStrategy::analytic, 1e-3, {{0.5, 3.0}, {-3.0, 3.0}});
}

}  // namespace

TEST_CASE("Levi-Civita on the polar plane: hand-evaluated Christoffels") {
    Chart c = polar_plane();
    ConnectionCoeffs lc = levi_civita(c, {2.0, 1.0});
    // Gamma^r_{theta theta} = -r = -2, Gamma^theta_{r theta} = 1/r = 1/2
    CHECK(lc.gamma({0, 1, 1}) == doctest::Approx(-2.0));
    CHECK(lc.gamma({1, 0, 1}) == doctest::Approx(0.5));
    CHECK(lc.gamma({1, 1, 0}) == doctest::Approx(0.5));
    CHECK(lc.gamma({0, 0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("Levi-Civita on the Euclidean chart vanishes") {
    Chart c = euclidean_chart(3);
    ConnectionCoeffs lc = levi_civita(c, {0.2, -0.4, 0.9});
    for (double v : lc.gamma.data()) CHECK(v == 0.0);
}

TEST_CASE("Levi-Civita of the normal Fisher metric matches an FD oracle") {
    Chart analytic = normal_fisher_chart();
    Chart fd = custom_chart(2, {"mu", "sigma"},
                            {{{0, 0}, "1/sigma^2"}, {{0, 1}, "0"}, {{1, 1}, "2/sigma^2"}}, {},
                            JetStrategy::finite_difference, 1e-3, {{-1.0, 1.0}, {0.6, 2.0}});
    Point p{0.0, 1.0};
    ConnectionCoeffs a = levi_civita(analytic, p);
    ConnectionCoeffs b = levi_civita(fd, p);
    CHECK(rel_defect(a.gamma, b.gamma) < 1e-4);
}

TEST_CASE("difference tensor of the flat chart with one cubic entry") {
    Chart c = flat_with_cubic_chart(2, {{{0, 0, 0}, 2.0}});
    Tensor K = difference_tensor(c, {0.1, 0.7});
    // K^k_{ij} = -1/2 delta^{kl} C_{ijl}: only K^1_{11} = -1
    CHECK(K({0, 0, 0}) == doctest::Approx(-1.0));
    double rest = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (k + i + j > 0) rest = std::max(rest, std::abs(K({k, i, j})));
    CHECK(rest == 0.0);
}

TEST_CASE("zero cubic collapses all connections to Levi-Civita") {
    Chart c = sphere_chart(1.0);
    Point p{1.1, 0.4};
    CHECK(rel_defect(nabla(c, p).gamma, levi_civita(c, p).gamma) == 0.0);
    CHECK(rel_defect(nabla_star(c, p).gamma, levi_civita(c, p).gamma) == 0.0);
    CHECK(max_norm(difference_tensor(c, p)) == 0.0);
}

TEST_CASE("alpha family: endpoints, mean law, and dual reflection") {
    Chart c = builtin_chart({.family = "gamma_fisher"});
    Point p{2.2, 1.3};
    Tensor gh = levi_civita(c, p).gamma;
    Tensor gn = nabla(c, p).gamma;
    Tensor gs = nabla_star(c, p).gamma;
    CHECK(rel_defect(alpha_connection(c, p, 0.0).gamma, gh) == 0.0);
    CHECK(rel_defect(alpha_connection(c, p, 1.0).gamma, gn) == 0.0);
    CHECK(rel_defect(alpha_connection(c, p, -1.0).gamma, gs) == 0.0);
    // mean law (Gamma + Gamma*)/2 = Gamma-hat, exactly
    CHECK(rel_defect((gn + gs) * 0.5, gh) < 1e-15);
    // nabla^{-a} equals the alpha-connection of the dual structure
    Chart dual = c.dual();
    for (double a : {-0.7, 0.3, 0.9})
        CHECK(rel_defect(alpha_connection(c, p, -a).gamma,
                         alpha_connection(dual, p, a).gamma) < 1e-15);
}

TEST_CASE("flat chart with cubic: nabla coefficients at alpha = 1") {
    Chart c = flat_with_cubic_chart(2, {{{0, 0, 0}, 2.0}});
    Tensor g = nabla(c, {0.5, -0.5}).gamma;
    CHECK(g({0, 0, 0}) == doctest::Approx(-1.0));
    CHECK(std::abs(g({1, 1, 1})) + std::abs(g({0, 1, 1})) + std::abs(g({1, 0, 1})) == 0.0);
}

TEST_CASE("cubic_from_connection round-trips and respects duality") {
    Chart c = flat_with_cubic_chart(2, {{{0, 0, 0}, 2.0}});
    Point p{0.3, 0.9};
    Tensor from_nabla = cubic_from_connection(c, p, nabla(c, p));
    CHECK(from_nabla({0, 0, 0}) == doctest::Approx(2.0));
    Tensor from_lc = cubic_from_connection(c, p, levi_civita(c, p));
    CHECK(max_norm(from_lc) < 1e-15);
    Tensor from_star = cubic_from_connection(c, p, nabla_star(c, p));
    CHECK(from_star({0, 0, 0}) == doctest::Approx(-2.0));
    // alpha-connection derivative of g equals alpha * C
    for (double a : {-1.0, 0.5, 1.0}) {
        Tensor got = cubic_from_connection(c, p, alpha_connection(c, p, a));
        CHECK(rel_defect(got, from_nabla * a) < 1e-14);
    }
}

TEST_CASE("duality identity of the coefficient fields on the gamma chart") {
    Chart c = builtin_chart({.family = "gamma_fisher"});
    for (const Point& p : sample_points(c, 5, 3)) {
        GeomJets gj = c.geom(p, 1);
        Tensor gn = nabla(c, p).gamma;
        Tensor gs = nabla_star(c, p).gamma;
        int n = c.n;
        // d_i g_jk = Gamma^l_{ij} g_lk + Gamma*^l_{ik} g_jl
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double rhs = 0.0;
                    for (int l = 0; l < n; ++l)
                        rhs += gn({l, i, j}) * gj.g[l * n + k] + gs({l, i, k}) * gj.g[j * n + l];
                    CHECK(std::abs(gj.dg[(i * n + j) * n + k] - rhs) < 1e-10);
                }
    }
}

TEST_CASE("validate_statistical passes on every built-in model") {
    for (const char* family :
         {"euclidean", "sphere", "hyperbolic", "normal_fisher", "gamma_fisher",
          "flat_with_cubic"}) {
        Chart c = builtin_chart({.family = family});
        ValidationReport rep = validate_statistical(c, sample_points(c, 10, 1), c.check_tol());
        CAPTURE(family);
        CHECK(rep.pass);
        CHECK(rep.issues.empty());
    }
}

TEST_CASE("degenerate metric fails validation with a named issue") {
    std::map<std::pair<int, int>, ScalarField> m;
    m[{0, 0}] = ScalarField::constant(2, 1.0);
    m[{0, 1}] = ScalarField::constant(2, 1.0);
    m[{1, 1}] = ScalarField::constant(2, 1.0);  // det = 0 everywhere
    Chart c = make_chart(2, {"x", "y"}, "degenerate", m, {}, {{-1.0, 1.0}, {-1.0, 1.0}});
    ValidationReport rep = validate_statistical(c, sample_points(c, 3, 0), 1e-10);
    CHECK_FALSE(rep.pass);
    CHECK(rep.issues.size() == 3);  // one per point, scan keeps going
    bool named = false;
    for (const ValidationIssue& is : rep.issues)
        if (is.what.find("singular") != std::string::npos) named = true;
    CHECK(named);
}

TEST_CASE("make_chart rejects malformed input") {
    std::map<std::pair<int, int>, ScalarField> m;
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) m[{i, j}] = ScalarField::constant(2, i == j ? 1.0 : 0.0);
    std::map<std::array<int, 3>, ScalarField> unsorted{{{1, 0, 0}, ScalarField::constant(2, 1.0)}};
    CHECK_THROWS_AS(make_chart(2, {"x", "y"}, "bad", m, unsorted, {{-1, 1}, {-1, 1}}),
                    ParamError);
    std::map<std::array<int, 3>, ScalarField> range{{{0, 0, 5}, ScalarField::constant(2, 1.0)}};
    CHECK_THROWS_AS(make_chart(2, {"x", "y"}, "bad", m, range, {{-1, 1}, {-1, 1}}), ParamError);
}

TEST_CASE("FD-backed custom chart validates within the FD tolerance") {
    Chart c = custom_chart(2, {"x", "y"}, {{{0, 0}, "1 + 0.2*sin(x)"}, {{0, 1}, "0"},
                                           {{1, 1}, "1 + 0.1*x*y"}},
                           {{{0, 0, 0}, "0.3*y"}}, JetStrategy::finite_difference, 1e-3,
                           {{-0.8, 0.8}, {0.2, 0.9}});
    ValidationReport rep = validate_statistical(c, sample_points(c, 5, 2), c.check_tol());
    CHECK(rep.pass);
}

TEST_CASE("sample_points is deterministic and stays inside the box") {
    Chart c = builtin_chart({.family = "gamma_fisher"});
    auto a = sample_points(c, 20, 5);
    auto b = sample_points(c, 20, 5);
    CHECK(a == b);
    CHECK(a.size() == 20);
    for (const Point& p : a)
        for (int i = 0; i < c.n; ++i) {
            CHECK(p[i] >= c.box[i][0]);
            CHECK(p[i] <= c.box[i][1]);
        }
    CHECK(sample_points(c, 20, 6) != a);
}

TEST_CASE("tau/volume relation: trace of nabla matches the volume derivative") {
    Chart c = builtin_chart({.family = "gamma_fisher"});
    Point p{2.4, 0.9};
    GeomJets gj = c.geom(p, 0);
    Tensor gn = nabla(c, p).gamma;
    int n = c.n;
    // Gamma^m_{im} = d_i log sqrt|det g| + tau_i, with tau_i = K^m_{im}
    GeomJets gj1 = c.geom(p, 1);
    for (int i = 0; i < n; ++i) {
        double trace = 0.0, tau = 0.0, dlog = 0.0;
        for (int m = 0; m < n; ++m) {
            trace += gn({m, i, m});
            tau += gj.K[(m * n + i) * n + m];
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                dlog += 0.5 * gj1.ginv[a * n + b] * gj1.dg[(i * n + a) * n + b];
        CHECK(std::abs(trace - dlog - tau) < 1e-10);
    }
}
