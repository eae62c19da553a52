#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "statman/curvature.hpp"
#include "statman/diagnostics.hpp"
#include "statman/models.hpp"
#include "statman/special.hpp"

using namespace statman;

TEST_CASE("builtin_chart dispatch and parameter checking") {
    CHECK(builtin_chart({.family = "euclidean", .n = 4}).n == 4);
    CHECK(builtin_chart({.family = "sphere", .r = 2.0}).n == 2);
    CHECK(builtin_chart({.family = "gamma_fisher", .gamma_chart = "natural"}).coords[0] != "k");
    CHECK_THROWS_AS(builtin_chart({.family = "torus"}), ParamError);
    CHECK_THROWS_AS(builtin_chart({.family = "sphere", .r = -1.0}), ParamError);
    CHECK_THROWS_AS(builtin_chart({.family = "euclidean", .n = 0}), ParamError);
    CHECK_THROWS_AS(
        builtin_chart({.family = "flat_with_cubic", .n = 2, .cubic_entries = {{{0, 0, 5}, 1.0}}}),
        ParamError);
    // box override must match the dimension
    CHECK_THROWS_AS(builtin_chart({.family = "sphere", .box = {{0.1, 1.0}}}), ParamError);
}

TEST_CASE("every built-in validates as a statistical structure") {
    for (const char* family :
         {"euclidean", "sphere", "hyperbolic", "normal_fisher", "gamma_fisher",
          "flat_with_cubic"}) {
        Chart c = builtin_chart({.family = family});
        CAPTURE(family);
        CHECK(validate_statistical(c, sample_points(c, 10, 2), c.check_tol()).pass);
    }
}

TEST_CASE("normal family: quadrature reproduces the closed-form g and C") {
    LogLikelihood ll = normal_loglik();
    Point theta{0.0, 1.0};  // (mu, sigma)
    auto [g, C] = fisher_by_quadrature(ll, theta, 3, 1e-8);
    CHECK(g({0, 0}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g({0, 1}) == doctest::Approx(0.0).scale(1).epsilon(1e-6));
    CHECK(g({1, 1}) == doctest::Approx(2.0).epsilon(1e-6));
    // E[l_i l_j l_k] for the location-scale normal at sigma = 1:
    // C_mms = 2, C_sss = 8, C_mmm = C_mss = 0
    CHECK(C({0, 0, 1}) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(C({1, 1, 1}) == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(std::abs(C({0, 0, 0})) < 1e-6);
    CHECK(std::abs(C({0, 1, 1})) < 1e-6);
}

TEST_CASE("normal family: quadrature matches the chart fields across the box") {
    Chart c = normal_fisher_chart();
    LogLikelihood ll = normal_loglik();
    for (const Point& p : sample_points(c, 5, 3)) {
        auto [g, C] = fisher_by_quadrature(ll, p, 3, 1e-8);
        GeomJets gj = c.geom(p, 0);
        CHECK(rel_defect_raw(g.data(), gj.g) < 1e-6);
        CHECK(rel_defect_raw(C.data(), gj.c) < 1e-6);
    }
}

TEST_CASE("gamma family: quadrature matches the trigamma metric") {
    LogLikelihood ll = gamma_loglik(false);
    Point theta{2.0, 1.0};  // (shape k, rate beta)
    auto [g, C] = fisher_by_quadrature(ll, theta, 3, 1e-6);
    CHECK(g({0, 0}) == doctest::Approx(trigamma(2.0)).epsilon(1e-6));
    CHECK(g({0, 1}) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(g({1, 1}) == doctest::Approx(2.0).epsilon(1e-6));  // k / beta^2

    Chart c = gamma_fisher_chart("shape-rate");
    GeomJets gj = c.geom(theta, 0);
    CHECK(rel_defect_raw(g.data(), gj.g) < 1e-6);
    CHECK(rel_defect_raw(C.data(), gj.c) < 1e-6);
}

TEST_CASE("gamma natural chart: quadrature and exponential-family flatness") {
    Chart c = gamma_fisher_chart("natural");
    LogLikelihood ll = gamma_loglik(true);
    for (const Point& p : sample_points(c, 4, 5)) {
        auto [g, C] = fisher_by_quadrature(ll, p, 3, 1e-6);
        GeomJets gj = c.geom(p, 0);
        CHECK(rel_defect_raw(g.data(), gj.g) < 1e-6);
        CHECK(rel_defect_raw(C.data(), gj.c) < 1e-6);
        // exponential-family coordinates: nabla is flat, nabla* is flat
        CHECK(max_norm(riemann(c, p, ConnKind::nabla)) < 1e-9);
        CHECK(max_norm(riemann(c, p, ConnKind::nabla_star)) < 1e-9);
    }
}

TEST_CASE("difference tensor from quadrature agrees with -g^{-1} C / 2") {
    Chart c = normal_fisher_chart();
    Point p{0.3, 1.4};
    auto [g, C] = fisher_by_quadrature(normal_loglik(), p, 3, 1e-8);
    Metric m = Metric::from(g);
    Tensor K = difference_tensor(c, p);
    int n = 2;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double want = 0.0;
                for (int l = 0; l < n; ++l) want += -0.5 * m.g_inv({k, l}) * C({i, j, l});
                CHECK(K({k, i, j}) == doctest::Approx(want).scale(1).epsilon(1e-6));
            }
}

namespace {

// Score mean per node-count level, accelerated exactly the way the adaptive
// driver accelerates its moment sequence (one Richardson step on the
// doubling sequence).  The gamma score contains a log integrand whose raw
// Gauss-Laguerre error decays only like m^-2.
std::array<double, 2> score_mean_extrapolated(const LogLikelihood& ll, const Point& theta) {
    std::array<std::array<double, 2>, 3> s{};
    int level = 0;
    for (int m : {256, 512, 1024}) {
        std::vector<double> x, w;
        ll.rule(theta, m, x, w);
        double wsum = 0.0;
        for (std::size_t q = 0; q < x.size(); ++q) {
            Jet l = ll.logpdf(x[q], theta, 1);
            s[level][0] += w[q] * l.g1(0);
            s[level][1] += w[q] * l.g1(1);
            wsum += w[q];
        }
        REQUIRE(std::abs(wsum - 1.0) < 1e-10);
        ++level;
    }
    std::array<double, 2> out{};
    for (int i = 0; i < 2; ++i) {
        double d1 = s[1][i] - s[0][i];
        double d2 = s[2][i] - s[1][i];
        out[i] = (std::abs(d2) < 1e-15 || std::abs(d1) <= std::abs(d2) * 1.2)
                     ? s[2][i]
                     : s[2][i] + d2 / (d1 / d2 - 1.0);
    }
    return out;
}

}  // namespace

TEST_CASE("score mean is zero under the quadrature rules") {
    std::array<double, 2> sn = score_mean_extrapolated(normal_loglik(), {0.4, 1.2});
    CHECK(std::abs(sn[0]) < 1e-8);
    CHECK(std::abs(sn[1]) < 1e-8);

    std::array<double, 2> sg = score_mean_extrapolated(gamma_loglik(false), {2.5, 1.3});
    CHECK(std::abs(sg[0]) < 1e-8);
    CHECK(std::abs(sg[1]) < 1e-8);
}

TEST_CASE("Gauss rules integrate their weight-function moments exactly") {
    // Hermite: integral of t^2 exp(-t^2) = sqrt(pi)/2
    QuadRule h = gauss_hermite(20);
    double m2 = 0.0;
    for (std::size_t q = 0; q < h.nodes.size(); ++q)
        m2 += h.weights[q] * h.nodes[q] * h.nodes[q];
    CHECK(m2 == doctest::Approx(std::sqrt(std::acos(-1.0)) / 2.0).epsilon(1e-12));
    // Laguerre with a = 1.5: integral of t^{1.5} e^{-t} = Gamma(2.5)
    QuadRule l = gauss_laguerre(20, 1.5);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t q = 0; q < l.nodes.size(); ++q) {
        m0 += l.weights[q];
        m1 += l.weights[q] * l.nodes[q];
    }
    CHECK(m0 == doctest::Approx(std::tgamma(2.5)).epsilon(1e-12));
    CHECK(m1 == doctest::Approx(std::tgamma(3.5)).epsilon(1e-12));
}

TEST_CASE("normal Levi-Civita geometry has sectional constant -1/2") {
    Chart c = normal_fisher_chart();
    FitResult fit =
        fit_constant_curvature(c, sample_points(c, 12, 1), 1e-6, ConnKind::levi_civita);
    CHECK(fit.pass());
    CHECK(fit.k == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("gamma shape-rate chart is exponential-family flat at alpha = +-1") {
    Chart c = gamma_fisher_chart("shape-rate");
    for (const Point& p : sample_points(c, 6, 4)) {
        CHECK(max_norm(riemann(c, p, ConnKind::nabla)) < 1e-9);
        CHECK(max_norm(riemann(c, p, ConnKind::nabla_star)) < 1e-9);
    }
}
