#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "statman/diagnostics.hpp"
#include "statman/models.hpp"

using namespace statman;

namespace {

// Flat metric with a cubic that is symmetric in its indices but whose
// coordinate dependence C_111 = x2 breaks conjugate symmetry of R.
Chart conj_breaking_chart() {
    return custom_chart(2, {"x1", "x2"}, {{{0, 0}, "1"}, {{0, 1}, "0"}, {{1, 1}, "1"}},
                        {{{0, 0, 0}, "x2"}}, JetStrategy::analytic, 1e-3,
                        {{0.5, 1.5}, {0.5, 1.5}});
}

// Flat metric, constant cubic tuned so tau = K^m_{im} vanishes.
Chart trace_free_chart() {
    return flat_with_cubic_chart(2, {{{0, 0, 0}, 1.0}, {{0, 1, 1}, -1.0}});
}

// Constant SPD metric, constant cubic: nabla-hat is flat, so conjugate
// symmetry always holds and the characterization hinges on projective
// flatness of nabla*.
Chart random_constant_chart(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::map<std::pair<int, int>, ScalarField> g;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            g[{i, j}] = ScalarField::constant(n, i == j ? 1.0 + 0.3 * u(rng) : 0.3 * u(rng));
    std::map<std::array<int, 3>, ScalarField> c;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) c[{i, j, k}] = ScalarField::constant(n, 0.8 * u(rng));
    std::vector<std::array<double, 2>> box(static_cast<std::size_t>(n), {-1.0, 1.0});
    std::vector<std::string> coords;
    for (int i = 0; i < n; ++i) coords.push_back("x" + std::to_string(i + 1));
    return make_chart(n, coords, "random constant chart", g, c, box);
}

}  // namespace

TEST_CASE("hysteresis thresholds") {
    CHECK(hysteresis(0.0, 1e-8) == Verdict::pass);
    CHECK(hysteresis(1e-8, 1e-8) == Verdict::pass);
    CHECK(hysteresis(2e-8, 1e-8) == Verdict::inconclusive);
    CHECK(hysteresis(9.9e-8, 1e-8) == Verdict::inconclusive);
    CHECK(hysteresis(1e-7, 1e-8) == Verdict::fail);
    CHECK(hysteresis(1.0, 1e-8) == Verdict::fail);
    CHECK(std::string(verdict_name(Verdict::pass)) == "pass");
    CHECK(std::string(verdict_name(Verdict::fail)) == "fail");
    CHECK(std::string(verdict_name(Verdict::inconclusive)) == "inconclusive");
}

TEST_CASE("self-duality classifier") {
    Chart sphere = sphere_chart(1.0);
    Check c1 = check_conjugate_nabla(sphere, sample_points(sphere, 10, 0), 1e-8);
    CHECK(c1.verdict == Verdict::pass);

    Chart fwc = flat_with_cubic_chart(2, {{{0, 0, 0}, 2.0}});
    Check c2 = check_conjugate_nabla(fwc, sample_points(fwc, 10, 0), 1e-8);
    CHECK(c2.verdict == Verdict::fail);
    CHECK(c2.defect == doctest::Approx(2.0));

    Chart gam = gamma_fisher_chart("shape-rate");
    CHECK(check_conjugate_nabla(gam, sample_points(gam, 10, 0), 1e-8).verdict == Verdict::fail);
}

TEST_CASE("conjugate symmetry of R: passes and a tailored failure") {
    for (const char* family : {"flat_with_cubic", "gamma_fisher", "sphere", "normal_fisher"}) {
        Chart c = builtin_chart({.family = family});
        Check ck = check_conjugate_R(c, sample_points(c, 10, 1), 1e-8);
        CAPTURE(family);
        CHECK(ck.verdict == Verdict::pass);
    }
    Chart bad = conj_breaking_chart();
    Check ck = check_conjugate_R(bad, sample_points(bad, 10, 1), 1e-8);
    CHECK(ck.verdict == Verdict::fail);
    CHECK(ck.defect > 0.1);
}

TEST_CASE("all five conjugate-R formulations agree on the built-ins") {
    for (const char* family :
         {"euclidean", "sphere", "hyperbolic", "normal_fisher", "gamma_fisher",
          "flat_with_cubic"}) {
        Chart c = builtin_chart({.family = family});
        auto d = conjugate_R_defects(c, sample_points(c, 10, 2));
        for (double v : d) {
            CAPTURE(family);
            CHECK(v <= 1e-8);
        }
    }
    // and they jointly fail on the counterexample
    Chart bad = conj_breaking_chart();
    auto d = conjugate_R_defects(bad, sample_points(bad, 10, 2));
    for (double v : d) CHECK(v >= 1e-2);
}

TEST_CASE("conjugate symmetry of Ric") {
    Chart e = euclidean_chart(3);
    Check ok = check_conjugate_Ric(e, sample_points(e, 6, 0), 1e-8);
    CHECK(ok.verdict == Verdict::pass);
    CHECK(ok.defect == 0.0);

    Chart bad = conj_breaking_chart();
    CHECK(check_conjugate_Ric(bad, sample_points(bad, 10, 0), 1e-8).verdict == Verdict::fail);
}

TEST_CASE("trace-form classifier") {
    Chart fwc = flat_with_cubic_chart(2, {{{0, 0, 0}, 2.0}});
    Check fail = check_trace_free(fwc, sample_points(fwc, 6, 0), 1e-8);
    CHECK(fail.verdict == Verdict::fail);
    CHECK(fail.defect == doctest::Approx(1.0));  // tau_1 = K^m_{1m} = -1

    Chart tuned = trace_free_chart();
    CHECK(check_trace_free(tuned, sample_points(tuned, 6, 0), 1e-8).verdict == Verdict::pass);
}

TEST_CASE("constant-curvature fits across connections") {
    Chart sphere = sphere_chart(1.0);
    FitResult fs = fit_constant_curvature(sphere, sample_points(sphere, 12, 3), 1e-6,
                                          ConnKind::levi_civita);
    CHECK(fs.pass());
    CHECK(fs.k == doctest::Approx(1.0));
    CHECK(fs.residual_global <= 1e-9);

    Chart gam = gamma_fisher_chart("shape-rate");
    auto pts = sample_points(gam, 20, 0);
    FitResult f1 = fit_constant_curvature(gam, pts, 1e-6, ConnKind::nabla);
    CHECK(f1.pass());
    CHECK(std::abs(f1.k) <= 1e-9);
    FitResult fhalf = fit_constant_curvature(gam, pts, 1e-6, ConnKind::alpha, 0.5);
    CHECK(fhalf.verdict == Verdict::fail);
    CHECK(fhalf.residual_global >= 1e-3);
    CHECK(fhalf.spread >= 1e-3);
}

TEST_CASE("projective flatness classifier") {
    Chart sphere = sphere_chart(1.0);
    CHECK(check_projectively_flat(sphere, sample_points(sphere, 8, 1), 1e-8,
                                  ConnKind::levi_civita)
              .pass());

    Chart gam = gamma_fisher_chart("shape-rate");
    CHECK(check_projectively_flat(gam, sample_points(gam, 8, 1), 1e-8, ConnKind::nabla_star)
              .pass());

    Chart w3 = custom_chart(3, {"x1", "x2", "x3"},
                            {{{0, 0}, "1"},
                             {{0, 1}, "0"},
                             {{0, 2}, "0"},
                             {{1, 1}, "sin(x1)^2"},
                             {{1, 2}, "0"},
                             {{2, 2}, "1"}},
                            {}, JetStrategy::analytic, 1e-3,
                            {{0.5, 2.6}, {-3.0, 3.0}, {-1.0, 1.0}});
    Check cw = check_projectively_flat(w3, sample_points(w3, 8, 1), 1e-8,
                                       ConnKind::levi_civita);
    CHECK(cw.verdict == Verdict::fail);

    // a conclusively asymmetric Ricci tensor is flagged, not classified
    Chart bad = conj_breaking_chart();
    Check cb = check_projectively_flat(bad, sample_points(bad, 8, 1), 1e-8, ConnKind::nabla);
    CHECK(cb.verdict == Verdict::fail);
    CHECK(cb.note.find("NotEquiaffine") != std::string::npos);
}

TEST_CASE("constant-curvature characterization on the built-ins") {
    struct Case {
        const char* family;
        bool expect_cc;
    };
    for (const Case& cs : {Case{"euclidean", true}, Case{"sphere", true},
                           Case{"hyperbolic", true}, Case{"normal_fisher", true},
                           Case{"gamma_fisher", true}, Case{"flat_with_cubic", true}}) {
        Chart c = builtin_chart({.family = cs.family});
        TheoremReport rep = verify_theorem_charactconst(c, sample_points(c, 12, 5), 1e-8);
        CAPTURE(cs.family);
        CHECK(rep.conclusive);
        CHECK(rep.agree);
        CHECK((rep.A == Verdict::pass) == cs.expect_cc);
        if (rep.A == Verdict::pass) CHECK(rep.ricci_consequence_defect <= 1e-7);
    }
}

TEST_CASE("characterization stays coherent over random constant-coefficient charts") {
    std::mt19937_64 rng(20240817);
    int apass = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Chart c = random_constant_chart(trial % 2 == 0 ? 2 : 3, rng);
        TheoremReport rep = verify_theorem_charactconst(c, sample_points(c, 5, trial), 1e-8);
        CAPTURE(trial);
        CHECK(rep.conclusive);
        CHECK(rep.agree);
        // nabla-hat is flat here, so conjugate symmetry is automatic
        CHECK(rep.conj_R.pass());
        if (rep.A == Verdict::pass) ++apass;
    }
    // every 2-dimensional trial is constant curvature; the 3-dimensional
    // ones generically are not
    CHECK(apass >= 20);
    CHECK(apass < 40);
}

TEST_CASE("trace-free refinement of the characterization") {
    for (const char* family : {"euclidean", "sphere", "hyperbolic"}) {
        Chart c = builtin_chart({.family = family});
        TheoremReport rep = verify_theorem_charactconst2(c, sample_points(c, 10, 6), 1e-8);
        CAPTURE(family);
        CHECK(rep.hypothesis_met);
        CHECK(rep.has_C2);
        CHECK(rep.conclusive);
        CHECK(rep.agree);
    }

    Chart tuned = trace_free_chart();
    TheoremReport rt = verify_theorem_charactconst2(tuned, sample_points(tuned, 10, 6), 1e-8);
    CHECK(rt.hypothesis_met);
    CHECK(rt.conclusive);
    CHECK(rt.agree);

    Chart fwc = flat_with_cubic_chart(2, {{{0, 0, 0}, 2.0}});
    TheoremReport rf = verify_theorem_charactconst2(fwc, sample_points(fwc, 10, 6), 1e-8);
    CHECK_FALSE(rf.hypothesis_met);
    CHECK(rf.hypothesis_note.find("HypothesisNotMet") != std::string::npos);
    CHECK_FALSE(rf.conclusive);
}

TEST_CASE("alpha scan of the gamma family") {
    Chart gam = gamma_fisher_chart("shape-rate");
    auto pts = sample_points(gam, 20, 0);
    AlphaScan scan = alpha_scan(gam, {-1.0, -0.5, 0.0, 0.5, 1.0}, pts, 1e-6);
    CHECK(scan.hypothesis_g_not_cc);  // the gamma metric is not constant curvature
    CHECK(scan.metric_fit.verdict == Verdict::fail);
    REQUIRE(scan.rows.size() == 5);
    for (const AlphaRow& row : scan.rows) {
        CAPTURE(row.alpha);
        CHECK(row.conj_R.pass());  // conjugate symmetry is alpha-hereditary
        bool endpoint = std::abs(std::abs(row.alpha) - 1.0) < 1e-12;
        CHECK(row.fit.pass() == endpoint);
        if (endpoint) {
            CHECK(std::abs(row.fit.k) <= 1e-9);
            CHECK(row.fit.residual_global <= 1e-9);
        } else {
            CHECK(row.fit.residual_global >= 1e-3);
        }
    }
}

TEST_CASE("alpha scan of the normal family keeps the metric hypothesis false") {
    Chart c = normal_fisher_chart();
    AlphaScan scan = alpha_scan(c, {-1.0, 0.0, 1.0}, sample_points(c, 12, 0), 1e-6);
    CHECK_FALSE(scan.hypothesis_g_not_cc);
    CHECK(scan.metric_fit.k == doctest::Approx(-0.5));
}

TEST_CASE("alpha scan of a self-dual chart is alpha-independent") {
    Chart c = sphere_chart(1.0);
    AlphaScan scan = alpha_scan(c, {-1.0, 0.0, 1.0}, sample_points(c, 10, 0), 1e-6);
    for (const AlphaRow& row : scan.rows) {
        CHECK(row.conj_R.pass());
        CHECK(row.fit.pass());
        CHECK(row.fit.k == doctest::Approx(1.0));
    }
}

TEST_CASE("implication chain among the classifiers") {
    // self-dual => conj-R => conj-Ric => symmetric Ricci, checked where the
    // stronger condition holds
    for (const char* family :
         {"euclidean", "sphere", "hyperbolic", "normal_fisher", "gamma_fisher",
          "flat_with_cubic"}) {
        Chart c = builtin_chart({.family = family});
        auto pts = sample_points(c, 8, 7);
        Check cn = check_conjugate_nabla(c, pts, 1e-8);
        Check cr = check_conjugate_R(c, pts, 1e-8);
        Check cric = check_conjugate_Ric(c, pts, 1e-8);
        CAPTURE(family);
        if (cn.pass()) CHECK(cr.pass());
        if (cr.pass()) CHECK(cric.pass());
    }
}

TEST_CASE("run_all produces a coherent report for the sphere") {
    Chart c = sphere_chart(1.0);
    DiagnosticsReport rep = run_all(c, 12, 3, 1e-8);
    CHECK(rep.all_pass);
    CHECK(rep.validation.pass);
    CHECK(rep.points == 12);
    CHECK(rep.seed == 3);
    CHECK(rep.conj_nabla.pass());
    CHECK(rep.fit.pass());
    CHECK(rep.fit.k == doctest::Approx(1.0));
    CHECK(rep.thm_charactconst.agree);
    CHECK_FALSE(rep.identities.empty());
    for (const IdentityRow& row : rep.identities) CHECK(row.defect <= 1e-8);
    // check names are unique
    for (std::size_t i = 0; i < rep.identities.size(); ++i)
        for (std::size_t j = i + 1; j < rep.identities.size(); ++j)
            CHECK(rep.identities[i].name != rep.identities[j].name);
}

TEST_CASE("run_all is deterministic for a fixed seed") {
    Chart c = gamma_fisher_chart("shape-rate");
    DiagnosticsReport a = run_all(c, 10, 9, 1e-8);
    DiagnosticsReport b = run_all(c, 10, 9, 1e-8);
    CHECK(a.fit.k == b.fit.k);
    CHECK(a.fit.residual_global == b.fit.residual_global);
    CHECK(a.conj_R.defect == b.conj_R.defect);
    REQUIRE(a.identities.size() == b.identities.size());
    for (std::size_t i = 0; i < a.identities.size(); ++i)
        CHECK(a.identities[i].defect == b.identities[i].defect);
}
