#include "statman/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "statman/errors.hpp"

namespace statman {

namespace {

constexpr double kFailFactor = 10.0;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

bool conclusive(Verdict v) { return v != Verdict::inconclusive; }

/// Combine the verdicts of a conjunction of checks: fail dominates, then
/// inconclusive; pass only when every part passes.
Verdict conjoin(Verdict a, Verdict b) {
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    if (a == Verdict::pass && b == Verdict::pass) return Verdict::pass;
    return Verdict::inconclusive;
}

std::vector<Variance> low(int r) { return std::vector<Variance>(r, Variance::lower); }

}  // namespace

Verdict hysteresis(double defect, double tol) {
    if (defect <= tol) return Verdict::pass;
    if (defect >= kFailFactor * tol) return Verdict::fail;
    return Verdict::inconclusive;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

Check check_conjugate_nabla(const Chart& chart, const std::vector<Point>& points, double tol) {
    Check out;
    out.name = "conjugate nabla (C = 0)";
    out.tol = tol;
    out.points_tested = static_cast<int>(points.size());
    double c_norm = 0.0, k_norm = 0.0;
    for (const Point& p : points) {
        GeomJets gj = chart.geom(p, 0);
        c_norm = std::max(c_norm, max_abs(gj.c));
        k_norm = std::max(k_norm, max_abs(gj.K));
    }
    out.defect = c_norm;
    out.verdict = hysteresis(c_norm, tol);
    Verdict vk = hysteresis(k_norm, tol);
    out.note = "|K| = " + fmt(k_norm);
    if (conclusive(out.verdict) && conclusive(vk) && out.verdict != vk) {
        // C = 0 iff K = 0 exactly; a split verdict means the metric scales
        // one norm across the hysteresis band.  Refuse to classify.
        out.verdict = Verdict::inconclusive;
        out.note += " (C/K verdicts split by metric scaling)";
    }
    return out;
}

std::array<double, 5> conjugate_R_defects(const Chart& chart, const std::vector<Point>& points) {
    const int n = chart.n;
    // The five equivalent formulations, aggregated worst-over-points.
    double d_rr = 0.0;       // R = R*
    double d_nc = 0.0;       // nabla C totally symmetric
    double d_hc = 0.0;       // nabla_hat C totally symmetric
    double d_hk = 0.0;       // nabla_hat K totally symmetric (lower slots)
    double d_anti = 0.0;     // R_(0,4) antisymmetric in the last pair
    for (const Point& p : points) {
        GeomJets gj = chart.geom(p, 1);
        ConnJets cn = connection_from_geom(gj, ConnKind::nabla);
        std::vector<double> R = riemann_raw(n, cn.G, cn.dG);
        ConnJets cs = connection_from_geom(gj, ConnKind::nabla_star);
        std::vector<double> Rs = riemann_raw(n, cs.G, cs.dG);
        d_rr = std::max(d_rr, rel_defect_raw(R, Rs));

        Tensor nC(n, low(4), covd_raw(n, low(3), gj.c, gj.dc, cn.G));
        d_nc = std::max(d_nc, symmetry_defect(nC, {0, 1, 2, 3}) / std::max(1.0, max_norm(nC)));
        Tensor hC(n, low(4), covd_raw(n, low(3), gj.c, gj.dc, gj.Gh));
        d_hc = std::max(d_hc, symmetry_defect(hC, {0, 1, 2, 3}) / std::max(1.0, max_norm(hC)));
        Tensor hK(n, {Variance::lower, Variance::upper, Variance::lower, Variance::lower},
                  covd_raw(n, {Variance::upper, Variance::lower, Variance::lower}, gj.K,
                           gj.dK, gj.Gh));
        d_hk = std::max(d_hk, symmetry_defect(hK, {0, 2, 3}) / std::max(1.0, max_norm(hK)));

        std::vector<double> R04 = lower_first_raw(n, R, gj.g);
        double scale = std::max(1.0, max_abs(R04));
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int w = 0; w < n; ++w)
                        worst = std::max(worst,
                                         std::abs(R04[((i * n + j) * n + k) * n + w] +
                                                  R04[((i * n + j) * n + w) * n + k]));
        d_anti = std::max(d_anti, worst / scale);
    }
    return {d_rr, d_nc, d_hc, d_hk, d_anti};
}

Check check_conjugate_R(const Chart& chart, const std::vector<Point>& points, double tol) {
    const std::array<double, 5> defects = conjugate_R_defects(chart, points);
    static const char* names[5] = {"R=R*", "sym(nabla C)", "sym(hat-nabla C)",
                                   "sym(hat-nabla K)", "antisym((0,4) last pair)"};
    Verdict v[5];
    bool any_pass = false, any_fail = false;
    for (int i = 0; i < 5; ++i) {
        v[i] = hysteresis(defects[i], tol);
        any_pass = any_pass || v[i] == Verdict::pass;
        any_fail = any_fail || v[i] == Verdict::fail;
    }
    if (any_pass && any_fail) {
        std::ostringstream os;
        os << "conjugate-R formulations disagree conclusively:";
        for (int i = 0; i < 5; ++i)
            os << " " << names[i] << "=" << fmt(defects[i]) << "(" << verdict_name(v[i]) << ")";
        throw ConsistencyError(os.str());
    }
    Check out;
    out.name = "conjugate R (five formulations)";
    out.tol = tol;
    out.points_tested = static_cast<int>(points.size());
    out.defect = *std::max_element(defects.begin(), defects.end());
    out.verdict = any_fail ? Verdict::fail
                           : (std::all_of(v, v + 5, [](Verdict x) { return x == Verdict::pass; })
                                  ? Verdict::pass
                                  : Verdict::inconclusive);
    std::ostringstream os;
    for (int i = 0; i < 5; ++i) os << (i ? ", " : "") << names[i] << " = " << fmt(defects[i]);
    out.note = os.str();
    return out;
}

Check check_conjugate_Ric(const Chart& chart, const std::vector<Point>& points, double tol) {
    const int n = chart.n;
    double d_ric = 0.0;   // Ric = Ric*
    double d_div = 0.0;   // div K = hat-nabla tau (equivalent form)
    double d_sym = 0.0;   // symmetry of Ric (consequence)
    for (const Point& p : points) {
        GeomJets gj = chart.geom(p, 1);
        ConnJets cn = connection_from_geom(gj, ConnKind::nabla);
        ConnJets cs = connection_from_geom(gj, ConnKind::nabla_star);
        std::vector<double> Ric = ricci_raw(n, riemann_raw(n, cn.G, cn.dG));
        std::vector<double> Rics = ricci_raw(n, riemann_raw(n, cs.G, cs.dG));
        d_ric = std::max(d_ric, rel_defect_raw(Ric, Rics));

        // tau_i = K^m_{im} and its partials, from the difference-tensor jets.
        std::vector<double> tau(n, 0.0), dtau(n * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m) {
                tau[i] += gj.K[(m * n + i) * n + m];
                for (int q = 0; q < n; ++q)
                    dtau[q * n + i] += gj.dK[((q * n + m) * n + i) * n + m];
            }
        std::vector<double> hTau = covd_raw(n, low(1), tau, dtau, gj.Gh);
        std::vector<double> hK =
            covd_raw(n, {Variance::upper, Variance::lower, Variance::lower}, gj.K, gj.dK,
                     gj.Gh);
        std::vector<double> divK(n * n, 0.0);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    divK[j * n + k] += hK[((i * n + i) * n + j) * n + k];
        d_div = std::max(d_div, rel_defect_raw(divK, hTau));

        Tensor ric_t(n, low(2), Ric);
        d_sym = std::max(d_sym, symmetry_defect(ric_t, {0, 1}) / std::max(1.0, max_norm(ric_t)));
    }
    Verdict v1 = hysteresis(d_ric, tol), v2 = hysteresis(d_div, tol);
    if (conclusive(v1) && conclusive(v2) && v1 != v2)
        throw ConsistencyError("conjugate-Ric forms disagree conclusively: Ric=Ric* defect " +
                               fmt(d_ric) + " vs div K = hat-nabla tau defect " + fmt(d_div));
    Check out;
    out.name = "conjugate Ric";
    out.tol = tol;
    out.points_tested = static_cast<int>(points.size());
    out.defect = std::max(d_ric, d_div);
    out.verdict = conjoin(v1, v2);
    out.note = "div-form = " + fmt(d_div) + ", Ric asymmetry = " + fmt(d_sym);
    // Consequence: conjugate symmetry of Ric forces Ric symmetric.
    if (out.verdict == Verdict::pass && hysteresis(d_sym, tol) == Verdict::fail)
        throw ConsistencyError("conjugate Ric passed but Ric is conclusively asymmetric (" +
                               fmt(d_sym) + ")");
    return out;
}

Check check_trace_free(const Chart& chart, const std::vector<Point>& points, double tol) {
    Check out;
    out.name = "trace-free (tau = 0)";
    out.tol = tol;
    out.points_tested = static_cast<int>(points.size());
    const int n = chart.n;
    double worst = 0.0;
    for (const Point& p : points) {
        GeomJets gj = chart.geom(p, 0);
        for (int i = 0; i < n; ++i) {
            double t = 0.0;
            for (int m = 0; m < n; ++m) t += gj.K[(m * n + i) * n + m];
            worst = std::max(worst, std::abs(t));
        }
    }
    out.defect = worst;
    out.verdict = hysteresis(worst, tol);
    return out;
}

FitResult fit_constant_curvature(const Chart& chart, const std::vector<Point>& points,
                                 double tol, ConnKind kind, double alpha) {
    const int n = chart.n;
    FitResult out;
    out.tol = tol;
    out.points_tested = static_cast<int>(points.size());
    std::vector<double> ks;
    std::vector<std::vector<double>> Rs, Ts;
    double max_res = 0.0;
    for (const Point& p : points) {
        GeomJets gj = chart.geom(p, 1);
        ConnJets cn = connection_from_geom(gj, kind, alpha);
        std::vector<double> R = riemann_raw(n, cn.G, cn.dG);
        std::vector<double> T = suspension_raw(n, gj.g);
        double rt = 0.0, tt = 0.0;
        for (std::size_t f = 0; f < R.size(); ++f) {
            rt += R[f] * T[f];
            tt += T[f] * T[f];
        }
        if (tt < 1e-12)
            throw DegenerateFit("suspension of g has vanishing norm (internal error)");
        double kp = rt / tt;
        double scale = std::max(1.0, max_abs(R));
        double res = 0.0;
        for (std::size_t f = 0; f < R.size(); ++f)
            res = std::max(res, std::abs(R[f] - kp * T[f]));
        max_res = std::max(max_res, res / scale);
        ks.push_back(kp);
        Rs.push_back(std::move(R));
        Ts.push_back(std::move(T));
    }
    auto [mn, mx] = std::minmax_element(ks.begin(), ks.end());
    out.spread = *mx - *mn;
    out.residual = max_res;
    double sum = 0.0;
    for (double k : ks) sum += k;
    out.k = sum / static_cast<double>(ks.size());
    // Residual against the single mean k: the defect of constant curvature as
    // a whole.  In n = 2 the per-point residual can vanish identically while
    // the fitted constant drifts across points.
    for (std::size_t q = 0; q < Rs.size(); ++q) {
        double scale = std::max(1.0, max_abs(Rs[q]));
        double res = 0.0;
        for (std::size_t f = 0; f < Rs[q].size(); ++f)
            res = std::max(res, std::abs(Rs[q][f] - out.k * Ts[q][f]));
        out.residual_global = std::max(out.residual_global, res / scale);
    }
    Verdict vr = hysteresis(max_res, tol);
    Verdict vs = hysteresis(out.spread, tol * std::max(1.0, std::abs(out.k)));
    out.verdict = conjoin(vr, vs);
    return out;
}

Check check_projectively_flat(const Chart& chart, const std::vector<Point>& points, double tol,
                              ConnKind kind, double alpha) {
    const int n = chart.n;
    Check out;
    out.name = "projectively flat";
    out.tol = tol;
    out.points_tested = static_cast<int>(points.size());
    if (n < 2) throw DimensionError("projective flatness needs n >= 2");

    double ric_asym = 0.0, p_norm = 0.0, cot_norm = 0.0;
    for (const Point& p : points) {
        ProjectivePack pp = projective_pack(chart, p, kind, alpha);
        Tensor ric(n, low(2), pp.gamma);  // scaled Ric; asymmetry scales too
        double scale = std::max(1.0, max_norm(ric));
        ric_asym = std::max(ric_asym, symmetry_defect(ric, {0, 1}) / scale);
        Tensor R = riemann(chart, p, kind, alpha);
        double rscale = std::max(1.0, max_norm(R));
        p_norm = std::max(p_norm, max_abs(pp.P) / rscale);
        cot_norm = std::max(cot_norm, max_abs(pp.Cot) / rscale);
    }
    if (hysteresis(ric_asym, tol) == Verdict::fail) {
        // Not locally equiaffine: projective flatness is not defined.
        out.verdict = Verdict::fail;
        out.defect = ric_asym;
        out.note = "NotEquiaffine (Ric asymmetry " + fmt(ric_asym) + ")";
        return out;
    }
    if (n >= 3) {
        out.defect = p_norm;
        out.verdict = hysteresis(p_norm, tol);
        out.note = "|P| = " + fmt(p_norm) + ", nabla-Ric symmetry defect = " + fmt(cot_norm);
    } else {
        // n = 2: P vanishes identically; the criterion is total symmetry of
        // nabla Ric, i.e. a vanishing Cotton tensor given Ric symmetric.
        out.defect = std::max(cot_norm, ric_asym);
        out.verdict = hysteresis(out.defect, tol);
        out.note = "nabla-Ric symmetry defect = " + fmt(out.defect);
    }
    return out;
}

TheoremReport verify_theorem_charactconst(const Chart& chart, const std::vector<Point>& points,
                                          double tol) {
    TheoremReport rep;
    rep.fit = fit_constant_curvature(chart, points, tol, ConnKind::nabla);
    rep.conj_R = check_conjugate_R(chart, points, tol);
    rep.pflat_star = check_projectively_flat(chart.dual(), points, tol, ConnKind::nabla);
    rep.A = rep.fit.verdict;
    rep.B = conjoin(rep.conj_R.verdict, rep.pflat_star.verdict);
    rep.k = rep.fit.k;
    rep.conclusive = conclusive(rep.A) && conclusive(rep.B);
    rep.agree = rep.conclusive && rep.A == rep.B;
    if (rep.A == Verdict::pass) {
        // Consequence of constant curvature: Ric = (n-1) k g.
        const int n = chart.n;
        double worst = 0.0;
        for (const Point& p : points) {
            GeomJets gj = chart.geom(p, 1);
            ConnJets cn = connection_from_geom(gj, ConnKind::nabla);
            std::vector<double> ric = ricci_raw(n, riemann_raw(n, cn.G, cn.dG));
            double scale = std::max(1.0, max_abs(ric));
            for (int i = 0; i < n * n; ++i)
                worst = std::max(worst,
                                 std::abs(ric[i] - (n - 1) * rep.k * gj.g[i]) / scale);
        }
        rep.ricci_consequence_defect = worst;
        if (hysteresis(worst, tol) == Verdict::fail)
            throw ConsistencyError(
                "constant curvature holds but Ric != (n-1) k g, defect " + fmt(worst));
    }
    return rep;
}

TheoremReport verify_theorem_charactconst2(const Chart& chart,
                                           const std::vector<Point>& points, double tol) {
    TheoremReport rep = verify_theorem_charactconst(chart, points, tol);
    rep.has_C2 = true;
    rep.conj_Ric = check_conjugate_Ric(chart, points, tol);
    rep.C2 = conjoin(rep.conj_Ric.verdict, rep.pflat_star.verdict);
    Check tf = check_trace_free(chart, points, tol);
    if (tf.verdict != Verdict::pass) {
        rep.hypothesis_met = false;
        rep.hypothesis_note =
            "HypothesisNotMet: structure is not trace-free (|tau| = " + fmt(tf.defect) + ")";
        rep.conclusive = false;
        rep.agree = false;
        return rep;
    }
    rep.conclusive = conclusive(rep.A) && conclusive(rep.B) && conclusive(rep.C2);
    rep.agree = rep.conclusive && rep.A == rep.B && rep.B == rep.C2;
    return rep;
}

AlphaScan alpha_scan(const Chart& chart, const std::vector<double>& alphas,
                     const std::vector<Point>& points, double tol) {
    AlphaScan scan;
    scan.metric_fit = fit_constant_curvature(chart, points, tol, ConnKind::levi_civita);
    scan.hypothesis_g_not_cc = scan.metric_fit.verdict == Verdict::fail;
    for (double a : alphas) {
        Chart ca = chart.alpha_variant(a);
        AlphaRow row;
        row.alpha = a;
        row.conj_R = check_conjugate_R(ca, points, tol);
        row.fit = fit_constant_curvature(ca, points, tol, ConnKind::nabla);
        scan.rows.push_back(std::move(row));
    }
    return scan;
}

DiagnosticsReport run_all(const Chart& chart, int point_count, std::uint64_t seed, double tol,
                          const std::vector<double>& alphas) {
    DiagnosticsReport rep;
    rep.label = chart.label;
    rep.seed = seed;
    rep.points = point_count;
    rep.tol = tol;
    std::vector<Point> pts = sample_points(chart, point_count, seed);
    rep.validation = validate_statistical(chart, pts, tol);
    rep.identities = identity_suite(chart, pts, alphas);
    rep.conj_nabla = check_conjugate_nabla(chart, pts, tol);
    rep.conj_R = check_conjugate_R(chart, pts, tol);
    rep.conj_Ric = check_conjugate_Ric(chart, pts, tol);
    rep.trace_free = check_trace_free(chart, pts, tol);
    rep.fit = fit_constant_curvature(chart, pts, tol, ConnKind::nabla);
    rep.pflat_nabla = check_projectively_flat(chart, pts, tol, ConnKind::nabla);
    rep.pflat_nabla.name += " (nabla)";
    rep.pflat_star = check_projectively_flat(chart.dual(), pts, tol, ConnKind::nabla);
    rep.pflat_star.name += " (nabla*)";
    rep.thm_charactconst = verify_theorem_charactconst(chart, pts, tol);
    rep.thm_charactconst2 = verify_theorem_charactconst2(chart, pts, tol);
    rep.scan = alpha_scan(chart, alphas, pts, tol);
    double worst_identity = 0.0;
    for (const IdentityRow& r : rep.identities)
        worst_identity = std::max(worst_identity, r.defect);
    rep.all_pass = rep.validation.pass && worst_identity <= tol;
    return rep;
}

}  // namespace statman
