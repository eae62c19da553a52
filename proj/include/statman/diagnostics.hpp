#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "statman/chart.hpp"
#include "statman/curvature.hpp"

namespace statman {

/// Two-threshold verdict: a defect d passes when d <= tol, fails when
/// d >= 10*tol, and is inconclusive in between.  Theorem equivalences are
/// exact; the arithmetic is not, so borderline defects must never be allowed
/// to falsify an equivalence.
enum class Verdict { pass, fail, inconclusive };

Verdict hysteresis(double defect, double tol);
const char* verdict_name(Verdict v);

/// One named classifier outcome.
struct Check {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    double defect = 0.0;
    double tol = 0.0;
    int points_tested = 0;
    std::string note;  // secondary defects, hypothesis flags, cross-checks
    bool pass() const { return verdict == Verdict::pass; }
};

/// Least-squares constant-curvature fit over sampled points.
struct FitResult {
    double k = 0.0;         // mean fitted constant
    double residual = 0.0;  // worst relative residual over points (per-point k)
    double residual_global = 0.0;  // worst residual against the mean k; this is
                                   // the defect of "constant curvature" as a
                                   // whole (in n = 2 the per-point residual can
                                   // vanish while k varies across points)
    double spread = 0.0;    // max |k_p - k_q| over point pairs
    Verdict verdict = Verdict::inconclusive;
    double tol = 0.0;
    int points_tested = 0;
    bool pass() const { return verdict == Verdict::pass; }
};

/// Is the cubic form zero (self-dual structure)?
Check check_conjugate_nabla(const Chart& chart, const std::vector<Point>& points, double tol);

/// Worst defect over points of each of the five equivalent conjugate-R
/// formulations, in the order: R = R*, total symmetry of nabla C, of the
/// LC derivative of C, of the LC derivative of K, (0,4) last-pair
/// antisymmetry.
std::array<double, 5> conjugate_R_defects(const Chart& chart, const std::vector<Point>& points);

/// Conjugate symmetry of the curvature; evaluates all five equivalent
/// conditions (R = R*, total symmetry of nabla C, of the LC derivative of C,
/// of the LC derivative of K, and the (0,4) last-pair antisymmetry) and
/// throws ConsistencyError when two of them disagree conclusively.
Check check_conjugate_R(const Chart& chart, const std::vector<Point>& points, double tol);

/// Conjugate symmetry of the Ricci tensor; cross-checked against the
/// divergence/trace form.  Throws ConsistencyError on conclusive
/// disagreement between the two forms.
Check check_conjugate_Ric(const Chart& chart, const std::vector<Point>& points, double tol);

/// Does tau (the trace of K) vanish?
Check check_trace_free(const Chart& chart, const std::vector<Point>& points, double tol);

/// Least-squares fit of R against g_{jk} delta^l_i - g_{ik} delta^l_j.
FitResult fit_constant_curvature(const Chart& chart, const std::vector<Point>& points,
                                 double tol, ConnKind kind = ConnKind::nabla,
                                 double alpha = 1.0);

/// Projective flatness: for n >= 3 the projective curvature P must vanish;
/// for n = 2 the covariant derivative of Ric must be totally symmetric.
/// Requires a symmetric Ricci tensor (locally equiaffine); a conclusive
/// asymmetry is reported as a failing check with note "NotEquiaffine".
Check check_projectively_flat(const Chart& chart, const std::vector<Point>& points, double tol,
                              ConnKind kind = ConnKind::nabla, double alpha = 1.0);

/// Sampled equivalence report for the constant-curvature characterizations.
struct TheoremReport {
    bool hypothesis_met = true;
    std::string hypothesis_note;
    Verdict A = Verdict::inconclusive;   // constant curvature of (g, nabla)
    Verdict B = Verdict::inconclusive;   // conj-R and projective flatness of nabla*
    Verdict C2 = Verdict::inconclusive;  // conj-Ric and projective flatness of nabla*
    bool has_C2 = false;
    bool conclusive = false;  // all relevant verdicts conclusive
    bool agree = false;       // pairwise equality of the conclusive booleans
    double k = 0.0;           // fitted constant when A holds
    double ricci_consequence_defect = 0.0;  // |Ric - (n-1) k g| when A holds
    FitResult fit;
    Check conj_R, conj_Ric, pflat_star;
};

/// Equivalence "constant curvature <=> conj-R and nabla* projectively flat",
/// verified on sampled points (never claimed globally).
TheoremReport verify_theorem_charactconst(const Chart& chart, const std::vector<Point>& points,
                                          double tol);

/// Trace-free refinement: adds the conj-Ric variant of the equivalence and
/// requires the trace-free hypothesis; when tau != 0 the report carries
/// hypothesis_met = false and no verdicts are compared.
TheoremReport verify_theorem_charactconst2(const Chart& chart,
                                           const std::vector<Point>& points, double tol);

struct AlphaRow {
    double alpha = 0.0;
    Check conj_R;
    FitResult fit;
};

struct AlphaScan {
    FitResult metric_fit;          // constant-curvature fit of the metric alone
    bool hypothesis_g_not_cc = false;  // metric NOT constant curvature
    std::vector<AlphaRow> rows;
};

/// Per-alpha table of conjugate symmetry and constant-curvature fit for the
/// family with cubic alpha*C.
AlphaScan alpha_scan(const Chart& chart, const std::vector<double>& alphas,
                     const std::vector<Point>& points, double tol);

/// Everything the `check` command reports.
struct DiagnosticsReport {
    std::string label;
    std::uint64_t seed = 0;
    int points = 0;
    double tol = 0.0;
    ValidationReport validation;
    std::vector<IdentityRow> identities;
    Check conj_nabla, conj_R, conj_Ric, trace_free;
    FitResult fit;
    Check pflat_nabla, pflat_star;
    TheoremReport thm_charactconst, thm_charactconst2;
    AlphaScan scan;
    bool all_pass = false;  // process health: validation + identities, not classification
};

DiagnosticsReport run_all(const Chart& chart, int point_count, std::uint64_t seed, double tol,
                          const std::vector<double>& alphas = {-1.0, -0.5, 0.0, 0.5, 1.0});

}  // namespace statman
