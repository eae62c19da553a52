#include "statman/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "statman/errors.hpp"

namespace statman {

namespace {

using ordered = nlohmann::ordered_json;

double finite(double x) {
    if (!std::isfinite(x)) throw ConsistencyError("non-finite value in report");
    return x;
}

ordered to_json(const Check& c) {
    return ordered{{"name", c.name},
                   {"verdict", verdict_name(c.verdict)},
                   {"pass", c.verdict == Verdict::pass},
                   {"defect", finite(c.defect)},
                   {"tol", finite(c.tol)},
                   {"points_tested", c.points_tested},
                   {"note", c.note}};
}

ordered to_json(const FitResult& f) {
    return ordered{{"verdict", verdict_name(f.verdict)},
                   {"pass", f.verdict == Verdict::pass},
                   {"k", finite(f.k)},
                   {"residual", finite(f.residual)},
                   {"residual_global", finite(f.residual_global)},
                   {"spread", finite(f.spread)},
                   {"tol", finite(f.tol)},
                   {"points_tested", f.points_tested}};
}

ordered to_json(const TheoremReport& t) {
    ordered j{{"hypothesis_met", t.hypothesis_met},
              {"hypothesis_note", t.hypothesis_note},
              {"A_constant_curvature", verdict_name(t.A)},
              {"B_conjR_and_pflat_star", verdict_name(t.B)}};
    if (t.has_C2) j["C_conjRic_and_pflat_star"] = verdict_name(t.C2);
    j["conclusive"] = t.conclusive;
    j["agree"] = t.agree;
    j["k"] = finite(t.k);
    j["ricci_consequence_defect"] = finite(t.ricci_consequence_defect);
    j["fit"] = to_json(t.fit);
    j["conj_R"] = to_json(t.conj_R);
    if (t.has_C2) j["conj_Ric"] = to_json(t.conj_Ric);
    j["pflat_star"] = to_json(t.pflat_star);
    return j;
}

ordered to_json(const AlphaScan& s) {
    ordered rows = ordered::array();
    for (const AlphaRow& r : s.rows)
        rows.push_back(ordered{{"alpha", finite(r.alpha)},
                               {"conj_R", to_json(r.conj_R)},
                               {"fit", to_json(r.fit)},
                               {"hypothesis_g_not_cc", s.hypothesis_g_not_cc}});
    return ordered{{"metric_fit", to_json(s.metric_fit)},
                   {"hypothesis_g_not_cc", s.hypothesis_g_not_cc},
                   {"rows", rows}};
}

std::vector<IdentityRow> sorted_rows(const DiagnosticsReport& rep) {
    std::vector<IdentityRow> rows = rep.identities;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const IdentityRow& a, const IdentityRow& b) {
                         return a.defect > b.defect;
                     });
    return rows;
}

std::string sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

}  // namespace

std::string report_to_json(const DiagnosticsReport& rep) {
    ordered j;
    j["schema"] = "statman/1";
    j["tool_version"] = kToolVersion;
    j["manifold"] = rep.label;
    j["seed"] = rep.seed;
    j["points"] = rep.points;
    j["tol"] = finite(rep.tol);

    ordered issues = ordered::array();
    for (const ValidationIssue& is : rep.validation.issues) {
        ordered pt = ordered::array();
        for (double v : is.p) pt.push_back(finite(v));
        issues.push_back(ordered{{"point", pt}, {"what", is.what}, {"defect", finite(is.defect)}});
    }
    j["validation"] = ordered{{"pass", rep.validation.pass},
                              {"points_tested", rep.validation.points_tested},
                              {"issues", issues}};

    ordered ids = ordered::array();
    for (const IdentityRow& r : sorted_rows(rep))
        ids.push_back(ordered{{"name", r.name}, {"defect", finite(r.defect)}});
    j["identities"] = ids;

    j["checks"] = ordered{{"conjugate_nabla", to_json(rep.conj_nabla)},
                          {"conjugate_R", to_json(rep.conj_R)},
                          {"conjugate_Ric", to_json(rep.conj_Ric)},
                          {"trace_free", to_json(rep.trace_free)},
                          {"projectively_flat_nabla", to_json(rep.pflat_nabla)},
                          {"projectively_flat_nabla_star", to_json(rep.pflat_star)}};
    j["constant_curvature"] = to_json(rep.fit);
    j["theorems"] = ordered{{"characterization", to_json(rep.thm_charactconst)},
                            {"characterization_trace_free", to_json(rep.thm_charactconst2)}};
    j["alpha_scan"] = to_json(rep.scan);
    j["all_pass"] = rep.all_pass;
    return j.dump(2) + "\n";
}

std::string report_to_text(const DiagnosticsReport& rep) {
    std::ostringstream os;
    os << "manifold: " << rep.label << "  (points=" << rep.points << ", seed=" << rep.seed
       << ", tol=" << sci(rep.tol) << ")\n";
    os << "validation: " << (rep.validation.pass ? "pass" : "FAIL") << " ("
       << rep.validation.points_tested << " points";
    if (!rep.validation.issues.empty()) os << ", " << rep.validation.issues.size() << " issues";
    os << ")\n";
    for (const ValidationIssue& is : rep.validation.issues)
        os << "  issue: " << is.what << "  defect=" << sci(is.defect) << "\n";

    os << "\nidentity suite (worst first):\n";
    for (const IdentityRow& r : sorted_rows(rep))
        os << "  " << sci(r.defect) << "  " << r.name << "\n";

    auto line = [&](const Check& c) {
        os << "  " << c.name << ": " << verdict_name(c.verdict) << "  defect=" << sci(c.defect);
        if (!c.note.empty()) os << "  [" << c.note << "]";
        os << "\n";
    };
    os << "\nclassifiers:\n";
    line(rep.conj_nabla);
    line(rep.conj_R);
    line(rep.conj_Ric);
    line(rep.trace_free);
    line(rep.pflat_nabla);
    line(rep.pflat_star);
    os << "  constant curvature (nabla): " << verdict_name(rep.fit.verdict)
       << "  k=" << rep.fit.k << "  residual=" << sci(rep.fit.residual)
       << "  spread=" << sci(rep.fit.spread) << "\n";

    auto thm = [&](const char* title, const TheoremReport& t) {
        os << "  " << title << ": A=" << verdict_name(t.A) << "  B=" << verdict_name(t.B);
        if (t.has_C2) os << "  C=" << verdict_name(t.C2);
        os << "  agree=" << (t.agree ? "yes" : (t.conclusive ? "NO" : "inconclusive"));
        if (!t.hypothesis_met) os << "  [" << t.hypothesis_note << "]";
        if (t.A == Verdict::pass)
            os << "  k=" << t.k << "  |Ric-(n-1)kg|=" << sci(t.ricci_consequence_defect);
        os << "\n";
    };
    os << "\ntheorem equivalences (sampled, not proved):\n";
    thm("constant curvature <=> conj-R & pflat(nabla*)", rep.thm_charactconst);
    thm("trace-free variant (adds conj-Ric)", rep.thm_charactconst2);

    os << "\nalpha scan (metric constant-curvature fit: "
       << verdict_name(rep.scan.metric_fit.verdict) << ", k=" << rep.scan.metric_fit.k
       << "; hypothesis g-not-constant-curvature: "
       << (rep.scan.hypothesis_g_not_cc ? "met" : "NOT met") << "):\n";
    for (const AlphaRow& r : rep.scan.rows) {
        os << "  alpha=" << std::setw(5) << r.alpha << "  conj-R=" << std::setw(12)
           << verdict_name(r.conj_R.verdict) << "  cc-fit=" << std::setw(12)
           << verdict_name(r.fit.verdict) << "  k=" << r.fit.k
           << "  residual=" << sci(r.fit.residual) << "\n";
    }
    os << "\noverall (validation + identities): " << (rep.all_pass ? "pass" : "FAIL") << "\n";
    return os.str();
}

}  // namespace statman
