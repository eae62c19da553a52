// statman: load a manifold description, run geometry checks, evaluate
// tensors, sweep the alpha family, and verify the sampled theorem
// equivalences.  Exit codes: 0 ok, 1 check failure, 2 parse/usage error,
// 3 internal consistency error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "statman/curvature.hpp"
#include "statman/diagnostics.hpp"
#include "statman/manifold_file.hpp"
#include "statman/report.hpp"

namespace {

using namespace statman;
using ordered = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitConsistency = 3;

struct CommonOpts {
    std::string file;
    int points = 20;
    std::uint64_t seed = 0;
    double tol = -1.0;  // <0: use the chart's tier (analytic vs fd)
    std::string json_path;
    std::string conn = "nabla";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("file", o.file, "manifold description (JSON)")->required();
    cmd->add_option("--points", o.points, "sample points")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "sampling seed");
    cmd->add_option("--tol", o.tol, "check tolerance (default: 1e-8 analytic, 1e-4 fd)");
    cmd->add_option("--json", o.json_path, "also write a JSON report to this path");
}

double effective_tol(const CommonOpts& o, const Chart& chart) {
    return o.tol > 0 ? o.tol : chart.check_tol();
}

void write_json(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write JSON report to '" + path + "'");
    out << text;
}

std::pair<ConnKind, double> parse_conn(const std::string& name) {
    if (name == "nabla") return {ConnKind::nabla, 1.0};
    if (name == "nabla_star") return {ConnKind::nabla_star, -1.0};
    if (name == "levi_civita") return {ConnKind::levi_civita, 0.0};
    throw ParseError("unknown connection '" + name + "'");
}

Point parse_point(const std::string& text, int n) {
    Point p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            p.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("bad coordinate value '" + item + "'");
        }
    }
    if (static_cast<int>(p.size()) != n)
        throw ParseError("point has " + std::to_string(p.size()) + " coordinates, expected " +
                         std::to_string(n));
    return p;
}

std::vector<double> parse_alphas(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("bad alpha value '" + item + "'");
        }
    }
    if (out.empty()) throw ParseError("empty alpha list");
    return out;
}

// ---- eval ----

struct Evaluated {
    std::string quantity;
    std::vector<int> shape;        // rank copies of n
    std::vector<Variance> var;
    std::vector<double> data;
};

Evaluated evaluate_quantity(const Chart& chart, const Point& p, const std::string& q,
                            ConnKind conn_kind, double conn_alpha) {
    const int n = chart.n;
    auto from_tensor = [&](const Tensor& t) {
        Evaluated e;
        e.quantity = q;
        e.shape.assign(t.rank(), n);
        e.var = t.variance();
        e.data = t.data();
        return e;
    };
    auto raw = [&](std::vector<double> d, std::vector<Variance> v) {
        Evaluated e;
        e.quantity = q;
        e.shape.assign(v.size(), n);
        e.var = std::move(v);
        e.data = std::move(d);
        return e;
    };
    const Variance U = Variance::upper, L = Variance::lower;

    std::string base = q;
    double a = 0.0;
    bool has_alpha = false;
    if (auto pos = q.find(':'); pos != std::string::npos) {
        base = q.substr(0, pos);
        try {
            a = std::stod(q.substr(pos + 1));
        } catch (const std::exception&) {
            throw ParseError("bad alpha in quantity '" + q + "'");
        }
        has_alpha = true;
    }
    if (has_alpha && base != "gamma_alpha" && base != "Ralpha")
        throw ParseError("quantity '" + base + "' does not take an alpha");

    if (base == "g" || base == "ginv" || base == "C" || base == "K") {
        GeomJets gj = chart.geom(p, 0);
        if (base == "g") return raw(gj.g, {L, L});
        if (base == "ginv") return raw(gj.ginv, {U, U});
        if (base == "C") return raw(gj.c, {L, L, L});
        return raw(gj.K, {U, L, L});  // K^k_ij, layout [k][i][j]
    }
    if (base == "gamma_hat") return from_tensor(levi_civita(chart, p).gamma);
    if (base == "gamma") return from_tensor(nabla(chart, p).gamma);
    if (base == "gamma_star") return from_tensor(nabla_star(chart, p).gamma);
    if (base == "gamma_alpha") {
        if (!has_alpha) throw ParseError("gamma_alpha needs a value, e.g. gamma_alpha:0.5");
        return from_tensor(alpha_connection(chart, p, a).gamma);
    }
    if (base == "R") return from_tensor(riemann(chart, p, ConnKind::nabla));
    if (base == "Rstar") return from_tensor(riemann(chart, p, ConnKind::nabla_star));
    if (base == "Rhat") return from_tensor(riemann(chart, p, ConnKind::levi_civita));
    if (base == "Ralpha") {
        if (!has_alpha) throw ParseError("Ralpha needs a value, e.g. Ralpha:0.5");
        return from_tensor(riemann(chart, p, ConnKind::alpha, a));
    }
    if (base == "Ric") return from_tensor(ricci(riemann(chart, p, conn_kind, conn_alpha)));
    if (base == "Ricstar") return from_tensor(ricci(riemann(chart, p, ConnKind::nabla_star)));
    if (base == "tau" || base == "divK" || base == "S") {
        CurvaturePack pack = curvature_pack(chart, p);
        if (base == "tau") return raw(pack.tau, {L});
        if (base == "divK") return raw(pack.divK_hat, {L, L});
        return raw(pack.S, {L, L, L, L});
    }
    if (base == "P" || base == "Cot") {
        ProjectivePack pp = projective_pack(chart, p, conn_kind, conn_alpha);
        if (base == "P") return raw(pp.P, {U, L, L, L});
        return raw(pp.Cot, {L, L, L});
    }
    if (base == "Pstar") {
        ProjectivePack pp = projective_pack(chart, p, ConnKind::nabla_star);
        return raw(pp.P, {U, L, L, L});
    }
    throw ParseError("unknown quantity '" + q + "'");
}

void print_evaluated(const Chart& chart, const Point& p, const Evaluated& e) {
    std::cout << e.quantity << " at (";
    for (std::size_t i = 0; i < p.size(); ++i)
        std::cout << (i ? ", " : "") << chart.coords[i] << "=" << p[i];
    std::cout << "):\n";
    if (e.shape.empty()) {
        std::cout << "  " << e.data[0] << "\n";
        return;
    }
    const int n = chart.n;
    std::vector<int> idx(e.shape.size(), 0);
    std::size_t flat = 0;
    do {
        std::cout << "  " << e.quantity;
        for (std::size_t s = 0; s < idx.size(); ++s) {
            bool up = e.var[s] == Variance::upper;
            std::cout << (up ? "^" : "_") << chart.coords[idx[s]];
        }
        std::cout << " = " << e.data[flat++] << "\n";
    } while (Tensor::next_index(idx, n));
}

ordered evaluated_json(const Chart& chart, const Point& p, const Evaluated& e) {
    ordered j;
    j["tool_version"] = kToolVersion;
    j["manifold"] = chart.label;
    j["quantity"] = e.quantity;
    j["point"] = p;
    ordered var = ordered::array();
    for (Variance v : e.var) var.push_back(v == Variance::upper ? "upper" : "lower");
    j["variance"] = var;
    j["shape"] = e.shape;
    j["components"] = e.data;
    return j;
}

// ---- commands ----

int cmd_check(const CommonOpts& o) {
    ManifoldFile mf = load_manifold(o.file);
    double tol = effective_tol(o, mf.chart);
    DiagnosticsReport rep = run_all(mf.chart, o.points, o.seed, tol);
    std::cout << report_to_text(rep);
    if (!o.json_path.empty()) write_json(o.json_path, report_to_json(rep));
    bool theorem_breach =
        (rep.thm_charactconst.conclusive && !rep.thm_charactconst.agree) ||
        (rep.thm_charactconst2.hypothesis_met && rep.thm_charactconst2.conclusive &&
         !rep.thm_charactconst2.agree);
    return (rep.all_pass && !theorem_breach) ? kExitOk : kExitCheckFailed;
}

int cmd_eval(const CommonOpts& o, const std::string& point_text, const std::string& quantity) {
    ManifoldFile mf = load_manifold(o.file);
    Point p = parse_point(point_text, mf.chart.n);
    auto [kind, alpha] = parse_conn(o.conn);
    Evaluated e = evaluate_quantity(mf.chart, p, quantity, kind, alpha);
    print_evaluated(mf.chart, p, e);
    if (!o.json_path.empty())
        write_json(o.json_path, evaluated_json(mf.chart, p, e).dump(2) + "\n");
    return kExitOk;
}

int cmd_alpha_scan(const CommonOpts& o, const std::string& alpha_text) {
    ManifoldFile mf = load_manifold(o.file);
    double tol = effective_tol(o, mf.chart);
    std::vector<double> alphas = parse_alphas(alpha_text);
    std::vector<Point> pts = sample_points(mf.chart, o.points, o.seed);
    AlphaScan scan = alpha_scan(mf.chart, alphas, pts, tol);
    std::cout << "manifold: " << mf.name << "\n";
    std::cout << "metric constant-curvature fit: " << verdict_name(scan.metric_fit.verdict)
              << "  k=" << scan.metric_fit.k << "  residual=" << scan.metric_fit.residual
              << "\nhypothesis g-not-constant-curvature: "
              << (scan.hypothesis_g_not_cc ? "met" : "NOT met") << "\n";
    for (const AlphaRow& r : scan.rows)
        std::cout << "alpha=" << r.alpha << "  conj-R=" << verdict_name(r.conj_R.verdict)
                  << "  cc-fit=" << verdict_name(r.fit.verdict) << "  k=" << r.fit.k
                  << "  residual=" << r.fit.residual
                  << "  hypothesis_g_not_cc=" << (scan.hypothesis_g_not_cc ? "true" : "false")
                  << "\n";
    if (!o.json_path.empty()) {
        ordered j;
        j["tool_version"] = kToolVersion;
        j["manifold"] = mf.name;
        j["seed"] = o.seed;
        j["points"] = o.points;
        j["tol"] = tol;
        j["metric_fit_k"] = scan.metric_fit.k;
        j["metric_fit_verdict"] = verdict_name(scan.metric_fit.verdict);
        j["hypothesis_g_not_cc"] = scan.hypothesis_g_not_cc;
        ordered rows = ordered::array();
        for (const AlphaRow& r : scan.rows)
            rows.push_back(ordered{{"alpha", r.alpha},
                                   {"conj_R", verdict_name(r.conj_R.verdict)},
                                   {"k", r.fit.k},
                                   {"residual", r.fit.residual},
                                   {"verdict", verdict_name(r.fit.verdict)},
                                   {"hypothesis_g_not_cc", scan.hypothesis_g_not_cc}});
        j["rows"] = rows;
        write_json(o.json_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_verify_theorems(const CommonOpts& o) {
    ManifoldFile mf = load_manifold(o.file);
    double tol = effective_tol(o, mf.chart);
    std::vector<Point> pts = sample_points(mf.chart, o.points, o.seed);
    TheoremReport t1 = verify_theorem_charactconst(mf.chart, pts, tol);
    TheoremReport t2 = verify_theorem_charactconst2(mf.chart, pts, tol);
    std::cout << "manifold: " << mf.name << "  (points=" << o.points << ", seed=" << o.seed
              << ", tol=" << tol << ")\n";
    auto show = [&](const char* title, const TheoremReport& t) {
        std::cout << title << ": A=" << verdict_name(t.A) << "  B=" << verdict_name(t.B);
        if (t.has_C2) std::cout << "  C=" << verdict_name(t.C2);
        std::cout << "  agree="
                  << (t.agree ? "yes" : (t.conclusive ? "NO" : "inconclusive"));
        if (!t.hypothesis_met) std::cout << "  [" << t.hypothesis_note << "]";
        if (t.A == Verdict::pass) std::cout << "  k=" << t.k;
        std::cout << "\n";
    };
    show("constant curvature <=> conj-R & pflat(nabla*) [sampled]", t1);
    show("trace-free variant (adds conj-Ric)          [sampled]", t2);
    if (!o.json_path.empty()) {
        ordered j;
        j["tool_version"] = kToolVersion;
        j["manifold"] = mf.name;
        j["seed"] = o.seed;
        j["points"] = o.points;
        j["tol"] = tol;
        auto tj = [](const TheoremReport& t) {
            ordered j2{{"hypothesis_met", t.hypothesis_met},
                       {"A", verdict_name(t.A)},
                       {"B", verdict_name(t.B)}};
            if (t.has_C2) j2["C"] = verdict_name(t.C2);
            j2["conclusive"] = t.conclusive;
            j2["agree"] = t.agree;
            j2["k"] = t.k;
            return j2;
        };
        j["characterization"] = tj(t1);
        j["characterization_trace_free"] = tj(t2);
        write_json(o.json_path, j.dump(2) + "\n");
    }
    bool breach = (t1.conclusive && !t1.agree) ||
                  (t2.hypothesis_met && t2.conclusive && !t2.agree);
    return breach ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"statistical-manifold geometry checker"};
    app.require_subcommand(1);

    CommonOpts check_o, eval_o, scan_o, thm_o;
    std::string point_text, quantity, alpha_text = "-1,-0.5,0,0.5,1";

    CLI::App* c_check = app.add_subcommand("check", "validate and classify a manifold");
    add_common(c_check, check_o);

    CLI::App* c_eval = app.add_subcommand("eval", "evaluate a tensor at a point");
    add_common(c_eval, eval_o);
    c_eval->add_option("--point", point_text, "comma-separated coordinates")->required();
    c_eval->add_option("--quantity", quantity,
                       "g ginv C K gamma_hat gamma gamma_star gamma_alpha:<a> R Rstar Rhat "
                       "Ralpha:<a> Ric Ricstar tau divK S P Pstar Cot")
        ->required();
    c_eval->add_option("--conn", eval_o.conn, "connection for Ric/P/Cot")
        ->check(CLI::IsMember({"nabla", "nabla_star", "levi_civita"}));

    CLI::App* c_scan = app.add_subcommand("alpha-scan", "sweep the alpha-connection family");
    add_common(c_scan, scan_o);
    c_scan->add_option("--alphas", alpha_text, "comma-separated alpha values");

    CLI::App* c_thm = app.add_subcommand("verify-theorems",
                                         "sampled constant-curvature equivalences");
    add_common(c_thm, thm_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitParse;
    }

    try {
        if (c_check->parsed()) return cmd_check(check_o);
        if (c_eval->parsed()) return cmd_eval(eval_o, point_text, quantity);
        if (c_scan->parsed()) return cmd_alpha_scan(scan_o, alpha_text);
        return cmd_verify_theorems(thm_o);
    } catch (const ConsistencyError& e) {
        std::cerr << "consistency error: " << e.what() << "\n";
        return kExitConsistency;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}
