#include "statman/models.hpp"

#include <cmath>

#include "statman/special.hpp"

namespace statman {

namespace {

using MetricMap = std::map<std::pair<int, int>, ScalarField>;
using CubicMap = std::map<std::array<int, 3>, ScalarField>;

ScalarField jet_field(int n, ScalarField::JetFn fn) {
    return ScalarField::analytic(n, std::move(fn));
}

Jet var(const Point& p, int i, int order) { return Jet::variable(p, i, order); }

}  // namespace

Chart euclidean_chart(int n) {
    if (n < 2) throw ParamError("euclidean dimension must be >= 2");
    MetricMap g;
    for (int i = 0; i < n; ++i) g[{i, i}] = ScalarField::constant(n, 1.0);
    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back("x" + std::to_string(i));
    std::vector<std::array<double, 2>> box(static_cast<std::size_t>(n), {-1.0, 1.0});
    return make_chart(n, std::move(coords), "euclidean(" + std::to_string(n) + ")", g, {},
                      std::move(box));
}

Chart sphere_chart(double r) {
    if (!(r > 0.0)) throw ParamError("sphere radius must be positive");
    MetricMap g;
    g[{0, 0}] = ScalarField::constant(2, r * r);
    g[{1, 1}] = jet_field(2, [r](const Point& p, int o) {
        Jet s = sin(var(p, 0, o));
        return (r * r) * s * s;
    });
    return make_chart(2, {"theta", "phi"}, "sphere(r=" + std::to_string(r) + ")", g, {},
                      {{0.4, 2.7}, {-3.0, 3.0}});
}

Chart hyperbolic_chart() {
    MetricMap g;
    auto inv_y2 = jet_field(2, [](const Point& p, int o) {
        Jet y = var(p, 1, o);
        return 1.0 / (y * y);
    });
    g[{0, 0}] = inv_y2;
    g[{1, 1}] = inv_y2;
    return make_chart(2, {"x", "y"}, "hyperbolic half-plane", g, {},
                      {{-1.0, 1.0}, {0.5, 2.5}});
}

Chart normal_fisher_chart() {
    MetricMap g;
    CubicMap c;
    auto pw = [](const Point& p, int o, double coeff, int k) {
        Jet s = var(p, 1, o);
        Jet r = Jet::constant(s.n, o, coeff);
        for (int i = 0; i < k; ++i) r = r / s;
        return r;
    };
    g[{0, 0}] = jet_field(2, [pw](const Point& p, int o) { return pw(p, o, 1.0, 2); });
    g[{1, 1}] = jet_field(2, [pw](const Point& p, int o) { return pw(p, o, 2.0, 2); });
    c[{0, 0, 1}] = jet_field(2, [pw](const Point& p, int o) { return pw(p, o, 2.0, 3); });
    c[{1, 1, 1}] = jet_field(2, [pw](const Point& p, int o) { return pw(p, o, 8.0, 3); });
    return make_chart(2, {"mu", "sigma"}, "normal Fisher", g, c, {{-1.0, 1.0}, {0.6, 2.0}});
}

namespace {

Jet polygamma2_jet(const Jet& u) {
    return compose(u, polygamma(2, u.value), polygamma(3, u.value), polygamma(4, u.value),
                   polygamma(5, u.value));
}

}  // namespace

Chart gamma_fisher_chart(const std::string& which) {
    MetricMap g;
    CubicMap c;
    if (which == "shape-rate") {
        // parameters (k, beta): density beta^k x^{k-1} exp(-beta x) / Gamma(k)
        g[{0, 0}] = jet_field(2, [](const Point& p, int o) {
            return trigamma_jet(var(p, 0, o));
        });
        g[{0, 1}] = jet_field(2, [](const Point& p, int o) {
            return -1.0 / var(p, 1, o);
        });
        g[{1, 1}] = jet_field(2, [](const Point& p, int o) {
            Jet b = var(p, 1, o);
            return var(p, 0, o) / (b * b);
        });
        c[{0, 0, 0}] = jet_field(2, [](const Point& p, int o) {
            return polygamma2_jet(var(p, 0, o));
        });
        c[{0, 1, 1}] = jet_field(2, [](const Point& p, int o) {
            Jet b = var(p, 1, o);
            return 1.0 / (b * b);
        });
        c[{1, 1, 1}] = jet_field(2, [](const Point& p, int o) {
            Jet b = var(p, 1, o);
            return -2.0 * var(p, 0, o) / (b * b * b);
        });
        return make_chart(2, {"k", "beta"}, "gamma Fisher (shape-rate)", g, c,
                          {{2.0, 3.0}, {0.6, 2.0}});
    }
    if (which == "natural") {
        // natural parameters (t1, t2) = (k - 1, -beta) of the exponential family
        g[{0, 0}] = jet_field(2, [](const Point& p, int o) {
            return trigamma_jet(var(p, 0, o) + 1.0);
        });
        g[{0, 1}] = jet_field(2, [](const Point& p, int o) {
            return -1.0 / var(p, 1, o);
        });
        g[{1, 1}] = jet_field(2, [](const Point& p, int o) {
            Jet t2 = var(p, 1, o);
            return (var(p, 0, o) + 1.0) / (t2 * t2);
        });
        c[{0, 0, 0}] = jet_field(2, [](const Point& p, int o) {
            return polygamma2_jet(var(p, 0, o) + 1.0);
        });
        c[{0, 1, 1}] = jet_field(2, [](const Point& p, int o) {
            Jet t2 = var(p, 1, o);
            return 1.0 / (t2 * t2);
        });
        c[{1, 1, 1}] = jet_field(2, [](const Point& p, int o) {
            Jet t2 = var(p, 1, o);
            return -2.0 * (var(p, 0, o) + 1.0) / (t2 * t2 * t2);
        });
        // t1 = k - 1 >= 1 keeps the shape parameter at k >= 2, the same
        // floor the shape-rate box uses so the quadrature cross-checks
        // converge within the node budget.
        return make_chart(2, {"t1", "t2"}, "gamma Fisher (natural)", g, c,
                          {{1.0, 2.0}, {-2.0, -0.6}});
    }
    throw ParamError("unknown gamma chart '" + which + "'");
}

Chart flat_with_cubic_chart(int n, const std::map<std::array<int, 3>, double>& entries) {
    if (n < 2) throw ParamError("flat_with_cubic dimension must be >= 2");
    MetricMap g;
    for (int i = 0; i < n; ++i) g[{i, i}] = ScalarField::constant(n, 1.0);
    CubicMap c;
    for (const auto& [idx, v] : entries) c[idx] = ScalarField::constant(n, v);
    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back("x" + std::to_string(i));
    std::vector<std::array<double, 2>> box(static_cast<std::size_t>(n), {-1.0, 1.0});
    return make_chart(n, std::move(coords), "flat_with_cubic(" + std::to_string(n) + ")", g, c,
                      std::move(box));
}

Chart builtin_chart(const ModelSpec& spec) {
    Chart c;
    if (spec.family == "euclidean") c = euclidean_chart(spec.n);
    else if (spec.family == "sphere") c = sphere_chart(spec.r);
    else if (spec.family == "hyperbolic") c = hyperbolic_chart();
    else if (spec.family == "normal_fisher") c = normal_fisher_chart();
    else if (spec.family == "gamma_fisher") c = gamma_fisher_chart(spec.gamma_chart);
    else if (spec.family == "flat_with_cubic") c = flat_with_cubic_chart(spec.n, spec.cubic_entries);
    else throw ParamError("unknown model family '" + spec.family + "'");
    if (!spec.box.empty()) {
        if (spec.box.size() != static_cast<std::size_t>(c.n))
            throw ParamError("sample box dimension mismatch");
        c.box = spec.box;
    }
    return c;
}

Chart custom_chart(int n, std::vector<std::string> coords,
                   const std::map<std::pair<int, int>, std::string>& metric_exprs,
                   const std::map<std::array<int, 3>, std::string>& cubic_exprs,
                   JetStrategy strategy, double fd_step,
                   std::vector<std::array<double, 2>> box) {
    if (coords.empty()) {
        for (int i = 1; i <= n; ++i) coords.push_back("x" + std::to_string(i));
    }
    if (static_cast<int>(coords.size()) != n)
        throw ParamError("coordinate list length must match dimension");
    MetricMap g;
    CubicMap c;
    auto build = [&](const std::string& src) {
        Expression e = parse_expression(src, coords);
        return strategy == JetStrategy::analytic ? e.field() : e.fd_field(fd_step);
    };
    for (const auto& [idx, src] : metric_exprs) g[idx] = build(src);
    for (const auto& [idx, src] : cubic_exprs) c[idx] = build(src);
    Chart chart = make_chart(n, coords, "custom", g, c, std::move(box));
    chart.strategy = strategy;
    chart.fd_step = fd_step;
    return chart;
}

LogLikelihood normal_loglik() {
    LogLikelihood ll;
    ll.n = 2;
    ll.logpdf = [](double x, const Point& theta, int order) {
        Jet mu = Jet::variable(theta, 0, order);
        Jet sigma = Jet::variable(theta, 1, order);
        Jet z = (x - mu) / sigma;
        return -log(sigma) - 0.5 * z * z - 0.5 * std::log(2.0 * std::acos(-1.0));
    };
    ll.rule = [](const Point& theta, int m, std::vector<double>& x, std::vector<double>& w) {
        if (!(theta[1] > 0.0)) throw DomainError("normal scale must be positive");
        QuadRule r = gauss_hermite(m);
        const double sp = std::sqrt(std::acos(-1.0));
        x.resize(r.nodes.size());
        w.resize(r.nodes.size());
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            x[i] = theta[0] + std::sqrt(2.0) * theta[1] * r.nodes[i];
            w[i] = r.weights[i] / sp;
        }
    };
    return ll;
}

LogLikelihood gamma_loglik(bool natural) {
    LogLikelihood ll;
    ll.n = 2;
    ll.logpdf = [natural](double x, const Point& theta, int order) {
        Jet k = Jet::variable(theta, 0, order);
        Jet beta = Jet::variable(theta, 1, order);
        if (natural) {
            k = k + 1.0;
            beta = -1.0 * beta;
        }
        // lgamma(k) as a jet: derivatives are polygamma functions
        Jet lg = compose(k, std::lgamma(k.value), polygamma(0, k.value),
                         polygamma(1, k.value), polygamma(2, k.value));
        return k * log(beta) + (k - 1.0) * std::log(x) - beta * x - lg;
    };
    ll.rule = [natural](const Point& theta, int m, std::vector<double>& x,
                        std::vector<double>& w) {
        double k = natural ? theta[0] + 1.0 : theta[0];
        double beta = natural ? -theta[1] : theta[1];
        if (!(k > 0.0) || !(beta > 0.0))
            throw DomainError("gamma parameters outside the valid range");
        QuadRule r = gauss_laguerre(m, k - 1.0);
        const double norm = std::exp(std::lgamma(k));
        x.resize(r.nodes.size());
        w.resize(r.nodes.size());
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            x[i] = r.nodes[i] / beta;
            w[i] = r.weights[i] / norm;
        }
    };
    return ll;
}

}  // namespace statman
