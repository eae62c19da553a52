#include "statman/jet.hpp"

#include <cmath>
#include <utility>

#include "statman/special.hpp"

namespace statman {

namespace {

void require_same(const Jet& a, const Jet& b) {
    if (a.n != b.n || a.order != b.order)
        throw ShapeError("jet arithmetic requires matching dimension and order");
}

void require_finite_point(const Point& p) {
    for (double x : p)
        if (!std::isfinite(x)) throw DomainError("point has non-finite coordinates");
}

}  // namespace

Jet operator+(const Jet& a, const Jet& b) {
    require_same(a, b);
    Jet r = a;
    r.value += b.value;
    for (std::size_t i = 0; i < r.d1.size(); ++i) r.d1[i] += b.d1[i];
    for (std::size_t i = 0; i < r.d2.size(); ++i) r.d2[i] += b.d2[i];
    for (std::size_t i = 0; i < r.d3.size(); ++i) r.d3[i] += b.d3[i];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    require_same(a, b);
    Jet r = a;
    r.value -= b.value;
    for (std::size_t i = 0; i < r.d1.size(); ++i) r.d1[i] -= b.d1[i];
    for (std::size_t i = 0; i < r.d2.size(); ++i) r.d2[i] -= b.d2[i];
    for (std::size_t i = 0; i < r.d3.size(); ++i) r.d3[i] -= b.d3[i];
    return r;
}

Jet operator-(const Jet& a) { return a * -1.0; }

Jet operator*(const Jet& a, double c) {
    Jet r = a;
    r.value *= c;
    for (auto& v : r.d1) v *= c;
    for (auto& v : r.d2) v *= c;
    for (auto& v : r.d3) v *= c;
    return r;
}
Jet operator*(double c, const Jet& a) { return a * c; }
Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }
Jet operator+(const Jet& a, double c) {
    Jet r = a;
    r.value += c;
    return r;
}
Jet operator+(double c, const Jet& a) { return a + c; }
Jet operator-(const Jet& a, double c) { return a + (-c); }
Jet operator-(double c, const Jet& a) { return (-a) + c; }
Jet operator/(double c, const Jet& a) { return Jet::constant(a.n, a.order, c) / a; }

Jet operator*(const Jet& a, const Jet& b) {
    require_same(a, b);
    const int n = a.n;
    Jet r(n, a.order);
    r.value = a.value * b.value;
    if (a.order >= 1) {
        for (int i = 0; i < n; ++i) r.r1(i) = a.g1(i) * b.value + a.value * b.g1(i);
    }
    if (a.order >= 2) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = a.g2(i, j) * b.value + a.g1(i) * b.g1(j) + a.g1(j) * b.g1(i) +
                           a.value * b.g2(i, j);
                r.r2(i, j) = v;
                r.r2(j, i) = v;
            }
    }
    if (a.order >= 3) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = j; k < n; ++k) {
                    double v = a.g3(i, j, k) * b.value + a.value * b.g3(i, j, k) +
                               a.g2(i, j) * b.g1(k) + a.g2(i, k) * b.g1(j) + a.g2(j, k) * b.g1(i) +
                               b.g2(i, j) * a.g1(k) + b.g2(i, k) * a.g1(j) + b.g2(j, k) * a.g1(i);
                    r.r3(i, j, k) = v;
                    r.r3(i, k, j) = v;
                    r.r3(j, i, k) = v;
                    r.r3(j, k, i) = v;
                    r.r3(k, i, j) = v;
                    r.r3(k, j, i) = v;
                }
    }
    return r;
}

Jet compose(const Jet& u, double f0, double f1, double f2, double f3) {
    const int n = u.n;
    Jet r(n, u.order);
    r.value = f0;
    if (u.order >= 1)
        for (int i = 0; i < n; ++i) r.r1(i) = f1 * u.g1(i);
    if (u.order >= 2)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = f2 * u.g1(i) * u.g1(j) + f1 * u.g2(i, j);
                r.r2(i, j) = v;
                r.r2(j, i) = v;
            }
    if (u.order >= 3)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = j; k < n; ++k) {
                    double v = f3 * u.g1(i) * u.g1(j) * u.g1(k) +
                               f2 * (u.g2(i, j) * u.g1(k) + u.g2(i, k) * u.g1(j) +
                                     u.g2(j, k) * u.g1(i)) +
                               f1 * u.g3(i, j, k);
                    r.r3(i, j, k) = v;
                    r.r3(i, k, j) = v;
                    r.r3(j, i, k) = v;
                    r.r3(j, k, i) = v;
                    r.r3(k, i, j) = v;
                    r.r3(k, j, i) = v;
                }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    require_same(a, b);
    if (b.value == 0.0) throw DomainError("division by zero in jet arithmetic");
    double v = b.value;
    Jet inv = compose(b, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v), -6.0 / (v * v * v * v));
    return a * inv;
}

Jet sin(const Jet& u) {
    double s = std::sin(u.value), c = std::cos(u.value);
    return compose(u, s, c, -s, -c);
}
Jet cos(const Jet& u) {
    double s = std::sin(u.value), c = std::cos(u.value);
    return compose(u, c, -s, -c, s);
}
Jet exp(const Jet& u) {
    double e = std::exp(u.value);
    return compose(u, e, e, e, e);
}
Jet log(const Jet& u) {
    if (!(u.value > 0.0)) throw DomainError("log of non-positive value");
    double v = u.value;
    return compose(u, std::log(v), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}
Jet sqrt(const Jet& u) {
    if (u.value < 0.0) throw DomainError("sqrt of negative value");
    if (u.value == 0.0 && u.order >= 1) throw DomainError("sqrt derivative singular at zero");
    double s = std::sqrt(u.value);
    double v = u.value;
    return compose(u, s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v));
}

Jet pow(const Jet& u, double p) {
    double ip;
    bool integral = std::modf(p, &ip) == 0.0 && std::abs(p) <= 16.0;
    if (integral && p >= 0.0) {
        // exact repeated multiplication, valid for any base
        Jet r = Jet::constant(u.n, u.order, 1.0);
        for (int i = 0; i < static_cast<int>(p); ++i) r = r * u;
        return r;
    }
    if (u.value == 0.0) throw DomainError("pow at zero base with negative or fractional exponent");
    if (u.value < 0.0 && !integral) throw DomainError("pow of negative base with fractional exponent");
    double v = u.value;
    double f0 = std::pow(v, p);
    double f1 = p * std::pow(v, p - 1);
    double f2 = p * (p - 1) * std::pow(v, p - 2);
    double f3 = p * (p - 1) * (p - 2) * std::pow(v, p - 3);
    return compose(u, f0, f1, f2, f3);
}

Jet pow(const Jet& u, const Jet& p) {
    bool const_exp = true;
    for (double d : p.d1)
        if (d != 0.0) const_exp = false;
    for (double d : p.d2)
        if (d != 0.0) const_exp = false;
    for (double d : p.d3)
        if (d != 0.0) const_exp = false;
    if (const_exp) return pow(u, p.value);
    return exp(p * log(u));
}

Jet digamma_jet(const Jet& u) {
    return compose(u, polygamma(0, u.value), polygamma(1, u.value), polygamma(2, u.value),
                   polygamma(3, u.value));
}
Jet trigamma_jet(const Jet& u) {
    return compose(u, polygamma(1, u.value), polygamma(2, u.value), polygamma(3, u.value),
                   polygamma(4, u.value));
}

namespace {

// Nested central difference for the partial along `idx` (applied right to left).
double fd_rec(const std::function<double(const Point&)>& f, Point& p,
              const std::vector<int>& idx, std::size_t depth, const std::vector<double>& h) {
    if (depth == idx.size()) return f(p);
    int i = idx[depth];
    double hi = h[static_cast<std::size_t>(i)];
    double x0 = p[static_cast<std::size_t>(i)];
    p[static_cast<std::size_t>(i)] = x0 + hi;
    double fp = fd_rec(f, p, idx, depth + 1, h);
    p[static_cast<std::size_t>(i)] = x0 - hi;
    double fm = fd_rec(f, p, idx, depth + 1, h);
    p[static_cast<std::size_t>(i)] = x0;
    return (fp - fm) / (2.0 * hi);
}

}  // namespace

Jet fd_jet(const std::function<double(const Point&)>& f, const Point& p, int order,
           const std::vector<double>& steps) {
    const int n = static_cast<int>(p.size());
    if (order < 0 || order > kMaxJetOrder) throw OrderError("fd_jet order must be in 0..3");
    for (double h : steps)
        if (!(h > 0.0)) throw DomainError("fd_jet requires positive steps");
    require_finite_point(p);
    Jet r(n, order);
    Point q = p;
    r.value = f(q);
    if (order >= 1)
        for (int i = 0; i < n; ++i) r.r1(i) = fd_rec(f, q, {i}, 0, steps);
    if (order >= 2)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = fd_rec(f, q, {i, j}, 0, steps);
                r.r2(i, j) = v;
                r.r2(j, i) = v;
            }
    if (order >= 3)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = j; k < n; ++k) {
                    double v = fd_rec(f, q, {i, j, k}, 0, steps);
                    r.r3(i, j, k) = v;
                    r.r3(i, k, j) = v;
                    r.r3(j, i, k) = v;
                    r.r3(j, k, i) = v;
                    r.r3(k, i, j) = v;
                    r.r3(k, j, i) = v;
                }
    return r;
}

Jet fd_jet(const std::function<double(const Point&)>& f, const Point& p, int order, double h) {
    return fd_jet(f, p, order, std::vector<double>(p.size(), h));
}

ScalarField ScalarField::analytic(int n, JetFn fn) {
    ScalarField s;
    s.n_ = n;
    s.strategy_ = JetStrategy::analytic;
    s.jet_fn_ = std::move(fn);
    return s;
}

ScalarField ScalarField::constant(int n, double v) {
    return analytic(n, [v](const Point& p, int order) {
        return Jet::constant(static_cast<int>(p.size()), order, v);
    });
}

ScalarField ScalarField::finite_difference(int n, ValueFn fn, double step_scale) {
    ScalarField s;
    s.n_ = n;
    s.strategy_ = JetStrategy::finite_difference;
    s.step_scale_ = step_scale;
    s.value_fn_ = std::move(fn);
    return s;
}

Jet ScalarField::eval(const Point& p, int order) const {
    if (order < 0 || order > kMaxJetOrder) throw OrderError("requested jet order must be in 0..3");
    if (static_cast<int>(p.size()) != n_) throw ShapeError("point dimension mismatch");
    require_finite_point(p);
    if (strategy_ == JetStrategy::analytic) return jet_fn_(p, order);
    std::vector<double> h(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        h[i] = step_scale_ * std::max(1.0, std::abs(p[i]));
    return fd_jet(value_fn_, p, order, h);
}

double ScalarField::value(const Point& p) const {
    if (strategy_ == JetStrategy::finite_difference) return value_fn_(p);
    return eval(p, 0).value;
}

ScalarField ScalarField::scaled(double s) const {
    ScalarField r = *this;
    if (strategy_ == JetStrategy::analytic) {
        auto fn = jet_fn_;
        r.jet_fn_ = [fn, s](const Point& p, int order) { return fn(p, order) * s; };
    } else {
        auto fn = value_fn_;
        r.value_fn_ = [fn, s](const Point& p) { return s * fn(p); };
    }
    return r;
}

}  // namespace statman
