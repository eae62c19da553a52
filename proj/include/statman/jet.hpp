#pragma once

#include <functional>
#include <vector>

#include "statman/errors.hpp"

namespace statman {

/// A chart point, coordinates x1..xn.
using Point = std::vector<double>;

constexpr int kMaxJetOrder = 3;

/// Value plus partial derivatives up to `order` (<= 3) of a scalar field at
/// a point of an n-dimensional chart. Partial arrays are stored dense and
/// kept exactly symmetric: each sorted multi-index is computed once and
/// mirrored onto all permutations.
struct Jet {
    int n = 0;
    int order = 0;
    double value = 0.0;
    std::vector<double> d1;  // n
    std::vector<double> d2;  // n*n
    std::vector<double> d3;  // n*n*n

    Jet() = default;
    Jet(int n_, int order_) : n(n_), order(order_) {
        if (order < 0 || order > kMaxJetOrder) throw OrderError("jet order must be in 0..3");
        if (order >= 1) d1.assign(static_cast<std::size_t>(n), 0.0);
        if (order >= 2) d2.assign(static_cast<std::size_t>(n) * n, 0.0);
        if (order >= 3) d3.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    }

    static Jet constant(int n, int order, double v) {
        Jet j(n, order);
        j.value = v;
        return j;
    }
    /// The coordinate function x^i evaluated at p.
    static Jet variable(const Point& p, int i, int order) {
        Jet j(static_cast<int>(p.size()), order);
        j.value = p[static_cast<std::size_t>(i)];
        if (order >= 1) j.d1[static_cast<std::size_t>(i)] = 1.0;
        return j;
    }

    double g1(int i) const { return d1[static_cast<std::size_t>(i)]; }
    double g2(int i, int j) const { return d2[static_cast<std::size_t>(i) * n + j]; }
    double g3(int i, int j, int k) const {
        return d3[(static_cast<std::size_t>(i) * n + j) * n + k];
    }
    double& r1(int i) { return d1[static_cast<std::size_t>(i)]; }
    double& r2(int i, int j) { return d2[static_cast<std::size_t>(i) * n + j]; }
    double& r3(int i, int j, int k) { return d3[(static_cast<std::size_t>(i) * n + j) * n + k]; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator+(const Jet& a, double c);
Jet operator+(double c, const Jet& a);
Jet operator-(const Jet& a, double c);
Jet operator-(double c, const Jet& a);
Jet operator*(const Jet& a, double c);
Jet operator*(double c, const Jet& a);
Jet operator/(const Jet& a, double c);
Jet operator/(double c, const Jet& a);

/// Univariate composition f(u) given f and its derivatives at u.value.
Jet compose(const Jet& u, double f0, double f1, double f2, double f3);

Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sqrt(const Jet& u);
Jet pow(const Jet& u, double p);
Jet pow(const Jet& u, const Jet& p);
Jet digamma_jet(const Jet& u);
Jet trigamma_jet(const Jet& u);

/// Nested central differences on a value-only field; per-axis steps.
Jet fd_jet(const std::function<double(const Point&)>& f, const Point& p, int order,
           const std::vector<double>& steps);
/// Shared step h for every axis.
Jet fd_jet(const std::function<double(const Point&)>& f, const Point& p, int order, double h);

enum class JetStrategy { analytic, finite_difference };

/// A scalar field on a chart, evaluable to jets of order <= 3. Pure and
/// immutable after construction; safe to share across threads.
class ScalarField {
  public:
    using JetFn = std::function<Jet(const Point&, int)>;
    using ValueFn = std::function<double(const Point&)>;

    ScalarField() = default;

    static ScalarField analytic(int n, JetFn fn);
    static ScalarField constant(int n, double v);
    /// Value-only field differentiated by nested central FD with per-axis
    /// step h_i = step_scale * max(1, |x_i|).
    static ScalarField finite_difference(int n, ValueFn fn, double step_scale = 1e-3);

    Jet eval(const Point& p, int order) const;
    double value(const Point& p) const;
    ScalarField scaled(double s) const;

    int dim() const { return n_; }
    JetStrategy strategy() const { return strategy_; }
    bool valid() const { return n_ > 0; }

  private:
    int n_ = 0;
    JetStrategy strategy_ = JetStrategy::analytic;
    double step_scale_ = 1e-3;
    JetFn jet_fn_;
    ValueFn value_fn_;
};

/// Evaluate a field's jet (order in 0..3).
inline Jet eval_jet(const ScalarField& field, const Point& p, int order) {
    return field.eval(p, order);
}

}  // namespace statman
