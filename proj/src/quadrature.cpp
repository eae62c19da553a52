#include "statman/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace statman {

namespace {

/// Eigenvalues and first eigenvector components of a symmetric tridiagonal
/// matrix (diagonal d, off-diagonal e) by the implicit QL method.  On return
/// d holds the eigenvalues in ascending order and q the first component of
/// each normalized eigenvector.
void tridiag_eigen(std::vector<double>& d, std::vector<double>& e, std::vector<double>& q) {
    const int m = static_cast<int>(d.size());
    q.assign(static_cast<std::size_t>(m), 0.0);
    if (m == 0) return;
    q[0] = 1.0;
    if (m == 1) return;
    e.push_back(0.0);
    const double prec = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < m; ++l) {
        for (int iter = 0;; ++iter) {
            int mm = l;
            for (; mm < m - 1; ++mm) {
                double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= prec * dd) break;
            }
            if (mm == l) break;
            if (iter >= 60) throw QuadratureError("tridiagonal eigensolver did not converge");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = mm - 1; i >= l; --i) {
                double f = s * e[i];
                double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = q[static_cast<std::size_t>(i + 1)];
                q[static_cast<std::size_t>(i + 1)] = s * q[static_cast<std::size_t>(i)] + c * f;
                q[static_cast<std::size_t>(i)] = c * q[static_cast<std::size_t>(i)] - s * f;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    // sort eigenpairs ascending
    for (int i = 0; i < m - 1; ++i) {
        int k = i;
        for (int j = i + 1; j < m; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            std::swap(q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>(k)]);
        }
    }
}

QuadRule golub_welsch(std::vector<double> a, std::vector<double> b, double mu0) {
    std::vector<double> q;
    tridiag_eigen(a, b, q);
    QuadRule rule;
    rule.nodes = std::move(a);
    rule.weights.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) rule.weights[i] = mu0 * q[i] * q[i];
    return rule;
}

}  // namespace

QuadRule gauss_hermite(int m) {
    if (m < 1) throw QuadratureError("node count must be positive");
    std::vector<double> a(static_cast<std::size_t>(m), 0.0);
    std::vector<double> b(static_cast<std::size_t>(m - 1));
    for (int i = 1; i < m; ++i) b[static_cast<std::size_t>(i - 1)] = std::sqrt(i / 2.0);
    return golub_welsch(std::move(a), std::move(b), std::sqrt(std::acos(-1.0)));
}

QuadRule gauss_laguerre(int m, double alpha) {
    if (m < 1) throw QuadratureError("node count must be positive");
    if (alpha <= -1.0) throw QuadratureError("Laguerre exponent must exceed -1");
    std::vector<double> a(static_cast<std::size_t>(m));
    std::vector<double> b(static_cast<std::size_t>(m - 1));
    for (int i = 0; i < m; ++i) a[static_cast<std::size_t>(i)] = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < m; ++i)
        b[static_cast<std::size_t>(i - 1)] = std::sqrt(i * (i + alpha));
    return golub_welsch(std::move(a), std::move(b), std::exp(std::lgamma(alpha + 1.0)));
}

std::pair<Tensor, Tensor> fisher_by_quadrature(const LogLikelihood& ll, const Point& theta,
                                               int order, double quad_tol) {
    if (order != 2 && order != 3) throw OrderError("fisher_by_quadrature order must be 2 or 3");
    const int n = ll.n;
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const std::size_t n3 = n2 * static_cast<std::size_t>(n);
    // moment arrays per doubling level: g entries first, then c entries
    const std::size_t len = n2 + (order == 3 ? n3 : 0);
    std::vector<std::vector<double>> raw;   // one entry per node count
    std::vector<std::vector<double>> extr;  // Richardson-accelerated sequence
    bool converged = false;
    double total = 0.0;
    std::vector<double> score;
    for (int m = 64; m <= 4096 && !converged; m *= 2) {
        std::vector<double> x, w;
        ll.rule(theta, m, x, w);
        total = 0.0;
        score.assign(static_cast<std::size_t>(n), 0.0);
        std::vector<double> cur(len, 0.0);
        for (std::size_t q = 0; q < x.size(); ++q) {
            Jet l = ll.logpdf(x[q], theta, 1);
            total += w[q];
            for (int i = 0; i < n; ++i) {
                score[static_cast<std::size_t>(i)] += w[q] * l.g1(i);
                for (int j = 0; j < n; ++j) {
                    cur[static_cast<std::size_t>(i) * n + j] += w[q] * l.g1(i) * l.g1(j);
                    if (order == 3)
                        for (int k = 0; k < n; ++k)
                            cur[n2 + (static_cast<std::size_t>(i) * n + j) * n + k] +=
                                w[q] * l.g1(i) * l.g1(j) * l.g1(k);
                }
            }
        }
        raw.push_back(std::move(cur));
        // Gauss rules on these integrands converge algebraically in the node
        // count, so accelerate the doubling sequence by one Richardson step
        // with the contraction ratio estimated per component.
        if (raw.size() >= 3) {
            const std::vector<double>& t0 = raw[raw.size() - 3];
            const std::vector<double>& t1 = raw[raw.size() - 2];
            const std::vector<double>& t2 = raw[raw.size() - 1];
            std::vector<double> ex(len);
            for (std::size_t f = 0; f < len; ++f) {
                const double d1 = t1[f] - t0[f];
                const double d2 = t2[f] - t1[f];
                if (std::abs(d2) < 1e-15 || std::abs(d1) <= std::abs(d2) * 1.2) {
                    ex[f] = t2[f];
                } else {
                    ex[f] = t2[f] + d2 / (d1 / d2 - 1.0);
                }
            }
            if (!extr.empty()) {
                double diff = 0.0;
                for (std::size_t f = 0; f < len; ++f)
                    diff = std::max(diff, std::abs(ex[f] - extr.back()[f]));
                if (diff < quad_tol) converged = true;
            }
            extr.push_back(std::move(ex));
        }
    }
    if (!converged) throw QuadratureError("quadrature did not converge within node budget");
    if (std::abs(total - 1.0) > quad_tol)
        throw QuadratureError("density not normalized over the quadrature rule");
    if (max_abs(score) > quad_tol)
        throw QuadratureError("score mean not zero within tolerance");
    const std::vector<double>& best = extr.back();
    std::vector<double> g(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(n2));
    std::vector<double> c(n3, 0.0);
    if (order == 3)
        std::copy(best.begin() + static_cast<std::ptrdiff_t>(n2), best.end(), c.begin());
    Tensor gt(n, {Variance::lower, Variance::lower}, std::move(g));
    Tensor ct(n, {Variance::lower, Variance::lower, Variance::lower}, std::move(c));
    return {std::move(gt), std::move(ct)};
}

}  // namespace statman
