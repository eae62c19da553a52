#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "statman/errors.hpp"
#include "statman/jet.hpp"
#include "statman/tensor.hpp"

namespace statman {

/// Nodes and weights of a Gaussian rule for a fixed weight function.
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// m-point Gauss-Hermite rule: integrates f(t) exp(-t^2) over the real line
/// exactly for polynomials f up to degree 2m-1.
QuadRule gauss_hermite(int m);

/// m-point generalized Gauss-Laguerre rule for weight t^a exp(-t) on (0, inf).
QuadRule gauss_laguerre(int m, double a);

/// A one-dimensional parametric family given through its log-density.
/// `logpdf` must return the jet of l(x; theta) in theta (order >= 1).
/// `rule` fills m sample-space nodes and probability weights at theta so that
/// E[f] is approximated by sum w_i f(x_i) with sum w_i = 1 up to rule error.
struct LogLikelihood {
    int n = 0;  // parameter dimension
    std::function<Jet(double x, const Point& theta, int order)> logpdf;
    std::function<void(const Point& theta, int m, std::vector<double>& x,
                       std::vector<double>& w)>
        rule;
};

/// Fisher metric g_ij = E[d_i l d_j l] and, when order == 3, the cubic
/// moment tensor C_ijk = E[d_i l d_j l d_k l], both by adaptive quadrature:
/// the node count doubles from 64 (capped at 4096), with one level of
/// Richardson extrapolation across levels, until two successive extrapolated
/// values agree to quad_tol.  Throws QuadratureError when the node budget
/// is exhausted, the weights fail to sum to one, or the score mean is not
/// zero within quad_tol.
std::pair<Tensor, Tensor> fisher_by_quadrature(const LogLikelihood& ll, const Point& theta,
                                               int order = 3, double quad_tol = 1e-6);

}  // namespace statman
