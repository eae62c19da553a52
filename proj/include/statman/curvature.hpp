#pragma once

#include <functional>
#include <string>
#include <vector>

#include "statman/chart.hpp"
#include "statman/tensor.hpp"

namespace statman {

/// Slot convention, used everywhere: a (1,3) curvature array R is stored flat
/// as R[((l*n+i)*n+j)*n+k] = the component along coordinate vector l of the
/// curvature operator applied as R(d_i, d_j) d_k.  Lowered (0,4) forms are
/// stored as R04[((i*n+j)*n+k)*n+w] = g_{lw} R^l_{ijk}.  Covariant
/// derivatives append the derivative slot FIRST: (nabla T)[m][original slots].

/// All curvature-level data at a single point: the three curvature tensors
/// (for nabla, its dual, and the Levi-Civita connection), their lowered
/// forms, Ricci traces, the trace form tau, divergence of the difference
/// tensor under both connections, and the averaged curvature S.
struct CurvaturePack {
    int n = 0;
    Point point;
    std::vector<double> R, Rstar, Rhat;        // (1,3) flat, n^4
    std::vector<double> R04, Rstar04, Rhat04;  // (0,4)
    std::vector<double> Ric, Ricstar, Richat;  // (0,2)
    std::vector<double> tau;                   // (0,1): tau_i = K^m_{im}
    std::vector<double> divK_hat, divK_nab;    // (0,2)
    std::vector<double> S;                     // (0,4): (R04 + Rstar04)/2
};

/// Projective-geometry data for one connection at a point.
struct ProjectivePack {
    int n = 0;
    std::vector<double> gamma;   // (0,2): Ric / (n-1)
    std::vector<double> P;       // (1,3)
    std::vector<double> Cot;     // (0,3)
    std::vector<double> deltaP;  // (0,3): trace of nabla P over the
                                 // derivative and output slots
};

// ---- raw kernels on flat arrays (layouts as in chart.hpp / above) ----

/// R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
std::vector<double> riemann_raw(int n, const std::vector<double>& G,
                                const std::vector<double>& dG);

/// Coordinate partials d_m R^l_{ijk}, layout [m][l][i][j][k].
std::vector<double> driemann_raw(int n, const std::vector<double>& G,
                                 const std::vector<double>& dG,
                                 const std::vector<double>& d2G);

/// Generic coordinate covariant derivative.  T has `var.size()` slots; dT is
/// its partial-derivative array [m][slots]; the result layout is [m][slots].
std::vector<double> covd_raw(int n, const std::vector<Variance>& var,
                             const std::vector<double>& T, const std::vector<double>& dT,
                             const std::vector<double>& G);

/// First-slot trace Ric_{jk} = R^i_{ijk}.
std::vector<double> ricci_raw(int n, const std::vector<double>& R13);

/// Lower the output slot: R04[i][j][k][w] = g_{lw} R^l_{ijk}.
std::vector<double> lower_first_raw(int n, const std::vector<double>& R13,
                                    const std::vector<double>& g);

/// Operator bracket [K,K]^l_{ijk} = K^l_{im} K^m_{jk} - K^l_{jm} K^m_{ik}.
std::vector<double> kk_bracket_raw(int n, const std::vector<double>& K);

/// Suspension (A wedge Id)^l_{ijk} = A_{jk} delta^l_i - A_{ik} delta^l_j.
std::vector<double> suspension_raw(int n, const std::vector<double>& A);

// ---- point-level assemblies ----

/// Curvature of an arbitrary connection field at a point (depth >= 1 jets).
Tensor riemann(const Chart& chart, const Point& p, ConnKind kind, double alpha = 1.0);
Tensor riemann(const ConnJets& conn);

/// Same curvature computed through the difference-tensor decomposition
/// R = R_hat + alt(nabla_hat K) + [K,K] (sign-flipped middle term for the
/// dual; alpha-scaled terms for the alpha-family).  Must agree with the
/// direct formula; exercised by the identity suite.
Tensor riemann_decomposed(const Chart& chart, const Point& p, ConnKind kind,
                          double alpha = 1.0);

Tensor ricci(const Tensor& curv);

/// Max relative defect of each of the six Ricci decomposition identities.
struct RicciDefects {
    // Ric via nabla_hat / nabla; dual Ric via nabla_hat / nabla;
    // half-difference; half-mean.
    double ric_hat = 0.0, ric_nab = 0.0, ricstar_hat = 0.0, ricstar_nab = 0.0;
    double half_diff = 0.0, half_mean = 0.0;
    double max() const;
};
RicciDefects ricci_decompositions(const Chart& chart, const Point& p);

/// Covariant derivative of a pointwise tensor field, with the field's
/// partials taken by central finite differences of step h per axis.  Used as
/// an independent oracle; the library-internal derivatives are analytic.
using TensorFieldFn = std::function<Tensor(const Point&)>;
Tensor covariant_derivative(const TensorFieldFn& field, const ConnJets& conn,
                            const Point& p, double h = 1e-5);

/// (div K)_{jk} = (nabla_hat_i K)^i_{jk}; symmetric in (j,k).
Tensor div_K(const Chart& chart, const Point& p);

CurvaturePack curvature_pack(const Chart& chart, const Point& p);

/// S = (R04 + Rstar04)/2; carries all four Riemannian curvature symmetries.
Tensor statistical_curvature(const CurvaturePack& pack);

/// P = R - (1/(n-1)) (Ric wedge Id).
Tensor projective_curvature(const Tensor& curv, const Tensor& ric, int n);

/// Cot_{ijk} = (nabla_i gamma)_{jk} - (nabla_j gamma)_{ik}, gamma = Ric/(n-1).
Tensor cotton(const Chart& chart, const Point& p, ConnKind kind, double alpha = 1.0);

/// gamma, P, Cot and delta P for one connection at a point (depth-2 jets).
ProjectivePack projective_pack(const Chart& chart, const Point& p, ConnKind kind,
                               double alpha = 1.0);
ProjectivePack projective_pack_from_conn(const ConnJets& conn);

/// Projective change by the closed 1-form rho = d(phi):
/// Gbar^k_{ij} = G^k_{ij} + rho_i delta^k_j + rho_j delta^k_i.
/// `phi` must be the order-3 jet of the potential at the same point, so that
/// the transformed connection carries first and second partials too.
ConnJets projective_transform(const ConnJets& conn, const Jet& phi);

// ---- identity suite ----

/// One sampled identity: |lhs - rhs| relative to max(1, |lhs|, |rhs|).
struct IdentityRow {
    std::string name;
    double defect = 0.0;
};

/// Evaluates the full catalog of curvature and Ricci identities at one point
/// and returns one row per identity.  Pure; safe to run per-point in
/// parallel.
std::vector<IdentityRow> identity_suite(const Chart& chart, const Point& p,
                                        const std::vector<double>& alphas = {-1.0, -0.5,
                                                                             0.0, 0.5,
                                                                             1.0});

/// Worst defect per identity name over a set of points.
std::vector<IdentityRow> identity_suite(const Chart& chart,
                                        const std::vector<Point>& points,
                                        const std::vector<double>& alphas = {-1.0, -0.5,
                                                                             0.0, 0.5,
                                                                             1.0});

}  // namespace statman
