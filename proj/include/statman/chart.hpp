#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "statman/jet.hpp"
#include "statman/tensor.hpp"

namespace statman {

enum class ConnKind { levi_civita, nabla, nabla_star, alpha };

/// Metric, cubic, and their coordinate partials at a point, together with
/// the derived Levi-Civita coefficients and the difference tensor K, each
/// to `depth` derivative levels (0..2).
///
/// Layout conventions (n = dim, flat row-major):
///   g[i*n+j]                       g_ij
///   dg[(m*n+i)*n+j]                d_m g_ij
///   d2g[((l*n+m)*n+i)*n+j]         d_l d_m g_ij
///   d3g[...]                       d_q d_l d_m g_ij
///   c[(i*n+j)*n+k]                 C_ijk           (dc, d2c analogous)
///   Gh[(k*n+i)*n+j]                Gamma-hat^k_ij  (dGh, d2Gh analogous)
///   K[(k*n+i)*n+j]                 K^k_ij          (dK, d2K analogous)
struct GeomJets {
    int n = 0;
    int depth = 0;
    double det = 0.0;
    std::vector<double> g, ginv, dg, dginv, d2g, d2ginv, d3g;
    std::vector<double> c, dc, d2c;
    std::vector<double> Gh, dGh, d2Gh;
    std::vector<double> K, dK, d2K;
};

/// Coefficients of one torsion-free connection with coordinate partials to
/// `depth` levels. Same layout as GeomJets::Gh.
struct ConnJets {
    int n = 0;
    int depth = 0;
    ConnKind kind = ConnKind::levi_civita;
    double alpha = 0.0;
    std::vector<double> G, dG, d2G;
};

/// Connection coefficients at a point (value type).
struct ConnectionCoeffs {
    Tensor gamma;  // (1,2), symmetric in the lower pair
    ConnKind kind = ConnKind::levi_civita;
    double alpha = 0.0;
};

/// A statistical chart: dimension, coordinate names, metric field g and
/// totally symmetric cubic field C. Immutable after construction; every
/// per-point derivation is a pure function.
struct Chart {
    int n = 0;
    std::vector<std::string> coords;
    std::string label;
    std::vector<ScalarField> metric;  // n*n, symmetric layout
    std::vector<ScalarField> cubic;   // n*n*n, totally symmetric layout
    JetStrategy strategy = JetStrategy::analytic;
    double fd_step = 1e-3;
    std::vector<std::array<double, 2>> box;
    double tol = 1e-8;
    double fd_tol = 1e-4;
    double quad_tol = 1e-6;

    /// Identity-check tolerance tier for this chart's jet backend.
    double check_tol() const { return strategy == JetStrategy::analytic ? tol : fd_tol; }

    GeomJets geom(const Point& p, int depth) const;
    ConnJets connection(const Point& p, ConnKind kind, double alpha = 1.0, int depth = 1) const;

    /// Same chart with the cubic field scaled by `a` (the alpha-family
    /// chart); dual() is alpha_variant(-1).
    Chart alpha_variant(double a) const;
    Chart dual() const { return alpha_variant(-1.0); }

    Metric metric_at(const Point& p) const;
};

/// Builds a chart from the upper-triangle metric entries ((i,j), i<=j) and
/// one cubic entry per sorted index triple; mirrors them symmetrically.
Chart make_chart(int n, std::vector<std::string> coords, std::string label,
                 const std::map<std::pair<int, int>, ScalarField>& metric_entries,
                 const std::map<std::array<int, 3>, ScalarField>& cubic_entries,
                 std::vector<std::array<double, 2>> box);

ConnJets connection_from_geom(const GeomJets& gj, ConnKind kind, double alpha = 1.0);

// Point-level connection operations.
ConnectionCoeffs levi_civita(const Chart& chart, const Point& p);
Tensor difference_tensor(const Chart& chart, const Point& p);  // (1,2)
ConnectionCoeffs nabla(const Chart& chart, const Point& p);
ConnectionCoeffs nabla_star(const Chart& chart, const Point& p);
ConnectionCoeffs alpha_connection(const Chart& chart, const Point& p, double a);
/// (nabla g)_{i;jk} = d_i g_jk - G^l_ij g_lk - G^l_ik g_jl, a (0,3) tensor
/// with the derivative slot first.
Tensor cubic_from_connection(const Chart& chart, const Point& p, const ConnectionCoeffs& conn);

struct ValidationIssue {
    Point p;
    std::string what;
    double defect = 0.0;
};

struct ValidationReport {
    bool pass = true;
    int points_tested = 0;
    std::vector<ValidationIssue> issues;
};

/// Per-point scan: g symmetric/invertible, C totally symmetric,
/// cubic_from_connection(nabla) == C, torsion-freeness, duality and mean
/// laws, the tau/volume relation, and K self-adjointness. Collects
/// failures; never aborts mid-scan.
ValidationReport validate_statistical(const Chart& chart, const std::vector<Point>& points,
                                      double tol);

/// Deterministic sample of N points in the chart's box.
std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed);

}  // namespace statman
