#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "statman/chart.hpp"
#include "statman/expr.hpp"
#include "statman/quadrature.hpp"

namespace statman {

/// A built-in manifold family plus its parameters and sample box.
struct ModelSpec {
    std::string family;  // euclidean | sphere | hyperbolic | normal_fisher |
                         // gamma_fisher | flat_with_cubic
    int n = 2;           // dimension (euclidean, flat_with_cubic)
    double r = 1.0;      // radius (sphere)
    std::string gamma_chart = "shape-rate";  // shape-rate | natural
    // constant cubic entries by sorted 0-based index triple (flat_with_cubic)
    std::map<std::array<int, 3>, double> cubic_entries = {{{0, 0, 0}, 2.0}};
    // optional per-coordinate sample box override
    std::vector<std::array<double, 2>> box;
};

/// Chart with analytic closed-form jets for the requested family.
Chart builtin_chart(const ModelSpec& spec);

Chart euclidean_chart(int n);
Chart sphere_chart(double r);
Chart hyperbolic_chart();
Chart normal_fisher_chart();
Chart gamma_fisher_chart(const std::string& which);  // "shape-rate" | "natural"
Chart flat_with_cubic_chart(int n, const std::map<std::array<int, 3>, double>& entries);

/// Chart from expression strings; entries keyed by sorted index tuples.
Chart custom_chart(int n, std::vector<std::string> coords,
                   const std::map<std::pair<int, int>, std::string>& metric_exprs,
                   const std::map<std::array<int, 3>, std::string>& cubic_exprs,
                   JetStrategy strategy, double fd_step,
                   std::vector<std::array<double, 2>> box);

/// Log-likelihood families for the quadrature cross-checks.
LogLikelihood normal_loglik();
/// natural == false: (k, beta) shape-rate chart; true: natural parameters
/// (t1, t2) = (k - 1, -beta).
LogLikelihood gamma_loglik(bool natural);

}  // namespace statman
