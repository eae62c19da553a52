#include "statman/special.hpp"

#include <cmath>

#include "statman/errors.hpp"

namespace statman {

namespace {

constexpr double kBernoulli[] = {
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0,
};

double asymptotic_psi(double x) {
    double r = std::log(x) - 0.5 / x;
    double x2 = 1.0 / (x * x);
    double p = x2;
    for (int k = 0; k < 8; ++k) {
        r -= kBernoulli[k] / (2.0 * (k + 1)) * p;
        p *= x2;
    }
    return r;
}

// psi^(m)(x) ~ (-1)^(m-1) [ (m-1)!/x^m + m!/(2 x^(m+1))
//   + sum_k B_2k (2k+m-1)! / ((2k)! x^(2k+m)) ],  m >= 1
double asymptotic_polygamma(int m, double x) {
    double fact_m1 = 1.0;  // (m-1)!
    for (int i = 2; i < m; ++i) fact_m1 *= i;
    double r = fact_m1 / std::pow(x, m) + fact_m1 * m / (2.0 * std::pow(x, m + 1));
    for (int k = 1; k <= 8; ++k) {
        // (2k+m-1)! / (2k)!
        double c = 1.0;
        for (int j = 2 * k + 1; j <= 2 * k + m - 1; ++j) c *= j;
        r += kBernoulli[k - 1] * c / std::pow(x, 2 * k + m);
    }
    return (m % 2 == 0 ? -r : r);
}

}  // namespace

double polygamma(int m, double x) {
    if (m < 0 || m > 5) throw OrderError("polygamma order must be in 0..5");
    if (!(x > 0.0)) throw DomainError("polygamma requires a positive argument");
    double shift = 0.0;
    double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
    double fact = 1.0;                        // m!
    for (int i = 2; i <= m; ++i) fact *= i;
    while (x < 12.0) {
        // psi^(m)(x) = psi^(m)(x+1) - (-1)^m m! x^(-m-1)
        shift -= sign * fact * std::pow(x, -(m + 1));
        x += 1.0;
    }
    double tail = (m == 0) ? asymptotic_psi(x) : asymptotic_polygamma(m, x);
    return tail + shift;
}

}  // namespace statman
