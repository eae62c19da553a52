#pragma once

namespace statman {

/// Polygamma function psi^(m)(x) for m in 0..5, x > 0.
/// Upward recurrence to x >= 12, then the Bernoulli asymptotic series;
/// absolute accuracy around 1e-12 for x in (0, 50].
double polygamma(int m, double x);

inline double digamma(double x) { return polygamma(0, x); }
inline double trigamma(double x) { return polygamma(1, x); }

}  // namespace statman
