#pragma once

#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "statman/errors.hpp"

namespace statman {

enum class Variance { upper, lower };

/// Dense small tensor at a point: n^rank components, row-major, with a
/// declared co/contra variance per slot. Value type, freely copyable.
class Tensor {
  public:
    Tensor() = default;
    Tensor(int n, std::vector<Variance> variance);
    Tensor(int n, std::vector<Variance> variance, std::vector<double> components);

    int dim() const { return n_; }
    int rank() const { return static_cast<int>(var_.size()); }
    const std::vector<Variance>& variance() const { return var_; }
    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    double at(std::span<const int> idx) const { return a_[flat(idx)]; }
    double& at(std::span<const int> idx) { return a_[flat(idx)]; }
    double operator()(std::initializer_list<int> idx) const {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }
    double& operator()(std::initializer_list<int> idx) {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }

    std::size_t size() const { return a_.size(); }

    /// Advance a multi-index odometer; returns false after the last index.
    static bool next_index(std::vector<int>& idx, int n);

  private:
    std::size_t flat(std::span<const int> idx) const;
    int n_ = 0;
    std::vector<Variance> var_;
    std::vector<double> a_;
};

Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(const Tensor& a, double c);
Tensor operator*(double c, const Tensor& a);

/// Metric at a point: g, its inverse, determinant, and signature.
struct Metric {
    Tensor g;       // (0,2)
    Tensor g_inv;   // (2,0)
    double det = 0.0;
    std::pair<int, int> signature{0, 0};  // (positive, negative) eigenvalue counts

    /// Build from a symmetric (0,2) tensor; throws SingularMetric when
    /// |det| < 1e-12 * scale.
    static Metric from(const Tensor& g);
};

/// Trace over a pair of opposite-variance slots.
Tensor contract(const Tensor& t, int slot_a, int slot_b);
/// Contraction of a lower slot with g_inv / an upper slot with g.
Tensor raise_slot(const Tensor& t, int slot, const Metric& m);
Tensor lower_slot(const Tensor& t, int slot, const Metric& m);
/// Average over all permutations of the listed same-variance slots.
Tensor symmetrize(const Tensor& t, const std::vector<int>& slots);
/// Max deviation over permutations <= tol * ||t||_inf.
bool is_totally_symmetric(const Tensor& t, const std::vector<int>& slots, double tol);
/// Max deviation over permutations of the listed slots (absolute).
double symmetry_defect(const Tensor& t, const std::vector<int>& slots);

double max_norm(const Tensor& t);
/// ||a - b||_inf / max(1, ||a||_inf, ||b||_inf).
double rel_defect(const Tensor& a, const Tensor& b);

// Raw-buffer helpers used by the curvature kernels.
double max_abs(std::span<const double> a);
double rel_defect_raw(std::span<const double> a, std::span<const double> b);

}  // namespace statman
