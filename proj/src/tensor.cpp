#include "statman/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace statman {

Tensor::Tensor(int n, std::vector<Variance> variance) : n_(n), var_(std::move(variance)) {
    if (n <= 0) throw DimensionError("tensor dimension must be positive");
    if (var_.size() > 5) throw ShapeError("tensor rank exceeds 5");
    std::size_t sz = 1;
    for (std::size_t i = 0; i < var_.size(); ++i) sz *= static_cast<std::size_t>(n);
    a_.assign(sz, 0.0);
}

Tensor::Tensor(int n, std::vector<Variance> variance, std::vector<double> components)
    : Tensor(n, std::move(variance)) {
    if (components.size() != a_.size()) throw ShapeError("component count mismatch");
    a_ = std::move(components);
    for (double v : a_)
        if (!std::isfinite(v)) throw DomainError("tensor has non-finite components");
}

std::size_t Tensor::flat(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw ShapeError("index rank mismatch");
    std::size_t f = 0;
    for (int i : idx) {
        if (i < 0 || i >= n_) throw ShapeError("index out of range");
        f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return f;
}

bool Tensor::next_index(std::vector<int>& idx, int n) {
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
        if (++idx[static_cast<std::size_t>(k)] < n) return true;
        idx[static_cast<std::size_t>(k)] = 0;
    }
    return false;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b) {
    if (a.dim() != b.dim() || a.variance() != b.variance())
        throw ShapeError("tensor shape/variance mismatch");
}

}  // namespace

Tensor operator+(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b);
    Tensor r = a;
    for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] += b.data()[i];
    return r;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b);
    Tensor r = a;
    for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] -= b.data()[i];
    return r;
}

Tensor operator*(const Tensor& a, double c) {
    Tensor r = a;
    for (double& v : r.data()) v *= c;
    return r;
}
Tensor operator*(double c, const Tensor& a) { return a * c; }

Tensor contract(const Tensor& t, int slot_a, int slot_b) {
    const int r = t.rank();
    if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= r || slot_b >= r)
        throw ShapeError("invalid contraction slots");
    if (t.variance()[static_cast<std::size_t>(slot_a)] ==
        t.variance()[static_cast<std::size_t>(slot_b)])
        throw VarianceError("contraction requires opposite-variance slots");
    if (slot_a > slot_b) std::swap(slot_a, slot_b);
    std::vector<Variance> var;
    for (int s = 0; s < r; ++s)
        if (s != slot_a && s != slot_b) var.push_back(t.variance()[static_cast<std::size_t>(s)]);
    Tensor out(t.dim(), var);
    const int n = t.dim();
    std::vector<int> oidx(static_cast<std::size_t>(r - 2), 0);
    std::vector<int> tidx(static_cast<std::size_t>(r), 0);
    if (r == 2) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
            tidx[static_cast<std::size_t>(slot_a)] = a;
            tidx[static_cast<std::size_t>(slot_b)] = a;
            s += t.at(tidx);
        }
        out.data()[0] = s;
        return out;
    }
    do {
        int w = 0;
        for (int s = 0; s < r; ++s)
            if (s != slot_a && s != slot_b) tidx[static_cast<std::size_t>(s)] = oidx[w++];
        double sum = 0.0;
        for (int a = 0; a < n; ++a) {
            tidx[static_cast<std::size_t>(slot_a)] = a;
            tidx[static_cast<std::size_t>(slot_b)] = a;
            sum += t.at(tidx);
        }
        out.at(oidx) = sum;
    } while (Tensor::next_index(oidx, n));
    return out;
}

namespace {

Tensor metric_contract(const Tensor& t, int slot, const Tensor& m2, Variance target) {
    const int r = t.rank();
    if (slot < 0 || slot >= r) throw ShapeError("slot out of range");
    if (t.variance()[static_cast<std::size_t>(slot)] == target)
        throw VarianceError("slot already has the target variance");
    std::vector<Variance> var = t.variance();
    var[static_cast<std::size_t>(slot)] = target;
    Tensor out(t.dim(), var);
    const int n = t.dim();
    std::vector<int> idx(static_cast<std::size_t>(r), 0);
    std::vector<int> src = idx;
    do {
        double sum = 0.0;
        src = idx;
        for (int a = 0; a < n; ++a) {
            src[static_cast<std::size_t>(slot)] = a;
            sum += m2({idx[static_cast<std::size_t>(slot)], a}) * t.at(src);
        }
        out.at(idx) = sum;
    } while (Tensor::next_index(idx, n));
    return out;
}

}  // namespace

Tensor raise_slot(const Tensor& t, int slot, const Metric& m) {
    return metric_contract(t, slot, m.g_inv, Variance::upper);
}

Tensor lower_slot(const Tensor& t, int slot, const Metric& m) {
    return metric_contract(t, slot, m.g, Variance::lower);
}

namespace {

void check_slots_same_variance(const Tensor& t, const std::vector<int>& slots) {
    if (slots.size() < 2) throw ShapeError("need at least two slots");
    Variance v = t.variance()[static_cast<std::size_t>(slots[0])];
    for (int s : slots) {
        if (s < 0 || s >= t.rank()) throw ShapeError("slot out of range");
        if (t.variance()[static_cast<std::size_t>(s)] != v)
            throw VarianceError("symmetrization slots must share variance");
    }
}

}  // namespace

Tensor symmetrize(const Tensor& t, const std::vector<int>& slots) {
    check_slots_same_variance(t, slots);
    Tensor out(t.dim(), t.variance());
    const int n = t.dim();
    std::vector<int> idx(static_cast<std::size_t>(t.rank()), 0);
    do {
        double sum = 0.0;
        std::vector<int> vals(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i)
            vals[i] = idx[static_cast<std::size_t>(slots[i])];
        std::sort(vals.begin(), vals.end());
        std::vector<int> perm = vals;
        std::size_t nperm = 0;
        do {
            std::vector<int> q = idx;
            for (std::size_t i = 0; i < slots.size(); ++i)
                q[static_cast<std::size_t>(slots[i])] = perm[i];
            sum += t.at(q);
            ++nperm;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.at(idx) = sum / static_cast<double>(nperm);
    } while (Tensor::next_index(idx, n));
    return out;
}

double symmetry_defect(const Tensor& t, const std::vector<int>& slots) {
    check_slots_same_variance(t, slots);
    const int n = t.dim();
    std::vector<int> idx(static_cast<std::size_t>(t.rank()), 0);
    double worst = 0.0;
    do {
        double ref = t.at(idx);
        std::vector<int> vals(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i)
            vals[i] = idx[static_cast<std::size_t>(slots[i])];
        std::sort(vals.begin(), vals.end());
        do {
            std::vector<int> q = idx;
            for (std::size_t i = 0; i < slots.size(); ++i)
                q[static_cast<std::size_t>(slots[i])] = vals[i];
            worst = std::max(worst, std::abs(t.at(q) - ref));
        } while (std::next_permutation(vals.begin(), vals.end()));
    } while (Tensor::next_index(idx, n));
    return worst;
}

bool is_totally_symmetric(const Tensor& t, const std::vector<int>& slots, double tol) {
    double nrm = max_norm(t);
    return symmetry_defect(t, slots) <= tol * nrm;
}

double max_norm(const Tensor& t) { return max_abs(t.data()); }

double rel_defect(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b);
    return rel_defect_raw(a.data(), b.data());
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double rel_defect_raw(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("size mismatch");
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    return diff / std::max({1.0, max_abs(a), max_abs(b)});
}

namespace {

// In-place inverse by Gauss-Jordan with partial pivoting; returns det.
double invert_matrix(int n, std::vector<double>& m, std::vector<double>& inv) {
    inv.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = 1.0;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(m[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(m[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (piv != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(m[static_cast<std::size_t>(piv) * n + c],
                          m[static_cast<std::size_t>(col) * n + c]);
                std::swap(inv[static_cast<std::size_t>(piv) * n + c],
                          inv[static_cast<std::size_t>(col) * n + c]);
            }
            det = -det;
        }
        double p = m[static_cast<std::size_t>(col) * n + col];
        det *= p;
        if (p == 0.0) return 0.0;
        double ip = 1.0 / p;
        for (int c = 0; c < n; ++c) {
            m[static_cast<std::size_t>(col) * n + c] *= ip;
            inv[static_cast<std::size_t>(col) * n + c] *= ip;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = m[static_cast<std::size_t>(r) * n + col];
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                m[static_cast<std::size_t>(r) * n + c] -=
                    f * m[static_cast<std::size_t>(col) * n + c];
                inv[static_cast<std::size_t>(r) * n + c] -=
                    f * inv[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    return det;
}

// Jacobi eigenvalue sweep for a small symmetric matrix; returns eigenvalues.
std::vector<double> symmetric_eigenvalues(int n, std::vector<double> a) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += std::abs(a[static_cast<std::size_t>(i) * n + j]);
        if (off < 1e-14) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = a[static_cast<std::size_t>(p) * n + q];
                if (std::abs(apq) < 1e-300) continue;
                double app = a[static_cast<std::size_t>(p) * n + p];
                double aqq = a[static_cast<std::size_t>(q) * n + q];
                double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    double akp = a[static_cast<std::size_t>(k) * n + p];
                    double akq = a[static_cast<std::size_t>(k) * n + q];
                    a[static_cast<std::size_t>(k) * n + p] = c * akp - s * akq;
                    a[static_cast<std::size_t>(k) * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[static_cast<std::size_t>(p) * n + k];
                    double aqk = a[static_cast<std::size_t>(q) * n + k];
                    a[static_cast<std::size_t>(p) * n + k] = c * apk - s * aqk;
                    a[static_cast<std::size_t>(q) * n + k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * n + i];
    return ev;
}

}  // namespace

Metric Metric::from(const Tensor& g) {
    if (g.rank() != 2 || g.variance()[0] != Variance::lower || g.variance()[1] != Variance::lower)
        throw ShapeError("metric must be a (0,2) tensor");
    const int n = g.dim();
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        double rowmax = 0.0;
        for (int j = 0; j < n; ++j) rowmax = std::max(rowmax, std::abs(g({i, j})));
        scale *= std::max(rowmax, 1e-300);
    }
    std::vector<double> work = g.data();
    std::vector<double> inv;
    double det = invert_matrix(n, work, inv);
    if (std::abs(det) < 1e-12 * scale) throw SingularMetric("metric is singular at this point");
    Metric m;
    m.g = g;
    m.g_inv = Tensor(n, {Variance::upper, Variance::upper}, inv);
    m.det = det;
    auto ev = symmetric_eigenvalues(n, g.data());
    int pos = 0, neg = 0;
    for (double e : ev) (e > 0 ? pos : neg)++;
    m.signature = {pos, neg};
    return m;
}

}  // namespace statman
