#include "statman/curvature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

namespace statman {

namespace {

std::size_t ipow(int n, int r) {
    std::size_t s = 1;
    for (int i = 0; i < r; ++i) s *= static_cast<std::size_t>(n);
    return s;
}

// relative defect of two raw arrays on the scale max(1, |a|, |b|)
double defect(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m / std::max({1.0, max_abs(a), max_abs(b)});
}

}  // namespace

std::vector<double> riemann_raw(int n, const std::vector<double>& G,
                                const std::vector<double>& dG) {
    auto I3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    std::vector<double> R(ipow(n, 4), 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = dG[I4(i, l, j, k)] - dG[I4(j, l, i, k)];
                    for (int m = 0; m < n; ++m)
                        v += G[I3(l, i, m)] * G[I3(m, j, k)] - G[I3(l, j, m)] * G[I3(m, i, k)];
                    R[I4(l, i, j, k)] = v;
                    R[I4(l, j, i, k)] = -v;
                }
    return R;
}

std::vector<double> driemann_raw(int n, const std::vector<double>& G,
                                 const std::vector<double>& dG,
                                 const std::vector<double>& d2G) {
    auto I3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    auto I5 = [n](int a, int b, int c, int d, int e) {
        return (((static_cast<std::size_t>(a) * n + b) * n + c) * n + d) * n + e;
    };
    std::vector<double> dR(ipow(n, 5), 0.0);
    for (int q = 0; q < n; ++q)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double v = d2G[I5(q, i, l, j, k)] - d2G[I5(q, j, l, i, k)];
                        for (int m = 0; m < n; ++m)
                            v += dG[I4(q, l, i, m)] * G[I3(m, j, k)] +
                                 G[I3(l, i, m)] * dG[I4(q, m, j, k)] -
                                 dG[I4(q, l, j, m)] * G[I3(m, i, k)] -
                                 G[I3(l, j, m)] * dG[I4(q, m, i, k)];
                        dR[I5(q, l, i, j, k)] = v;
                        dR[I5(q, l, j, i, k)] = -v;
                    }
    return dR;
}

std::vector<double> covd_raw(int n, const std::vector<Variance>& var,
                             const std::vector<double>& T, const std::vector<double>& dT,
                             const std::vector<double>& G) {
    const int r = static_cast<int>(var.size());
    const std::size_t sz = ipow(n, r);
    auto I3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    std::vector<double> out(sz * static_cast<std::size_t>(n), 0.0);
    std::vector<std::size_t> stride(static_cast<std::size_t>(r));
    for (int s = 0; s < r; ++s) stride[static_cast<std::size_t>(s)] = ipow(n, r - 1 - s);
    std::vector<int> idx(static_cast<std::size_t>(r), 0);
    for (std::size_t flat = 0; flat < sz; ++flat) {
        for (int m = 0; m < n; ++m) {
            double v = dT[static_cast<std::size_t>(m) * sz + flat];
            for (int s = 0; s < r; ++s) {
                const int is = idx[static_cast<std::size_t>(s)];
                const std::size_t base = flat - static_cast<std::size_t>(is) * stride[static_cast<std::size_t>(s)];
                if (var[static_cast<std::size_t>(s)] == Variance::upper) {
                    for (int a = 0; a < n; ++a)
                        v += G[I3(is, m, a)] * T[base + static_cast<std::size_t>(a) * stride[static_cast<std::size_t>(s)]];
                } else {
                    for (int a = 0; a < n; ++a)
                        v -= G[I3(a, m, is)] * T[base + static_cast<std::size_t>(a) * stride[static_cast<std::size_t>(s)]];
                }
            }
            out[static_cast<std::size_t>(m) * sz + flat] = v;
        }
        // odometer
        for (int s = r - 1; s >= 0; --s) {
            if (++idx[static_cast<std::size_t>(s)] < n) break;
            idx[static_cast<std::size_t>(s)] = 0;
        }
    }
    return out;
}

std::vector<double> ricci_raw(int n, const std::vector<double>& R13) {
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    std::vector<double> ric(ipow(n, 2), 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double v = 0.0;
            for (int i = 0; i < n; ++i) v += R13[I4(i, i, j, k)];
            ric[static_cast<std::size_t>(j) * n + k] = v;
        }
    return ric;
}

std::vector<double> lower_first_raw(int n, const std::vector<double>& R13,
                                    const std::vector<double>& g) {
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    std::vector<double> R04(ipow(n, 4), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int w = 0; w < n; ++w) {
                    double v = 0.0;
                    for (int l = 0; l < n; ++l)
                        v += g[static_cast<std::size_t>(l) * n + w] * R13[I4(l, i, j, k)];
                    R04[I4(i, j, k, w)] = v;
                }
    return R04;
}

std::vector<double> kk_bracket_raw(int n, const std::vector<double>& K) {
    auto I3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    std::vector<double> KK(ipow(n, 4), 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    for (int m = 0; m < n; ++m)
                        v += K[I3(l, i, m)] * K[I3(m, j, k)] - K[I3(l, j, m)] * K[I3(m, i, k)];
                    KK[I4(l, i, j, k)] = v;
                }
    return KK;
}

std::vector<double> suspension_raw(int n, const std::vector<double>& A) {
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    std::vector<double> S(ipow(n, 4), 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    if (l == i) v += A[static_cast<std::size_t>(j) * n + k];
                    if (l == j) v -= A[static_cast<std::size_t>(i) * n + k];
                    S[I4(l, i, j, k)] = v;
                }
    return S;
}

Tensor riemann(const ConnJets& conn) {
    if (conn.depth < 1) throw OrderError("curvature needs connection jets to order 1");
    return Tensor(conn.n, {Variance::upper, Variance::lower, Variance::lower, Variance::lower},
                  riemann_raw(conn.n, conn.G, conn.dG));
}

Tensor riemann(const Chart& chart, const Point& p, ConnKind kind, double alpha) {
    return riemann(chart.connection(p, kind, alpha, 1));
}

Tensor riemann_decomposed(const Chart& chart, const Point& p, ConnKind kind, double alpha) {
    GeomJets gj = chart.geom(p, 1);
    const int n = gj.n;
    double a;
    switch (kind) {
        case ConnKind::levi_civita: a = 0.0; break;
        case ConnKind::nabla: a = 1.0; break;
        case ConnKind::nabla_star: a = -1.0; break;
        default: a = alpha; break;
    }
    std::vector<double> Rhat = riemann_raw(n, gj.Gh, gj.dGh);
    std::vector<double> hK =
        covd_raw(n, {Variance::upper, Variance::lower, Variance::lower}, gj.K, gj.dK, gj.Gh);
    std::vector<double> KK = kk_bracket_raw(n, gj.K);
    auto I4 = [n](int aa, int b, int c, int d) {
        return ((static_cast<std::size_t>(aa) * n + b) * n + c) * n + d;
    };
    std::vector<double> R(ipow(n, 4), 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    R[I4(l, i, j, k)] = Rhat[I4(l, i, j, k)] +
                                        a * (hK[I4(i, l, j, k)] - hK[I4(j, l, i, k)]) +
                                        a * a * KK[I4(l, i, j, k)];
    return Tensor(n, {Variance::upper, Variance::lower, Variance::lower, Variance::lower},
                  std::move(R));
}

Tensor ricci(const Tensor& curv) {
    if (curv.rank() != 4) throw ShapeError("ricci expects a (1,3) tensor");
    return Tensor(curv.dim(), {Variance::lower, Variance::lower},
                  ricci_raw(curv.dim(), curv.data()));
}

double RicciDefects::max() const {
    return std::max({ric_hat, ric_nab, ricstar_hat, ricstar_nab, half_diff, half_mean});
}

namespace {

// Everything the Ricci-identity and invariant evaluations need at one point.
struct PointGeometry {
    int n = 0;
    GeomJets gj;
    ConnJets hat, nab, star;
    std::vector<double> Rhat, R, Rs;
    std::vector<double> hK, nK, KK;
    std::vector<double> hC, nC;
    std::vector<double> Ric, Rics, Richat;
    std::vector<double> tau, dtau, hTau, nTau;
    std::vector<double> divK_hat, divK_nab, GK, tauK;
};

PointGeometry point_geometry(const Chart& chart, const Point& p, int depth) {
    PointGeometry pg;
    pg.gj = chart.geom(p, depth);
    const int n = pg.n = pg.gj.n;
    pg.hat = connection_from_geom(pg.gj, ConnKind::levi_civita);
    pg.nab = connection_from_geom(pg.gj, ConnKind::nabla);
    pg.star = connection_from_geom(pg.gj, ConnKind::nabla_star);
    pg.Rhat = riemann_raw(n, pg.hat.G, pg.hat.dG);
    pg.R = riemann_raw(n, pg.nab.G, pg.nab.dG);
    pg.Rs = riemann_raw(n, pg.star.G, pg.star.dG);
    const std::vector<Variance> v112 = {Variance::upper, Variance::lower, Variance::lower};
    const std::vector<Variance> v03 = {Variance::lower, Variance::lower, Variance::lower};
    pg.hK = covd_raw(n, v112, pg.gj.K, pg.gj.dK, pg.hat.G);
    pg.nK = covd_raw(n, v112, pg.gj.K, pg.gj.dK, pg.nab.G);
    pg.KK = kk_bracket_raw(n, pg.gj.K);
    pg.hC = covd_raw(n, v03, pg.gj.c, pg.gj.dc, pg.hat.G);
    pg.nC = covd_raw(n, v03, pg.gj.c, pg.gj.dc, pg.nab.G);
    pg.Ric = ricci_raw(n, pg.R);
    pg.Rics = ricci_raw(n, pg.Rs);
    pg.Richat = ricci_raw(n, pg.Rhat);
    auto I3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    pg.tau.assign(static_cast<std::size_t>(n), 0.0);
    pg.dtau.assign(ipow(n, 2), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < n; ++m) pg.tau[static_cast<std::size_t>(i)] += pg.gj.K[I3(m, i, m)];
        for (int q = 0; q < n; ++q) {
            double v = 0.0;
            for (int m = 0; m < n; ++m) v += pg.gj.dK[I4(q, m, i, m)];
            pg.dtau[static_cast<std::size_t>(q) * n + i] = v;
        }
    }
    pg.hTau = covd_raw(n, {Variance::lower}, pg.tau, pg.dtau, pg.hat.G);
    pg.nTau = covd_raw(n, {Variance::lower}, pg.tau, pg.dtau, pg.nab.G);
    pg.divK_hat.assign(ipow(n, 2), 0.0);
    pg.divK_nab.assign(ipow(n, 2), 0.0);
    pg.GK.assign(ipow(n, 2), 0.0);
    pg.tauK.assign(ipow(n, 2), 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double dh = 0.0, dn = 0.0, gk = 0.0, tk = 0.0;
            for (int i = 0; i < n; ++i) {
                dh += pg.hK[I4(i, i, j, k)];
                dn += pg.nK[I4(i, i, j, k)];
                tk += pg.tau[static_cast<std::size_t>(i)] * pg.gj.K[I3(i, j, k)];
                for (int m = 0; m < n; ++m) gk += pg.gj.K[I3(i, m, j)] * pg.gj.K[I3(m, i, k)];
            }
            pg.divK_hat[static_cast<std::size_t>(j) * n + k] = dh;
            pg.divK_nab[static_cast<std::size_t>(j) * n + k] = dn;
            pg.GK[static_cast<std::size_t>(j) * n + k] = gk;
            pg.tauK[static_cast<std::size_t>(j) * n + k] = tk;
        }
    return pg;
}

}  // namespace

RicciDefects ricci_decompositions(const Chart& chart, const Point& p) {
    PointGeometry pg = point_geometry(chart, p, 1);
    const int n = pg.n;
    const std::size_t n2 = ipow(n, 2);
    std::vector<double> lhs(n2), rhs(n2);
    RicciDefects d;
    auto at = [n](const std::vector<double>& a, int y, int z) {
        return a[static_cast<std::size_t>(y) * n + z];
    };
    for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
            const std::size_t f = static_cast<std::size_t>(y) * n + z;
            lhs[f] = at(pg.Ric, y, z);
            rhs[f] = at(pg.Richat, y, z) + at(pg.divK_hat, y, z) - at(pg.hTau, y, z) +
                     at(pg.tauK, y, z) - at(pg.GK, y, z);
        }
    d.ric_hat = defect(lhs, rhs);
    for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
            const std::size_t f = static_cast<std::size_t>(y) * n + z;
            rhs[f] = at(pg.Richat, y, z) + at(pg.divK_nab, y, z) - at(pg.nTau, y, z) -
                     at(pg.tauK, y, z) + at(pg.GK, y, z);
        }
    d.ric_nab = defect(lhs, rhs);
    for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
            const std::size_t f = static_cast<std::size_t>(y) * n + z;
            lhs[f] = at(pg.Rics, y, z);
            rhs[f] = at(pg.Richat, y, z) - at(pg.divK_hat, y, z) + at(pg.hTau, y, z) +
                     at(pg.tauK, y, z) - at(pg.GK, y, z);
        }
    d.ricstar_hat = defect(lhs, rhs);
    for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
            const std::size_t f = static_cast<std::size_t>(y) * n + z;
            rhs[f] = at(pg.Richat, y, z) - at(pg.divK_nab, y, z) + at(pg.nTau, y, z) +
                     3.0 * at(pg.tauK, y, z) - 3.0 * at(pg.GK, y, z);
        }
    d.ricstar_nab = defect(lhs, rhs);
    for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
            const std::size_t f = static_cast<std::size_t>(y) * n + z;
            lhs[f] = 0.5 * (at(pg.Ric, y, z) - at(pg.Rics, y, z));
            rhs[f] = at(pg.divK_hat, y, z) - at(pg.hTau, y, z);
        }
    d.half_diff = defect(lhs, rhs);
    for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
            const std::size_t f = static_cast<std::size_t>(y) * n + z;
            lhs[f] = 0.5 * (at(pg.Ric, y, z) + at(pg.Rics, y, z));
            rhs[f] = at(pg.Richat, y, z) + at(pg.tauK, y, z) - at(pg.GK, y, z);
        }
    d.half_mean = defect(lhs, rhs);
    return d;
}

Tensor covariant_derivative(const TensorFieldFn& field, const ConnJets& conn, const Point& p,
                            double h) {
    Tensor t0 = field(p);
    const int n = t0.dim();
    if (n != conn.n) throw DimensionError("tensor field and connection dimensions differ");
    const std::size_t sz = t0.size();
    std::vector<double> dT(sz * static_cast<std::size_t>(n), 0.0);
    for (int m = 0; m < n; ++m) {
        Point pp = p, pm = p;
        pp[static_cast<std::size_t>(m)] += h;
        pm[static_cast<std::size_t>(m)] -= h;
        Tensor tp = field(pp), tm = field(pm);
        for (std::size_t f = 0; f < sz; ++f)
            dT[static_cast<std::size_t>(m) * sz + f] = (tp.data()[f] - tm.data()[f]) / (2.0 * h);
    }
    std::vector<Variance> var = {Variance::lower};
    var.insert(var.end(), t0.variance().begin(), t0.variance().end());
    return Tensor(n, var, covd_raw(n, t0.variance(), t0.data(), dT, conn.G));
}

Tensor div_K(const Chart& chart, const Point& p) {
    GeomJets gj = chart.geom(p, 1);
    const int n = gj.n;
    std::vector<double> hK = covd_raw(
        n, {Variance::upper, Variance::lower, Variance::lower}, gj.K, gj.dK,
        connection_from_geom(gj, ConnKind::levi_civita).G);
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    std::vector<double> out(ipow(n, 2), 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double v = 0.0;
            for (int i = 0; i < n; ++i) v += hK[I4(i, i, j, k)];
            out[static_cast<std::size_t>(j) * n + k] = v;
        }
    return Tensor(n, {Variance::lower, Variance::lower}, std::move(out));
}

CurvaturePack curvature_pack(const Chart& chart, const Point& p) {
    PointGeometry pg = point_geometry(chart, p, 1);
    CurvaturePack pk;
    pk.n = pg.n;
    pk.point = p;
    pk.R = pg.R;
    pk.Rstar = pg.Rs;
    pk.Rhat = pg.Rhat;
    pk.R04 = lower_first_raw(pg.n, pg.R, pg.gj.g);
    pk.Rstar04 = lower_first_raw(pg.n, pg.Rs, pg.gj.g);
    pk.Rhat04 = lower_first_raw(pg.n, pg.Rhat, pg.gj.g);
    pk.Ric = pg.Ric;
    pk.Ricstar = pg.Rics;
    pk.Richat = pg.Richat;
    pk.tau = pg.tau;
    pk.divK_hat = pg.divK_hat;
    pk.divK_nab = pg.divK_nab;
    pk.S.resize(pk.R04.size());
    for (std::size_t i = 0; i < pk.S.size(); ++i)
        pk.S[i] = 0.5 * (pk.R04[i] + pk.Rstar04[i]);
    return pk;
}

Tensor statistical_curvature(const CurvaturePack& pack) {
    return Tensor(pack.n,
                  {Variance::lower, Variance::lower, Variance::lower, Variance::lower}, pack.S);
}

Tensor projective_curvature(const Tensor& curv, const Tensor& ric, int n) {
    if (n < 2) throw DimensionError("projective curvature needs dimension >= 2");
    std::vector<double> gamma(ric.data());
    for (double& v : gamma) v /= static_cast<double>(n - 1);
    std::vector<double> sus = suspension_raw(n, gamma);
    std::vector<double> P(curv.data());
    for (std::size_t i = 0; i < P.size(); ++i) P[i] -= sus[i];
    return Tensor(n, {Variance::upper, Variance::lower, Variance::lower, Variance::lower},
                  std::move(P));
}

ProjectivePack projective_pack_from_conn(const ConnJets& conn) {
    if (conn.depth < 2) throw OrderError("projective pack needs connection jets to order 2");
    const int n = conn.n;
    ProjectivePack pk;
    pk.n = n;
    std::vector<double> R = riemann_raw(n, conn.G, conn.dG);
    std::vector<double> dR = driemann_raw(n, conn.G, conn.dG, conn.d2G);
    std::vector<double> Ric = ricci_raw(n, R);
    const std::size_t n2 = ipow(n, 2);
    const std::size_t n4 = ipow(n, 4);
    pk.gamma.resize(n2);
    for (std::size_t i = 0; i < n2; ++i) pk.gamma[i] = Ric[i] / static_cast<double>(n - 1);
    std::vector<double> dgamma(n2 * static_cast<std::size_t>(n), 0.0);
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = 0.0;
                for (int i = 0; i < n; ++i)
                    v += dR[(((static_cast<std::size_t>(m) * n + i) * n + i) * n + j) * n + k];
                dgamma[(static_cast<std::size_t>(m) * n + j) * n + k] =
                    v / static_cast<double>(n - 1);
            }
    std::vector<double> covg =
        covd_raw(n, {Variance::lower, Variance::lower}, pk.gamma, dgamma, conn.G);
    pk.Cot.assign(ipow(n, 3), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                pk.Cot[(static_cast<std::size_t>(i) * n + j) * n + k] =
                    covg[(static_cast<std::size_t>(i) * n + j) * n + k] -
                    covg[(static_cast<std::size_t>(j) * n + i) * n + k];
    std::vector<double> sus = suspension_raw(n, pk.gamma);
    pk.P.resize(n4);
    for (std::size_t i = 0; i < n4; ++i) pk.P[i] = R[i] - sus[i];
    // dP = dR - suspension(dgamma), sliced per derivative direction
    std::vector<double> dP(n4 * static_cast<std::size_t>(n), 0.0);
    for (int m = 0; m < n; ++m) {
        std::vector<double> dg(n2);
        for (std::size_t f = 0; f < n2; ++f) dg[f] = dgamma[static_cast<std::size_t>(m) * n2 + f];
        std::vector<double> dsus = suspension_raw(n, dg);
        for (std::size_t f = 0; f < n4; ++f)
            dP[static_cast<std::size_t>(m) * n4 + f] = dR[static_cast<std::size_t>(m) * n4 + f] - dsus[f];
    }
    std::vector<double> covP = covd_raw(
        n, {Variance::upper, Variance::lower, Variance::lower, Variance::lower}, pk.P, dP,
        conn.G);
    pk.deltaP.assign(ipow(n, 3), 0.0);
    auto I5 = [n](int a, int b, int c, int d, int e) {
        return (((static_cast<std::size_t>(a) * n + b) * n + c) * n + d) * n + e;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = 0.0;
                for (int m = 0; m < n; ++m) v += covP[I5(m, m, i, j, k)];
                pk.deltaP[(static_cast<std::size_t>(i) * n + j) * n + k] = v;
            }
    return pk;
}

ProjectivePack projective_pack(const Chart& chart, const Point& p, ConnKind kind, double alpha) {
    return projective_pack_from_conn(chart.connection(p, kind, alpha, 2));
}

Tensor cotton(const Chart& chart, const Point& p, ConnKind kind, double alpha) {
    ProjectivePack pk = projective_pack(chart, p, kind, alpha);
    return Tensor(pk.n, {Variance::lower, Variance::lower, Variance::lower}, pk.Cot);
}

ConnJets projective_transform(const ConnJets& conn, const Jet& phi) {
    const int n = conn.n;
    if (phi.n != n) throw DimensionError("potential jet dimension mismatch");
    if (phi.order < conn.depth + 1)
        throw OrderError("potential jet order too low for connection depth");
    ConnJets out = conn;
    auto I3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    auto I5 = [n](int a, int b, int c, int d, int e) {
        return (((static_cast<std::size_t>(a) * n + b) * n + c) * n + d) * n + e;
    };
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double add = 0.0;
                if (k == j) add += phi.g1(i);
                if (k == i) add += phi.g1(j);
                out.G[I3(k, i, j)] += add;
            }
    if (conn.depth >= 1)
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        double add = 0.0;
                        if (k == j) add += phi.g2(m, i);
                        if (k == i) add += phi.g2(m, j);
                        out.dG[I4(m, k, i, j)] += add;
                    }
    if (conn.depth >= 2)
        for (int q = 0; q < n; ++q)
            for (int m = 0; m < n; ++m)
                for (int k = 0; k < n; ++k)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            double add = 0.0;
                            if (k == j) add += phi.g3(q, m, i);
                            if (k == i) add += phi.g3(q, m, j);
                            out.d2G[I5(q, m, k, i, j)] += add;
                        }
    return out;
}

// ---------------------------------------------------------------------------
// identity suite
// ---------------------------------------------------------------------------

namespace {

void push(std::vector<IdentityRow>& rows, std::string name, const std::vector<double>& lhs,
          const std::vector<double>& rhs) {
    rows.push_back({std::move(name), defect(lhs, rhs)});
}

void push_zero(std::vector<IdentityRow>& rows, std::string name,
               const std::vector<double>& lhs, double scale) {
    rows.push_back({std::move(name), max_abs(lhs) / std::max(1.0, scale)});
}

}  // namespace

std::vector<IdentityRow> identity_suite(const Chart& chart, const Point& p,
                                        const std::vector<double>& alphas) {
    PointGeometry pg = point_geometry(chart, p, 2);
    const int n = pg.n;
    const std::size_t n2 = ipow(n, 2);
    const std::size_t n3 = ipow(n, 3);
    const std::size_t n4 = ipow(n, 4);
    auto I2 = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };
    auto I4 = [n](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
    };
    auto I5 = [n](int a, int b, int c, int d, int e) {
        return (((static_cast<std::size_t>(a) * n + b) * n + c) * n + d) * n + e;
    };
    std::vector<IdentityRow> rows;
    rows.reserve(64);

    const std::vector<double>& R = pg.R;
    const std::vector<double>& Rs = pg.Rs;
    const std::vector<double>& Rhat = pg.Rhat;
    std::vector<double> R04 = lower_first_raw(n, R, pg.gj.g);
    std::vector<double> Rs04 = lower_first_raw(n, Rs, pg.gj.g);
    std::vector<double> Rhat04 = lower_first_raw(n, Rhat, pg.gj.g);
    std::vector<double> KK04 = lower_first_raw(n, pg.KK, pg.gj.g);
    std::vector<double> S(n4);
    for (std::size_t i = 0; i < n4; ++i) S[i] = 0.5 * (R04[i] + Rs04[i]);
    const double rscale = std::max({max_abs(R), max_abs(Rs), max_abs(Rhat), 1.0});
    const double r4scale = std::max({max_abs(R04), max_abs(Rs04), max_abs(Rhat04), 1.0});

    // (1,3) antisymmetry in the first argument pair
    {
        std::vector<double> d(n4);
        auto anti = [&](const std::vector<double>& T, const char* name) {
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k)
                            d[I4(l, i, j, k)] = T[I4(l, i, j, k)] + T[I4(l, j, i, k)];
            push_zero(rows, name, d, rscale);
        };
        anti(R, "antisymmetry of R in (X,Y)");
        anti(Rs, "antisymmetry of R* in (X,Y)");
        anti(Rhat, "antisymmetry of R_hat in (X,Y)");
    }

    // duality pairing g(R(X,Y)Z,W) = -g(Z, R*(X,Y)W)
    {
        std::vector<double> d(n4);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int w = 0; w < n; ++w)
                        d[I4(i, j, k, w)] = R04[I4(i, j, k, w)] + Rs04[I4(i, j, w, k)];
        push_zero(rows, "duality pairing of R04 and R*04", d, r4scale);
    }

    // Bianchi 1st for R, R*, R_hat
    {
        std::vector<double> d(n4);
        auto b1 = [&](const std::vector<double>& T, const char* name) {
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k)
                            d[I4(l, i, j, k)] =
                                T[I4(l, i, j, k)] + T[I4(l, j, k, i)] + T[I4(l, k, i, j)];
            push_zero(rows, name, d, rscale);
        };
        b1(R, "first Bianchi identity for R");
        b1(Rs, "first Bianchi identity for R*");
        b1(Rhat, "first Bianchi identity for R_hat");
    }

    // Bianchi 2nd: cyclic sum of covariant derivative of R in (m,i,j)
    {
        const std::vector<Variance> v13 = {Variance::upper, Variance::lower, Variance::lower,
                                           Variance::lower};
        auto b2 = [&](const std::vector<double>& T, const ConnJets& cj, const char* name) {
            std::vector<double> dT = driemann_raw(n, cj.G, cj.dG, cj.d2G);
            std::vector<double> cov = covd_raw(n, v13, T, dT, cj.G);
            std::vector<double> d(ipow(n, 5), 0.0);
            for (int l = 0; l < n; ++l)
                for (int x = 0; x < n; ++x)
                    for (int y = 0; y < n; ++y)
                        for (int z = 0; z < n; ++z)
                            for (int k = 0; k < n; ++k)
                                d[I5(l, x, y, z, k)] = cov[I5(x, l, y, z, k)] +
                                                       cov[I5(y, l, z, x, k)] +
                                                       cov[I5(z, l, x, y, k)];
            push_zero(rows, name, d, std::max(1.0, max_abs(cov)));
        };
        b2(R, pg.nab, "second Bianchi identity for R");
        b2(Rs, pg.star, "second Bianchi identity for R*");
        b2(Rhat, pg.hat, "second Bianchi identity for R_hat");
    }

    // (1,3) curvature decompositions through K
    {
        std::vector<double> altH(n4), altN(n4);
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        altH[I4(l, i, j, k)] = pg.hK[I4(i, l, j, k)] - pg.hK[I4(j, l, i, k)];
                        altN[I4(l, i, j, k)] = pg.nK[I4(i, l, j, k)] - pg.nK[I4(j, l, i, k)];
                    }
        std::vector<double> rhs(n4);
        for (std::size_t f = 0; f < n4; ++f) rhs[f] = Rhat[f] + altH[f] + pg.KK[f];
        push(rows, "R = R_hat + alt(LC-derivative of K) + [K,K]", R, rhs);
        for (std::size_t f = 0; f < n4; ++f) rhs[f] = Rhat[f] + altN[f] - pg.KK[f];
        push(rows, "R = R_hat + alt(nabla K) - [K,K]", R, rhs);
        for (std::size_t f = 0; f < n4; ++f) rhs[f] = Rhat[f] - altH[f] + pg.KK[f];
        push(rows, "R* = R_hat - alt(LC-derivative of K) + [K,K]", Rs, rhs);
        for (std::size_t f = 0; f < n4; ++f) rhs[f] = Rhat[f] - altN[f] + 3.0 * pg.KK[f];
        push(rows, "R* = R_hat - alt(nabla K) + 3[K,K]", Rs, rhs);
        std::vector<double> half(n4);
        for (std::size_t f = 0; f < n4; ++f) half[f] = 0.5 * (R[f] - Rs[f]);
        push(rows, "(R - R*)/2 = alt(LC-derivative of K)", half, altH);
        for (std::size_t f = 0; f < n4; ++f) rhs[f] = altN[f] - 2.0 * pg.KK[f];
        push(rows, "(R - R*)/2 = alt(nabla K) - 2[K,K]", half, rhs);
        for (std::size_t f = 0; f < n4; ++f) {
            half[f] = 0.5 * (R[f] + Rs[f]);
            rhs[f] = Rhat[f] + pg.KK[f];
        }
        push(rows, "(R + R*)/2 = R_hat + [K,K]", half, rhs);

        // alpha-family: direct curvature of Gamma-hat + aK vs decomposition
        for (double a : alphas) {
            std::vector<double> Ga(pg.hat.G.size()), dGa(pg.hat.dG.size());
            for (std::size_t f = 0; f < Ga.size(); ++f) Ga[f] = pg.hat.G[f] + a * pg.gj.K[f];
            for (std::size_t f = 0; f < dGa.size(); ++f)
                dGa[f] = pg.hat.dG[f] + a * pg.gj.dK[f];
            std::vector<double> Ra = riemann_raw(n, Ga, dGa);
            for (std::size_t f = 0; f < n4; ++f)
                rhs[f] = Rhat[f] + a * altH[f] + a * a * pg.KK[f];
            push(rows,
                 "alpha-curvature decomposition (alpha=" + std::to_string(a) + ")", Ra, rhs);
            // (nabla^alpha g) = alpha C
            std::vector<double> covg = covd_raw(n, {Variance::lower, Variance::lower}, pg.gj.g,
                                                pg.gj.dg, Ga);
            std::vector<double> ac(n3);
            for (std::size_t f = 0; f < n3; ++f) ac[f] = a * pg.gj.c[f];
            push(rows, "alpha-connection metric derivative equals alpha C (alpha=" +
                           std::to_string(a) + ")",
                 covg, ac);
        }
    }

    // (0,4) decompositions and proposition identities
    {
        std::vector<double> rhs(n4);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w)
                        rhs[I4(x, y, z, w)] = Rhat04[I4(x, y, z, w)] -
                                              0.5 * pg.hC[I4(x, y, z, w)] +
                                              0.5 * pg.hC[I4(y, x, z, w)] +
                                              KK04[I4(x, y, z, w)];
        push(rows, "R04 decomposition through C and [K,K]", R04, rhs);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w)
                        rhs[I4(x, y, z, w)] = Rhat04[I4(x, y, z, w)] +
                                              0.5 * pg.hC[I4(x, y, z, w)] -
                                              0.5 * pg.hC[I4(y, x, z, w)] +
                                              KK04[I4(x, y, z, w)];
        push(rows, "R*04 decomposition through C and [K,K]", Rs04, rhs);
        std::vector<double> lhs(n4);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w) {
                        lhs[I4(x, y, z, w)] = R04[I4(x, y, z, w)] - Rs04[I4(x, y, z, w)];
                        rhs[I4(x, y, z, w)] =
                            -pg.hC[I4(x, y, z, w)] + pg.hC[I4(y, x, z, w)];
                    }
        push(rows, "R04 - R*04 through derivatives of C", lhs, rhs);
        for (std::size_t f = 0; f < n4; ++f) rhs[f] = Rhat04[f] + KK04[f];
        push(rows, "(R04 + R*04)/2 = R_hat04 + [K,K]04", S, rhs);

        // pair-swap identities
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w) {
                        lhs[I4(x, y, z, w)] =
                            R04[I4(x, y, z, w)] + R04[I4(x, y, w, z)];
                        rhs[I4(x, y, z, w)] =
                            pg.hC[I4(y, x, z, w)] - pg.hC[I4(x, y, z, w)];
                    }
        push(rows, "R04 last-pair swap equals C-derivative difference", lhs, rhs);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w) {
                        lhs[I4(x, y, z, w)] =
                            Rs04[I4(x, y, z, w)] + Rs04[I4(x, y, w, z)];
                        rhs[I4(x, y, z, w)] =
                            pg.hC[I4(x, y, z, w)] - pg.hC[I4(y, x, z, w)];
                    }
        push(rows, "R*04 last-pair swap equals C-derivative difference", lhs, rhs);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w) {
                        lhs[I4(x, y, z, w)] =
                            R04[I4(x, y, z, w)] + R04[I4(y, x, w, z)];
                        rhs[I4(x, y, z, w)] =
                            R04[I4(z, w, x, y)] + R04[I4(w, z, y, x)];
                    }
        push(rows, "R04 double-swap block identity", lhs, rhs);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w) {
                        lhs[I4(x, y, z, w)] =
                            Rs04[I4(x, y, z, w)] + Rs04[I4(y, x, w, z)];
                        rhs[I4(x, y, z, w)] =
                            Rs04[I4(z, w, x, y)] + Rs04[I4(w, z, y, x)];
                    }
        push(rows, "R*04 double-swap block identity", lhs, rhs);

        // Riemannian symmetries for R_hat04 and S
        auto riem_sym = [&](const std::vector<double>& T, const std::string& tag) {
            std::vector<double> d(n4);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        for (int w = 0; w < n; ++w)
                            d[I4(x, y, z, w)] = T[I4(x, y, z, w)] + T[I4(y, z, x, w)] +
                                                T[I4(z, x, y, w)];
            push_zero(rows, tag + " first-Bianchi symmetry", d, r4scale);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        for (int w = 0; w < n; ++w)
                            d[I4(x, y, z, w)] = T[I4(x, y, z, w)] + T[I4(y, x, z, w)];
            push_zero(rows, tag + " antisymmetry in first pair", d, r4scale);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        for (int w = 0; w < n; ++w)
                            d[I4(x, y, z, w)] = T[I4(x, y, z, w)] + T[I4(x, y, w, z)];
            push_zero(rows, tag + " antisymmetry in last pair", d, r4scale);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        for (int w = 0; w < n; ++w)
                            d[I4(x, y, z, w)] = T[I4(x, y, z, w)] - T[I4(z, w, x, y)];
            push_zero(rows, tag + " pair exchange symmetry", d, r4scale);
        };
        riem_sym(Rhat04, "R_hat04");
        riem_sym(S, "S");
    }

    // derivative cross-identities
    {
        // (LC-derivative of C)(Y,Z,W) = -2 g((LC-derivative of K)(Y,Z), W)
        std::vector<double> lhs(n4), rhs(n4);
        for (int m = 0; m < n; ++m)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w) {
                        double v = 0.0;
                        for (int l = 0; l < n; ++l)
                            v += pg.hK[I4(m, l, y, z)] * pg.gj.g[I2(l, w)];
                        lhs[I4(m, y, z, w)] = pg.hC[I4(m, y, z, w)];
                        rhs[I4(m, y, z, w)] = -2.0 * v;
                    }
        push(rows, "LC-derivative of C equals -2 g(LC-derivative of K, .)", lhs, rhs);

        // metric compatibility / conjugacy round-trips
        std::vector<double> covg = covd_raw(n, {Variance::lower, Variance::lower}, pg.gj.g,
                                            pg.gj.dg, pg.hat.G);
        push_zero(rows, "LC-derivative of g vanishes", covg, std::max(1.0, max_abs(pg.gj.g)));
        covg = covd_raw(n, {Variance::lower, Variance::lower}, pg.gj.g, pg.gj.dg, pg.nab.G);
        push(rows, "nabla g equals C", covg, pg.gj.c);
        covg = covd_raw(n, {Variance::lower, Variance::lower}, pg.gj.g, pg.gj.dg, pg.star.G);
        std::vector<double> negc(n3);
        for (std::size_t f = 0; f < n3; ++f) negc[f] = -pg.gj.c[f];
        push(rows, "nabla* g equals -C", covg, negc);
    }

    // Ricci identities
    {
        RicciDefects rd = ricci_decompositions(chart, p);
        rows.push_back({"Ric decomposition (LC form)", rd.ric_hat});
        rows.push_back({"Ric decomposition (nabla form)", rd.ric_nab});
        rows.push_back({"Ric* decomposition (LC form)", rd.ricstar_hat});
        rows.push_back({"Ric* decomposition (nabla form)", rd.ricstar_nab});
        rows.push_back({"(Ric - Ric*)/2 = div K - derivative of tau", rd.half_diff});
        rows.push_back({"(Ric + Ric*)/2 decomposition", rd.half_mean});

        std::vector<double> lhs(n2), rhs(n2);
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                lhs[I2(y, z)] = pg.Ric[I2(y, z)] - pg.Ric[I2(z, y)];
                rhs[I2(y, z)] = -(pg.dtau[I2(y, z)] - pg.dtau[I2(z, y)]);
            }
        push(rows, "antisymmetric part of Ric equals -d(tau)", lhs, rhs);

        std::vector<double> d(n2);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                d[I2(j, k)] = pg.divK_hat[I2(j, k)] - pg.divK_hat[I2(k, j)];
        push_zero(rows, "div K symmetric", d, std::max(1.0, max_abs(pg.divK_hat)));

        d.assign(n2, 0.0);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                d[I2(j, k)] = pg.Richat[I2(j, k)] - pg.Richat[I2(k, j)];
        push_zero(rows, "Ric_hat symmetric", d, std::max(1.0, max_abs(pg.Richat)));
    }

    return rows;
}

std::vector<IdentityRow> identity_suite(const Chart& chart, const std::vector<Point>& points,
                                        const std::vector<double>& alphas) {
    // Per-point work is pure; run it on up to STATMAN_THREADS workers (or the
    // hardware default).  Aggregation below is order-independent (max per
    // name), so the result is deterministic regardless of scheduling.
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("STATMAN_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) workers = static_cast<unsigned>(v);
    }
    workers = std::min<unsigned>(workers, std::max<std::size_t>(points.size(), 1));
    std::vector<std::vector<IdentityRow>> per_point(points.size());
    std::atomic<std::size_t> cursor{0};
    auto run = [&] {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= points.size()) return;
            per_point[i] = identity_suite(chart, points[i], alphas);
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
        for (std::thread& t : pool) t.join();
    }

    std::map<std::string, double> worst;
    std::vector<std::string> order;
    for (const std::vector<IdentityRow>& rows : per_point) {
        for (const IdentityRow& r : rows) {
            auto it = worst.find(r.name);
            if (it == worst.end()) {
                worst.emplace(r.name, r.defect);
                order.push_back(r.name);
            } else {
                it->second = std::max(it->second, r.defect);
            }
        }
    }
    std::vector<IdentityRow> out;
    out.reserve(order.size());
    for (const std::string& name : order) out.push_back({name, worst[name]});
    return out;
}

}  // namespace statman
