#include "statman/chart.hpp"

#include <algorithm>
#include <cmath>

namespace statman {

namespace {

// Gauss-Jordan inverse with partial pivoting; throws SingularMetric.
void invert(int n, const std::vector<double>& g, std::vector<double>& inv, double& det) {
    std::vector<double> m = g;
    inv.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = 1.0;
    det = 1.0;
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        double rowmax = 0.0;
        for (int j = 0; j < n; ++j) rowmax = std::max(rowmax, std::abs(g[static_cast<std::size_t>(i) * n + j]));
        scale *= std::max(rowmax, 1e-300);
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[static_cast<std::size_t>(r) * n + col]) >
                std::abs(m[static_cast<std::size_t>(piv) * n + col]))
                piv = r;
        if (piv != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(m[static_cast<std::size_t>(piv) * n + c], m[static_cast<std::size_t>(col) * n + c]);
                std::swap(inv[static_cast<std::size_t>(piv) * n + c], inv[static_cast<std::size_t>(col) * n + c]);
            }
            det = -det;
        }
        double p = m[static_cast<std::size_t>(col) * n + col];
        det *= p;
        if (std::abs(p) < 1e-300) throw SingularMetric("metric is singular at this point");
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
                m[static_cast<std::size_t>(r) * n + c] -= f * m[static_cast<std::size_t>(col) * n + c];
                inv[static_cast<std::size_t>(r) * n + c] -= f * inv[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    if (std::abs(det) < 1e-12 * scale) throw SingularMetric("metric is singular at this point");
}

}  // namespace

GeomJets Chart::geom(const Point& p, int depth) const {
    if (depth < 0 || depth > 2) throw OrderError("geometry depth must be in 0..2");
    const int gorder = depth + 1;
    const int corder = depth;
    const int N = n;
    const std::size_t n2 = static_cast<std::size_t>(N) * N;
    const std::size_t n3 = n2 * static_cast<std::size_t>(N);
    const std::size_t n4 = n3 * static_cast<std::size_t>(N);
    const std::size_t n5 = n4 * static_cast<std::size_t>(N);

    GeomJets gj;
    gj.n = N;
    gj.depth = depth;
    gj.g.assign(n2, 0.0);
    gj.dg.assign(n3, 0.0);
    if (depth >= 1) gj.d2g.assign(n4, 0.0);
    if (depth >= 2) gj.d3g.assign(n5, 0.0);
    gj.c.assign(n3, 0.0);
    if (depth >= 1) gj.dc.assign(n4, 0.0);
    if (depth >= 2) gj.d2c.assign(n5, 0.0);

    auto I2 = [N](int a, int b) { return static_cast<std::size_t>(a) * N + b; };
    auto I3 = [N](int a, int b, int c) { return (static_cast<std::size_t>(a) * N + b) * N + c; };
    auto I4 = [N](int a, int b, int c, int d) {
        return ((static_cast<std::size_t>(a) * N + b) * N + c) * N + d;
    };
    auto I5 = [N](int a, int b, int c, int d, int e) {
        return (((static_cast<std::size_t>(a) * N + b) * N + c) * N + d) * N + e;
    };

    // metric jets (evaluate upper triangle; mirror)
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            Jet J = metric[I2(i, j)].eval(p, std::min(gorder, 3));
            gj.g[I2(i, j)] = gj.g[I2(j, i)] = J.value;
            for (int m = 0; m < N; ++m) gj.dg[I3(m, i, j)] = gj.dg[I3(m, j, i)] = J.g1(m);
            if (depth >= 1)
                for (int l = 0; l < N; ++l)
                    for (int m = 0; m < N; ++m)
                        gj.d2g[I4(l, m, i, j)] = gj.d2g[I4(l, m, j, i)] = J.g2(l, m);
            if (depth >= 2)
                for (int q = 0; q < N; ++q)
                    for (int l = 0; l < N; ++l)
                        for (int m = 0; m < N; ++m)
                            gj.d3g[I5(q, l, m, i, j)] = gj.d3g[I5(q, l, m, j, i)] = J.g3(q, l, m);
        }

    invert(N, gj.g, gj.ginv, gj.det);

    // d ginv_m = -ginv dg_m ginv ; d2 ginv symmetric combination
    gj.dginv.assign(n3, 0.0);
    for (int m = 0; m < N; ++m)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                double s = 0.0;
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b)
                        s += gj.ginv[I2(i, a)] * gj.dg[I3(m, a, b)] * gj.ginv[I2(b, j)];
                gj.dginv[I3(m, i, j)] = -s;
            }
    if (depth >= 1) {
        gj.d2ginv.assign(n4, 0.0);
        for (int l = 0; l < N; ++l)
            for (int m = 0; m < N; ++m)
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) {
                        double s = 0.0;
                        for (int a = 0; a < N; ++a)
                            for (int b = 0; b < N; ++b) {
                                s += gj.dginv[I3(l, i, a)] * gj.dg[I3(m, a, b)] * gj.ginv[I2(b, j)];
                                s += gj.ginv[I2(i, a)] * gj.d2g[I4(l, m, a, b)] * gj.ginv[I2(b, j)];
                                s += gj.ginv[I2(i, a)] * gj.dg[I3(m, a, b)] * gj.dginv[I3(l, b, j)];
                            }
                        gj.d2ginv[I4(l, m, i, j)] = -s;
                    }
    }

    // cubic jets (evaluate sorted triples; mirror all permutations)
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j)
            for (int k = j; k < N; ++k) {
                Jet J = cubic[I3(i, j, k)].eval(p, std::min(corder, 3));
                const int perms[6][3] = {{i, j, k}, {i, k, j}, {j, i, k},
                                         {j, k, i}, {k, i, j}, {k, j, i}};
                for (auto& pr : perms) {
                    gj.c[I3(pr[0], pr[1], pr[2])] = J.value;
                    if (depth >= 1)
                        for (int m = 0; m < N; ++m)
                            gj.dc[I4(m, pr[0], pr[1], pr[2])] = J.g1(m);
                    if (depth >= 2)
                        for (int l = 0; l < N; ++l)
                            for (int m = 0; m < N; ++m)
                                gj.d2c[I5(l, m, pr[0], pr[1], pr[2])] = J.g2(l, m);
                }
            }

    // A_lij = (d_i g_jl + d_j g_il - d_l g_ij)/2 ; Gamma-hat^k_ij = ginv^kl A_lij
    auto A = [&](int l, int i, int j) {
        return 0.5 * (gj.dg[I3(i, j, l)] + gj.dg[I3(j, i, l)] - gj.dg[I3(l, i, j)]);
    };
    auto dA = [&](int m, int l, int i, int j) {
        return 0.5 * (gj.d2g[I4(m, i, j, l)] + gj.d2g[I4(m, j, i, l)] - gj.d2g[I4(m, l, i, j)]);
    };
    auto d2A = [&](int q, int m, int l, int i, int j) {
        return 0.5 * (gj.d3g[I5(q, m, i, j, l)] + gj.d3g[I5(q, m, j, i, l)] -
                      gj.d3g[I5(q, m, l, i, j)]);
    };

    gj.Gh.assign(n3, 0.0);
    gj.K.assign(n3, 0.0);
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                double sg = 0.0, sk = 0.0;
                for (int l = 0; l < N; ++l) {
                    sg += gj.ginv[I2(k, l)] * A(l, i, j);
                    sk += gj.ginv[I2(k, l)] * gj.c[I3(i, j, l)];
                }
                gj.Gh[I3(k, i, j)] = sg;
                gj.K[I3(k, i, j)] = -0.5 * sk;
            }

    if (depth >= 1) {
        gj.dGh.assign(n4, 0.0);
        gj.dK.assign(n4, 0.0);
        for (int m = 0; m < N; ++m)
            for (int k = 0; k < N; ++k)
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) {
                        double sg = 0.0, sk = 0.0;
                        for (int l = 0; l < N; ++l) {
                            sg += gj.dginv[I3(m, k, l)] * A(l, i, j) +
                                  gj.ginv[I2(k, l)] * dA(m, l, i, j);
                            sk += gj.dginv[I3(m, k, l)] * gj.c[I3(i, j, l)] +
                                  gj.ginv[I2(k, l)] * gj.dc[I4(m, i, j, l)];
                        }
                        gj.dGh[I4(m, k, i, j)] = sg;
                        gj.dK[I4(m, k, i, j)] = -0.5 * sk;
                    }
    }
    if (depth >= 2) {
        gj.d2Gh.assign(n5, 0.0);
        gj.d2K.assign(n5, 0.0);
        for (int q = 0; q < N; ++q)
            for (int m = 0; m < N; ++m)
                for (int k = 0; k < N; ++k)
                    for (int i = 0; i < N; ++i)
                        for (int j = 0; j < N; ++j) {
                            double sg = 0.0, sk = 0.0;
                            for (int l = 0; l < N; ++l) {
                                sg += gj.d2ginv[I4(q, m, k, l)] * A(l, i, j) +
                                      gj.dginv[I3(m, k, l)] * dA(q, l, i, j) +
                                      gj.dginv[I3(q, k, l)] * dA(m, l, i, j) +
                                      gj.ginv[I2(k, l)] * d2A(q, m, l, i, j);
                                sk += gj.d2ginv[I4(q, m, k, l)] * gj.c[I3(i, j, l)] +
                                      gj.dginv[I3(m, k, l)] * gj.dc[I4(q, i, j, l)] +
                                      gj.dginv[I3(q, k, l)] * gj.dc[I4(m, i, j, l)] +
                                      gj.ginv[I2(k, l)] * gj.d2c[I5(q, m, i, j, l)];
                            }
                            gj.d2Gh[I5(q, m, k, i, j)] = sg;
                            gj.d2K[I5(q, m, k, i, j)] = -0.5 * sk;
                        }
    }
    return gj;
}

ConnJets connection_from_geom(const GeomJets& gj, ConnKind kind, double alpha) {
    double a;
    switch (kind) {
        case ConnKind::levi_civita: a = 0.0; break;
        case ConnKind::nabla: a = 1.0; break;
        case ConnKind::nabla_star: a = -1.0; break;
        case ConnKind::alpha: a = alpha; break;
        default: a = 0.0; break;
    }
    ConnJets cj;
    cj.n = gj.n;
    cj.depth = gj.depth;
    cj.kind = kind;
    cj.alpha = a;
    cj.G.resize(gj.Gh.size());
    for (std::size_t i = 0; i < cj.G.size(); ++i) cj.G[i] = gj.Gh[i] + a * gj.K[i];
    if (gj.depth >= 1) {
        cj.dG.resize(gj.dGh.size());
        for (std::size_t i = 0; i < cj.dG.size(); ++i) cj.dG[i] = gj.dGh[i] + a * gj.dK[i];
    }
    if (gj.depth >= 2) {
        cj.d2G.resize(gj.d2Gh.size());
        for (std::size_t i = 0; i < cj.d2G.size(); ++i) cj.d2G[i] = gj.d2Gh[i] + a * gj.d2K[i];
    }
    return cj;
}

ConnJets Chart::connection(const Point& p, ConnKind kind, double alpha, int depth) const {
    return connection_from_geom(geom(p, depth), kind, alpha);
}

Chart Chart::alpha_variant(double a) const {
    Chart c = *this;
    for (auto& f : c.cubic) f = f.scaled(a);
    c.label = label + "[alpha=" + std::to_string(a) + "]";
    return c;
}

Metric Chart::metric_at(const Point& p) const {
    GeomJets gj = geom(p, 0);
    return Metric::from(Tensor(n, {Variance::lower, Variance::lower}, gj.g));
}

Chart make_chart(int n, std::vector<std::string> coords, std::string label,
                 const std::map<std::pair<int, int>, ScalarField>& metric_entries,
                 const std::map<std::array<int, 3>, ScalarField>& cubic_entries,
                 std::vector<std::array<double, 2>> box) {
    if (n < 2) throw DimensionError("chart dimension must be >= 2");
    Chart c;
    c.n = n;
    c.coords = std::move(coords);
    c.label = std::move(label);
    c.box = std::move(box);
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const std::size_t n3 = n2 * static_cast<std::size_t>(n);
    c.metric.assign(n2, ScalarField::constant(n, 0.0));
    c.cubic.assign(n3, ScalarField::constant(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            auto it = metric_entries.find({i, j});
            ScalarField f =
                (it != metric_entries.end()) ? it->second : ScalarField::constant(n, 0.0);
            c.metric[static_cast<std::size_t>(i) * n + j] = f;
            c.metric[static_cast<std::size_t>(j) * n + i] = f;
        }
    for (const auto& [idx, f] : cubic_entries) {
        std::array<int, 3> s = idx;
        std::sort(s.begin(), s.end());
        if (s != idx) throw ParamError("cubic entries must use sorted index triples");
        if (s[0] < 0 || s[2] >= n) throw ParamError("cubic index out of range");
        int perms[6][3] = {{s[0], s[1], s[2]}, {s[0], s[2], s[1]}, {s[1], s[0], s[2]},
                           {s[1], s[2], s[0]}, {s[2], s[0], s[1]}, {s[2], s[1], s[0]}};
        for (auto& pr : perms)
            c.cubic[(static_cast<std::size_t>(pr[0]) * n + pr[1]) * n + pr[2]] = f;
    }
    return c;
}

ConnectionCoeffs levi_civita(const Chart& chart, const Point& p) {
    GeomJets gj = chart.geom(p, 0);
    ConnectionCoeffs cc;
    cc.kind = ConnKind::levi_civita;
    cc.gamma = Tensor(chart.n, {Variance::upper, Variance::lower, Variance::lower}, gj.Gh);
    return cc;
}

Tensor difference_tensor(const Chart& chart, const Point& p) {
    GeomJets gj = chart.geom(p, 0);
    return Tensor(chart.n, {Variance::upper, Variance::lower, Variance::lower}, gj.K);
}

namespace {

ConnectionCoeffs conn_of(const Chart& chart, const Point& p, ConnKind kind, double alpha) {
    ConnJets cj = chart.connection(p, kind, alpha, 0);
    ConnectionCoeffs cc;
    cc.kind = kind;
    cc.alpha = cj.alpha;
    cc.gamma = Tensor(chart.n, {Variance::upper, Variance::lower, Variance::lower}, cj.G);
    return cc;
}

}  // namespace

ConnectionCoeffs nabla(const Chart& chart, const Point& p) {
    return conn_of(chart, p, ConnKind::nabla, 1.0);
}
ConnectionCoeffs nabla_star(const Chart& chart, const Point& p) {
    return conn_of(chart, p, ConnKind::nabla_star, -1.0);
}
ConnectionCoeffs alpha_connection(const Chart& chart, const Point& p, double a) {
    return conn_of(chart, p, ConnKind::alpha, a);
}

Tensor cubic_from_connection(const Chart& chart, const Point& p, const ConnectionCoeffs& conn) {
    GeomJets gj = chart.geom(p, 0);
    const int n = chart.n;
    Tensor out(n, {Variance::lower, Variance::lower, Variance::lower});
    auto I2 = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };
    auto I3 = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = gj.dg[I3(i, j, k)];
                for (int l = 0; l < n; ++l)
                    v -= conn.gamma({l, i, j}) * gj.g[I2(l, k)] +
                         conn.gamma({l, i, k}) * gj.g[I2(j, l)];
                out({i, j, k}) = v;
            }
    return out;
}

ValidationReport validate_statistical(const Chart& chart, const std::vector<Point>& points,
                                      double tol) {
    ValidationReport rep;
    const int n = chart.n;
    for (const Point& p : points) {
        ++rep.points_tested;
        try {
            GeomJets gj = chart.geom(p, 0);
            auto I2 = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };
            auto I3 = [n](int a, int b, int c) {
                return (static_cast<std::size_t>(a) * n + b) * n + c;
            };
            double gnorm = max_abs(gj.g);
            // g symmetric (true by chart layout, but raw charts may violate it)
            double gsym = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    gsym = std::max(gsym, std::abs(gj.g[I2(i, j)] - gj.g[I2(j, i)]));
            if (gsym > tol * std::max(1.0, gnorm))
                rep.issues.push_back({p, "metric not symmetric", gsym});
            // C totally symmetric
            Tensor C(n, {Variance::lower, Variance::lower, Variance::lower}, gj.c);
            double csym = symmetry_defect(C, {0, 1, 2});
            if (csym > tol * std::max(1.0, max_norm(C)))
                rep.issues.push_back({p, "cubic field not totally symmetric", csym});
            // nabla g == C round trip
            ConnectionCoeffs nb = nabla(chart, p);
            Tensor round = cubic_from_connection(chart, p, nb);
            double rt = rel_defect(round, C);
            if (rt > tol) rep.issues.push_back({p, "nabla g != C", rt});
            // torsion-freeness of all kinds (symmetric lower pair)
            for (ConnKind kind :
                 {ConnKind::levi_civita, ConnKind::nabla, ConnKind::nabla_star}) {
                ConnJets cj = chart.connection(p, kind, 1.0, 0);
                double t = 0.0;
                for (int k = 0; k < n; ++k)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            t = std::max(t, std::abs(cj.G[I3(k, i, j)] - cj.G[I3(k, j, i)]));
                if (t > tol * std::max(1.0, max_abs(cj.G)))
                    rep.issues.push_back({p, "connection has torsion", t});
            }
            // duality: d_i g_jk = G^l_ij g_lk + G*^l_ik g_jl
            ConnJets cn = chart.connection(p, ConnKind::nabla, 1.0, 0);
            ConnJets cs = chart.connection(p, ConnKind::nabla_star, -1.0, 0);
            double dual = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double rhs = 0.0;
                        for (int l = 0; l < n; ++l)
                            rhs += cn.G[I3(l, i, j)] * gj.g[I2(l, k)] +
                                   cs.G[I3(l, i, k)] * gj.g[I2(j, l)];
                        dual = std::max(dual, std::abs(gj.dg[I3(i, j, k)] - rhs));
                    }
            if (dual > tol * std::max(1.0, max_abs(gj.dg)))
                rep.issues.push_back({p, "duality relation violated", dual});
            // mean law: (G + G*)/2 == G-hat
            double mean = 0.0;
            for (std::size_t i = 0; i < gj.Gh.size(); ++i)
                mean = std::max(mean, std::abs(0.5 * (cn.G[i] + cs.G[i]) - gj.Gh[i]));
            if (mean > tol * std::max(1.0, max_abs(gj.Gh)))
                rep.issues.push_back({p, "mean law violated", mean});
            // tau relation: G^m_im = d_i log sqrt|det g| + tau_i
            for (int i = 0; i < n; ++i) {
                double trG = 0.0, tau = 0.0, dlog = 0.0;
                for (int m = 0; m < n; ++m) {
                    trG += cn.G[I3(m, i, m)];
                    tau += gj.K[I3(m, i, m)];
                }
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        dlog += 0.5 * gj.ginv[I2(a, b)] * gj.dg[I3(i, a, b)];
                if (std::abs(trG - dlog - tau) > tol * std::max({1.0, std::abs(trG), std::abs(dlog)}))
                    rep.issues.push_back({p, "volume form / tau relation violated",
                                          std::abs(trG - dlog - tau)});
            }
            // K self-adjoint: g(K_X Y, Z) symmetric in (Y, Z)
            double selfadj = 0.0;
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z) {
                        double a = 0.0, b = 0.0;
                        for (int l = 0; l < n; ++l) {
                            a += gj.K[I3(l, x, y)] * gj.g[I2(l, z)];
                            b += gj.K[I3(l, x, z)] * gj.g[I2(l, y)];
                        }
                        selfadj = std::max(selfadj, std::abs(a - b));
                    }
            if (selfadj > tol * std::max(1.0, max_abs(gj.K) * std::max(1.0, gnorm)))
                rep.issues.push_back({p, "K not self-adjoint", selfadj});
        } catch (const SingularMetric& e) {
            rep.issues.push_back({p, std::string("singular metric: ") + e.what(), 0.0});
        } catch (const DomainError& e) {
            rep.issues.push_back({p, std::string("domain error: ") + e.what(), 0.0});
        }
    }
    rep.pass = rep.issues.empty();
    return rep;
}

std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed) {
    if (chart.box.size() != static_cast<std::size_t>(chart.n))
        throw ParamError("chart has no sample box");
    // SplitMix64: portable and stable across platforms.
    std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL;
    auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Point p(static_cast<std::size_t>(chart.n));
        for (int i = 0; i < chart.n; ++i) {
            double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
            p[static_cast<std::size_t>(i)] =
                chart.box[static_cast<std::size_t>(i)][0] +
                u * (chart.box[static_cast<std::size_t>(i)][1] -
                     chart.box[static_cast<std::size_t>(i)][0]);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace statman
