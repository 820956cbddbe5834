#pragma once

#include <cmath>
#include <complex>

#include "kvf/errors.hpp"
#include "kvf/geometry.hpp"
#include "kvf/scale_factor.hpp"
#include "kvf/tensor.hpp"

namespace kvf {

struct ConnectionAtPoint {
    Conn4 gamma{};
};

struct CurvatureAtPoint {
    Riem4 riemann{}; // riemann[p][q][i][j] = R^p_qij
    Mat4 ricci{};
    double scalar = 0.0;
};

struct CurvatureGradientAtPoint {
    NablaRiem4 nabla{}; // nabla[s][p][q][i][j] = nabla_s R^p_qij
};

namespace detail {

inline void require_polar_chart(const ChartPoint& p, const char* what) {
    if (p.chart == Chart::ModifiedU)
        throw ChartProfileMismatch(std::string(what) +
                                   " has closed forms in the polar charts only; use the numeric path");
}

inline void require_step(double h) {
    if (!(h > 0.0)) throw StepTooLarge("finite-difference step must be positive");
    if (h > 1e-2) throw StepTooLarge("finite-difference step exceeds 1e-2");
}

/// d g_ii / d x^m by complex-step differentiation: exact to roundoff.
inline std::array<Vec4, 4> metric_partials_cstep(const ScaleFactorProfile& profile,
                                                 const ChartPoint& p) {
    using C = std::complex<double>;
    constexpr double h = 1e-30;
    std::array<Vec4, 4> dg{};
    for (int m = 0; m < 4; ++m) {
        std::array<C, 4> c{C(p.coords[0]), C(p.coords[1]), C(p.coords[2]), C(p.coords[3])};
        c[m] += C(0.0, h);
        const auto g = metric_diag(profile, p.chart, c);
        for (int i = 0; i < 4; ++i) dg[m][i] = g[i].imag() / h;
    }
    return dg;
}

/// d g_ii / d x^m by a 5-point 4th-order central stencil with step h,
/// scaled per coordinate magnitude.
inline std::array<Vec4, 4> metric_partials_fd(const ScaleFactorProfile& profile,
                                              const ChartPoint& p, double h) {
    std::array<Vec4, 4> dg{};
    for (int m = 0; m < 4; ++m) {
        const double hm = h * std::max(1.0, std::fabs(p.coords[m]));
        auto eval = [&](double offset) {
            Vec4 c = p.coords;
            c[m] += offset;
            return metric_diag(profile, p.chart, c);
        };
        const auto gp2 = eval(2.0 * hm), gp1 = eval(hm), gm1 = eval(-hm), gm2 = eval(-2.0 * hm);
        for (int i = 0; i < 4; ++i)
            dg[m][i] = (-gp2[i] + 8.0 * gp1[i] - 8.0 * gm1[i] + gm2[i]) / (12.0 * hm);
    }
    return dg;
}

inline ConnectionAtPoint gamma_from_partials(const MetricAtPoint& m,
                                             const std::array<Vec4, 4>& dg_diag) {
    // expand the diagonal partials to full dg[m][i][j]
    double dg[4][4][4] = {};
    for (int mm = 0; mm < 4; ++mm)
        for (int i = 0; i < 4; ++i) dg[mm][i][i] = dg_diag[mm][i];

    ConnectionAtPoint conn;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double v = 0.0;
                for (int s = 0; s < 4; ++s)
                    v += 0.5 * m.g_inv[k][s] * (dg[j][i][s] + dg[i][s][j] - dg[s][i][j]);
                conn.gamma[k][i][j] = v;
            }
    return conn;
}

/// Machine-accurate connection from the metric alone (complex-step partials).
inline ConnectionAtPoint christoffel_cstep(const ScaleFactorProfile& profile,
                                           const ChartPoint& p) {
    return gamma_from_partials(metric_at(profile, p), metric_partials_cstep(profile, p));
}

} // namespace detail

/// Connection components from the tabulated closed forms (polar charts).
inline ConnectionAtPoint christoffel_closed(const ScaleFactorProfile& profile,
                                            const ChartPoint& p) {
    detail::require_polar_chart(p, "christoffel_closed");
    const double x0 = p.coords[0];
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1);
    const double w = p.spatial_norm2() + 1.0;

    ConnectionAtPoint conn;
    auto& G = conn.gamma;
    G[0][0][0] = R1 / R;
    for (int i = 1; i < 4; ++i) {
        G[0][i][i] = 4.0 * R1 / (R * w * w);
        G[i][0][i] = G[i][i][0] = R1 / R;
    }
    // purely spatial block: conformal factor 4R^2/w^2, d_i ln factor = -4x^i/w
    const Vec4 L{0.0, -4.0 * p.coords[1] / w, -4.0 * p.coords[2] / w, -4.0 * p.coords[3] / w};
    for (int k = 1; k < 4; ++k)
        for (int i = 1; i < 4; ++i)
            for (int j = 1; j < 4; ++j)
                G[k][i][j] = 0.5 * ((i == k) * L[j] + (j == k) * L[i] - (i == j) * L[k]);
    return conn;
}

/// Connection recomputed from finite differences of the metric alone.
inline ConnectionAtPoint christoffel_numeric(const ScaleFactorProfile& profile,
                                             const ChartPoint& p, double h = 1e-3) {
    detail::require_step(h);
    return detail::gamma_from_partials(metric_at(profile, p),
                                       detail::metric_partials_fd(profile, p, h));
}

namespace detail {

inline CurvatureAtPoint assemble_curvature(const MetricAtPoint& m, const ConnectionAtPoint& conn,
                                           const std::array<Conn4, 4>& dgamma) {
    // dgamma[i][p][j][q] = d Gamma^p_jq / d x^i
    CurvatureAtPoint out;
    const auto& G = conn.gamma;
    for (int pp = 0; pp < 4; ++pp)
        for (int q = 0; q < 4; ++q)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double v = dgamma[i][pp][j][q] - dgamma[j][pp][i][q];
                    for (int s = 0; s < 4; ++s)
                        v += G[pp][i][s] * G[s][j][q] - G[pp][j][s] * G[s][i][q];
                    out.riemann[pp][q][i][j] = v;
                }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double v = 0.0;
            for (int s = 0; s < 4; ++s) v += out.riemann[s][i][s][j];
            out.ricci[i][j] = v;
        }
    out.scalar = 0.0;
    for (int i = 0; i < 4; ++i) out.scalar += m.g_inv[i][i] * out.ricci[i][i];
    return out;
}

} // namespace detail

/// Curvature from the tabulated closed forms; Ricci and the scalar are
/// produced by contraction of the filled components.
inline CurvatureAtPoint riemann_closed(const ScaleFactorProfile& profile, const ChartPoint& p) {
    detail::require_polar_chart(p, "riemann_closed");
    const double x0 = p.coords[0];
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1), R2 = profile.eval(x0, 2);
    const double w = p.spatial_norm2() + 1.0;
    const double F1 = (R2 * R - R1 * R1) / (R * R);
    const double F2 = 4.0 * (R1 * R1 + R * R) / (R * R * w * w);

    CurvatureAtPoint out;
    auto& Rm = out.riemann;
    for (int q = 1; q < 4; ++q) {
        Rm[0][q][0][q] = 4.0 * F1 / (w * w);
        Rm[0][q][q][0] = -Rm[0][q][0][q];
        Rm[q][0][0][q] = F1;
        Rm[q][0][q][0] = -F1;
    }
    for (int pp = 1; pp < 4; ++pp)
        for (int q = 1; q < 4; ++q)
            if (pp != q) {
                Rm[pp][q][pp][q] = F2;
                Rm[pp][q][q][pp] = -F2;
            }
    const auto m = metric_at(profile, p);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double v = 0.0;
            for (int s = 0; s < 4; ++s) v += Rm[s][i][s][j];
            out.ricci[i][j] = v;
        }
    out.scalar = 0.0;
    for (int i = 0; i < 4; ++i) out.scalar += m.g_inv[i][i] * out.ricci[i][i];
    return out;
}

/// Nonzero Ricci components from the tabulated closed forms.
inline Mat4 ricci_closed(const ScaleFactorProfile& profile, const ChartPoint& p) {
    detail::require_polar_chart(p, "ricci_closed");
    const double x0 = p.coords[0];
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1), R2 = profile.eval(x0, 2);
    const double w = p.spatial_norm2() + 1.0;
    Mat4 ric{};
    ric[0][0] = (3.0 * R1 * R1 - 3.0 * R * R2) / (R * R);
    const double spatial = (8.0 * R * R + 4.0 * R1 * R1 + 4.0 * R * R2) / (R * R * w * w);
    ric[1][1] = ric[2][2] = ric[3][3] = spatial;
    return ric;
}

/// Scalar curvature -6/R^2 - 6R''/R^3; chart-independent.
inline double scalar_curvature_closed(const ScaleFactorProfile& profile, double x0) {
    const double R = profile.eval(x0, 0), R2 = profile.eval(x0, 2);
    return -6.0 / (R * R) - 6.0 * R2 / (R * R * R);
}

/// Curvature recomputed from the metric alone: machine-accurate connection,
/// then a 4th-order stencil for its coordinate derivatives.
inline CurvatureAtPoint riemann_numeric(const ScaleFactorProfile& profile, const ChartPoint& p,
                                        double h = 1e-3) {
    detail::require_step(h);
    const auto conn = detail::christoffel_cstep(profile, p);
    std::array<Conn4, 4> dgamma{};
    for (int i = 0; i < 4; ++i) {
        const double hi = h * std::max(1.0, std::fabs(p.coords[i]));
        auto eval = [&](double offset) {
            ChartPoint q = p;
            q.coords[i] += offset;
            return detail::christoffel_cstep(profile, q).gamma;
        };
        const auto gp2 = eval(2.0 * hi), gp1 = eval(hi), gm1 = eval(-hi), gm2 = eval(-2.0 * hi);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    dgamma[i][a][b][c] =
                        (-gp2[a][b][c] + 8.0 * gp1[a][b][c] - 8.0 * gm1[a][b][c] + gm2[a][b][c]) /
                        (12.0 * hi);
    }
    return detail::assemble_curvature(metric_at(profile, p), conn, dgamma);
}

/// Covariant curvature gradient from the tabulated closed forms.
inline CurvatureGradientAtPoint nabla_riemann_closed(const ScaleFactorProfile& profile,
                                                     const ChartPoint& p) {
    detail::require_polar_chart(p, "nabla_riemann_closed");
    const double x0 = p.coords[0];
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1);
    const double R2 = profile.eval(x0, 2), R3 = profile.eval(x0, 3);
    const double w = p.spatial_norm2() + 1.0;
    const double R3c = R * R * R;
    const double N1 = (16.0 * R1 * R1 * R1 - 20.0 * R2 * R1 * R + 4.0 * R3 * R * R) / (R3c * w * w);
    const double N2 = (4.0 * R1 * R1 * R1 - 5.0 * R2 * R1 * R + R3 * R * R) / R3c;
    const double N3 = (-16.0 * R1 * R1 * R1 + 8.0 * R2 * R1 * R - 8.0 * R1 * R * R) / (R3c * w * w);
    const double N4 =
        (32.0 * R1 * R1 * R1 - 16.0 * R2 * R1 * R + 16.0 * R1 * R * R) / (R3c * w * w * w * w);
    const double N5 = (8.0 * R1 * R1 * R1 - 4.0 * R2 * R1 * R + 4.0 * R1 * R * R) / (R3c * w * w);

    CurvatureGradientAtPoint out;
    auto& N = out.nabla;
    auto set = [&N](int s, int pp, int q, int i, int j, double v) {
        N[s][pp][q][i][j] = v;
        N[s][pp][q][j][i] = -v;
    };
    for (int q = 1; q < 4; ++q) {
        set(0, 0, q, 0, q, N1);
        set(0, q, 0, 0, q, N2);
    }
    for (int pp = 1; pp < 4; ++pp)
        for (int q = 1; q < 4; ++q)
            if (pp != q) set(0, pp, q, pp, q, N3);
    for (int s = 1; s < 4; ++s)
        for (int q = 1; q < 4; ++q)
            if (s != q) {
                set(s, 0, q, s, q, N4);
                set(s, q, 0, s, q, N5);
                set(s, s, q, q, 0, N5);
                set(s, q, s, 0, q, N5);
            }
    return out;
}

/// Covariant curvature gradient from the metric alone: coordinate
/// derivatives of the numeric curvature plus the four connection sums.
inline CurvatureGradientAtPoint nabla_riemann_numeric(const ScaleFactorProfile& profile,
                                                      const ChartPoint& p, double h = 5e-4) {
    detail::require_step(h);
    const auto conn = detail::christoffel_cstep(profile, p);
    const auto curv = riemann_numeric(profile, p);

    CurvatureGradientAtPoint out;
    for (int s = 0; s < 4; ++s) {
        const double hs = h * std::max(1.0, std::fabs(p.coords[s]));
        auto eval = [&](double offset) {
            ChartPoint q = p;
            q.coords[s] += offset;
            return riemann_numeric(profile, q).riemann;
        };
        const auto rp2 = eval(2.0 * hs), rp1 = eval(hs), rm1 = eval(-hs), rm2 = eval(-2.0 * hs);
        for (int pp = 0; pp < 4; ++pp)
            for (int q = 0; q < 4; ++q)
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) {
                        double v = (-rp2[pp][q][i][j] + 8.0 * rp1[pp][q][i][j] -
                                    8.0 * rm1[pp][q][i][j] + rm2[pp][q][i][j]) /
                                   (12.0 * hs);
                        for (int hh = 0; hh < 4; ++hh) {
                            v += conn.gamma[pp][s][hh] * curv.riemann[hh][q][i][j];
                            v -= conn.gamma[hh][s][q] * curv.riemann[pp][hh][i][j];
                            v -= conn.gamma[hh][s][i] * curv.riemann[pp][q][hh][j];
                            v -= conn.gamma[hh][s][j] * curv.riemann[pp][q][i][hh];
                        }
                        out.nabla[s][pp][q][i][j] = v;
                    }
    }
    return out;
}

/// max |R^s_ijk + R^s_ikj| over all indices.
inline double antisymmetry_residual(const Riem4& r) {
    double m = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    m = std::max(m, std::fabs(r[s][i][j][k] + r[s][i][k][j]));
    return m;
}

/// max |R^s_ijk + R^s_kij + R^s_jki| (first Bianchi identity).
inline double bianchi1_residual(const Riem4& r) {
    double m = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    m = std::max(m, std::fabs(r[s][i][j][k] + r[s][k][i][j] + r[s][j][k][i]));
    return m;
}

} // namespace kvf
