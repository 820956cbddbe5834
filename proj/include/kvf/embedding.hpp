#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kvf/curvature.hpp"
#include "kvf/errors.hpp"
#include "kvf/geometry.hpp"
#include "kvf/scale_factor.hpp"
#include "kvf/tensor.hpp"

namespace kvf {

/// A point of the sign-indefinite ambient space R^5 with metric
/// diag(+1,-1,-1,-1,-1); image points lie on the hyperboloid
/// -(z^0)^2 + sum_i (z^i)^2 = A^2.
struct AmbientPoint {
    std::array<double, 5> z{};

    double hyperboloid_value() const {
        return -z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3] + z[4] * z[4];
    }
};

/// Embedding of the modified u-chart: inverse stereographic projection onto
/// the sphere of radius A cosh(u^0), plus the hyperbolic time coordinate.
inline AmbientPoint embed(const ChartPoint& u, double A) {
    if (u.chart != Chart::ModifiedU)
        throw ChartProfileMismatch("the embedding is defined on the modified u-chart");
    if (A <= 0.0) throw std::invalid_argument("embedding radius A must be positive");
    const double n2 = u.spatial_norm2();
    const double w = n2 + 1.0;
    const double ch = std::cosh(u.coords[0]);
    AmbientPoint p;
    p.z[0] = A * std::sinh(u.coords[0]);
    for (int i = 1; i < 4; ++i) p.z[i] = A * ch * 2.0 * u.coords[i] / w;
    p.z[4] = A * ch * (n2 - 1.0) / w;
    return p;
}

/// Pullback of the ambient metric through the embedding, with the Jacobian
/// taken by 4th-order central differences of step h.
inline MetricAtPoint induced_metric(const ChartPoint& u, double A, double h = 1e-3) {
    if (u.chart != Chart::ModifiedU)
        throw ChartProfileMismatch("the embedding is defined on the modified u-chart");
    detail::require_step(h);
    std::array<std::array<double, 5>, 4> J{}; // J[i][a] = d z^a / d u^i
    for (int i = 0; i < 4; ++i) {
        const double hi = h * std::max(1.0, std::fabs(u.coords[i]));
        std::array<AmbientPoint, 4> s; // -2h, -h, +h, +2h
        const double offs[4] = {-2.0, -1.0, 1.0, 2.0};
        for (int k = 0; k < 4; ++k) {
            ChartPoint q = u;
            q.coords[i] += offs[k] * hi;
            s[k] = embed(q, A);
        }
        for (int a = 0; a < 5; ++a)
            J[i][a] = (s[0].z[a] - 8.0 * s[1].z[a] + 8.0 * s[2].z[a] - s[3].z[a]) / (12.0 * hi);
    }
    const double eta[5] = {1.0, -1.0, -1.0, -1.0, -1.0};
    MetricAtPoint m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double g = 0.0;
            for (int a = 0; a < 5; ++a) g += eta[a] * J[i][a] * J[j][a];
            m.g[i][j] = g;
        }
    for (int i = 0; i < 4; ++i) m.g_inv[i][i] = 1.0 / m.g[i][i];
    return m;
}

/// Result of the constant-curvature check: the largest deviation from the
/// identity R_pqij = K (g_pi g_qj - g_pj g_qi) and the estimated K.
struct SectionalCurvatureReport {
    double max_deviation = 0.0;
    double k_estimate = 0.0;
};

/// Verifies constant sectional curvature K = -1/a^2 of the u-chart metric
/// at the given sample points, using the metric-only numeric curvature.
inline SectionalCurvatureReport sectional_curvature_check(double a,
                                                          const std::vector<ChartPoint>& samples) {
    if (samples.empty()) throw std::invalid_argument("sectional check needs sample points");
    const auto profile = ScaleFactorProfile::secant(a);
    const double K = -1.0 / (a * a);
    SectionalCurvatureReport rep;
    bool have_estimate = false;
    for (const auto& p : samples) {
        if (p.chart != Chart::ModifiedU)
            throw ChartProfileMismatch("sectional check samples must lie in the u-chart");
        const auto curv = riemann_numeric(profile, p);
        const auto m = metric_at(profile, p);
        // lower the first index: R_pqij = g_pp R^p_qij (diagonal metric)
        for (int q = 0; q < 4; ++q)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    for (int pp = 0; pp < 4; ++pp) {
                        const double Rl = m.g[pp][pp] * curv.riemann[pp][q][i][j];
                        const double model =
                            K * (m.g[pp][i] * m.g[q][j] - m.g[pp][j] * m.g[q][i]);
                        rep.max_deviation = std::max(rep.max_deviation, std::fabs(Rl - model));
                    }
        if (!have_estimate) {
            const double R0101 = m.g[0][0] * curv.riemann[0][1][0][1];
            rep.k_estimate = R0101 / (m.g[0][0] * m.g[1][1]);
            have_estimate = true;
        }
    }
    return rep;
}

} // namespace kvf
