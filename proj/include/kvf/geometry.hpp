#pragma once

#include <array>
#include <cmath>
#include <string>

#include "kvf/errors.hpp"
#include "kvf/scale_factor.hpp"
#include "kvf/tensor.hpp"

namespace kvf {

enum class Chart { NorthPole, SouthPole, ModifiedU };

inline const char* to_string(Chart c) {
    switch (c) {
        case Chart::NorthPole: return "north";
        case Chart::SouthPole: return "south";
        case Chart::ModifiedU: return "modified-u";
    }
    return "?";
}

inline Chart chart_from_string(const std::string& s) {
    if (s == "north" || s == "x") return Chart::NorthPole;
    if (s == "south" || s == "y") return Chart::SouthPole;
    if (s == "modified-u" || s == "u") return Chart::ModifiedU;
    throw ConfigError("unknown chart '" + s + "'");
}

/// An event of M = R x S^3 in one of the three named stereographic charts.
struct ChartPoint {
    Chart chart = Chart::NorthPole;
    Vec4 coords{};

    double spatial_norm2() const {
        return coords[1] * coords[1] + coords[2] * coords[2] + coords[3] * coords[3];
    }
};

/// North <-> South transition: time unchanged, spatial part divided by |x|^2.
inline ChartPoint transition(const ChartPoint& p) {
    if (p.chart == Chart::ModifiedU)
        throw DomainError("transition map is defined between the polar charts only");
    const double n2 = p.spatial_norm2();
    if (n2 == 0.0)
        throw SingularPointError("chart origin has no image in the opposite chart");
    ChartPoint q;
    q.chart = p.chart == Chart::NorthPole ? Chart::SouthPole : Chart::NorthPole;
    q.coords = {p.coords[0], p.coords[1] / n2, p.coords[2] / n2, p.coords[3] / n2};
    return q;
}

/// Diagonal metric components in the point's chart, templated on the scalar
/// type so that complex-step differentiation can run through it.
template <class T>
std::array<T, 4> metric_diag(const ScaleFactorProfile& profile, Chart chart,
                             const std::array<T, 4>& c) {
    const T n2 = c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
    const T w = n2 + 1.0;
    std::array<T, 4> g;
    if (chart == Chart::ModifiedU) {
        if (profile.kind() != ProfileKind::Secant)
            throw ChartProfileMismatch("the modified u-chart exists only for the secant profile");
        const double a = profile.a();
        const T ch = std::cosh(c[0]);
        g[0] = T(a * a);
        const T gs = -4.0 * (a * a) * ch * ch / (w * w);
        g[1] = g[2] = g[3] = gs;
    } else {
        const T R = profile.radius(c[0]);
        g[0] = R * R;
        const T gs = -4.0 * R * R / (w * w);
        g[1] = g[2] = g[3] = gs;
    }
    return g;
}

/// Metric and its inverse at a point; both diagonal, signature (+,-,-,-).
struct MetricAtPoint {
    Mat4 g{};
    Mat4 g_inv{};

    Vec4 diag() const { return {g[0][0], g[1][1], g[2][2], g[3][3]}; }
};

/// The inverse is taken analytically from the diagonal, not by inversion.
inline MetricAtPoint metric_at(const ScaleFactorProfile& profile, const ChartPoint& p) {
    const auto d = metric_diag(profile, p.chart, p.coords);
    MetricAtPoint m;
    for (int i = 0; i < 4; ++i) {
        m.g[i][i] = d[i];
        m.g_inv[i][i] = 1.0 / d[i];
    }
    return m;
}

inline Vec4 lower_index(const MetricAtPoint& m, const Vec4& v) {
    return {m.g[0][0] * v[0], m.g[1][1] * v[1], m.g[2][2] * v[2], m.g[3][3] * v[3]};
}

inline Vec4 raise_index(const MetricAtPoint& m, const Vec4& cov) {
    return {m.g_inv[0][0] * cov[0], m.g_inv[1][1] * cov[1], m.g_inv[2][2] * cov[2],
            m.g_inv[3][3] * cov[3]};
}

} // namespace kvf
