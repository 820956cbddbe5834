#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace kvf {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

/// Connection coefficients, gamma[k][i][j] = Gamma^k_ij.
using Conn4 = std::array<std::array<std::array<double, 4>, 4>, 4>;

/// Curvature components, riem[p][q][i][j] = R^p_qij.
using Riem4 = std::array<std::array<Mat4, 4>, 4>;

/// Covariant curvature gradient, nabla[s][p][q][i][j] = nabla_s R^p_qij.
using NablaRiem4 = std::array<Riem4, 4>;

inline double max_abs(double v) { return std::fabs(v); }

template <class T, std::size_t N>
double max_abs(const std::array<T, N>& a) {
    double m = 0.0;
    for (const auto& e : a) m = std::max(m, max_abs(e));
    return m;
}

inline double max_abs_diff(double a, double b) { return std::fabs(a - b); }

template <class T, std::size_t N>
double max_abs_diff(const std::array<T, N>& a, const std::array<T, N>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, max_abs_diff(a[i], b[i]));
    return m;
}

/// |a - b| / max(1, |a|), the relative deviation used by the oracle suites.
template <class T>
double rel_dev(const T& a, const T& b) {
    return max_abs_diff(a, b) / std::max(1.0, max_abs(a));
}

} // namespace kvf
