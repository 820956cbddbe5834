#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kvf/curvature.hpp"
#include "kvf/errors.hpp"
#include "kvf/geometry.hpp"
#include "kvf/scale_factor.hpp"
#include "kvf/tensor.hpp"

namespace kvf {

/// State of the Pfaff system: the covector X and the six independent
/// components of the skew tensor Y = grad X, ordered 01,02,03,12,13,23.
struct KillingJet {
    Vec4 X{};
    std::array<double, 6> Y{};

    static constexpr std::array<std::array<int, 2>, 6> y_pairs{
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

    /// Full Y_ij with Y_ii = 0 and Y_ij = -Y_ji.
    Mat4 y_full() const {
        Mat4 m{};
        for (int s = 0; s < 6; ++s) {
            m[y_pairs[s][0]][y_pairs[s][1]] = Y[s];
            m[y_pairs[s][1]][y_pairs[s][0]] = -Y[s];
        }
        return m;
    }

    std::array<double, 10> as_vector() const {
        return {X[0], X[1], X[2], X[3], Y[0], Y[1], Y[2], Y[3], Y[4], Y[5]};
    }

    static KillingJet from_vector(const std::array<double, 10>& v) {
        KillingJet j;
        j.X = {v[0], v[1], v[2], v[3]};
        j.Y = {v[4], v[5], v[6], v[7], v[8], v[9]};
        return j;
    }
};

inline Vec4 lower_index(const ScaleFactorProfile& profile, const ChartPoint& p, const Vec4& v) {
    return lower_index(metric_at(profile, p), v);
}

inline Vec4 raise_index(const ScaleFactorProfile& profile, const ChartPoint& p, const Vec4& cov) {
    return raise_index(metric_at(profile, p), cov);
}

/// Connection at a point: closed forms in the polar charts, numeric in the
/// u-chart where no tables exist.
inline ConnectionAtPoint connection_at(const ScaleFactorProfile& profile, const ChartPoint& p) {
    if (p.chart == Chart::ModifiedU) return detail::christoffel_cstep(profile, p);
    return christoffel_closed(profile, p);
}

inline CurvatureAtPoint curvature_at(const ScaleFactorProfile& profile, const ChartPoint& p) {
    if (p.chart == Chart::ModifiedU) return riemann_numeric(profile, p);
    return riemann_closed(profile, p);
}

inline CurvatureGradientAtPoint curvature_gradient_at(const ScaleFactorProfile& profile,
                                                      const ChartPoint& p) {
    if (p.chart == Chart::ModifiedU) return nabla_riemann_numeric(profile, p);
    return nabla_riemann_closed(profile, p);
}

/// A covector-valued field on a chart, evaluated pointwise.
using CovectorField = std::function<Vec4(const ChartPoint&)>;

/// The symmetrized covariant derivative nabla_i X_j + nabla_j X_i, with the
/// partial derivatives taken by central differences of step h.
inline Mat4 killing_residual(const ScaleFactorProfile& profile, const ChartPoint& p,
                             const CovectorField& field, double h = 1e-5) {
    detail::require_step(h);
    const auto conn = connection_at(profile, p);
    Mat4 dX{}; // dX[i][j] = d X_j / d x^i
    for (int i = 0; i < 4; ++i) {
        const double hi = h * std::max(1.0, std::fabs(p.coords[i]));
        ChartPoint pp = p, pm = p;
        pp.coords[i] += hi;
        pm.coords[i] -= hi;
        const Vec4 Xp = field(pp), Xm = field(pm);
        for (int j = 0; j < 4; ++j) dX[i][j] = (Xp[j] - Xm[j]) / (2.0 * hi);
    }
    const Vec4 X = field(p);
    Mat4 res{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double g = 0.0;
            for (int s = 0; s < 4; ++s) g += conn.gamma[s][i][j] * X[s];
            res[i][j] = dX[i][j] + dX[j][i] - 2.0 * g;
        }
    return res;
}

/// Coordinate derivatives of the 10-component jet prescribed by the Pfaff
/// system:  dX_j/dx^i = Y_ij + Gamma^s_ij X_s,
///          dY_jk/dx^i = R^s_ijk X_s + Gamma^s_ij Y_sk + Gamma^s_ik Y_js.
inline std::array<std::array<double, 10>, 4> pfaff_rhs(const ScaleFactorProfile& profile,
                                                       const ChartPoint& p,
                                                       const KillingJet& jet) {
    const auto conn = connection_at(profile, p);
    const auto curv = curvature_at(profile, p);
    const Mat4 Yf = jet.y_full();

    std::array<std::array<double, 10>, 4> D{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double v = Yf[i][j];
            for (int s = 0; s < 4; ++s) v += conn.gamma[s][i][j] * jet.X[s];
            D[i][j] = v;
        }
        for (int slot = 0; slot < 6; ++slot) {
            const int j = KillingJet::y_pairs[slot][0], k = KillingJet::y_pairs[slot][1];
            double v = 0.0;
            for (int s = 0; s < 4; ++s) {
                v += curv.riemann[s][i][j][k] * jet.X[s];
                v += conn.gamma[s][i][j] * Yf[s][k] + conn.gamma[s][i][k] * Yf[j][s];
            }
            D[i][4 + slot] = v;
        }
    }
    return D;
}

/// Pointwise residual of the second-order compatibility condition of the
/// Pfaff system, for all index combinations (i,j,p,q). Linear in the jet.
inline Riem4 compat_residual(const ScaleFactorProfile& profile, const ChartPoint& p,
                             const KillingJet& jet) {
    const auto curv = curvature_at(profile, p);
    const auto grad = curvature_gradient_at(profile, p);
    const auto& Rm = curv.riemann;
    const auto& N = grad.nabla;
    const Mat4 Yf = jet.y_full();
    const Vec4& X = jet.X;

    Riem4 res{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int P = 0; P < 4; ++P)
                for (int Q = 0; Q < 4; ++Q) {
                    double lhs = 0.0, rhs = 0.0;
                    for (int s = 0; s < 4; ++s) {
                        lhs += -Rm[s][P][i][j] * Yf[s][Q] - Rm[s][Q][i][j] * Yf[P][s];
                        rhs += N[i][s][j][P][Q] * X[s] + Rm[s][j][P][Q] * Yf[i][s];
                        rhs -= N[j][s][i][P][Q] * X[s] + Rm[s][i][P][Q] * Yf[j][s];
                    }
                    res[i][j][P][Q] = lhs - rhs;
                }
    return res;
}

/// The X-level compatibility residual (it vanishes identically by the
/// curvature symmetries; kept as an end-to-end identity check).
inline double compat_x_residual(const ScaleFactorProfile& profile, const ChartPoint& p,
                                const KillingJet& jet) {
    const auto curv = curvature_at(profile, p);
    const auto& Rm = curv.riemann;
    double m = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                double v = 0.0;
                for (int s = 0; s < 4; ++s)
                    v += -Rm[s][k][i][j] * jet.X[s] -
                         (Rm[s][i][j][k] * jet.X[s] - Rm[s][j][i][k] * jet.X[s]);
                m = std::max(m, std::fabs(v));
            }
    return m;
}

/// Pointwise linear system extracted from the compatibility condition:
/// 36 rows (i<j, p<q) over the 10 jet components.
struct CompatReport {
    Eigen::MatrixXd matrix;       // 36 x 10
    int rank = 0;
    int kernel_dim = 0;
    std::vector<std::array<double, 10>> kernel_basis;
    std::vector<double> singular_values;
    CaseLabel case_label = CaseLabel::Generic;
    int reduced_rank = 0;         // rank of the five reduced equations
    bool reduced_consistent = false;
};

inline Eigen::MatrixXd compat_matrix(const ScaleFactorProfile& profile, const ChartPoint& p) {
    std::array<Riem4, 10> columns;
    for (int b = 0; b < 10; ++b) {
        std::array<double, 10> unit{};
        unit[b] = 1.0;
        columns[b] = compat_residual(profile, p, KillingJet::from_vector(unit));
    }
    Eigen::MatrixXd M(36, 10);
    int row = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int P = 0; P < 4; ++P)
                for (int Q = P + 1; Q < 4; ++Q) {
                    for (int b = 0; b < 10; ++b) M(row, b) = columns[b][i][j][P][Q];
                    ++row;
                }
    return M;
}

/// The five reduced compatibility equations as a 5 x 10 coefficient matrix
/// (rows over the jet components in the KillingJet ordering).
inline Eigen::MatrixXd reduced_compat_matrix(const ScaleFactorProfile& profile, double x0) {
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1);
    const double R2 = profile.eval(x0, 2), R3 = profile.eval(x0, 3);
    const double c1 = 4.0 * R1 * R1 * R1 - 5.0 * R2 * R1 * R + R3 * R * R;
    const double E = 2.0 * R1 * R1 - R2 * R + R * R;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 10);
    M(0, 0) = c1;
    M(1, 0) = R1 * E;
    for (int i = 1; i <= 3; ++i) {
        M(1 + i, i) = E * R1;      // X_i coefficient
        M(1 + i, 3 + i) = -E * R;  // Y_0i coefficient (slots 4..6)
    }
    return M;
}

namespace detail {

inline int svd_rank(const Eigen::MatrixXd& M, double tol_rank, std::vector<double>* sv_out) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(sv.size() > 0 ? sv(0) : 0.0, 1.0);
    const double thr = tol_rank * scale;
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k) {
        if (sv(k) > thr) ++rank;
        if (sv(k) > thr / 10.0 && sv(k) < thr * 10.0)
            throw RankUnstable("a singular value lies within a factor of 10 of the rank threshold");
    }
    if (sv_out) {
        sv_out->assign(sv.data(), sv.data() + sv.size());
    }
    return rank;
}

} // namespace detail

/// Rank/kernel analysis of the compatibility system at one point.
/// tol_rank is relative to the largest singular value.
inline CompatReport compat_rank(const ScaleFactorProfile& profile, const ChartPoint& p,
                                double tol_rank = 1e-9) {
    CompatReport rep;
    rep.matrix = compat_matrix(profile, p);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.matrix, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(sv(0), 1.0);
    const double thr = tol_rank * scale;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > thr / 10.0 && sv(k) < thr * 10.0)
            throw RankUnstable("a singular value lies within a factor of 10 of the rank threshold");
    rep.singular_values.assign(sv.data(), sv.data() + sv.size());
    rep.rank = 0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > thr) ++rep.rank;
    rep.kernel_dim = 10 - rep.rank;
    for (int k = rep.rank; k < 10; ++k) {
        std::array<double, 10> v{};
        for (int r = 0; r < 10; ++r) v[r] = svd.matrixV()(r, k);
        rep.kernel_basis.push_back(v);
    }
    rep.case_label = classify_case(profile, {p.coords[0]});

    // the reduced equations must carry the same solution set
    const Eigen::MatrixXd Mr = reduced_compat_matrix(profile, p.coords[0]);
    rep.reduced_rank = detail::svd_rank(Mr, tol_rank, nullptr);
    double worst = 0.0;
    const double rscale = std::max(Mr.cwiseAbs().maxCoeff(), 1.0);
    for (const auto& v : rep.kernel_basis) {
        Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(v.data(), 10);
        worst = std::max(worst, (Mr * vv).cwiseAbs().maxCoeff() / rscale);
    }
    rep.reduced_consistent = (rep.reduced_rank == rep.rank) && worst < 1e-8;
    return rep;
}

/// A parametric curve tau in [0,1] -> chart coordinates.
using ParametricPath = std::function<Vec4(double)>;

inline ParametricPath straight_path(const Vec4& from, const Vec4& to) {
    return [from, to](double tau) {
        Vec4 c;
        for (int i = 0; i < 4; ++i) c[i] = from[i] + tau * (to[i] - from[i]);
        return c;
    };
}

/// Classical 4th-order fixed-step integration of the Pfaff system along a
/// path in a single chart.
inline KillingJet transport_jet(const ScaleFactorProfile& profile, const ChartPoint& start,
                                const KillingJet& jet0, const ParametricPath& path, int steps) {
    if (steps < 16) throw std::invalid_argument("transport needs at least 16 steps");

    auto rhs = [&](double tau, const std::array<double, 10>& state) {
        constexpr double dtau = 1e-6;
        const Vec4 pos = path(tau);
        Vec4 posp = path(tau + dtau), posm = path(tau - dtau);
        Vec4 vel;
        for (int i = 0; i < 4; ++i) vel[i] = (posp[i] - posm[i]) / (2.0 * dtau);
        ChartPoint p{start.chart, pos};
        std::array<std::array<double, 10>, 4> D;
        try {
            D = pfaff_rhs(profile, p, KillingJet::from_vector(state));
        } catch (const DomainError&) {
            throw ChartExitError("transport path left the chart domain");
        }
        std::array<double, 10> out{};
        for (int c = 0; c < 10; ++c)
            for (int i = 0; i < 4; ++i) out[c] += D[i][c] * vel[i];
        return out;
    };

    std::array<double, 10> y = jet0.as_vector();
    const double dt = 1.0 / steps;
    auto axpy = [](const std::array<double, 10>& a, double s, const std::array<double, 10>& b) {
        std::array<double, 10> r;
        for (int i = 0; i < 10; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    for (int n = 0; n < steps; ++n) {
        const double t = n * dt;
        const auto k1 = rhs(t, y);
        const auto k2 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
        const auto k3 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
        const auto k4 = rhs(t + dt, axpy(y, dt, k3));
        for (int i = 0; i < 10; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return KillingJet::from_vector(y);
}

/// Step-doubling wrapper: doubles the step count from 16 until the endpoint
/// jet changes by less than 1e-9, capped at 2^14 steps.
inline KillingJet transport_jet_auto(const ScaleFactorProfile& profile, const ChartPoint& start,
                                     const KillingJet& jet0, const ParametricPath& path) {
    KillingJet prev = transport_jet(profile, start, jet0, path, 16);
    for (int steps = 32; steps <= (1 << 14); steps *= 2) {
        KillingJet next = transport_jet(profile, start, jet0, path, steps);
        if (max_abs_diff(next.as_vector(), prev.as_vector()) < 1e-9) return next;
        prev = next;
    }
    return prev;
}

/// Dimension of the intersection of the compatibility kernels across the
/// sample points; the pointwise upper bound for the isometry algebra.
inline int algebra_dimension(const ScaleFactorProfile& profile,
                             const std::vector<ChartPoint>& sample_points,
                             double tol_rank = 1e-9) {
    if (sample_points.size() < 3)
        throw std::invalid_argument("algebra_dimension needs at least 3 sample points");
    Eigen::MatrixXd stacked(36 * static_cast<int>(sample_points.size()), 10);
    int row = 0;
    for (const auto& p : sample_points) {
        stacked.middleRows(row, 36) = compat_matrix(profile, p);
        row += 36;
    }
    return 10 - detail::svd_rank(stacked, tol_rank, nullptr);
}

} // namespace kvf
