#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvf/errors.hpp"
#include "kvf/geometry.hpp"
#include "kvf/killing.hpp"
#include "kvf/rng.hpp"
#include "kvf/scale_factor.hpp"
#include "kvf/tensor.hpp"

namespace kvf {

/// The eleven catalogued fields: three meridional rotations, three
/// equatorial rotations, the static time field, four hyperbolic rotations.
enum class FieldId { Mer1, Mer2, Mer3, Eq12, Eq23, Eq31, Static0, Hyp1, Hyp2, Hyp3, Hyp4 };

inline constexpr std::array<FieldId, 11> all_field_ids{
    FieldId::Mer1, FieldId::Mer2, FieldId::Mer3, FieldId::Eq12,  FieldId::Eq23, FieldId::Eq31,
    FieldId::Static0, FieldId::Hyp1, FieldId::Hyp2, FieldId::Hyp3, FieldId::Hyp4};

inline const char* to_string(FieldId id) {
    switch (id) {
        case FieldId::Mer1: return "mer1";
        case FieldId::Mer2: return "mer2";
        case FieldId::Mer3: return "mer3";
        case FieldId::Eq12: return "eq12";
        case FieldId::Eq23: return "eq23";
        case FieldId::Eq31: return "eq31";
        case FieldId::Static0: return "static0";
        case FieldId::Hyp1: return "hyp1";
        case FieldId::Hyp2: return "hyp2";
        case FieldId::Hyp3: return "hyp3";
        case FieldId::Hyp4: return "hyp4";
    }
    return "?";
}

inline FieldId field_from_string(const std::string& s) {
    if (s == "mer1" || s == "meridional-1") return FieldId::Mer1;
    if (s == "mer2" || s == "meridional-2") return FieldId::Mer2;
    if (s == "mer3" || s == "meridional-3") return FieldId::Mer3;
    if (s == "eq12" || s == "equatorial-12") return FieldId::Eq12;
    if (s == "eq23" || s == "equatorial-23") return FieldId::Eq23;
    if (s == "eq31" || s == "equatorial-31") return FieldId::Eq31;
    if (s == "static0" || s == "static-0") return FieldId::Static0;
    if (s == "hyp1" || s == "hyperbolic-1") return FieldId::Hyp1;
    if (s == "hyp2" || s == "hyperbolic-2") return FieldId::Hyp2;
    if (s == "hyp3" || s == "hyperbolic-3") return FieldId::Hyp3;
    if (s == "hyp4" || s == "hyperbolic-4") return FieldId::Hyp4;
    throw ConfigError("unknown field id '" + s + "'");
}

inline bool is_rotational(FieldId id) {
    return id == FieldId::Mer1 || id == FieldId::Mer2 || id == FieldId::Mer3 ||
           id == FieldId::Eq12 || id == FieldId::Eq23 || id == FieldId::Eq31;
}

inline bool is_hyperbolic(FieldId id) {
    return id == FieldId::Hyp1 || id == FieldId::Hyp2 || id == FieldId::Hyp3 ||
           id == FieldId::Hyp4;
}

inline Chart chart_of_definition(FieldId id) {
    return is_hyperbolic(id) ? Chart::ModifiedU : Chart::NorthPole;
}

/// Whether the field is an exact isometry generator for the given profile;
/// the rotational six always are, the rest belong to the exceptional cases.
inline bool valid_for(FieldId id, const ScaleFactorProfile& profile) {
    if (is_rotational(id)) return true;
    if (id == FieldId::Static0) return profile.kind() == ProfileKind::Constant;
    return profile.kind() == ProfileKind::Secant;
}

inline const char* validity_condition(FieldId id) {
    if (is_rotational(id)) return "any scale factor";
    if (id == FieldId::Static0) return "static case R' = 0 only";
    return "constant-curvature case (secant profile, modified u-chart) only";
}

namespace detail {

/// Spatial part common to the rotational fields: meridional fields carry
/// (2(c^k)^2 - |c|^2 + 1)/2 on the axis and c^k c^j off it; equatorial
/// fields are the plane rotations.
inline Vec4 rotational_vector(FieldId id, const Vec4& c) {
    const double n2 = c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
    Vec4 X{};
    auto mer = [&](int k) {
        for (int j = 1; j < 4; ++j) X[j] = c[k] * c[j];
        X[k] = (2.0 * c[k] * c[k] - n2 + 1.0) / 2.0;
    };
    switch (id) {
        case FieldId::Mer1: mer(1); break;
        case FieldId::Mer2: mer(2); break;
        case FieldId::Mer3: mer(3); break;
        case FieldId::Eq12: X[1] = c[2]; X[2] = -c[1]; break;
        case FieldId::Eq23: X[2] = c[3]; X[3] = -c[2]; break;
        case FieldId::Eq31: X[1] = -c[3]; X[3] = c[1]; break;
        default: throw std::invalid_argument("rotational_vector: not a rotational id");
    }
    return X;
}

inline Vec4 hyperbolic_vector(FieldId id, const Vec4& u) {
    const double n2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
    const double th = std::tanh(u[0]);
    Vec4 X{};
    if (id == FieldId::Hyp4) {
        X[0] = (n2 - 1.0) / (n2 + 1.0);
        for (int j = 1; j < 4; ++j) X[j] = u[j] * th;
        return X;
    }
    const int k = id == FieldId::Hyp1 ? 1 : id == FieldId::Hyp2 ? 2 : 3;
    X[0] = 2.0 * u[k] / (n2 + 1.0);
    for (int j = 1; j < 4; ++j) X[j] = -u[k] * u[j] * th;
    X[k] = (n2 - 2.0 * u[k] * u[k] + 1.0) / 2.0 * th;
    return X;
}

} // namespace detail

/// Contravariant components of the catalogued field at a point of its chart
/// of definition.
inline Vec4 field_vector(FieldId id, const ScaleFactorProfile& profile, const ChartPoint& p) {
    if (is_hyperbolic(id)) {
        if (p.chart != Chart::ModifiedU)
            throw ChartProfileMismatch("hyperbolic fields live in the modified u-chart");
        if (profile.kind() != ProfileKind::Secant)
            throw ChartProfileMismatch("hyperbolic fields require the secant profile");
        return detail::hyperbolic_vector(id, p.coords);
    }
    if (id == FieldId::Static0) {
        if (p.chart == Chart::ModifiedU)
            throw ChartProfileMismatch("the static field is defined in the polar charts");
        return {1.0, 0.0, 0.0, 0.0};
    }
    // rotational fields: spatial formulas are time-independent, so they
    // carry over verbatim to the u-chart (same spatial coordinates there)
    if (p.chart == Chart::SouthPole)
        throw ChartProfileMismatch("rotational fields are catalogued in the north chart");
    if (p.chart == Chart::ModifiedU && profile.kind() != ProfileKind::Secant)
        throw ChartProfileMismatch("the modified u-chart exists only for the secant profile");
    return detail::rotational_vector(id, p.coords);
}

inline Vec4 field_covector(FieldId id, const ScaleFactorProfile& profile, const ChartPoint& p) {
    return lower_index(metric_at(profile, p), field_vector(id, profile, p));
}

/// Y_ij = grad_i X_j of the catalogued field, six components in the
/// 01,02,03,12,13,23 order. For a Killing field the covariant derivative is
/// skew, so the connection terms cancel in the antisymmetrized form
/// Y_ij = (d_i X_j - d_j X_i)/2, evaluated by central differences.
inline std::array<double, 6> field_Y(FieldId id, const ScaleFactorProfile& profile,
                                     const ChartPoint& p, double h = 1e-5) {
    detail::require_step(h);
    Mat4 dX{};
    for (int i = 0; i < 4; ++i) {
        const double hi = h * std::max(1.0, std::fabs(p.coords[i]));
        ChartPoint pp = p, pm = p;
        pp.coords[i] += hi;
        pm.coords[i] -= hi;
        const Vec4 Xp = field_covector(id, profile, pp);
        const Vec4 Xm = field_covector(id, profile, pm);
        for (int j = 0; j < 4; ++j) dX[i][j] = (Xp[j] - Xm[j]) / (2.0 * hi);
    }
    std::array<double, 6> Y{};
    for (int s = 0; s < 6; ++s) {
        const int i = KillingJet::y_pairs[s][0], j = KillingJet::y_pairs[s][1];
        Y[s] = 0.5 * (dX[i][j] - dX[j][i]);
    }
    return Y;
}

/// The exact origin jet of a rotational field: meridional fields carry
/// X_k = -2R^2 and Y_0k = -2RR'; equatorial fields a single spatial Y slot.
/// The equatorial spatial slots follow from covariant differentiation of
/// the vector formulas (Eq23 -> Y_23, Eq31 -> Y_13).
inline KillingJet origin_initial_data(FieldId id, const ScaleFactorProfile& profile, double x0) {
    if (!is_rotational(id))
        throw std::invalid_argument("origin initial data is tabulated for rotational fields only");
    profile.require_domain(x0);
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1);
    KillingJet jet{};
    switch (id) {
        case FieldId::Mer1: jet.X[1] = -2.0 * R * R; jet.Y[0] = -2.0 * R * R1; break;
        case FieldId::Mer2: jet.X[2] = -2.0 * R * R; jet.Y[1] = -2.0 * R * R1; break;
        case FieldId::Mer3: jet.X[3] = -2.0 * R * R; jet.Y[2] = -2.0 * R * R1; break;
        case FieldId::Eq12: jet.Y[3] = 4.0 * R * R; break;  // Y_12
        case FieldId::Eq23: jet.Y[5] = 4.0 * R * R; break;  // Y_23
        case FieldId::Eq31: jet.Y[4] = -4.0 * R * R; break; // Y_13
        default: break;
    }
    return jet;
}

enum class CausalCharacter { TimeLike, SpaceLike, Null };

inline const char* to_string(CausalCharacter c) {
    switch (c) {
        case CausalCharacter::TimeLike: return "time-like";
        case CausalCharacter::SpaceLike: return "space-like";
        case CausalCharacter::Null: return "null";
    }
    return "?";
}

/// Sign of q = g(X,X) in signature (+,-,-,-). The zero vector has no causal
/// character and is rejected.
inline CausalCharacter causal_character(const ScaleFactorProfile& profile, const ChartPoint& p,
                                        const Vec4& X, double* q_out = nullptr) {
    if (X[0] == 0.0 && X[1] == 0.0 && X[2] == 0.0 && X[3] == 0.0)
        throw ZeroFieldError("the zero vector has no causal character");
    const auto m = metric_at(profile, p);
    double q = 0.0;
    for (int i = 0; i < 4; ++i) q += m.g[i][i] * X[i] * X[i];
    if (q_out) *q_out = q;
    const double tol = 1e-12 * std::fabs(m.g[0][0]);
    if (q > tol) return CausalCharacter::TimeLike;
    if (q < -tol) return CausalCharacter::SpaceLike;
    return CausalCharacter::Null;
}

inline CausalCharacter causal_character(FieldId id, const ScaleFactorProfile& profile,
                                        const ChartPoint& p, double* q_out = nullptr) {
    return causal_character(profile, p, field_vector(id, profile, p), q_out);
}

/// Basis order for coefficient 10-vectors in the constant-curvature case:
/// Mer1..3, Eq12, Eq23, Eq31, Hyp1..4, all in the u-chart.
inline constexpr std::array<FieldId, 10> combination_basis{
    FieldId::Mer1, FieldId::Mer2, FieldId::Mer3, FieldId::Eq12, FieldId::Eq23,
    FieldId::Eq31, FieldId::Hyp1, FieldId::Hyp2, FieldId::Hyp3, FieldId::Hyp4};

inline Vec4 combination_vector(const std::array<double, 10>& coeffs,
                               const ScaleFactorProfile& profile, const ChartPoint& p) {
    if (p.chart != Chart::ModifiedU)
        throw ChartProfileMismatch("field combinations are formed in the modified u-chart");
    Vec4 X{};
    for (int b = 0; b < 10; ++b) {
        if (coeffs[b] == 0.0) continue;
        const Vec4 v = field_vector(combination_basis[b], profile, p);
        for (int i = 0; i < 4; ++i) X[i] += coeffs[b] * v[i];
    }
    return X;
}

/// A point where a given combination fails to be time-like.
struct CausalWitness {
    std::array<double, 10> coeffs{};
    ChartPoint point{};
    double q = 0.0;
};

namespace detail {

inline double combination_q(const std::array<double, 10>& coeffs,
                            const ScaleFactorProfile& profile, const ChartPoint& p) {
    const Vec4 X = combination_vector(coeffs, profile, p);
    const auto m = metric_at(profile, p);
    double q = 0.0;
    for (int i = 0; i < 4; ++i) q += m.g[i][i] * X[i] * X[i];
    return q;
}

/// Grid scan (8^3 spatial x 9 time slices) followed by 50 coordinate-descent
/// steps from the best grid point; accepts as soon as q <= 0.
inline bool find_witness(const std::array<double, 10>& coeffs, const ScaleFactorProfile& profile,
                         ChartPoint* best_out, double* q_out) {
    ChartPoint best{Chart::ModifiedU, {0.0, 0.0, 0.0, 0.0}};
    double best_q = combination_q(coeffs, profile, best);
    for (int t = 0; t < 9 && best_q > 0.0; ++t) {
        const double u0 = -2.0 + 0.5 * t;
        for (int i = 0; i < 8 && best_q > 0.0; ++i)
            for (int j = 0; j < 8 && best_q > 0.0; ++j)
                for (int k = 0; k < 8; ++k) {
                    ChartPoint p{Chart::ModifiedU,
                                 {u0, -1.4 + 0.4 * i, -1.4 + 0.4 * j, -1.4 + 0.4 * k}};
                    const double q = combination_q(coeffs, profile, p);
                    if (q < best_q) {
                        best_q = q;
                        best = p;
                        if (best_q <= 0.0) break;
                    }
                }
    }
    double step = 0.2;
    for (int iter = 0; iter < 50 && best_q > 0.0; ++iter) {
        bool improved = false;
        for (int c = 0; c < 4; ++c)
            for (double sgn : {1.0, -1.0}) {
                ChartPoint p = best;
                p.coords[c] += sgn * step;
                const double q = combination_q(coeffs, profile, p);
                if (q < best_q) {
                    best_q = q;
                    best = p;
                    improved = true;
                }
            }
        if (!improved) step *= 0.5;
    }
    *best_out = best;
    *q_out = best_q;
    return best_q <= 0.0;
}

} // namespace detail

/// Searches, for each random nonzero coefficient vector, a point of M where
/// the combination is not time-like. Per-trial coefficient streams are
/// derived independently from the master seed.
inline std::vector<CausalWitness> timelike_combination_scan(const ScaleFactorProfile& profile,
                                                            int trial_count,
                                                            std::uint64_t seed) {
    if (profile.kind() != ProfileKind::Secant)
        throw ChartProfileMismatch("the combination scan runs in the constant-curvature case");
    if (trial_count < 1) throw std::invalid_argument("trial_count must be at least 1");

    std::vector<CausalWitness> witnesses;
    witnesses.reserve(trial_count);
    for (int trial = 0; trial < trial_count; ++trial) {
        auto rng = substream(seed, static_cast<std::uint64_t>(trial));
        CausalWitness w;
        double norm = 0.0;
        do {
            for (double& c : w.coeffs) {
                c = rng.uniform(-1.0, 1.0);
                norm = std::max(norm, std::fabs(c));
            }
        } while (norm == 0.0);
        if (!detail::find_witness(w.coeffs, profile, &w.point, &w.q))
            throw WitnessNotFound("no non-time-like point found for trial " +
                                  std::to_string(trial));
        witnesses.push_back(w);
    }
    return witnesses;
}

} // namespace kvf
