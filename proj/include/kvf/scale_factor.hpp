#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "kvf/errors.hpp"

namespace kvf {

enum class ProfileKind { Constant, Secant, Exponential, TableSpline };

enum class CaseLabel { Static, ConstantCurvature, Generic, AmbiguousDegenerate };

inline const char* to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::Static: return "static";
        case CaseLabel::ConstantCurvature: return "constant-curvature";
        case CaseLabel::Generic: return "generic";
        case CaseLabel::AmbiguousDegenerate: return "ambiguous-degenerate";
    }
    return "?";
}

namespace detail {
inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& x) { return x.real(); }
} // namespace detail

/// Natural cubic spline through (x, y) knots; piecewise
/// y = a + b*dt + c*dt^2 + d*dt^3 on [x_i, x_{i+1}].
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)) {
        const std::size_t n = x_.size();
        if (n < 4 || y.size() != n)
            throw ConfigError("table profile needs at least 4 (x0, R) knots");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw ConfigError("table knots must be strictly increasing in x0");
        a_ = std::move(y);
        b_.assign(n, 0.0);
        c_.assign(n, 0.0);
        d_.assign(n, 0.0);

        // tridiagonal solve for the second-derivative coefficients c
        std::vector<double> h(n - 1), alpha(n, 0.0), l(n), mu(n), z(n);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
        for (std::size_t i = 1; i + 1 < n; ++i)
            alpha[i] = 3.0 * (a_[i + 1] - a_[i]) / h[i] - 3.0 * (a_[i] - a_[i - 1]) / h[i - 1];
        l[0] = 1.0; mu[0] = 0.0; z[0] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            l[i] = 2.0 * (x_[i + 1] - x_[i - 1]) - h[i - 1] * mu[i - 1];
            mu[i] = h[i] / l[i];
            z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
        }
        l[n - 1] = 1.0; z[n - 1] = 0.0; c_[n - 1] = 0.0;
        for (std::size_t j = n - 1; j-- > 0;) {
            c_[j] = z[j] - mu[j] * c_[j + 1];
            b_[j] = (a_[j + 1] - a_[j]) / h[j] - h[j] * (c_[j + 1] + 2.0 * c_[j]) / 3.0;
            d_[j] = (c_[j + 1] - c_[j]) / (3.0 * h[j]);
        }
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    double eval(double x, int order) const {
        const std::size_t i = interval(x);
        const double dt = x - x_[i];
        switch (order) {
            case 0: return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
            case 1: return b_[i] + dt * (2.0 * c_[i] + dt * 3.0 * d_[i]);
            case 2: return 2.0 * c_[i] + 6.0 * d_[i] * dt;
            case 3: return 6.0 * d_[i];
        }
        return 0.0;
    }

    template <class T>
    T eval0(T x) const {
        const std::size_t i = interval(detail::real_part(x));
        const T dt = x - x_[i];
        return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
    }

private:
    std::size_t interval(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i > 0) --i;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_, a_, b_, c_, d_;
};

/// Scale factor R(x^0) of the spatial 3-sphere, with derivatives to order 3.
/// Immutable after construction; all evaluation is const and thread-safe.
class ScaleFactorProfile {
public:
    static ScaleFactorProfile constant(double a, double light_speed = 1.0) {
        return ScaleFactorProfile(ProfileKind::Constant, a, 0.0, light_speed);
    }

    /// R(x^0) = a / cos(x^0) on (-pi/2, pi/2): the constant-curvature case.
    static ScaleFactorProfile secant(double a, double light_speed = 1.0) {
        return ScaleFactorProfile(ProfileKind::Secant, a, 0.0, light_speed);
    }

    static ScaleFactorProfile exponential(double a, double rate, double light_speed = 1.0) {
        return ScaleFactorProfile(ProfileKind::Exponential, a, rate, light_speed);
    }

    static ScaleFactorProfile table(std::vector<double> x0, std::vector<double> radius,
                                    double light_speed = 1.0) {
        ScaleFactorProfile p(ProfileKind::TableSpline, 1.0, 0.0, light_speed);
        p.spline_ = CubicSpline(std::move(x0), std::move(radius));
        return p;
    }

    /// `kind=secant a=1.0`, `kind=constant a=2.0`, `kind=exponential a=1 k=1`,
    /// `kind=table file=knots.csv` (CSV columns x0,R).
    static ScaleFactorProfile from_config(const std::string& text);

    /// CLI shorthand: `secant:1`, `constant:2`, `exponential:1,1`, `table:knots.csv`.
    static ScaleFactorProfile from_spec(const std::string& spec);

    ProfileKind kind() const { return kind_; }
    double a() const { return a_; }
    double rate() const { return rate_; }
    double light_speed() const { return light_speed_; }

    bool in_domain(double x0) const {
        switch (kind_) {
            case ProfileKind::Secant: return std::fabs(x0) < pi_half();
            case ProfileKind::TableSpline:
                return x0 >= spline_.x_min() && x0 <= spline_.x_max();
            default: return std::isfinite(x0);
        }
    }

    void require_domain(double x0) const {
        if (!in_domain(x0)) throw DomainError("x0 outside scale-factor profile domain");
    }

    /// d^order R / d(x^0)^order, analytic for the closed-form kinds.
    double eval(double x0, int order = 0) const {
        require_domain(x0);
        if (order < 0 || order > 3) throw DomainError("derivative order must be in 0..3");
        switch (kind_) {
            case ProfileKind::Constant:
                return order == 0 ? a_ : 0.0;
            case ProfileKind::Secant: {
                const double s = 1.0 / std::cos(x0), t = std::tan(x0);
                switch (order) {
                    case 0: return a_ * s;
                    case 1: return a_ * s * t;
                    case 2: return a_ * (2.0 * s * s * s - s);
                    default: return a_ * s * t * (6.0 * s * s - 1.0);
                }
            }
            case ProfileKind::Exponential: {
                double v = a_ * std::exp(rate_ * x0);
                for (int n = 0; n < order; ++n) v *= rate_;
                return v;
            }
            case ProfileKind::TableSpline:
                return spline_.eval(x0, order);
        }
        return 0.0;
    }

    /// Order-0 evaluation templated on the scalar type (complex-step support).
    template <class T>
    T radius(T x0) const {
        if (!in_domain(detail::real_part(x0)))
            throw DomainError("x0 outside scale-factor profile domain");
        switch (kind_) {
            case ProfileKind::Constant: return T(a_);
            case ProfileKind::Secant: return a_ / std::cos(x0);
            case ProfileKind::Exponential: return a_ * std::exp(rate_ * x0);
            case ProfileKind::TableSpline: return spline_.eval0(x0);
        }
        return T(0);
    }

    /// Interval safely inside the domain, used for seeded sampling.
    std::pair<double, double> safe_x0_interval() const {
        switch (kind_) {
            case ProfileKind::Secant: return {-1.3, 1.3};
            case ProfileKind::TableSpline: {
                const double lo = spline_.x_min(), hi = spline_.x_max();
                const double m = 0.05 * (hi - lo);
                return {lo + m, hi - m};
            }
            default: return {-1.3, 1.3};
        }
    }

    std::string spec_string() const {
        std::ostringstream os;
        switch (kind_) {
            case ProfileKind::Constant: os << "constant:" << a_; break;
            case ProfileKind::Secant: os << "secant:" << a_; break;
            case ProfileKind::Exponential: os << "exponential:" << a_ << "," << rate_; break;
            case ProfileKind::TableSpline: os << "table"; break;
        }
        return os.str();
    }

    static constexpr double pi_half() { return 1.57079632679489661923; }

private:
    ScaleFactorProfile(ProfileKind kind, double a, double rate, double light_speed)
        : kind_(kind), a_(a), rate_(rate), light_speed_(light_speed) {
        if (a_ <= 0.0) throw ConfigError("scale parameter a must be positive");
        if (light_speed_ <= 0.0) throw ConfigError("light speed must be positive");
    }

    ProfileKind kind_;
    double a_;
    double rate_;
    double light_speed_;
    CubicSpline spline_;
};

inline double eval_R(const ScaleFactorProfile& profile, double x0, int order = 0) {
    return profile.eval(x0, order);
}

/// Residual of the constant-curvature condition 2(R')^2 - R''R + R^2.
inline double constant_curvature_residual(const ScaleFactorProfile& profile, double x0) {
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1), R2 = profile.eval(x0, 2);
    return 2.0 * R1 * R1 - R2 * R + R * R;
}

/// Residual of the first integral (R')^2 - C R^4 + R^2. Any C is accepted so
/// that falsification tests with a wrong constant remain expressible.
inline double first_integral_residual(const ScaleFactorProfile& profile, double x0, double C) {
    const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1);
    return R1 * R1 - C * R * R * R * R + R * R;
}

inline double default_classify_tol(const ScaleFactorProfile& profile) {
    // spline third derivatives are noisy, so splines get a looser default
    return profile.kind() == ProfileKind::TableSpline ? 1e-6 : 1e-10;
}

inline CaseLabel classify_case(const ScaleFactorProfile& profile,
                               const std::vector<double>& sample_x0s, double tol) {
    if (sample_x0s.empty()) throw DomainError("classify_case needs at least one sample");
    bool is_static = true, is_cc = true;
    for (double x0 : sample_x0s) {
        const double R = profile.eval(x0, 0), R1 = profile.eval(x0, 1);
        if (std::fabs(R1) > tol * std::fabs(R)) is_static = false;
        if (std::fabs(constant_curvature_residual(profile, x0)) > tol * R * R) is_cc = false;
    }
    if (is_static && is_cc) return CaseLabel::AmbiguousDegenerate;
    if (is_static) return CaseLabel::Static;
    if (is_cc) return CaseLabel::ConstantCurvature;
    return CaseLabel::Generic;
}

inline CaseLabel classify_case(const ScaleFactorProfile& profile,
                               const std::vector<double>& sample_x0s) {
    return classify_case(profile, sample_x0s, default_classify_tol(profile));
}

inline double secant_solution(double a, double x0) {
    if (a <= 0.0) throw DomainError("secant_solution requires a > 0");
    if (std::fabs(x0) >= ScaleFactorProfile::pi_half())
        throw DomainError("secant solution diverges at |x0| = pi/2");
    return a / std::cos(x0);
}

/// t(x^0) = (a/c) ln((1 + sin x^0) / cos x^0) in the constant-curvature case.
inline double time_from_x0(double a, double c, double x0) {
    if (std::fabs(x0) >= ScaleFactorProfile::pi_half())
        throw DomainError("time transform defined for |x0| < pi/2");
    return (a / c) * std::log((1.0 + std::sin(x0)) / std::cos(x0));
}

/// Inverse map x^0(t) = arcsin(tanh(ct/a)), defined for all real t.
inline double x0_from_time(double a, double c, double t) {
    return std::asin(std::tanh(c * t / a));
}

/// R(t) = a cosh(ct/a) for the constant-curvature case.
inline double radius_at_time(double a, double c, double t) {
    return a * std::cosh(c * t / a);
}

// --- profile parsing -------------------------------------------------------

namespace detail {

inline std::vector<std::pair<std::string, std::string>> split_kv(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("expected key=value token, got '" + tok + "'");
        kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return kv;
}

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " from '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("trailing characters in " + what + " '" + s + "'");
    return v;
}

inline std::pair<std::vector<double>, std::vector<double>> read_knots_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open knot file '" + path + "'");
    std::vector<double> xs, rs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, r;
        if (!(ls >> x >> r)) {
            if (xs.empty()) continue; // header line
            throw ConfigError("malformed knot line '" + line + "'");
        }
        xs.push_back(x);
        rs.push_back(r);
    }
    return {std::move(xs), std::move(rs)};
}

} // namespace detail

inline ScaleFactorProfile ScaleFactorProfile::from_config(const std::string& text) {
    std::string kind, file;
    double a = 0.0, k = 0.0, c = 1.0;
    bool has_a = false, has_k = false;
    for (const auto& [key, value] : detail::split_kv(text)) {
        if (key == "kind") kind = value;
        else if (key == "a") { a = detail::parse_number(value, "a"); has_a = true; }
        else if (key == "k") { k = detail::parse_number(value, "k"); has_k = true; }
        else if (key == "c") c = detail::parse_number(value, "c");
        else if (key == "file") file = value;
        else throw ConfigError("unknown profile key '" + key + "'");
    }
    if (kind == "constant") {
        if (!has_a) throw ConfigError("constant profile needs a=");
        return constant(a, c);
    }
    if (kind == "secant") {
        if (!has_a) throw ConfigError("secant profile needs a=");
        return secant(a, c);
    }
    if (kind == "exponential") {
        if (!has_a || !has_k) throw ConfigError("exponential profile needs a= and k=");
        return exponential(a, k, c);
    }
    if (kind == "table") {
        if (file.empty()) throw ConfigError("table profile needs file=");
        auto [xs, rs] = detail::read_knots_csv(file);
        return table(std::move(xs), std::move(rs), c);
    }
    throw ConfigError("unknown profile kind '" + kind + "'");
}

inline ScaleFactorProfile ScaleFactorProfile::from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "constant") return constant(detail::parse_number(args, "a"));
    if (kind == "secant") return secant(detail::parse_number(args, "a"));
    if (kind == "exponential") {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw ConfigError("exponential spec is exponential:a,k");
        return exponential(detail::parse_number(args.substr(0, comma), "a"),
                           detail::parse_number(args.substr(comma + 1), "k"));
    }
    if (kind == "table") {
        auto [xs, rs] = detail::read_knots_csv(args);
        return table(std::move(xs), std::move(rs));
    }
    throw ConfigError("unknown profile spec '" + spec + "'");
}

} // namespace kvf
