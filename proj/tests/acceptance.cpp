#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kvf/catalog.hpp"
#include "kvf/curvature.hpp"
#include "kvf/embedding.hpp"
#include "kvf/killing.hpp"
#include "kvf/sampling.hpp"
#include "kvf/scale_factor.hpp"

using namespace kvf;

namespace {

void verdict(const char* name, bool ok) {
    std::printf("%s: %s\n", name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
}

std::vector<ScaleFactorProfile> reference_profiles() {
    return {ScaleFactorProfile::constant(2.0), ScaleFactorProfile::exponential(1.0, 1.0),
            ScaleFactorProfile::secant(1.0)};
}

/// Covariant derivative T_ij = nabla_i X_j of a catalog field, with the
/// partial derivative taken by central differences.
Mat4 nabla_X(FieldId id, const ScaleFactorProfile& profile, const ChartPoint& p, double h) {
    const auto conn = christoffel_closed(profile, p);
    const Vec4 X = field_covector(id, profile, p);
    Mat4 T{};
    for (int i = 0; i < 4; ++i) {
        ChartPoint pp = p, pm = p;
        pp.coords[i] += h;
        pm.coords[i] -= h;
        const Vec4 Xp = field_covector(id, profile, pp);
        const Vec4 Xm = field_covector(id, profile, pm);
        for (int j = 0; j < 4; ++j) {
            T[i][j] = (Xp[j] - Xm[j]) / (2.0 * h);
            for (int s = 0; s < 4; ++s) T[i][j] -= conn.gamma[s][i][j] * X[s];
        }
    }
    return T;
}

std::string run_cli_capture(const std::string& args, int* exit_code) {
    const std::string cmd = std::string(KVF_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

} // namespace

TEST_CASE("criterion 01: curvature oracle suite", "[acceptance]") {
    double dg = 0.0, dr = 0.0, dric = 0.0, dsc = 0.0, dn = 0.0;
    for (const auto& profile : reference_profiles()) {
        for (const auto& p : sample_points(profile, Chart::NorthPole, 100, 42)) {
            const auto cc = christoffel_closed(profile, p);
            const auto cn = christoffel_numeric(profile, p);
            dg = std::max(dg, rel_dev(cc.gamma, cn.gamma));
            const auto rc = riemann_closed(profile, p);
            const auto rn = riemann_numeric(profile, p);
            dr = std::max(dr, rel_dev(rc.riemann, rn.riemann));
            dric = std::max(dric, rel_dev(rc.ricci, rn.ricci));
            dsc = std::max(dsc, std::fabs(rc.scalar - rn.scalar) /
                                    std::max(1.0, std::fabs(rc.scalar)));
            const auto nc = nabla_riemann_closed(profile, p);
            const auto nn = nabla_riemann_numeric(profile, p);
            dn = std::max(dn, rel_dev(nc.nabla, nn.nabla));
        }
    }
    const bool ok = dg < 1e-7 && dr < 1e-6 && dric < 1e-6 && dsc < 1e-6 && dn < 1e-6;
    verdict("criterion 01 (curvature oracle suite)", ok);
    CHECK(dg < 1e-7);
    CHECK(dr < 1e-6);
    CHECK(dric < 1e-6);
    CHECK(dsc < 1e-6);
    CHECK(dn < 1e-6);
    REQUIRE(ok);
}

TEST_CASE("criterion 02: identity suite", "[acceptance]") {
    double ident = 0.0;
    for (const auto& profile : reference_profiles())
        for (const auto& p : sample_points(profile, Chart::NorthPole, 100, 42)) {
            const auto curv = riemann_closed(profile, p);
            ident = std::max(ident, antisymmetry_residual(curv.riemann));
            ident = std::max(ident, bianchi1_residual(curv.riemann));
        }

    // Ricci identity on catalog fields by nested finite differences
    double ricci_ident = 0.0;
    const double h = 1e-4;
    for (const auto& profile :
         {ScaleFactorProfile::constant(2.0), ScaleFactorProfile::exponential(1.0, 1.0)}) {
        for (const auto& p : sample_points(profile, Chart::NorthPole, 20, 7)) {
            for (FieldId id : {FieldId::Mer1, FieldId::Eq12}) {
                const auto conn = christoffel_closed(profile, p);
                const auto curv = riemann_closed(profile, p);
                const Vec4 X = field_covector(id, profile, p);
                // S[i][j][k] = nabla_i nabla_j X_k
                double S[4][4][4];
                for (int i = 0; i < 4; ++i) {
                    ChartPoint pp = p, pm = p;
                    pp.coords[i] += h;
                    pm.coords[i] -= h;
                    const Mat4 Tp = nabla_X(id, profile, pp, h);
                    const Mat4 Tm = nabla_X(id, profile, pm, h);
                    const Mat4 T = nabla_X(id, profile, p, h);
                    for (int j = 0; j < 4; ++j)
                        for (int k = 0; k < 4; ++k) {
                            double v = (Tp[j][k] - Tm[j][k]) / (2.0 * h);
                            for (int s = 0; s < 4; ++s)
                                v -= conn.gamma[s][i][j] * T[s][k] +
                                     conn.gamma[s][i][k] * T[j][s];
                            S[i][j][k] = v;
                        }
                }
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        for (int k = 0; k < 4; ++k) {
                            double v = S[i][j][k] - S[j][i][k];
                            for (int s = 0; s < 4; ++s)
                                v += curv.riemann[s][k][i][j] * X[s];
                            ricci_ident = std::max(ricci_ident, std::fabs(v));
                        }
            }
        }
    }
    const bool ok = ident < 1e-10 && ricci_ident < 1e-5;
    verdict("criterion 02 (identity suite)", ok);
    CHECK(ident < 1e-10);
    CHECK(ricci_ident < 1e-5);
    REQUIRE(ok);
}

TEST_CASE("criterion 03: scalar-curvature spot values", "[acceptance]") {
    const auto cst = ScaleFactorProfile::constant(2.0);
    const auto sec = ScaleFactorProfile::secant(1.0);
    double dev_c = 0.0, dev_s = 0.0;
    for (const auto& p : sample_points(sec, Chart::NorthPole, 100, 42)) {
        dev_c = std::max(dev_c, std::fabs(riemann_closed(cst, p).scalar + 1.5));
        dev_s = std::max(dev_s, std::fabs(riemann_closed(sec, p).scalar + 12.0));
    }
    const bool ok = dev_c < 1e-8 && dev_s < 1e-8;
    verdict("criterion 03 (scalar-curvature spot values)", ok);
    CHECK(dev_c < 1e-8);
    CHECK(dev_s < 1e-8);
    REQUIRE(ok);
}

TEST_CASE("criterion 04: killing catalog suite", "[acceptance]") {
    bool ok = true;
    for (const auto& profile : reference_profiles()) {
        const auto pts = sample_points(profile, Chart::NorthPole, 20, 11);
        for (FieldId id : {FieldId::Mer1, FieldId::Mer2, FieldId::Mer3, FieldId::Eq12,
                           FieldId::Eq23, FieldId::Eq31}) {
            auto field = [&](const ChartPoint& p) { return field_covector(id, profile, p); };
            for (const auto& p : pts) {
                const double r = max_abs(killing_residual(profile, p, field));
                CHECK(r < 1e-6);
                ok = ok && r < 1e-6;
            }
        }
        // the static field passes the Killing test only in the static case
        auto s0 = [&](const ChartPoint& p) {
            return field_covector(FieldId::Static0, profile, p);
        };
        double worst = 0.0;
        for (const auto& p : pts)
            worst = std::max(worst, max_abs(killing_residual(profile, p, s0)));
        if (profile.kind() == ProfileKind::Constant) {
            CHECK(worst < 1e-6);
            ok = ok && worst < 1e-6;
        } else {
            CHECK(worst > 1e-3);
            ok = ok && worst > 1e-3;
        }
    }
    // hyperbolic fields pass only under the u-chart metric of the secant case
    const auto sec = ScaleFactorProfile::secant(1.0);
    const auto upts = sample_points(Chart::ModifiedU, 20, 11);
    for (FieldId id : {FieldId::Hyp1, FieldId::Hyp2, FieldId::Hyp3, FieldId::Hyp4}) {
        auto field = [&](const ChartPoint& p) { return field_covector(id, sec, p); };
        for (const auto& p : upts) {
            const double r = max_abs(killing_residual(sec, p, field));
            CHECK(r < 1e-6);
            ok = ok && r < 1e-6;
        }
        bool rejected = false;
        try {
            field_vector(id, ScaleFactorProfile::constant(2.0), upts[0]);
        } catch (const ChartProfileMismatch&) {
            rejected = true;
        }
        CHECK(rejected);
        ok = ok && rejected;
    }
    verdict("criterion 04 (killing catalog suite)", ok);
    REQUIRE(ok);
}

TEST_CASE("criterion 05: dimension counts with clean rank gaps", "[acceptance]") {
    const auto pts = sample_points(Chart::NorthPole, 5, 42);
    const int de = algebra_dimension(ScaleFactorProfile::exponential(1.0, 1.0), pts);
    const int dc = algebra_dimension(ScaleFactorProfile::constant(2.0), pts);
    const int ds = algebra_dimension(ScaleFactorProfile::secant(1.0), pts);
    bool ok = de == 6 && dc == 7 && ds == 10;
    CHECK(de == 6);
    CHECK(dc == 7);
    CHECK(ds == 10);

    const auto gp = ChartPoint{Chart::NorthPole, {0.2, 0.3, -0.1, 0.25}};
    for (const auto& profile : reference_profiles()) {
        const auto rep = compat_rank(profile, gp);
        if (rep.rank > 0 && rep.rank < 10) {
            const double retained = rep.singular_values[rep.rank - 1];
            const double discarded = rep.singular_values[rep.rank];
            CHECK(retained > 1e6 * std::max(discarded, 1e-300));
            ok = ok && retained > 1e6 * std::max(discarded, 1e-300);
        } else if (rep.rank == 0) {
            // everything is discarded; the whole spectrum must be negligible
            CHECK(rep.singular_values[0] < 1e-9);
            ok = ok && rep.singular_values[0] < 1e-9;
        }
    }
    verdict("criterion 05 (dimension counts)", ok);
    REQUIRE(ok);
}

TEST_CASE("criterion 06: transport closure", "[acceptance]") {
    bool ok = true;
    double worst = 0.0, worst_paths = 0.0;
    for (const auto& profile : reference_profiles()) {
        const ChartPoint start{Chart::NorthPole, {0.0, 0.0, 0.0, 0.0}};
        const auto targets = sample_points(profile, Chart::NorthPole, 10, 42);
        for (FieldId id : {FieldId::Mer1, FieldId::Mer2, FieldId::Mer3, FieldId::Eq12,
                           FieldId::Eq23, FieldId::Eq31}) {
            const auto jet0 = origin_initial_data(id, profile, 0.0);
            for (const auto& t : targets) {
                const auto jet = transport_jet_auto(profile, start, jet0,
                                                    straight_path(start.coords, t.coords));
                const auto closed = field_covector(id, profile, t);
                for (int i = 0; i < 4; ++i)
                    worst = std::max(worst, std::fabs(jet.X[i] - closed[i]));
            }
        }
        // two-path independence through a waypoint
        const Vec4 way{-0.4, -0.2, 0.15, 0.1};
        const ChartPoint mid{Chart::NorthPole, way};
        const auto jet0 = origin_initial_data(FieldId::Mer1, profile, 0.0);
        for (int k = 0; k < 3; ++k) {
            const Vec4 t = targets[k].coords;
            const auto direct =
                transport_jet_auto(profile, start, jet0, straight_path(start.coords, t));
            const auto leg1 =
                transport_jet_auto(profile, start, jet0, straight_path(start.coords, way));
            const auto leg2 = transport_jet_auto(profile, mid, leg1, straight_path(way, t));
            worst_paths =
                std::max(worst_paths, max_abs_diff(direct.as_vector(), leg2.as_vector()));
        }
    }
    ok = worst < 1e-6 && worst_paths < 1e-6;
    verdict("criterion 06 (transport closure)", ok);
    CHECK(worst < 1e-6);
    CHECK(worst_paths < 1e-6);
    REQUIRE(ok);
}

TEST_CASE("criterion 07: exceptional-case ODE and time transform", "[acceptance]") {
    bool ok = true;
    for (double a : {1.0, 2.5}) {
        const auto sec = ScaleFactorProfile::secant(a);
        const double c = sec.light_speed();
        double ode = 0.0, fint = 0.0, rt = 0.0, cc1 = 0.0;
        for (const auto& p : sample_points(sec, Chart::NorthPole, 100, 42)) {
            const double x0 = p.coords[0];
            ode = std::max(ode, std::fabs(constant_curvature_residual(sec, x0)));
            fint = std::max(fint, std::fabs(first_integral_residual(sec, x0, 1.0 / (a * a))));
            const double t = time_from_x0(a, c, x0);
            rt = std::max(rt, std::fabs(x0_from_time(a, c, t) - x0));
            cc1 = std::max(cc1, std::fabs(std::cos(x0) * std::cosh(c * t / a) - 1.0));
        }
        CHECK(ode < 1e-10 * a * a);
        CHECK(fint < 1e-10 * a * a);
        CHECK(rt < 1e-10);
        CHECK(cc1 < 1e-10);
        ok = ok && ode < 1e-10 * a * a && fint < 1e-10 * a * a && rt < 1e-10 && cc1 < 1e-10;
    }
    verdict("criterion 07 (exceptional-case ODE)", ok);
    REQUIRE(ok);
}

TEST_CASE("criterion 08: embedding", "[acceptance]") {
    bool ok = true;
    for (double a : {1.0, 2.0}) {
        const auto sec = ScaleFactorProfile::secant(a);
        double hyp = 0.0, met = 0.0;
        for (const auto& p : sample_points(Chart::ModifiedU, 1000, 42))
            hyp = std::max(hyp,
                           std::fabs(embed(p, a).hyperboloid_value() - a * a) / (a * a));
        const auto pts = sample_points(Chart::ModifiedU, 100, 42);
        for (const auto& p : pts) {
            const auto gi = induced_metric(p, a);
            const auto gc = metric_at(sec, p);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    met = std::max(met, std::fabs(gi.g[i][j] - gc.g[i][j]) /
                                            std::fabs(gc.g[0][0]));
        }
        const auto rep =
            sectional_curvature_check(a, std::vector<ChartPoint>(pts.begin(), pts.begin() + 10));
        const double kdev = std::fabs(rep.k_estimate + 1.0 / (a * a));
        CHECK(hyp < 1e-12);
        CHECK(met < 1e-7);
        CHECK(kdev < 1e-6);
        ok = ok && hyp < 1e-12 && met < 1e-7 && kdev < 1e-6;
    }
    verdict("criterion 08 (embedding)", ok);
    REQUIRE(ok);
}

TEST_CASE("criterion 09: no purely time-like combination", "[acceptance]") {
    const auto sec = ScaleFactorProfile::secant(1.0);
    bool ok = true;
    std::vector<CausalWitness> witnesses;
    try {
        witnesses = timelike_combination_scan(sec, 100, 42);
    } catch (const WitnessNotFound&) {
        ok = false;
    }
    CHECK(witnesses.size() == 100);
    for (const auto& w : witnesses) ok = ok && w.q <= 0.0;

    // static-case contrast: the global time field is time-like everywhere
    const auto cst = ScaleFactorProfile::constant(1.0);
    for (const auto& p : sample_points(cst, Chart::NorthPole, 100, 42)) {
        double q = 0.0;
        const bool tl =
            causal_character(FieldId::Static0, cst, p, &q) == CausalCharacter::TimeLike;
        ok = ok && tl && q > 0.0;
    }
    verdict("criterion 09 (time-like combination scan)", ok);
    REQUIRE(ok);
}

TEST_CASE("criterion 10: deterministic reports", "[acceptance]") {
    int code1 = -1, code2 = -1;
    const std::string args = "full-verify --profile secant:1 --seed 42 --samples 20";
    const std::string r1 = run_cli_capture(args, &code1);
    const std::string r2 = run_cli_capture(args, &code2);
    const bool ok = code1 == 0 && code2 == 0 && !r1.empty() && r1 == r2;
    verdict("criterion 10 (deterministic reports)", ok);
    CHECK(code1 == 0);
    CHECK(code2 == 0);
    CHECK(r1 == r2);
    REQUIRE(ok);
}
