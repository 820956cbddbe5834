#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kvf/catalog.hpp"
#include "kvf/killing.hpp"
#include "kvf/rng.hpp"
#include "kvf/sampling.hpp"

using namespace kvf;

namespace {

KillingJet random_jet(XorShift64Star& rng) {
    std::array<double, 10> v{};
    for (double& e : v) e = rng.uniform(-2.0, 2.0);
    return KillingJet::from_vector(v);
}

/// Jet of a catalog field: closed covector plus FD-computed Y.
KillingJet field_jet(FieldId id, const ScaleFactorProfile& profile, const ChartPoint& p) {
    KillingJet jet;
    jet.X = field_covector(id, profile, p);
    jet.Y = field_Y(id, profile, p);
    return jet;
}

} // namespace

TEST_CASE("killing residual vanishes for rotations, flags the static field", "[killing]") {
    const auto exp = ScaleFactorProfile::exponential(1.0, 1.0);
    const auto pts = sample_points(exp, Chart::NorthPole, 10, 3);
    auto eq12 = [&](const ChartPoint& p) { return field_covector(FieldId::Eq12, exp, p); };
    auto s0 = [&](const ChartPoint& p) { return field_covector(FieldId::Static0, exp, p); };
    for (const auto& p : pts) {
        CHECK(max_abs(killing_residual(exp, p, eq12)) < 1e-7);
        const auto res = killing_residual(exp, p, s0);
        // residual_00 = 2RR' != 0 for a non-static profile
        const double R = exp.eval(p.coords[0], 0), R1 = exp.eval(p.coords[0], 1);
        CHECK_THAT(res[0][0], Catch::Matchers::WithinRel(2.0 * R * R1, 1e-5));
    }
}

TEST_CASE("pfaff right-hand side matches derivatives of a true solution jet", "[killing]") {
    const auto cst = ScaleFactorProfile::constant(2.0);
    const auto p = ChartPoint{Chart::NorthPole, {0.3, 0.25, -0.15, 0.1}};
    const auto D = pfaff_rhs(cst, p, field_jet(FieldId::Eq12, cst, p));
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
        ChartPoint pp = p, pm = p;
        pp.coords[i] += h;
        pm.coords[i] -= h;
        const auto jp = field_jet(FieldId::Eq12, cst, pp).as_vector();
        const auto jm = field_jet(FieldId::Eq12, cst, pm).as_vector();
        for (int c = 0; c < 10; ++c)
            CHECK_THAT(D[i][c], Catch::Matchers::WithinAbs((jp[c] - jm[c]) / (2.0 * h), 1e-5));
    }
}

TEST_CASE("first-order compatibility is identically satisfied", "[killing]") {
    XorShift64Star rng(5);
    for (const auto& profile :
         {ScaleFactorProfile::constant(2.0), ScaleFactorProfile::exponential(1.0, 1.0),
          ScaleFactorProfile::secant(1.0)}) {
        for (const auto& p : sample_points(profile, Chart::NorthPole, 5, 17)) {
            CHECK(compat_x_residual(profile, p, random_jet(rng)) < 1e-9);
        }
    }
}

TEST_CASE("compatibility residual is linear in the jet", "[killing]") {
    const auto exp = ScaleFactorProfile::exponential(1.0, 1.0);
    const auto p = ChartPoint{Chart::NorthPole, {0.2, 0.3, -0.1, 0.25}};
    XorShift64Star rng(8);
    const auto j1 = random_jet(rng), j2 = random_jet(rng);
    const double al = 0.7, be = -1.3;
    std::array<double, 10> mixed{};
    for (int c = 0; c < 10; ++c)
        mixed[c] = al * j1.as_vector()[c] + be * j2.as_vector()[c];
    const auto rm = compat_residual(exp, p, KillingJet::from_vector(mixed));
    const auto r1 = compat_residual(exp, p, j1);
    const auto r2 = compat_residual(exp, p, j2);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int P = 0; P < 4; ++P)
                for (int Q = 0; Q < 4; ++Q)
                    worst = std::max(worst, std::fabs(rm[i][j][P][Q] - al * r1[i][j][P][Q] -
                                                      be * r2[i][j][P][Q]));
    CHECK(worst < 1e-10);
}

TEST_CASE("compatibility rank separates the three cases", "[killing]") {
    const auto p = ChartPoint{Chart::NorthPole, {0.2, 0.3, -0.1, 0.25}};

    const auto rc = compat_rank(ScaleFactorProfile::constant(2.0), p);
    CHECK(rc.rank == 3);
    CHECK(rc.kernel_dim == 7);
    CHECK(rc.case_label == CaseLabel::Static);
    CHECK(rc.reduced_consistent);

    const auto re = compat_rank(ScaleFactorProfile::exponential(1.0, 1.0), p);
    CHECK(re.rank == 4);
    CHECK(re.kernel_dim == 6);
    CHECK(re.case_label == CaseLabel::Generic);
    CHECK(re.reduced_consistent);

    const auto rs = compat_rank(ScaleFactorProfile::secant(1.0), p);
    CHECK(rs.rank == 0);
    CHECK(rs.kernel_dim == 10);
    CHECK(rs.case_label == CaseLabel::ConstantCurvature);
    CHECK(rs.reduced_consistent);

    // catalog jets lie in the kernel: the residual annihilates them
    const auto jet = field_jet(FieldId::Eq12, ScaleFactorProfile::exponential(1.0, 1.0), p);
    const auto res = compat_residual(ScaleFactorProfile::exponential(1.0, 1.0), p, jet);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int P = 0; P < 4; ++P)
                for (int Q = 0; Q < 4; ++Q) worst = std::max(worst, std::fabs(res[i][j][P][Q]));
    CHECK(worst < 1e-7);
}

TEST_CASE("algebra dimension counts the isometries of each case", "[killing]") {
    const auto pts = sample_points(Chart::NorthPole, 5, 42);
    CHECK(algebra_dimension(ScaleFactorProfile::exponential(1.0, 1.0), pts) == 6);
    CHECK(algebra_dimension(ScaleFactorProfile::constant(2.0), pts) == 7);
    CHECK(algebra_dimension(ScaleFactorProfile::secant(1.0), pts) == 10);
    CHECK_THROWS_AS(
        algebra_dimension(ScaleFactorProfile::constant(2.0),
                          std::vector<ChartPoint>(pts.begin(), pts.begin() + 2)),
        std::invalid_argument);
}

TEST_CASE("transport reproduces catalog fields at remote points", "[killing]") {
    for (const auto& profile :
         {ScaleFactorProfile::constant(1.0), ScaleFactorProfile::secant(1.0)}) {
        const ChartPoint start{Chart::NorthPole, {0.0, 0.0, 0.0, 0.0}};
        const ChartPoint target{Chart::NorthPole, {0.4, 0.3, -0.2, 0.25}};
        for (FieldId id : {FieldId::Mer1, FieldId::Eq23}) {
            const auto jet0 = origin_initial_data(id, profile, 0.0);
            const auto jet = transport_jet_auto(profile, start, jet0,
                                                straight_path(start.coords, target.coords));
            const auto closed = field_covector(id, profile, target);
            for (int i = 0; i < 4; ++i)
                CHECK_THAT(jet.X[i], Catch::Matchers::WithinAbs(closed[i], 1e-7));
        }
    }
}

TEST_CASE("transport is path independent for solution jets", "[killing]") {
    const auto exp = ScaleFactorProfile::exponential(1.0, 1.0);
    const ChartPoint start{Chart::NorthPole, {0.0, 0.0, 0.0, 0.0}};
    const Vec4 target{0.5, 0.2, 0.3, -0.1};
    const Vec4 waypoint{-0.3, -0.2, 0.1, 0.2};
    const auto jet0 = origin_initial_data(FieldId::Mer2, exp, 0.0);

    const auto direct =
        transport_jet_auto(exp, start, jet0, straight_path(start.coords, target));
    const auto leg1 = transport_jet_auto(exp, start, jet0, straight_path(start.coords, waypoint));
    const ChartPoint mid{Chart::NorthPole, waypoint};
    const auto leg2 = transport_jet_auto(exp, mid, leg1, straight_path(waypoint, target));
    CHECK(max_abs_diff(direct.as_vector(), leg2.as_vector()) < 1e-7);
}

TEST_CASE("static-case transported jets do not depend on x0", "[killing]") {
    const auto cst = ScaleFactorProfile::constant(2.0);
    const ChartPoint start{Chart::NorthPole, {0.0, 0.0, 0.0, 0.0}};
    const Vec4 t1{0.0, 0.25, -0.3, 0.1};
    const Vec4 t2{0.9, 0.25, -0.3, 0.1}; // same spatial point, different time
    for (FieldId id : {FieldId::Mer1, FieldId::Eq12}) {
        const auto jet0 = origin_initial_data(id, cst, 0.0);
        const auto a = transport_jet_auto(cst, start, jet0, straight_path(start.coords, t1));
        const auto b = transport_jet_auto(cst, start, jet0, straight_path(start.coords, t2));
        CHECK(std::fabs(a.X[0]) < 1e-8);
        CHECK(std::fabs(b.X[0]) < 1e-8);
        CHECK(max_abs_diff(a.as_vector(), b.as_vector()) < 1e-7);
    }
}

TEST_CASE("transport rejects paths that leave the chart domain", "[killing]") {
    const auto sec = ScaleFactorProfile::secant(1.0);
    const ChartPoint start{Chart::NorthPole, {0.0, 0.0, 0.0, 0.0}};
    const auto jet0 = origin_initial_data(FieldId::Mer1, sec, 0.0);
    CHECK_THROWS_AS(
        transport_jet(sec, start, jet0, straight_path(start.coords, {2.0, 0.0, 0.0, 0.0}), 64),
        ChartExitError);
    CHECK_THROWS_AS(
        transport_jet(sec, start, jet0, straight_path(start.coords, {0.1, 0.0, 0.0, 0.0}), 4),
        std::invalid_argument);
}
