#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kvf/catalog.hpp"
#include "kvf/curvature.hpp"
#include "kvf/embedding.hpp"
#include "kvf/errors.hpp"
#include "kvf/geometry.hpp"
#include "kvf/killing.hpp"
#include "kvf/report.hpp"
#include "kvf/sampling.hpp"
#include "kvf/scale_factor.hpp"

namespace kvf::cli {

/// Parses `chart:c0,c1,c2,c3`, e.g. `x:0,0.2,0,0` or `u:0,1,0,0`.
inline ChartPoint parse_point(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw ConfigError("point must look like chart:c0,c1,c2,c3, got '" + s + "'");
    ChartPoint p;
    p.chart = chart_from_string(s.substr(0, colon));
    std::string rest = s.substr(colon + 1);
    for (int i = 0; i < 4; ++i) {
        const auto comma = rest.find(',');
        const std::string tok = i < 3 ? rest.substr(0, comma) : rest;
        if (i < 3 && comma == std::string::npos)
            throw ConfigError("point needs four comma-separated coordinates");
        p.coords[i] = detail::parse_number(tok, "coordinate");
        if (i < 3) rest = rest.substr(comma + 1);
    }
    return p;
}

/// Options shared by every subcommand; precedence low to high:
/// defaults < verify.cfg < KL_SEED < command-line flags.
struct RunConfig {
    std::string profile_spec = "constant:1";
    std::uint64_t seed = 42;
    int samples = 100;
    std::string output_path;   // empty = stdout
    std::string output_format = "json";
    std::string config_path;

    void load_config_file(const std::string& path, bool required) {
        std::ifstream in(path);
        if (!in) {
            if (required) throw ConfigError("cannot open config file '" + path + "'");
            return;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("config lines must be key=value, got '" + line + "'");
            const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
            if (key == "profile") profile_spec = value;
            else if (key == "seed")
                seed = static_cast<std::uint64_t>(detail::parse_number(value, "seed"));
            else if (key == "samples")
                samples = static_cast<int>(detail::parse_number(value, "samples"));
            else if (key == "output") output_path = value;
            else if (key == "format") output_format = value;
            else throw ConfigError("unknown config key '" + key + "'");
        }
    }
};

inline void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output_path);
    if (!out) throw ConfigError("cannot write output file '" + cfg.output_path + "'");
    out << text;
}

namespace detail_cli {

inline std::string json_point(const ChartPoint& p) {
    JsonWriter w;
    w.begin_object();
    w.field("chart", to_string(p.chart));
    w.number_array_field("coords", p.coords);
    w.end_object();
    return w.str();
}

inline int run_curvature_report(const RunConfig& cfg, const ChartPoint& point) {
    const auto profile = ScaleFactorProfile::from_spec(cfg.profile_spec);
    const auto conn = connection_at(profile, point);
    const auto curv = curvature_at(profile, point);
    const double ident =
        std::max(antisymmetry_residual(curv.riemann), bianchi1_residual(curv.riemann));

    JsonWriter w;
    w.begin_object();
    w.key("point");
    w.begin_object();
    w.field("chart", to_string(point.chart));
    w.number_array_field("coords", point.coords);
    w.end_object();
    w.field("profile", profile.spec_string());
    w.key("gamma_nonzero");
    w.begin_array();
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j)
                if (std::fabs(conn.gamma[k][i][j]) > 1e-14) {
                    w.begin_object();
                    w.key("idx");
                    w.begin_array();
                    w.value(k);
                    w.value(i);
                    w.value(j);
                    w.end_array();
                    w.field("value", conn.gamma[k][i][j]);
                    w.end_object();
                }
    w.end_array();
    w.number_array_field("ricci_diag",
                         std::array<double, 4>{curv.ricci[0][0], curv.ricci[1][1],
                                               curv.ricci[2][2], curv.ricci[3][3]});
    w.field("scalar", curv.scalar);
    w.field("max_identity_residual", ident);
    w.end_object();
    emit(cfg, w.str() + "\n");
    return 0;
}

inline int run_killing_check(const RunConfig& cfg, const std::string& field_name) {
    const auto profile = ScaleFactorProfile::from_spec(cfg.profile_spec);
    const FieldId id = field_from_string(field_name);
    const Chart chart = chart_of_definition(id);
    if (chart == Chart::ModifiedU && profile.kind() != ProfileKind::Secant)
        throw ConfigError("field '" + field_name + "' requires a secant profile");
    const auto pts = sample_points(profile, chart, cfg.samples, cfg.seed);
    auto field = [&](const ChartPoint& p) { return field_covector(id, profile, p); };
    double worst = 0.0;
    for (const auto& p : pts)
        worst = std::max(worst, max_abs(killing_residual(profile, p, field)));
    const double tol = 1e-6;
    JsonWriter w;
    w.begin_object();
    w.field("profile", profile.spec_string());
    w.field("field", to_string(id));
    w.field("samples", cfg.samples);
    w.field("max_residual", worst);
    w.field("verdict", worst < tol ? "pass" : "fail");
    w.end_object();
    emit(cfg, w.str() + "\n");
    return worst < tol ? 0 : 1;
}

inline int run_compat_rank(const RunConfig& cfg, const ChartPoint& point) {
    const auto profile = ScaleFactorProfile::from_spec(cfg.profile_spec);
    const auto rep = compat_rank(profile, point);
    JsonWriter w;
    w.begin_object();
    w.field("profile", profile.spec_string());
    w.key("point");
    w.begin_object();
    w.field("chart", to_string(point.chart));
    w.number_array_field("coords", point.coords);
    w.end_object();
    w.field("case", to_string(rep.case_label));
    w.field("rank", rep.rank);
    w.field("kernel_dim", rep.kernel_dim);
    w.field("reduced_rank", rep.reduced_rank);
    w.field("reduced_consistent", rep.reduced_consistent);
    w.number_array_field("singular_values", rep.singular_values);
    w.key("kernel_basis");
    w.begin_array();
    for (const auto& row : rep.kernel_basis) {
        w.begin_array();
        for (double v : row) w.value(v);
        w.end_array();
    }
    w.end_array();
    w.end_object();
    emit(cfg, w.str() + "\n");
    return 0;
}

inline int run_algebra_dim(const RunConfig& cfg) {
    const auto profile = ScaleFactorProfile::from_spec(cfg.profile_spec);
    const int n = std::max(3, std::min(cfg.samples, 12));
    const auto pts = sample_points(profile, Chart::NorthPole, n, cfg.seed);
    const int dim = algebra_dimension(profile, pts);
    JsonWriter w;
    w.begin_object();
    w.field("profile", profile.spec_string());
    w.field("sample_count", n);
    w.field("seed", static_cast<unsigned long long>(cfg.seed));
    w.field("algebra_dimension", dim);
    w.end_object();
    emit(cfg, w.str() + "\n");
    return 0;
}

inline int run_transport(const RunConfig& cfg, const std::string& field_name,
                         const ChartPoint& target) {
    const auto profile = ScaleFactorProfile::from_spec(cfg.profile_spec);
    const FieldId id = field_from_string(field_name);
    if (!is_rotational(id))
        throw ConfigError("transport starts from tabulated rotational initial data");
    const ChartPoint start{target.chart, {0.0, 0.0, 0.0, 0.0}};
    const KillingJet jet0 = origin_initial_data(id, profile, 0.0);
    const KillingJet jet =
        transport_jet_auto(profile, start, jet0, straight_path(start.coords, target.coords));
    const Vec4 closed = field_covector(id, profile, target);
    double dev = 0.0;
    for (int i = 0; i < 4; ++i) dev = std::max(dev, std::fabs(jet.X[i] - closed[i]));
    const double tol = 1e-6;
    JsonWriter w;
    w.begin_object();
    w.field("profile", profile.spec_string());
    w.field("field", to_string(id));
    w.key("target");
    w.begin_object();
    w.field("chart", to_string(target.chart));
    w.number_array_field("coords", target.coords);
    w.end_object();
    w.number_array_field("transported_X", jet.X);
    w.number_array_field("transported_Y", jet.Y);
    w.number_array_field("closed_form_X", closed);
    w.field("max_deviation", dev);
    w.field("verdict", dev < tol ? "pass" : "fail");
    w.end_object();
    emit(cfg, w.str() + "\n");
    return dev < tol ? 0 : 1;
}

inline int run_catalog(const RunConfig& cfg, bool list, const std::string& eval_field,
                       const std::optional<ChartPoint>& point) {
    if (list) {
        std::string out;
        for (FieldId id : all_field_ids)
            out += std::string(to_string(id)) + "  (" + validity_condition(id) + ")\n";
        emit(cfg, out);
        return 0;
    }
    if (eval_field.empty()) throw ConfigError("catalog needs --list or --eval FIELD");
    const auto profile = ScaleFactorProfile::from_spec(cfg.profile_spec);
    const FieldId id = field_from_string(eval_field);
    const ChartPoint p =
        point ? *point : ChartPoint{chart_of_definition(id), {0.0, 0.0, 0.0, 0.0}};
    const Vec4 vec = field_vector(id, profile, p);
    const Vec4 cov = field_covector(id, profile, p);
    const auto Y = field_Y(id, profile, p);
    double q = 0.0;
    const char* causal = "zero";
    try {
        causal = to_string(causal_character(profile, p, vec, &q));
    } catch (const ZeroFieldError&) {
        // the field vanishes at this point; report it as such
    }
    JsonWriter w;
    w.begin_object();
    w.field("field", to_string(id));
    w.field("profile", profile.spec_string());
    w.key("point");
    w.begin_object();
    w.field("chart", to_string(p.chart));
    w.number_array_field("coords", p.coords);
    w.end_object();
    w.number_array_field("vector", vec);
    w.number_array_field("covector", cov);
    w.number_array_field("Y", Y);
    w.field("causal_character", causal);
    w.field("q", q);
    w.end_object();
    emit(cfg, w.str() + "\n");
    return 0;
}

inline int run_embed_check(const RunConfig& cfg, double a) {
    const auto pts = sample_points(Chart::ModifiedU, cfg.samples, cfg.seed);
    const auto profile = ScaleFactorProfile::secant(a);
    double hyp_dev = 0.0, metric_dev = 0.0;
    for (const auto& p : pts) {
        const auto z = embed(p, a);
        hyp_dev = std::max(hyp_dev,
                           std::fabs(z.hyperboloid_value() - a * a) / (a * a));
        const auto gi = induced_metric(p, a);
        const auto gc = metric_at(profile, p);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                metric_dev = std::max(metric_dev, std::fabs(gi.g[i][j] - gc.g[i][j]) /
                                                      std::fabs(gc.g[0][0]));
    }
    const int k_samples = std::min(cfg.samples, 10);
    const auto rep = sectional_curvature_check(
        a, std::vector<ChartPoint>(pts.begin(), pts.begin() + k_samples));
    JsonWriter w;
    w.begin_object();
    w.field("a", a);
    w.field("samples", cfg.samples);
    w.field("max_hyperboloid_dev", hyp_dev);
    w.field("max_metric_dev", metric_dev);
    w.field("K_estimate", rep.k_estimate);
    w.field("max_sectional_dev", rep.max_deviation);
    w.end_object();
    emit(cfg, w.str() + "\n");
    const bool ok = hyp_dev < 1e-12 && metric_dev < 1e-7 &&
                    std::fabs(rep.k_estimate + 1.0 / (a * a)) < 1e-6;
    return ok ? 0 : 1;
}

inline int expected_dimension(CaseLabel label) {
    switch (label) {
        case CaseLabel::Static: return 7;
        case CaseLabel::ConstantCurvature: return 10;
        default: return 6;
    }
}

inline int run_full_verify(const RunConfig& cfg) {
    const auto profile = ScaleFactorProfile::from_spec(cfg.profile_spec);
    VerificationReport rep;
    rep.command = "full-verify";
    rep.config_echo = "profile=" + profile.spec_string() + " seed=" + std::to_string(cfg.seed) +
                      " samples=" + std::to_string(cfg.samples);

    const auto pts = sample_points(profile, Chart::NorthPole, cfg.samples, cfg.seed);
    std::vector<double> x0s;
    for (const auto& p : pts) x0s.push_back(p.coords[0]);
    const CaseLabel label = classify_case(profile, x0s);

    // closed forms against the metric-only recomputation
    double dg = 0.0, dr = 0.0, dric = 0.0, dsc = 0.0, dn = 0.0, ident = 0.0;
    for (const auto& p : pts) {
        const auto cc = christoffel_closed(profile, p);
        const auto cn = christoffel_numeric(profile, p);
        dg = std::max(dg, rel_dev(cc.gamma, cn.gamma));
        const auto rc = riemann_closed(profile, p);
        const auto rn = riemann_numeric(profile, p);
        dr = std::max(dr, rel_dev(rc.riemann, rn.riemann));
        dric = std::max(dric, rel_dev(rc.ricci, rn.ricci));
        dsc = std::max(dsc, std::fabs(rc.scalar - rn.scalar) /
                                std::max(1.0, std::fabs(rc.scalar)));
        ident = std::max(ident, std::max(antisymmetry_residual(rc.riemann),
                                         bianchi1_residual(rc.riemann)));
        const auto nc = nabla_riemann_closed(profile, p);
        const auto nn = nabla_riemann_numeric(profile, p);
        dn = std::max(dn, rel_dev(nc.nabla, nn.nabla));
    }
    rep.add("christoffel closed vs numeric", dg, 1e-7);
    rep.add("riemann closed vs numeric", dr, 1e-6);
    rep.add("ricci closed vs numeric", dric, 1e-6);
    rep.add("scalar closed vs numeric", dsc, 1e-6);
    rep.add("nabla-riemann closed vs numeric", dn, 1e-6);
    rep.add("curvature identities", ident, 1e-10);

    // the six rotational fields are Killing fields for every profile
    double rot_worst = 0.0;
    const int kill_samples = std::min(cfg.samples, 20);
    for (FieldId id : {FieldId::Mer1, FieldId::Mer2, FieldId::Mer3, FieldId::Eq12, FieldId::Eq23,
                       FieldId::Eq31}) {
        auto field = [&](const ChartPoint& p) { return field_covector(id, profile, p); };
        for (int k = 0; k < kill_samples; ++k)
            rot_worst = std::max(rot_worst, max_abs(killing_residual(profile, pts[k], field)));
    }
    rep.add("rotational killing residual", rot_worst, 1e-6);

    // pointwise bound on the isometry algebra
    const auto dim_pts = sample_points(profile, Chart::NorthPole, 5, cfg.seed);
    const int dim = algebra_dimension(profile, dim_pts);
    rep.int_metrics.emplace_back("algebra_dimension", dim);
    rep.add_flag("algebra dimension matches case", dim == expected_dimension(label));

    if (profile.kind() == ProfileKind::Constant) {
        auto s0 = [&](const ChartPoint& p) {
            return field_covector(FieldId::Static0, profile, p);
        };
        double worst = 0.0;
        bool timelike = true;
        for (int k = 0; k < kill_samples; ++k) {
            worst = std::max(worst, max_abs(killing_residual(profile, pts[k], s0)));
            timelike = timelike && causal_character(FieldId::Static0, profile, pts[k]) ==
                                       CausalCharacter::TimeLike;
        }
        rep.add("static field killing residual", worst, 1e-6);
        rep.add_flag("static field time-like everywhere", timelike);
    }

    if (label == CaseLabel::ConstantCurvature) {
        const double a = profile.a(), c = profile.light_speed();
        double ode = 0.0, fint = 0.0, rt = 0.0, cc1 = 0.0;
        for (const auto& p : pts) {
            const double x0 = p.coords[0];
            ode = std::max(ode, std::fabs(constant_curvature_residual(profile, x0)));
            fint = std::max(fint,
                            std::fabs(first_integral_residual(profile, x0, 1.0 / (a * a))));
            const double t = time_from_x0(a, c, x0);
            rt = std::max(rt, std::fabs(x0_from_time(a, c, t) - x0));
            cc1 = std::max(cc1, std::fabs(std::cos(x0) * std::cosh(c * t / a) - 1.0));
        }
        rep.add("constant-curvature ODE residual", ode, 1e-10 * a * a);
        rep.add("first integral residual", fint, 1e-10 * a * a);
        rep.add("time transform round trip", rt, 1e-10);
        rep.add("cos(x0) cosh(ct/a) = 1", cc1, 1e-10);

        const auto upts = sample_points(Chart::ModifiedU, cfg.samples, cfg.seed);
        double hyp_worst = 0.0;
        for (FieldId id : {FieldId::Hyp1, FieldId::Hyp2, FieldId::Hyp3, FieldId::Hyp4}) {
            auto field = [&](const ChartPoint& p) { return field_covector(id, profile, p); };
            for (int k = 0; k < std::min(cfg.samples, 10); ++k)
                hyp_worst =
                    std::max(hyp_worst, max_abs(killing_residual(profile, upts[k], field)));
        }
        rep.add("hyperbolic killing residual", hyp_worst, 1e-6);

        double hyp_dev = 0.0, metric_dev = 0.0;
        for (const auto& p : upts) {
            const auto z = embed(p, a);
            hyp_dev = std::max(hyp_dev, std::fabs(z.hyperboloid_value() - a * a) / (a * a));
            const auto gi = induced_metric(p, a);
            const auto gc = metric_at(profile, p);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    metric_dev = std::max(metric_dev, std::fabs(gi.g[i][j] - gc.g[i][j]) /
                                                          std::fabs(gc.g[0][0]));
        }
        rep.add("hyperboloid invariant", hyp_dev, 1e-12);
        rep.add("induced metric matches chart metric", metric_dev, 1e-7);

        const int trials = std::min(cfg.samples, 100);
        bool scan_ok = true;
        try {
            const auto witnesses = timelike_combination_scan(profile, trials, cfg.seed);
            scan_ok = static_cast<int>(witnesses.size()) == trials;
        } catch (const WitnessNotFound&) {
            scan_ok = false;
        }
        rep.add_flag("no purely time-like combination", scan_ok);
    }

    if (label == CaseLabel::Generic) {
        // the static field must fail the Killing test away from the
        // exceptional cases
        auto s0 = [&](const ChartPoint& p) {
            return field_covector(FieldId::Static0, profile, p);
        };
        double worst = 0.0;
        for (int k = 0; k < kill_samples; ++k)
            worst = std::max(worst, max_abs(killing_residual(profile, pts[k], s0)));
        rep.add_flag("static field rejected", worst > 1e-3);
    }

    const std::string text = cfg.output_format == "csv" ? rep.to_csv() : rep.to_json();
    emit(cfg, text);
    return rep.overall_pass() ? 0 : 1;
}

} // namespace detail_cli

/// Entry point shared by the binary and the CLI tests.
inline int run(int argc, const char* const* argv) {
    RunConfig cfg;
    std::string point_spec, chart_opt, coords_opt, field_name, eval_field;
    bool list_fields = false;
    double embed_a = 1.0;

    CLI::App app{"Killing-field verification toolkit for the closed homogeneous and "
                 "isotropic universe"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--profile", cfg.profile_spec, "scale-factor spec, e.g. secant:1");
    app.add_option("--seed", cfg.seed, "pseudo-random seed")->envname("KL_SEED");
    app.add_option("--samples", cfg.samples, "sample count")->check(CLI::PositiveNumber);
    app.add_option("--output", cfg.output_path, "write the report to this file");
    app.add_option("--format", cfg.output_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--config", cfg.config_path, "key=value config file");
    app.add_option("--point", point_spec, "evaluation point, chart:c0,c1,c2,c3");
    app.add_option("--chart", chart_opt, "chart name (north/south/modified-u)");
    app.add_option("--coords", coords_opt, "comma-separated coordinates");

    auto* sc_curv = app.add_subcommand("curvature-report", "curvature tables at a point");
    auto* sc_kill = app.add_subcommand("killing-check", "Killing residual of a catalog field");
    sc_kill->add_option("--field", field_name, "catalog field id")->required();
    auto* sc_rank = app.add_subcommand("compat-rank", "compatibility rank analysis at a point");
    auto* sc_dim = app.add_subcommand("algebra-dim", "isometry algebra dimension bound");
    auto* sc_trans = app.add_subcommand("transport", "transport origin data to a point");
    sc_trans->add_option("--field", field_name, "rotational field id")->required();
    auto* sc_cat = app.add_subcommand("catalog", "list or evaluate catalog fields");
    sc_cat->add_flag("--list", list_fields, "print the field ids");
    sc_cat->add_option("--eval", eval_field, "field id to evaluate");
    auto* sc_embed = app.add_subcommand("embed-check", "hyperboloid embedding verification");
    sc_embed->add_option("--a", embed_a, "embedding radius")->check(CLI::PositiveNumber);
    auto* sc_full = app.add_subcommand("full-verify", "run the whole verification battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        // re-parse with the config file layered beneath the command line:
        // file values, then KL_SEED, then explicit flags
        if (!cfg.config_path.empty()) {
            RunConfig file_cfg;
            file_cfg.load_config_file(cfg.config_path, true);
            RunConfig merged = file_cfg;
            if (app.count("--profile")) merged.profile_spec = cfg.profile_spec;
            if (app.count("--seed") || std::getenv("KL_SEED")) merged.seed = cfg.seed;
            if (app.count("--samples")) merged.samples = cfg.samples;
            if (app.count("--output")) merged.output_path = cfg.output_path;
            if (app.count("--format")) merged.output_format = cfg.output_format;
            cfg = merged;
        }

        std::optional<ChartPoint> point;
        if (!point_spec.empty()) point = parse_point(point_spec);
        else if (!chart_opt.empty() || !coords_opt.empty()) {
            if (chart_opt.empty() || coords_opt.empty())
                throw ConfigError("--chart and --coords must be given together");
            point = parse_point(chart_opt + ":" + coords_opt);
        }
        const ChartPoint default_pt{Chart::NorthPole, {0.0, 0.0, 0.0, 0.0}};

        if (*sc_curv) return detail_cli::run_curvature_report(cfg, point.value_or(default_pt));
        if (*sc_kill) return detail_cli::run_killing_check(cfg, field_name);
        if (*sc_rank) return detail_cli::run_compat_rank(cfg, point.value_or(default_pt));
        if (*sc_dim) return detail_cli::run_algebra_dim(cfg);
        if (*sc_trans) {
            if (!point) throw ConfigError("transport needs a target --point");
            return detail_cli::run_transport(cfg, field_name, *point);
        }
        if (*sc_cat) return detail_cli::run_catalog(cfg, list_fields, eval_field, point);
        if (*sc_embed) return detail_cli::run_embed_check(cfg, embed_a);
        if (*sc_full) return detail_cli::run_full_verify(cfg);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace kvf::cli
