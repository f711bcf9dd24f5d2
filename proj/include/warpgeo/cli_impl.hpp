#pragma once

// Command-line front end.  A JSON config picks the metric family and task
// parameters; each subcommand writes deterministic JSON/CSV artifacts into
// the --out directory and registers margins.  Process exit status: 0 iff
// every registered margin is >= -tol (default 1e-9), 2 on bad input.

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "warpgeo/c1alpha.hpp"
#include "warpgeo/distance.hpp"
#include "warpgeo/distributional.hpp"
#include "warpgeo/drawstring.hpp"
#include "warpgeo/geodesics.hpp"
#include "warpgeo/geometry.hpp"
#include "warpgeo/metric.hpp"
#include "warpgeo/oracles.hpp"
#include "warpgeo/sampler.hpp"
#include "warpgeo/serialize.hpp"

namespace warpgeo::cli {

struct experiment_config {
    std::string family = "round";
    json metric_params = json::object();
    json task = json::object();
    quadrature_spec quad{};
    std::uint64_t seed = 2026;
};

inline experiment_config config_from_json(const json& j) {
    experiment_config c;
    if (j.contains("metric")) {
        const json& m = j.at("metric");
        c.family = m.value("family", std::string("round"));
        if (m.contains("params")) c.metric_params = m.at("params");
    }
    if (j.contains("task")) c.task = j.at("task");
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        c.quad.rel_tol = q.value("rel_tol", c.quad.rel_tol);
        c.quad.abs_tol = q.value("abs_tol", c.quad.abs_tol);
        c.quad.max_panels = q.value("max_panels", c.quad.max_panels);
        c.quad.validate();
    }
    c.seed = j.value("seed", c.seed);
    return c;
}

inline json config_to_json(const experiment_config& c) {
    json j;
    j["metric"] = {{"family", c.family}, {"params", c.metric_params}};
    j["task"] = c.task;
    j["quadrature"] = {{"rel_tol", c.quad.rel_tol},
                       {"abs_tol", c.quad.abs_tol},
                       {"max_panels", c.quad.max_panels}};
    j["seed"] = c.seed;
    return j;
}

inline experiment_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("config: cannot open " + path);
    return config_from_json(json::parse(in));
}

inline double task_num(const experiment_config& c, const char* key, double dflt) {
    if (!c.task.contains(key)) return dflt;
    return c.task.at(key).get<double>();
}

inline std::string task_str(const experiment_config& c, const char* key,
                            const std::string& dflt) {
    if (!c.task.contains(key)) return dflt;
    return c.task.at(key).get<std::string>();
}

inline std::vector<double> task_list(const experiment_config& c, const char* key,
                                     std::vector<double> dflt) {
    if (!c.task.contains(key)) return dflt;
    return c.task.at(key).get<std::vector<double>>();
}

// k may be given as a number or as a named multiple of the critical slope
inline double resolve_k(const json& params, double alpha) {
    if (!params.contains("k")) return kstar(alpha);
    const json& kj = params.at("k");
    if (kj.is_string()) {
        const std::string s = kj.get<std::string>();
        if (s == "kstar") return kstar(alpha);
        if (s == "2kstar") return 2.0 * kstar(alpha);
        throw domain_error("config: unknown k spec '" + s + "'");
    }
    return kj.get<double>();
}

inline warped_metric metric_from_config(const experiment_config& c) {
    if (c.family == "round") {
        const double a = c.metric_params.value("a", pi);
        if (!(a > 0.0)) throw domain_error("config: round family needs a > 0");
        return make_warped_metric(make_round_profile(a), warp_field::constant(1.0), "round");
    }
    if (c.family == "drawstring") {
        drawstring_params p;
        p.A = c.metric_params.value("A", 3.0);
        p.ivp_tol = c.metric_params.value("ivp_tol", 1e-10);
        return build_drawstring(p);
    }
    if (c.family == "c1alpha") {
        c1alpha_params p;
        p.alpha = c.metric_params.value("alpha", 0.5);
        p.k = resolve_k(c.metric_params, p.alpha);
        return build_c1alpha(p);
    }
    throw domain_error("config: unknown metric family '" + c.family + "'");
}

struct margin_set {
    std::vector<std::pair<std::string, double>> items;
    void add(const std::string& name, double v) { items.emplace_back(name, v); }
    double worst() const {
        double w = std::numeric_limits<double>::infinity();
        for (const auto& it : items) w = std::min(w, it.second);
        return w;
    }
    json to_json() const {
        json arr = json::array();
        for (const auto& [n, v] : items) arr.push_back({{"name", n}, {"margin", jnum(v)}});
        return arr;
    }
};

inline std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

// ---------------------------------------------------------------- curvature

inline void cmd_curvature(const experiment_config& cfg, const std::string& out,
                          margin_set& ms) {
    const warped_metric m = metric_from_config(cfg);
    const int n_r = static_cast<int>(task_num(cfg, "n_r", 400));
    const int n_th = static_cast<int>(task_num(cfg, "n_th", 400));
    if (n_r < 2 || n_th < 2) throw domain_error("curvature: grid must be at least 2x2");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    csv_writer csv;
    csv.header({"r", "theta", "scalar", "ric_rth", "mask"});
    double smin = std::numeric_limits<double>::infinity();
    double smax = -std::numeric_limits<double>::infinity();
    long n_masked = 0;
    for (int i = 0; i < n_r; ++i) {
        const double r = m.a * (i + 0.5) / n_r;
        for (int j = 0; j < n_th; ++j) {
            const double th = two_pi * (j + 0.5) / n_th;
            double S = nan, ric = nan, mask = 1.0;
            try {
                S = scalar_curvature(m, r, th);
                ric = ricci_mixed_rth(m, r, th);
                mask = 0.0;
            } catch (const masked_point_error&) {
                S = nan;
                ric = nan;
                ++n_masked;
            }
            if (mask == 0.0) {
                smin = std::min(smin, S);
                smax = std::max(smax, S);
            }
            csv.row({r, th, S, ric, mask});
        }
    }
    csv.save(out_path(out, "curvature.csv"));

    if (m.family == "round") {
        const double s0 = 2.0 * sqr(pi / m.a);
        ms.add("scalar_constant_dev", -std::max(std::fabs(smax - s0), std::fabs(smin - s0)));
    } else if (m.family == "c1alpha") {
        ms.add("scalar_floor", smin - 0.625);
    } else if (m.family == "drawstring") {
        ms.add("scalar_nonneg", smin);
    }

    json sum;
    sum["family"] = m.family;
    sum["n_r"] = n_r;
    sum["n_th"] = n_th;
    sum["n_masked"] = n_masked;
    sum["min_scalar"] = jnum(smin);
    sum["max_scalar"] = jnum(smax);
    sum["margins"] = ms.to_json();
    write_json(out_path(out, "curvature_summary.json"), sum);
}

// ------------------------------------------------------------------- report

inline void cmd_report(const experiment_config& cfg, const std::string& out,
                       margin_set& ms) {
    const warped_metric m = metric_from_config(cfg);
    const quadrature_spec qs = cfg.quad;
    const geom_result vol = total_volume(m, qs);
    const geom_result area = base_area(m, qs);

    const auto cands = min_torus_area_candidates(m, qs);
    double min_torus = std::numeric_limits<double>::infinity();
    double min_any = std::numeric_limits<double>::infinity();
    json jc = json::array();
    for (const auto& c : cands) {
        jc.push_back({{"kind", c.kind}, {"r_c", jnum(c.r_c)}, {"area", jnum(c.area)}});
        if (c.kind == "torus") min_torus = std::min(min_torus, c.area);
        min_any = std::min(min_any, c.area);
    }

    json jcap = json::array();
    for (double e : task_list(cfg, "cap_eps", {0.2, 0.1, 0.05}))
        jcap.push_back({{"eps", e}, {"value", jnum(cap_volume(m, e, qs).value)}});

    json b;
    b["volume"] = jnum(vol.value);
    b["area"] = jnum(area.value);
    b["diameter"] = jnum(base_diameter(m));
    b["minA_candidate"] = jnum(min_torus);
    b["minA_any"] = jnum(min_any);
    b["cap_volumes"] = jcap;
    b["candidates"] = jc;
    b["diameter_path_bound"] = jnum(diameter_upper_bound(m));
    write_json(out_path(out, "report.json"), b);

    ms.add("minA_positive", min_torus);
}

// ----------------------------------------------------------------- shortcut

inline void cmd_shortcut(const experiment_config& cfg, const std::string& out,
                         margin_set& ms) {
    const std::vector<double> A_list = task_list(cfg, "A_list", {2.0, 3.0, 4.0, 5.0});
    const double r_star = task_num(cfg, "r_star", 0.02);
    const shortcut_table tab = shortcut_experiment(A_list, r_star);

    csv_writer csv;
    csv.header({"A", "d_upper", "d_limit", "gap"});
    json jrows = json::array();
    double below = std::numeric_limits<double>::infinity();
    for (const auto& row : tab.rows) {
        csv.row({row.A, row.d_upper, row.d_limit, row.gap});
        jrows.push_back({{"A", row.A},
                         {"d_upper", jnum(row.d_upper)},
                         {"d_limit", jnum(row.d_limit)},
                         {"gap", jnum(row.gap)}});
        below = std::min(below, row.d_limit - row.d_upper);
    }
    csv.save(out_path(out, "shortcut.csv"));

    json jt;
    jt["rows"] = jrows;
    jt["r_star"] = r_star;
    jt["all_below_limit"] = tab.all_below_limit;
    jt["decreasing"] = tab.decreasing;
    jt["gaps_tightening"] = tab.gaps_tightening;
    write_json(out_path(out, "shortcut.json"), jt);

    ms.add("below_limit", below);
    ms.add("upper_bounds_decrease", tab.decreasing ? 0.0 : -1.0);
}

// ---------------------------------------------------------------- expansion

inline void cmd_expansion(const experiment_config& cfg, const std::string& out,
                          margin_set&) {
    const warped_metric m = metric_from_config(cfg);
    const std::string mode =
        task_str(cfg, "mode", m.family == "c1alpha" ? "wedge" : "ball");
    const std::array<double, 3> q{task_num(cfg, "q_r", 0.5 * m.a),
                                  task_num(cfg, "q_th", 0.0),
                                  task_num(cfg, "q_xi", 0.0)};

    json jx;
    jx["mode"] = mode;
    json jrows = json::array();
    expansion_fit fit;
    double closed = 0.0;

    if (mode == "wedge") {
        if (m.family != "c1alpha")
            throw domain_error("expansion: wedge mode needs the c1alpha family");
        const double alpha = m.param("alpha");
        const double k = m.param("k");
        double rho0;
        if (cfg.task.contains("rho0") && !cfg.task.at("rho0").is_string()) {
            rho0 = cfg.task.at("rho0").get<double>();
        } else {
            const std::string s =
                cfg.task.contains("rho0") ? cfg.task.at("rho0").get<std::string>() : "max";
            if (s != "max") throw domain_error("expansion: rho0 must be a number or \"max\"");
            rho0 = std::min(0.5 * rho_star(alpha, k),
                            std::sqrt(1.0 + alpha * alpha) *
                                std::pow(alpha, alpha / (1.0 - alpha)));
        }
        const tangent_region region = wedge_region(alpha, rho0);
        const std::vector<double> ts = task_list(cfg, "t_list", {1.0, 0.5, 0.25});
        const long n_samples = static_cast<long>(task_num(cfg, "n_samples", 125000));
        const int n_shifts = static_cast<int>(task_num(cfg, "n_shifts", 8));

        std::vector<std::pair<double, double>> vols;
        for (double t : ts) {
            const region_volume_result rv =
                region_volume_via_exp(m, q, region, t, n_samples, cfg.seed, n_shifts);
            vols.emplace_back(t, rv.value);
            jrows.push_back({{"t", t},
                             {"value", jnum(rv.value)},
                             {"std_error", jnum(rv.std_error)},
                             {"n_total", rv.n_total},
                             {"rejected_fraction", jnum(rv.rejected_fraction)}});
        }
        fit = fit_expansion(vols);
        const double delta = std::atan(1.0 / alpha) - std::atan(alpha);
        closed = std::sqrt(3.0) * std::pow(rho0, 5) / 6.0 *
                 (k * (1.0 - alpha * alpha) / (1.0 + alpha * alpha) - delta);
        jx["alpha"] = alpha;
        jx["k"] = k;
        jx["rho0"] = rho0;
        jx["delta"] = delta;
        jx["region_volume"] = jnum(region.euclid_volume);
    } else if (mode == "ball") {
        const std::vector<double> ts = task_list(cfg, "t_list", {0.1, 0.05, 0.025});
        const int n_dirs = static_cast<int>(task_num(cfg, "n_dirs", 1152));
        std::optional<double> c3k;
        if (cfg.task.value("constrain_c3", false)) c3k = 4.0 * pi / 3.0;

        std::vector<std::pair<double, double>> vols;
        for (double t : ts) {
            const double v = ball_volume(m, q, t, n_dirs);
            vols.emplace_back(t, v);
            jrows.push_back({{"t", t}, {"value", jnum(v)}});
        }
        fit = fit_expansion(vols, c3k);
        closed = -4.0 * pi / 45.0;
        jx["n_dirs"] = n_dirs;
    } else {
        throw domain_error("expansion: unknown mode '" + mode + "'");
    }

    jx["volumes"] = jrows;
    jx["c3"] = jnum(fit.c3);
    jx["c5"] = jnum(fit.c5);
    jx["paper_c5"] = jnum(closed);
    jx["ratio"] = closed != 0.0 ? jnum(fit.c5 / closed) : json(nullptr);
    jx["fit"] = {{"c3", jnum(fit.c3)},       {"c3_err", jnum(fit.c3_err)},
                 {"c5", jnum(fit.c5)},       {"c5_err", jnum(fit.c5_err)},
                 {"c6", jnum(fit.c6)},       {"c6_err", jnum(fit.c6_err)},
                 {"c6_used", fit.c6_used},   {"residual_rms", jnum(fit.residual_rms)}};
    write_json(out_path(out, "expansion.json"), jx);
}

// ------------------------------------------------------------------ pairing

inline void cmd_pairing(const experiment_config& cfg, const std::string& out,
                        margin_set& ms) {
    warped_metric m = metric_from_config(cfg);
    const double amp = task_num(cfg, "phi_amp", 0.0);
    if (amp != 0.0) {
        if (cfg.family != "round")
            throw domain_error("pairing: phi_amp applies to the round family");
        if (!(std::fabs(amp) < 1.0)) throw domain_error("pairing: need |phi_amp| < 1");
        m = make_warped_metric(
            make_round_profile(m.a),
            make_radial_warp([amp](double r) { return 1.0 + amp * std::cos(r); },
                             [amp](double r) { return -amp * std::sin(r); },
                             [amp](double r) { return -amp * std::cos(r); },
                             "cosine_radial"),
            "perturbed_round");
    }

    const std::string tname = task_str(cfg, "test", "constant");
    test_function v;
    if (tname == "constant")
        v = make_constant_test(1.0);
    else if (tname == "radial_bump")
        v = make_radial_bump_test(0.15 * m.a, 0.85 * m.a, 1.0);
    else if (tname == "separable_bump")
        v = make_separable_bump_test(0.2 * m.a, 0.8 * m.a, 1.0, 0.5, 0.0);
    else
        throw domain_error("pairing: unknown test function '" + tname + "'");

    const quadrature_spec qs = cfg.quad;
    const double eps0 = task_num(cfg, "eps0", 0.08);
    const std::vector<double> eps_list =
        task_list(cfg, "eps_list", {eps0, 0.5 * eps0, 0.25 * eps0, 0.125 * eps0});

    const extrapolation_result ext = pairing_extrapolated(m, v, eps0, qs);
    const auto rows = pairing_decay_table(m, v, eps_list, qs);

    csv_writer csv;
    csv.header({"eps", "interior", "boundary", "bound", "boundary_over_eps32"});
    json jrows = json::array();
    for (const auto& row : rows) {
        const double bnd = boundary_bound(m, v, row[0]);
        const double rate = std::fabs(row[2]) / std::pow(row[0], 1.5);
        csv.row({row[0], row[1], row[2], bnd, rate});
        jrows.push_back({{"eps", row[0]},
                         {"interior", jnum(row[1])},
                         {"boundary", jnum(row[2])},
                         {"bound", jnum(bnd)},
                         {"boundary_over_eps32", jnum(rate)}});
    }
    csv.save(out_path(out, "pairing_decay.csv"));

    json jp;
    jp["test"] = tname;
    jp["extrapolated"] = {{"value", jnum(ext.value)},
                          {"est_error", jnum(ext.est_error)},
                          {"epsilons", {jnum(ext.epsilons[0]), jnum(ext.epsilons[1]),
                                        jnum(ext.epsilons[2])}},
                          {"interior", {jnum(ext.interior[0]), jnum(ext.interior[1]),
                                        jnum(ext.interior[2])}}};
    if (m.phi.radial_only) {
        const double direct = scalar_pairing_direct(m, v, 1e-8, qs).value;
        jp["direct"] = jnum(direct);
        ms.add("extrapolation_consistency",
               1e-4 * (1.0 + std::fabs(direct)) - std::fabs(ext.value - direct));
    } else {
        jp["direct"] = nullptr;
    }
    jp["rows"] = jrows;
    write_json(out_path(out, "pairing.json"), jp);
}

// ------------------------------------------------------------------- verify

// scale the log-warp part of a pair, used to inject inadmissible inputs
inline admissible_pair scale_pair_f(admissible_pair pr, double s) {
    auto f = pr.f_radial;
    auto df = pr.f_radial_d1;
    pr.f_radial = [f, s](double t) { return s * f(t); };
    pr.f_radial_d1 = [df, s](double t) { return s * df(t); };
    return pr;
}

// worst normalized slack of the slope-density bound f'^2 w <= -w'' on a grid;
// admissible pairs keep this nonnegative up to roundoff
inline double admissibility_margin(const admissible_pair& pr, int n_grid = 2001) {
    double worst = std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (int i = 1; i < n_grid; ++i) {
        const double t = pr.w.a * i / n_grid;
        const double ddw = pr.w.d2(t);
        const double fp = pr.f_radial_d1(t);
        worst = std::min(worst, -ddw - fp * fp * pr.w.eval(t));
        scale = std::max(scale, std::fabs(ddw));
    }
    return worst / scale;
}

inline void cmd_verify(const experiment_config& cfg, const std::string& out,
                       margin_set& ms, int& exit_override) {
    const int n_pairs = static_cast<int>(task_num(cfg, "n_pairs", 200));
    const double eps = task_num(cfg, "eps", 0.5);
    const double f_scale = task_num(cfg, "f_scale", 1.0);
    const double roughness = task_num(cfg, "roughness", 0.5);

    // input gate: the probe pair (corrupted or not) must satisfy the
    // slope-density bound before any oracle consumes it
    admissible_pair probe = sample_admissible_pair(cfg.seed, roughness);
    if (f_scale != 1.0) probe = scale_pair_f(probe, f_scale);
    const double adm = admissibility_margin(probe);
    if (adm < -1e-9) {
        json jr;
        jr["rejected"] = true;
        jr["admissibility_margin"] = jnum(adm);
        jr["reason"] = "pair violates the slope-density admissibility bound";
        write_json(out_path(out, "verify.json"), jr);
        std::fprintf(stderr, "verify: input pair rejected (admissibility margin %.3g)\n",
                     adm);
        exit_override = 2;
        return;
    }

    std::vector<oracle_report> reports = run_oracle_suite(n_pairs, cfg.seed, eps);

    // metric-backed chains: the drawstring well, the corner example, and a
    // few sampled pairs realized as metrics
    {
        drawstring_params dp;
        dp.A = task_num(cfg, "drawstring_A", 3.0);
        const warped_metric md = build_drawstring(dp);
        reports.push_back(check_holder_chain(md, 0.05 * md.a, 400, cfg.seed + 101));
    }
    {
        c1alpha_params cp;
        cp.alpha = 0.5;
        cp.k = 2.0;
        const warped_metric mc = build_c1alpha(cp);
        reports.push_back(check_holder_chain(mc, 0.05 * mc.a, 400, cfg.seed + 102));
    }
    const int pole_k = static_cast<int>(task_num(cfg, "pole_k", 8));
    for (int s = 0; s < 3; ++s) {
        const warped_metric mp =
            pair_metric(sample_admissible_pair(cfg.seed + 11 * s, 0.1 * (s + 2)));
        oracle_report hc = check_holder_chain(mp, 0.05 * mp.a, 300, cfg.seed + 201 + s);
        oracle_report pb = check_pole_bounds(mp, pole_k);
        bool merged_hc = false, merged_pb = false;
        for (auto& r : reports) {
            if (r.lemma_id == hc.lemma_id) {
                merge_into(r, hc);
                merged_hc = true;
            }
            if (r.lemma_id == pb.lemma_id) {
                merge_into(r, pb);
                merged_pb = true;
            }
        }
        if (!merged_hc) reports.push_back(hc);
        if (!merged_pb) reports.push_back(pb);
    }

    std::string mcsv = "lemma,n_trials,worst_margin\n";
    json jl = json::array();
    for (const auto& r : reports) {
        jl.push_back(to_json(r));
        mcsv += r.lemma_id + "," + std::to_string(r.n_trials) + "," +
                fmt17(r.worst_margin) + "\n";
        ms.add(r.lemma_id, r.worst_margin);
    }
    write_text(out_path(out, "margins.csv"), mcsv);

    json jr;
    jr["rejected"] = false;
    jr["n_pairs"] = n_pairs;
    jr["seed"] = cfg.seed;
    jr["eps"] = eps;
    jr["oscillation_constant"] =
        jnum(4.0 * std::sqrt(2.0 * (1.0 - eps)) / eps + two_pi / std::sqrt(1.0 - eps));
    jr["admissibility_margin"] = jnum(adm);
    jr["lemmas"] = jl;
    jr["margins"] = ms.to_json();
    write_json(out_path(out, "verify.json"), jr);
}

// ------------------------------------------------------------------- driver

inline int run_cli(int argc, char** argv) {
    CLI::App app{"warped-product geometry laboratory on S^2 x S^1"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = ".";
    long long seed_override = -1;
    double tol = 1e-9;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--seed", seed_override, "override the config seed");
    app.add_option("--tol", tol, "margin tolerance for the exit status");

    auto* sc_curv =
        app.add_subcommand("curvature", "scalar and mixed Ricci curvature grid (CSV)");
    auto* sc_report =
        app.add_subcommand("report", "volume/area/diameter/minimal-area bundle (JSON)");
    auto* sc_short =
        app.add_subcommand("shortcut", "drawstring antipodal-pair distance table (CSV)");
    auto* sc_exp =
        app.add_subcommand("expansion", "small-radius volume expansion fit (JSON)");
    auto* sc_pair = app.add_subcommand(
        "pairing", "distributional curvature pairing and boundary decay (JSON+CSV)");
    auto* sc_verify =
        app.add_subcommand("verify", "inequality oracle suite; nonzero exit on failure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        experiment_config cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        write_json(out_path(out_dir, "config_echo.json"), config_to_json(cfg));

        margin_set ms;
        int exit_override = -1;
        if (sc_curv->parsed())
            cmd_curvature(cfg, out_dir, ms);
        else if (sc_report->parsed())
            cmd_report(cfg, out_dir, ms);
        else if (sc_short->parsed())
            cmd_shortcut(cfg, out_dir, ms);
        else if (sc_exp->parsed())
            cmd_expansion(cfg, out_dir, ms);
        else if (sc_pair->parsed())
            cmd_pairing(cfg, out_dir, ms);
        else if (sc_verify->parsed())
            cmd_verify(cfg, out_dir, ms, exit_override);

        if (exit_override >= 0) return exit_override;
        for (const auto& [name, v] : ms.items)
            std::printf("margin %-28s % .17g\n", name.c_str(), v);
        if (ms.items.empty()) return 0;
        const double w = ms.worst();
        std::printf("worst_margin % .17g\n", w);
        return w >= -tol ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

} // namespace warpgeo::cli
