// Acceptance gate: one self-contained check per numbered criterion, each
// printing exactly one PASS/FAIL line with the measured quantities and its
// wall time.  The process exit status is the number of failed criteria, so
// the suite stays honest about anything that does not hold numerically.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "warpgeo/c1alpha.hpp"
#include "warpgeo/distance.hpp"
#include "warpgeo/distributional.hpp"
#include "warpgeo/drawstring.hpp"
#include "warpgeo/geodesics.hpp"
#include "warpgeo/geometry.hpp"
#include "warpgeo/metric.hpp"
#include "warpgeo/oracles.hpp"
#include "warpgeo/profiles.hpp"
#include "warpgeo/sampler.hpp"

using namespace warpgeo;

namespace {

struct outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

warped_metric round_metric() {
    return make_warped_metric(make_round_profile(pi), warp_field::constant(1.0), "round");
}

warped_metric cosine_metric(double amp) {
    auto F = [amp](double r) { return 1.0 + amp * std::cos(r); };
    auto dF = [amp](double r) { return -amp * std::sin(r); };
    auto ddF = [amp](double r) { return -amp * std::cos(r); };
    return make_warped_metric(make_round_profile(pi),
                              make_radial_warp(F, dF, ddF, "cosine_radial"),
                              "perturbed_round");
}

// exact distance on the unit-sphere x circle product (r = polar angle)
double product_distance(const std::array<double, 3>& p, const std::array<double, 3>& q) {
    double c = std::cos(p[0]) * std::cos(q[0]) +
               std::sin(p[0]) * std::sin(q[0]) * std::cos(p[1] - q[1]);
    c = std::clamp(c, -1.0, 1.0);
    return std::hypot(std::acos(c), wrap_angle(p[2] - q[2]));
}

// --------------------------------------------------------------- criterion 1

outcome background_identities() {
    const warped_metric m = round_metric();
    double dev = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double r = m.a * (i + 0.5) / 1000.0;
        const double th = std::fmod(0.6180339887498949 * i, 1.0) * two_pi;
        dev = std::max(dev, std::fabs(scalar_curvature(m, r, th) - 2.0));
        const auto V = lee_lefloch_V(m, r, th);
        for (double c : V) dev = std::max(dev, std::fabs(c));
        dev = std::max(dev, std::fabs(lee_lefloch_F(m, r, th) - 2.0));
        dev = std::max(dev, std::fabs(div_V(m, r, th)));
    }

    quadrature_spec qs;
    qs.rel_tol = 1e-10;
    const extrapolation_result ext =
        pairing_extrapolated(m, make_constant_test(1.0), 0.08, qs);
    const double target = 16.0 * pi * pi;
    const double rel = std::fabs(ext.value - target) / target;

    outcome oc;
    oc.pass = dev <= 1e-12 && rel <= 1e-5;
    oc.detail = fmt("identity dev %.2e (tol 1e-12); <R,1> = %.8f vs 16 pi^2, rel %.2e "
                    "(tol 1e-5)",
                    dev, ext.value, rel);
    return oc;
}

// --------------------------------------------------------------- criterion 2

outcome decomposition_stokes() {
    const warped_metric m = cosine_metric(0.1);
    double dev = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double r = m.a * (i + 0.5) / 50.0;
        for (int j = 0; j < 20; ++j) {
            const double th = two_pi * (j + 0.5) / 20.0;
            const double lhs = scalar_curvature(m, r, th);
            const double rhs = div_V(m, r, th) + lee_lefloch_F(m, r, th);
            dev = std::max(dev, std::fabs(lhs - rhs));
        }
    }

    quadrature_spec qs;
    qs.rel_tol = 1e-11;
    double sdev = 0.0;
    const test_function tests[2] = {make_constant_test(1.0),
                                    make_radial_bump_test(0.3, pi - 0.3, 1.0)};
    for (const auto& v : tests) {
        const double direct = scalar_pairing_direct(m, v, 0.1, qs).value;
        const pairing_result pr = pairing(m, v, 0.1, qs);
        sdev = std::max(sdev,
                        std::fabs(direct - pr.interior_part - pr.boundary_part));
    }

    outcome oc;
    oc.pass = dev <= 1e-8 && sdev <= 1e-6;
    oc.detail = fmt("max |Scalar - div V - F| = %.2e (tol 1e-8); truncated Stokes "
                    "defect %.2e (tol 1e-6)",
                    dev, sdev);
    return oc;
}

// --------------------------------------------------------------- criterion 3

outcome corner_scalar_floor() {
    const std::array<std::pair<double, double>, 3> cases = {
        {{1.0 / 3.0, 1.0}, {0.5, 2.0}, {2.0 / 3.0, 5.0}}};
    double worst = std::numeric_limits<double>::infinity();
    std::string per;
    for (const auto& [alpha, k] : cases) {
        c1alpha_params p;
        p.alpha = alpha;
        p.k = k;
        const warped_metric m = build_c1alpha(p);
        const int N = 400;
        std::vector<double> row_min(N, std::numeric_limits<double>::infinity());
        parallel_for(N, [&](std::size_t i) {
            const double r = m.a * (i + 0.5) / N;
            double lo = std::numeric_limits<double>::infinity();
            for (int j = 0; j < N; ++j) {
                const double th = two_pi * (j + 0.5) / N;
                lo = std::min(lo, scalar_curvature(m, r, th));
            }
            row_min[i] = lo;
        });
        const double smin = *std::min_element(row_min.begin(), row_min.end());
        worst = std::min(worst, smin);
        per += fmt(" (%.3f,%g): %.6f;", alpha, k, smin);
    }
    outcome oc;
    oc.pass = worst >= 0.625 - 1e-9;
    oc.detail = fmt("min scalar on 400x400 grids:%s floor 5/8", per.c_str());
    return oc;
}

// --------------------------------------------------------------- criterion 4

outcome wedge_coefficient() {
    const double alpha = 0.5;
    const double Ks = kstar(alpha);
    const double cap =
        std::sqrt(1.0 + alpha * alpha) * std::pow(alpha, alpha / (1.0 - alpha));
    const double rho0 = std::min(0.5 * rho_star(alpha, 2.0 * Ks), cap);
    const tangent_region region = wedge_region(alpha, rho0);
    const double delta = std::atan(1.0 / alpha) - std::atan(alpha);
    const std::array<double, 3> q{pi / 2.0, 0.0, 0.0};
    const std::vector<double> ts = {1.0, 0.5, 0.25};

    auto fitted_c5 = [&](double k) {
        c1alpha_params p;
        p.alpha = alpha;
        p.k = k;
        const warped_metric m = build_c1alpha(p);
        std::vector<std::pair<double, double>> vols;
        for (double t : ts) {
            const region_volume_result rv =
                region_volume_via_exp(m, q, region, t, 250000, 2026, 4);
            vols.emplace_back(t, rv.value);
        }
        return fit_expansion(vols).c5;
    };

    const double c5_hi = fitted_c5(2.0 * Ks);
    const double c5_mid = fitted_c5(Ks);
    const double c5_lo = fitted_c5(0.0);
    // at k = 2K* the closed-form t^5 coefficient collapses to (sqrt3 rho0^5/6) delta
    const double closed = std::sqrt(3.0) * std::pow(rho0, 5) / 6.0 * delta;
    const double rel = std::fabs(c5_hi - closed) / std::fabs(closed);

    outcome oc;
    oc.pass = rel <= 0.10 && c5_lo < 0.0 && c5_lo < c5_mid && c5_mid < c5_hi;
    oc.detail = fmt("rho0 %.3e; c5(2K*) %.4e vs closed %.4e (rel %.3f, tol 0.10); "
                    "c5 at k={0,K*,2K*} = {%.3e, %.3e, %.3e} %s",
                    rho0, c5_hi, closed, rel,
                    c5_lo, c5_mid, c5_hi,
                    (c5_lo < 0.0 && c5_lo < c5_mid && c5_mid < c5_hi)
                        ? "negative-at-0 and monotone"
                        : "ORDER VIOLATED");
    return oc;
}

// --------------------------------------------------------------- criterion 5

outcome ball_coefficient() {
    const std::vector<double> ts = {0.1, 0.05, 0.025};
    const double target = -4.0 * pi / 45.0;

    const warped_metric m0 = round_metric();
    std::vector<std::pair<double, double>> vols;
    for (double t : ts) vols.emplace_back(t, ball_volume(m0, {pi / 2.0, 0.7, 0.0}, t, 4096));
    const double c5_bg = fit_expansion(vols).c5;
    const double rel_bg = std::fabs(c5_bg - target) / std::fabs(target);

    c1alpha_params p;
    p.alpha = 0.5;
    p.k = 5.0;
    const warped_metric mc = build_c1alpha(p);
    vols.clear();
    for (double t : ts) vols.emplace_back(t, ball_volume(mc, {pi / 2.0, 0.0, 0.0}, t, 2048));
    const double c5_c = fit_expansion(vols).c5;
    const double rel_c = std::fabs(c5_c - target) / std::fabs(target);

    outcome oc;
    oc.pass = rel_bg <= 0.01 && rel_c <= 0.15;
    oc.detail = fmt("background c5 %.6f vs -4pi/45 = %.6f (rel %.4f, tol 0.01); "
                    "corner-metric c5 %.6f (rel %.4f, tol 0.15)",
                    c5_bg, target, rel_bg, c5_c, rel_c);
    return oc;
}

// --------------------------------------------------------------- criterion 6

outcome drawstring_shortcut() {
    const double r_star = 0.02;
    const shortcut_table tab = shortcut_experiment({4.0}, r_star);
    const double d4 = tab.rows.at(0).d_upper;
    const bool below = d4 <= 0.08;
    // best possible for this path family: two radial legs of cost >= r* each
    // plus the fiber hop pi e^{-A}
    const double floor4 = 2.0 * r_star + pi * std::exp(-4.0);

    quadrature_spec qs;
    qs.rel_tol = 1e-11;
    std::string exlist;
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double A : {2.0, 3.0, 4.0, 5.0}) {
        drawstring_params dp;
        dp.A = A;
        const warped_metric m = build_drawstring(dp);
        const double ex =
            radial_cost(m, drawstring_rho(A), r_star, 0.0, qs).value - r_star;
        decreasing = decreasing && ex < prev;
        prev = ex;
        exlist += fmt(" %.4e", ex);
    }

    outcome oc;
    oc.pass = below && decreasing;
    oc.detail = fmt("d_upper(A=4, r*=1/50) = %.5f vs required <= 0.08 [family floor "
                    "2 r* + pi e^-4 = %.5f, so the 0.08 bound is unattainable]; "
                    "radial excess over A={2,3,4,5}:%s -> %s",
                    d4, floor4, exlist.c_str(),
                    decreasing ? "decreasing" : "NOT decreasing");
    return oc;
}

// --------------------------------------------------------------- criterion 7

outcome boundary_decay() {
    drawstring_params dp;
    dp.A = 3.0;
    const warped_metric m = build_drawstring(dp);
    const test_function one = make_constant_test(1.0);
    std::string list;
    bool mono = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.08, 0.04, 0.02, 0.01}) {
        const double ratio =
            std::fabs(boundary_term(m, one, eps)) / std::pow(eps, 1.5);
        mono = mono && ratio <= prev * (1.0 + 1e-9) + 1e-15;
        prev = ratio;
        list += fmt(" %.5e", ratio);
    }
    outcome oc;
    oc.pass = mono;
    oc.detail = fmt("|B(eps,1)|/eps^1.5 over eps={0.08,0.04,0.02,0.01}:%s -> %s",
                    list.c_str(), mono ? "nonincreasing" : "INCREASES");
    return oc;
}

// --------------------------------------------------------------- criterion 8

outcome oracle_suite() {
    const std::vector<oracle_report> reports = run_oracle_suite(200, 2026, 0.5);
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_id = "-";
    long trials = 0;
    for (const auto& r : reports) {
        trials += r.n_trials;
        if (r.worst_margin < worst) {
            worst = r.worst_margin;
            worst_id = r.lemma_id;
        }
    }
    const double osc = 4.0 * std::sqrt(2.0 * 0.5) / 0.5 + two_pi / std::sqrt(0.5);
    const bool consts = std::fabs(osc - (8.0 + 2.0 * std::sqrt(2.0) * pi)) < 1e-12 &&
                        std::fabs(integral_f_constant(0.5) - 37.5 * pi) < 1e-12;
    outcome oc;
    oc.pass = worst >= -1e-9 && consts;
    oc.detail = fmt("200 pairs, %ld trials, worst margin %.3e (%s), tol -1e-9; "
                    "explicit constants (8+2sqrt2 pi, C(1/2)=37.5 pi) %s",
                    trials, worst, worst_id.c_str(), consts ? "verified" : "WRONG");
    return oc;
}

// --------------------------------------------------------------- criterion 9

outcome grid_distance_check() {
    const warped_metric m = round_metric();
    const int n = 64;
    const double margin = m.a / 1024.0;
    const double lo = margin, hi = m.a - margin;
    std::mt19937_64 gen(424242);
    std::uniform_int_distribution<int> dr(6, 58), da(0, 63);

    std::vector<std::array<double, 3>> ps, qs;
    while (static_cast<int>(ps.size()) < 20) {
        const std::array<double, 3> p{lo + (hi - lo) * dr(gen) / n, two_pi * da(gen) / n,
                                      two_pi * da(gen) / n};
        const std::array<double, 3> q{lo + (hi - lo) * dr(gen) / n, two_pi * da(gen) / n,
                                      two_pi * da(gen) / n};
        if (product_distance(p, q) < 0.7) continue;
        ps.push_back(p);
        qs.push_back(q);
    }

    std::vector<double> rel(20, 0.0);
    parallel_for(20, [&](std::size_t i) {
        const double exact = product_distance(ps[i], qs[i]);
        const double d = grid_distance(m, ps[i], qs[i], n, n, n);
        rel[i] = std::fabs(d - exact) / exact;
    });
    const double worst = *std::max_element(rel.begin(), rel.end());
    outcome oc;
    oc.pass = worst <= 0.02;
    oc.detail = fmt("20 node pairs at n=64: worst relative error %.4f (tol 0.02)",
                    worst);
    return oc;
}

// -------------------------------------------------------------- criterion 10

outcome gauss_bonnet() {
    double worst = 0.0;
    worst = std::max(worst, gauss_bonnet_residual(round_metric()));
    for (double A : {2.0, 3.0, 4.0}) {
        drawstring_params dp;
        dp.A = A;
        worst = std::max(worst, gauss_bonnet_residual(build_drawstring(dp)));
    }
    for (int i = 0; i < 12; ++i) {
        const admissible_pair pr = sample_admissible_pair(5000 + i, (i % 6) / 6.0);
        worst = std::max(worst, gauss_bonnet_residual(pair_metric(pr)));
    }
    outcome oc;
    oc.pass = worst <= 1e-6;
    oc.detail = fmt("max residual over round, wells A={2,3,4}, 12 sampled profiles: "
                    "%.2e (tol 1e-6)",
                    worst);
    return oc;
}

} // namespace

int main() {
    int failures = 0;
    int idx = 0;
    const std::vector<std::pair<const char*, std::function<outcome()>>> criteria = {
        {"background identities", background_identities},
        {"decomposition and truncated Stokes", decomposition_stokes},
        {"corner-metric scalar floor", corner_scalar_floor},
        {"wedge t^5 coefficient", wedge_coefficient},
        {"geodesic-ball t^5 coefficient", ball_coefficient},
        {"drawstring shortcut", drawstring_shortcut},
        {"boundary term decay", boundary_decay},
        {"inequality oracle suite", oracle_suite},
        {"grid distance cross-oracle", grid_distance_check},
        {"Gauss-Bonnet residuals", gauss_bonnet},
    };
    for (const auto& [name, fn] : criteria) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        outcome oc;
        try {
            oc = fn();
        } catch (const std::exception& e) {
            oc.pass = false;
            oc.detail = fmt("exception: %s", e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s -- %s -- %s (%.1f s)\n", idx,
                    oc.pass ? "PASS" : "FAIL", name, oc.detail.c_str(), secs);
        std::fflush(stdout);
        if (!oc.pass) ++failures;
    }
    std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
    return failures;
}
