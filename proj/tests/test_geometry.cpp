#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "warpgeo/drawstring.hpp"
#include "warpgeo/geometry.hpp"

using namespace warpgeo;

namespace {

warped_metric round_metric(double a = pi) {
    return make_warped_metric(make_round_profile(a), warp_field::constant(1.0), "round");
}

// φ = 1 + c cos(πr/a), radial, smooth, positive for |c| < 1
warped_metric cosine_metric(double c, double a = pi) {
    double k = pi / a;
    warp_field phi = make_radial_warp(
        [c, k](double r) { return 1.0 + c * std::cos(k * r); },
        [c, k](double r) { return -c * k * std::sin(k * r); },
        [c, k](double r) { return -c * k * k * std::cos(k * r); }, "cosine_radial");
    return make_warped_metric(make_round_profile(a), std::move(phi), "perturbed_round");
}

} // namespace

TEST_CASE("round closed forms: volume, area, diameter, caps") {
    warped_metric m = round_metric();
    REQUIRE(double(total_volume(m)) == Catch::Approx(8.0 * pi * pi).epsilon(1e-10));
    REQUIRE(double(base_area(m)) == Catch::Approx(4.0 * pi).epsilon(1e-10));
    REQUIRE(base_diameter(m) == Catch::Approx(pi));

    for (double e : {0.2, 0.5, 1.0})
        REQUIRE(double(cap_volume(m, e)) ==
                Catch::Approx(8.0 * pi * pi * (1.0 - std::cos(e))).epsilon(1e-9));
    REQUIRE_THROWS_AS(cap_volume(m, 0.0), domain_error);
    REQUIRE_THROWS_AS(cap_volume(m, pi / 2.0), domain_error);

    // a ≠ π round: volume scales as 4π²·(a/π)·(2a/π)
    warped_metric m2 = round_metric(2.0);
    REQUIRE(double(total_volume(m2)) ==
            Catch::Approx(4.0 * pi * pi * (2.0 / pi) * (4.0 / pi)).epsilon(1e-10));
}

TEST_CASE("shell volumes add and match both integration paths") {
    warped_metric m = cosine_metric(0.3);
    geom_result whole = total_volume(m);
    geom_result left = shell_volume(m, 0.0, 1.0);
    geom_result right = shell_volume(m, 1.0, pi);
    REQUIRE(left.value + right.value == Catch::Approx(whole.value).epsilon(1e-9));

    // ∫ sin r/(1+0.3 cos r) dr = ln(1.3/0.7)/0.3 on [0, π]
    REQUIRE(whole.value ==
            Catch::Approx(4.0 * pi * pi * std::log(13.0 / 7.0) / 0.3).epsilon(1e-9));

    // the θ-resolved path must agree with the radial fast path
    warped_metric slow = m;
    slow.phi.radial_only = false;
    REQUIRE(double(total_volume(slow)) == Catch::Approx(whole.value).epsilon(1e-8));
    REQUIRE(double(shell_volume(slow, 0.4, 2.0)) ==
            Catch::Approx(double(shell_volume(m, 0.4, 2.0))).epsilon(1e-8));
}

TEST_CASE("radial path cost") {
    warped_metric r0 = round_metric();
    REQUIRE(double(radial_cost(r0, 0.5, 2.5, 1.0)) == Catch::Approx(2.0).epsilon(1e-10));
    REQUIRE_THROWS_AS(radial_cost(r0, 0.0, 1.0, 0.0), domain_error);
    REQUIRE_THROWS_AS(radial_cost(r0, 2.0, 1.0, 0.0), domain_error);
    REQUIRE_THROWS_AS(radial_cost(r0, 0.5, pi, 0.0), domain_error);

    warped_metric m = cosine_metric(0.3);
    quadrature_spec qs;
    qs.rel_tol = 1e-12;
    double direct =
        integrate_adaptive([&](double r) { return 1.0 / m.phi.eval(r, 0.0); }, 0.5, 1.5, qs)
            .value;
    REQUIRE(double(radial_cost(m, 0.5, 1.5, 0.0)) == Catch::Approx(direct).epsilon(1e-9));

    // starting below 1e-3 rides the log substitution; φ = 1 keeps the exact answer
    REQUIRE(double(radial_cost(r0, 1e-6, 1.0, 0.0)) ==
            Catch::Approx(1.0 - 1e-6).epsilon(1e-8));

    drawstring_params p;
    p.A = 2.0;
    warped_metric d = build_drawstring(p);
    double rho = drawstring_rho(2.0);
    double cost = radial_cost(d, 0.5 * rho, 0.15, 0.0);
    REQUIRE(cost >= 0.15 - 0.5 * rho - 1e-9); // 1/φ ≥ 1
    REQUIRE(cost <= std::exp(2.0) * 0.15);    // 1/φ ≤ e^A
}

TEST_CASE("symmetric minimal-surface candidates") {
    warped_metric m = round_metric();
    auto cands = min_torus_area_candidates(m);
    REQUIRE(cands.size() == 2);
    REQUIRE(cands.front().kind == "slice"); // 4π < 4π²
    REQUIRE(std::isnan(cands.front().r_c));
    REQUIRE(cands.front().area == Catch::Approx(4.0 * pi).epsilon(1e-8));
    REQUIRE(cands.back().kind == "torus");
    REQUIRE(cands.back().r_c == Catch::Approx(pi / 2.0).margin(1e-6));
    REQUIRE(cands.back().area == Catch::Approx(4.0 * pi * pi).epsilon(1e-8));
    REQUIRE(std::is_sorted(cands.begin(), cands.end(),
                           [](const mina_candidate& a, const mina_candidate& b) {
                               return a.area < b.area;
                           }));

    // warping φ moves the slice area but never the torus areas
    warped_metric w = cosine_metric(0.3);
    auto wc = min_torus_area_candidates(w);
    double torus_area = -1.0, slice_area = -1.0;
    for (auto& c : wc) {
        if (c.kind == "torus") torus_area = c.area;
        if (c.kind == "slice") slice_area = c.area;
    }
    REQUIRE(torus_area == Catch::Approx(4.0 * pi * pi).epsilon(1e-8));
    quadrature_spec qs;
    qs.rel_tol = 1e-12;
    double expect = two_pi * integrate_adaptive(
                                 [&](double r) {
                                     return m.u.eval(r) / sqr(w.phi.eval(r, 0.0));
                                 },
                                 0.0, pi, qs)
                                 .value;
    REQUIRE(slice_area == Catch::Approx(expect).epsilon(1e-7));

    // a profile with no interior critical point cannot produce a torus
    radial_profile lin;
    lin.a = 1.0;
    lin.eval_fn = [](double r) { return r; };
    lin.d1_fn = [](double) { return 1.0; };
    lin.d2_fn = [](double) { return 0.0; };
    warped_metric cone = make_warped_metric(lin, warp_field::constant(1.0));
    REQUIRE_THROWS_AS(min_torus_area_candidates(cone), accuracy_error);
}

TEST_CASE("warp gradient budget inequality") {
    warped_metric r0 = round_metric();
    auto [l0, r0v] = grad_log_phi_budget(r0);
    REQUIRE(l0 == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(r0v == Catch::Approx(4.0 * pi).epsilon(1e-9));

    warped_metric m = cosine_metric(0.3);
    auto [lhs, rhs] = grad_log_phi_budget(m);
    REQUIRE(lhs > 0.0);
    REQUIRE(rhs == Catch::Approx(4.0 * pi).epsilon(1e-9)); // depends only on u
    REQUIRE(lhs <= 0.5 * rhs);

    // θ-resolved path agrees on a radial warp
    warped_metric slow = m;
    slow.phi.radial_only = false;
    auto [lhs2, rhs2] = grad_log_phi_budget(slow);
    REQUIRE(lhs2 == Catch::Approx(lhs).epsilon(1e-8));
    REQUIRE(rhs2 == Catch::Approx(rhs).epsilon(1e-12));

    drawstring_params p;
    p.A = 3.0;
    auto [ld, rd] = grad_log_phi_budget(build_drawstring(p));
    REQUIRE(ld <= 0.5 * rd);
}
