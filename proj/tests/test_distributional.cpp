#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "warpgeo/c1alpha.hpp"
#include "warpgeo/distributional.hpp"
#include "warpgeo/drawstring.hpp"

using namespace warpgeo;

namespace {

warped_metric round_metric(double a = pi) {
    return make_warped_metric(make_round_profile(a), warp_field::constant(1.0), "round");
}

warped_metric cosine_metric(double c) {
    warp_field phi = make_radial_warp(
        [c](double r) { return 1.0 + c * std::cos(r); },
        [c](double r) { return -c * std::sin(r); },
        [c](double r) { return -c * std::cos(r); }, "cosine_radial");
    return make_warped_metric(make_round_profile(pi), std::move(phi), "perturbed_round");
}

warp_field sinusoid_warp(double c) {
    warp_field w;
    w.eval_fn = [c](double r, double th) { return 1.0 + c * std::sin(r) * std::cos(th); };
    w.grad_fn = [c](double r, double th) {
        return std::array<double, 2>{c * std::cos(r) * std::cos(th),
                                     -c * std::sin(r) * std::sin(th)};
    };
    w.hess_fn = [c](double r, double th) {
        return std::array<double, 3>{-c * std::sin(r) * std::cos(th),
                                     -c * std::cos(r) * std::sin(th),
                                     -c * std::sin(r) * std::cos(th)};
    };
    w.kind = "sinusoid";
    return w;
}

// u = sin r + 0.05 sin 2r: positive on (0, π), unit slopes at both ends
radial_profile perturbed_profile() {
    radial_profile p;
    p.a = pi;
    p.eval_fn = [](double r) { return std::sin(r) + 0.05 * std::sin(2.0 * r); };
    p.d1_fn = [](double r) { return std::cos(r) + 0.1 * std::cos(2.0 * r); };
    p.d2_fn = [](double r) { return -std::sin(r) - 0.2 * std::sin(2.0 * r); };
    p.kind = "perturbed";
    return p;
}

} // namespace

TEST_CASE("test function family: values, gradients, positivity") {
    test_function c = make_constant_test(2.0);
    REQUIRE(c.eval(0.3, 1.0, 2.0) == 2.0);
    REQUIRE(c.radial);
    REQUIRE(c.xi_independent);

    test_function b = make_radial_bump_test(0.5, 2.5, 1.5);
    REQUIRE(b.eval(0.5, 0.0, 0.0) == 0.0);
    REQUIRE(b.eval(2.5, 0.0, 0.0) == 0.0);
    REQUIRE(b.eval(1.5, 0.0, 0.0) == Catch::Approx(1.5)); // both steps saturate mid-support
    double h = 1e-6, r = 1.1;
    REQUIRE(b.grad(r, 0, 0)[0] ==
            Catch::Approx((b.eval(r + h, 0, 0) - b.eval(r - h, 0, 0)) / (2 * h)).margin(1e-7));
    REQUIRE_THROWS_AS(make_radial_bump_test(1.0, 0.5), domain_error);

    test_function s = make_separable_bump_test(0.5, 2.5, 1.0, 0.5, 0.7);
    REQUIRE_FALSE(s.xi_independent);
    REQUIRE(s.eval(1.5, 0.4, 1.2) ==
            Catch::Approx((1.0 + 0.5 * std::cos(0.4)) * (1.0 + 0.7 * std::cos(1.2))));
    REQUIRE(s.grad(1.5, 0.4, 1.2)[1] ==
            Catch::Approx((s.eval(1.5, 0.4 + h, 1.2) - s.eval(1.5, 0.4 - h, 1.2)) / (2 * h))
                .margin(1e-7));
    REQUIRE_THROWS_AS(make_separable_bump_test(0.5, 2.5, 1.0, 1.5, 0.0), domain_error);

    auto family = nonneg_test_family(pi);
    REQUIRE(family.size() == 5);
    for (auto& v : family)
        for (double rr : {0.2, 1.0, 2.0, 3.0})
            for (double tt : {0.0, 2.0, 4.0})
                REQUIRE(v.eval(rr, tt, 1.0) >= 0.0);
}

TEST_CASE("background comparison field vanishes identically") {
    warped_metric m = round_metric();
    for (double r : {0.2, 1.0, pi / 2.0, 2.7})
        for (double th : {0.0, 1.3}) {
            auto V = lee_lefloch_V(m, r, th);
            REQUIRE(std::fabs(V[0]) < 1e-14);
            REQUIRE(V[1] == 0.0);
            REQUIRE(V[2] == 0.0);
            REQUIRE(div_V(m, r, th) == Catch::Approx(0.0).margin(1e-12));
            REQUIRE(lee_lefloch_F(m, r, th) == Catch::Approx(2.0).epsilon(1e-12));
        }
    warped_metric m2 = round_metric(2.0);
    REQUIRE(lee_lefloch_F(m2, 0.7, 0.0) == Catch::Approx(2.0 * sqr(pi / 2.0)).epsilon(1e-12));
}

TEST_CASE("warping the fiber alone keeps V zero and pushes curvature into F") {
    warped_metric m = cosine_metric(0.25);
    for (double r : {0.4, 1.2, 2.4}) {
        REQUIRE(std::fabs(lee_lefloch_V(m, r, 0.0)[0]) < 1e-14);
        REQUIRE(div_V(m, r, 0.0) == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(lee_lefloch_F(m, r, 0.0) ==
                Catch::Approx(scalar_curvature(m, r, 0.0)).epsilon(1e-11));
    }
}

TEST_CASE("pointwise decomposition Scalar = div V + F on smooth metrics") {
    warped_metric metrics[] = {
        make_warped_metric(perturbed_profile(), warp_field::constant(1.0)),
        make_warped_metric(perturbed_profile(), sinusoid_warp(0.1)),
        make_warped_metric(make_round_profile(pi), sinusoid_warp(0.15)),
        build_drawstring({2.0}),
    };
    for (const warped_metric& m : metrics) {
        for (int i = 1; i <= 12; ++i) {
            double r = m.a * i / 13.0;
            for (double th : {0.0, 1.1, 3.7}) {
                double lhs = scalar_curvature(m, r, th);
                double rhs = div_V(m, r, th) + lee_lefloch_F(m, r, th);
                REQUIRE(lhs == Catch::Approx(rhs).margin(1e-9 * (1.0 + std::fabs(lhs))));
            }
        }
    }
}

TEST_CASE("truncated pairing obeys the integration-by-parts ledger") {
    // interior = direct - boundary whenever the metric is classically smooth
    warped_metric m = make_warped_metric(perturbed_profile(), sinusoid_warp(0.1));
    test_function v = make_separable_bump_test(0.2 * pi, 0.8 * pi, 1.0, 0.5, 0.3);
    quadrature_spec qs;
    qs.rel_tol = 1e-10;
    for (double eps : {0.3, 0.15}) {
        pairing_result p = pairing(m, v, eps, qs);
        double direct = scalar_pairing_direct(m, v, eps, qs).value;
        REQUIRE(p.value == p.interior_part);
        REQUIRE(p.epsilon == eps);
        REQUIRE(p.interior_part + p.boundary_part ==
                Catch::Approx(direct).margin(1e-7 * (1.0 + std::fabs(direct))));
    }

    // radial fast path agrees with the angular-resolved path
    warped_metric mr = cosine_metric(0.2);
    test_function vr = make_radial_bump_test(0.15 * pi, 0.85 * pi, 1.0);
    pairing_result fast = pairing(mr, vr, 0.2, qs);
    test_function v_slow = vr;
    v_slow.radial = false; // force the trapezoid route
    pairing_result slow = pairing(mr, v_slow, 0.2, qs);
    REQUIRE(fast.interior_part ==
            Catch::Approx(slow.interior_part).margin(1e-8 * (1.0 + std::fabs(fast.interior_part))));

    REQUIRE_THROWS_AS(pairing(m, v, 0.0, qs), domain_error);
    REQUIRE_THROWS_AS(pairing(m, v, pi, qs), domain_error);
    REQUIRE_THROWS_AS(boundary_term(m, v, -0.1), domain_error);
    REQUIRE_THROWS_AS(scalar_pairing_direct(m, v, 2.0, qs), domain_error);
}

TEST_CASE("background total curvature by two-stage extrapolation") {
    warped_metric m = round_metric();
    test_function one = make_constant_test(1.0);
    quadrature_spec qs;
    qs.rel_tol = 1e-10;

    // truncated interior integral is 16 pi^2 cos(eps) exactly
    for (double eps : {0.08, 0.04}) {
        pairing_result p = pairing(m, one, eps, qs);
        REQUIRE(p.interior_part ==
                Catch::Approx(16.0 * pi * pi * std::cos(eps)).epsilon(1e-9));
        REQUIRE(p.boundary_part == Catch::Approx(0.0).margin(1e-10));
    }

    extrapolation_result ex = pairing_extrapolated(m, one, 0.08, qs);
    REQUIRE(ex.epsilons[0] == 0.08);
    REQUIRE(ex.epsilons[1] == 0.04);
    REQUIRE(ex.epsilons[2] == 0.02);
    for (int i = 0; i < 3; ++i)
        REQUIRE(ex.interior[i] ==
                Catch::Approx(16.0 * pi * pi * std::cos(ex.epsilons[i])).epsilon(1e-9));
    REQUIRE(ex.value == Catch::Approx(16.0 * pi * pi).epsilon(1e-5));
    REQUIRE(std::fabs(ex.value - 16.0 * pi * pi) <= 10.0 * ex.est_error + 1e-6);
}

TEST_CASE("extrapolation tracks the direct integral on a smooth perturbation") {
    warped_metric m = cosine_metric(0.2);
    test_function v = make_radial_bump_test(0.15 * pi, 0.85 * pi, 1.0);
    quadrature_spec qs;
    qs.rel_tol = 1e-10;
    extrapolation_result ex = pairing_extrapolated(m, v, 0.08, qs);
    double direct = scalar_pairing_direct(m, v, 1e-8, qs).value;
    REQUIRE(ex.value == Catch::Approx(direct).margin(1e-4 * (1.0 + std::fabs(direct))));
}

TEST_CASE("boundary flux majorant caps the flux from above") {
    // the bound is one-sided by design: B can be far negative in a deep
    // fiber well, but must never exceed the concavity majorant
    warped_metric metrics[] = {round_metric(), cosine_metric(0.25), build_drawstring({3.0})};
    for (const warped_metric& m : metrics) {
        test_function one = make_constant_test(1.0);
        for (double eps : {0.3, 0.1, 0.04}) {
            double raw = boundary_term(m, one, eps);
            double bound = boundary_bound(m, one, eps);
            REQUIRE(bound >= 0.0);
            REQUIRE(raw <= bound * (1.0 + 1e-9) + 1e-12);
        }
    }
    // smooth mild metrics: the cap holds for both signs of the flux
    for (double eps : {0.3, 0.1, 0.04}) {
        warped_metric m = cosine_metric(0.25);
        test_function one = make_constant_test(1.0);
        REQUIRE(std::fabs(boundary_term(m, one, eps)) <=
                boundary_bound(m, one, eps) * (1.0 + 1e-9) + 1e-12);
    }
    REQUIRE_THROWS_AS(boundary_bound(round_metric(), make_constant_test(-1.0), 0.1),
                      domain_error);
}

TEST_CASE("finite-truncation sign surrogate on the nonnegative-curvature families") {
    quadrature_spec qs;
    qs.rel_tol = 1e-7;
    warped_metric ds = build_drawstring({3.0});
    c1alpha_params cp;
    cp.alpha = 0.5;
    cp.k = 2.0;
    warped_metric corner = build_c1alpha(cp);
    // nonnegative scalar curvature forces interior >= -|B| at any finite eps
    for (const warped_metric* m : {&ds, &corner})
        for (const test_function& v : nonneg_test_family(m->a)) {
            pairing_result p = pairing(*m, v, 0.01, qs);
            REQUIRE(p.interior_part + std::fabs(p.boundary_part) >= -1e-6);
        }
    // concavity-majorant version of the same sign argument
    test_function bump = make_radial_bump_test(0.15 * ds.a, 0.85 * ds.a, 1.0);
    for (double eps : {0.05, 0.02, 0.01}) {
        pairing_result p = pairing(ds, bump, eps, qs);
        REQUIRE(p.interior_part >= -boundary_bound(ds, bump, eps) - 1e-9);
    }
}

TEST_CASE("decay table rows are self-consistent") {
    warped_metric m = cosine_metric(0.2);
    test_function v = make_constant_test(1.0);
    quadrature_spec qs;
    qs.rel_tol = 1e-9;
    std::vector<double> eps_list = {0.2, 0.1, 0.05};
    auto rows = pairing_decay_table(m, v, eps_list, qs);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i][0] == eps_list[i]);
        REQUIRE(rows[i][1] ==
                Catch::Approx(pairing(m, v, eps_list[i], qs).interior_part).epsilon(1e-9));
        REQUIRE(rows[i][2] ==
                Catch::Approx(boundary_term(m, v, eps_list[i], 256, 64)).margin(1e-10));
    }
}
