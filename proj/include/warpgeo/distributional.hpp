#pragma once

// Distributional curvature of a warped metric measured against its round
// background: the comparison vector field V, the first-order scalar F, the
// background divergence of V, and truncated pairings <R, v> against smooth
// test functions.  F is assembled from first derivatives of phi only, which
// is what lets fields without a classical hessian on their singular set be
// paired at all.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "warpgeo/common.hpp"
#include "warpgeo/metric.hpp"
#include "warpgeo/quadrature.hpp"
#include "warpgeo/smoothstep.hpp"

namespace warpgeo {

// smooth v(r, th, xi), 2pi-periodic in both angles; nonnegative when used in
// one-sided estimates
struct test_function {
    std::function<double(double, double, double)> eval;
    std::function<std::array<double, 3>(double, double, double)> grad;
    double sup_norm = 1.0;
    bool radial = false;
    bool xi_independent = false;
    std::string kind;
};

inline test_function make_constant_test(double c) {
    test_function v;
    v.eval = [c](double, double, double) { return c; };
    v.grad = [](double, double, double) {
        return std::array<double, 3>{0.0, 0.0, 0.0};
    };
    v.sup_norm = std::fabs(c);
    v.radial = true;
    v.xi_independent = true;
    v.kind = "constant";
    return v;
}

// C^3 bump supported on [r_lo, r_hi], peak value amp at the midpoint
inline test_function make_radial_bump_test(double r_lo, double r_hi, double amp = 1.0) {
    if (!(r_lo >= 0.0 && r_hi > r_lo))
        throw domain_error("radial bump: need 0 <= r_lo < r_hi");
    const double w = 0.5 * (r_hi - r_lo);
    test_function v;
    v.eval = [=](double r, double, double) {
        return amp * s3((r - r_lo) / w) * s3((r_hi - r) / w);
    };
    v.grad = [=](double r, double, double) {
        const double x1 = (r - r_lo) / w, x2 = (r_hi - r) / w;
        const double dr = amp * (s3_d1(x1) * s3(x2) - s3(x1) * s3_d1(x2)) / w;
        return std::array<double, 3>{dr, 0.0, 0.0};
    };
    v.sup_norm = std::fabs(amp);
    v.radial = true;
    v.xi_independent = true;
    v.kind = "radial_bump";
    return v;
}

// radial bump modulated by 1 + c_th cos(th) and 1 + c_xi cos(xi);
// stays nonnegative for |c| <= 1
inline test_function make_separable_bump_test(double r_lo, double r_hi, double amp,
                                              double c_th, double c_xi) {
    if (std::fabs(c_th) > 1.0 || std::fabs(c_xi) > 1.0)
        throw domain_error("separable bump: angular weights must lie in [-1,1]");
    test_function base = make_radial_bump_test(r_lo, r_hi, amp);
    auto rad = base.eval;
    auto rad_grad = base.grad;
    test_function v;
    v.eval = [=](double r, double th, double xi) {
        return rad(r, 0.0, 0.0) * (1.0 + c_th * std::cos(th)) * (1.0 + c_xi * std::cos(xi));
    };
    v.grad = [=](double r, double th, double xi) {
        const double b = rad(r, 0.0, 0.0);
        const double db = rad_grad(r, 0.0, 0.0)[0];
        const double ft = 1.0 + c_th * std::cos(th);
        const double fx = 1.0 + c_xi * std::cos(xi);
        return std::array<double, 3>{db * ft * fx,
                                     b * (-c_th * std::sin(th)) * fx,
                                     b * ft * (-c_xi * std::sin(xi))};
    };
    v.sup_norm = std::fabs(amp) * (1.0 + std::fabs(c_th)) * (1.0 + std::fabs(c_xi));
    v.radial = false;
    v.xi_independent = (c_xi == 0.0);
    v.kind = "separable_bump";
    return v;
}

// the nonnegative family used by the finite-truncation sign checks
inline std::vector<test_function> nonneg_test_family(double a) {
    return {make_constant_test(1.0),
            make_radial_bump_test(0.15 * a, 0.85 * a, 1.0),
            make_radial_bump_test(0.30 * a, 0.60 * a, 2.0),
            make_separable_bump_test(0.20 * a, 0.80 * a, 1.0, 0.5, 0.0),
            make_separable_bump_test(0.25 * a, 0.75 * a, 1.5, 0.3, 0.7)};
}

namespace detail {

struct background_terms {
    double u0, du0, ddu0;
};

inline background_terms background_at(double a, double r) {
    const double k0 = pi / a;
    return {std::sin(k0 * r) / k0, std::cos(k0 * r), -k0 * std::sin(k0 * r)};
}

// V^r = phi^2 * comparison_w; the bracket depends on the profiles alone
inline double comparison_w(const warped_metric& m, double r) {
    const background_terms b = background_at(m.a, r);
    const double u = m.u.eval(r), du = m.u.d1(r);
    return b.u0 * b.du0 / (u * u) + b.du0 / b.u0 - 2.0 * du / u;
}

inline double comparison_w_d1(const warped_metric& m, double r) {
    const background_terms b = background_at(m.a, r);
    const double u = m.u.eval(r), du = m.u.d1(r), ddu = m.u.d2(r);
    return (b.du0 * b.du0 + b.u0 * b.ddu0) / (u * u)
         - 2.0 * b.u0 * b.du0 * du / (u * u * u)
         + b.ddu0 / b.u0 - sqr(b.du0 / b.u0)
         - 2.0 * ddu / u + 2.0 * sqr(du / u);
}

} // namespace detail

// comparison field relative to the round background; only the radial
// component survives the warped-product symmetry
inline std::array<double, 3> lee_lefloch_V(const warped_metric& m, double r, double th) {
    require_interior(m, r);
    const double phi = m.phi.eval(r, th);
    return {phi * phi * detail::comparison_w(m, r), 0.0, 0.0};
}

// first-order curvature remainder: scalar curvature minus the background
// divergence of V.  Needs no second derivative of phi.
inline double lee_lefloch_F(const warped_metric& m, double r, double th) {
    require_interior(m, r);
    const detail::background_terms b = detail::background_at(m.a, r);
    const double u = m.u.eval(r), du = m.u.d1(r);
    const double phi = m.phi.eval(r, th);
    const std::array<double, 2> g = m.phi.grad(r, th);
    const double wv = detail::comparison_w(m, r);
    const double S = 2.0 * b.du0 * b.du0 / (u * u) + b.u0 * b.ddu0 / (u * u)
                   - 2.0 * du * b.du0 / (u * b.u0)
                   - 2.0 * b.u0 * b.du0 * du / (u * u * u)
                   + b.ddu0 / b.u0 + 2.0 * sqr(du / u);
    return -2.0 * (g[0] * g[0] + g[1] * g[1] / (u * u))
         - 2.0 * phi * g[0] * wv - phi * phi * S;
}

// divergence of V with respect to the background metric
inline double div_V(const warped_metric& m, double r, double th) {
    require_interior(m, r);
    const detail::background_terms b = detail::background_at(m.a, r);
    const double phi = m.phi.eval(r, th);
    const std::array<double, 2> g = m.phi.grad(r, th);
    const double wv = detail::comparison_w(m, r);
    const double vr = phi * phi * wv;
    const double dvr = 2.0 * phi * g[0] * wv + phi * phi * detail::comparison_w_d1(m, r);
    return vr * b.du0 / b.u0 + dvr;
}

struct pairing_result {
    double value = 0.0;         // equals interior_part
    double interior_part = 0.0;
    double boundary_part = 0.0;
    double epsilon = 0.0;
    double est_error = 0.0;
};

namespace detail {

// trapezoid sum over the two angles of w1(th)*dv/dr + w0(th)*v
template <typename Coef>
inline double angular_sum(const test_function& v, double r, Coef&& coef,
                          int n_th, int n_xi) {
    std::vector<double> th_vals(n_th);
    const double h_th = two_pi / n_th;
    for (int i = 0; i < n_th; ++i) {
        const double th = i * h_th;
        const std::pair<double, double> w = coef(th);
        if (v.xi_independent) {
            th_vals[i] = (w.first * v.grad(r, th, 0.0)[0] + w.second * v.eval(r, th, 0.0)) * two_pi;
        } else {
            std::vector<double> xi_vals(n_xi);
            const double h_xi = two_pi / n_xi;
            for (int j = 0; j < n_xi; ++j) {
                const double xi = j * h_xi;
                xi_vals[j] = w.first * v.grad(r, th, xi)[0] + w.second * v.eval(r, th, xi);
            }
            th_vals[i] = pairwise_sum(xi_vals) * h_xi;
        }
    }
    return pairwise_sum(th_vals) * h_th;
}

} // namespace detail

// raw boundary flux of the truncated integration by parts:
//   B(eps, v) = -oint V^r (u/phi) v  at r = eps,  + the mirror at r = a - eps
inline double boundary_term(const warped_metric& m, const test_function& v,
                            double eps, int n_th = 256, int n_xi = 64) {
    if (!(eps > 0.0 && eps < 0.5 * m.a))
        throw domain_error("boundary_term: eps outside (0, a/2)");
    auto face = [&](double r) -> double {
        const double u = m.u.eval(r);
        const double wv = detail::comparison_w(m, r);
        auto coef = [&](double th) -> std::pair<double, double> {
            return {0.0, m.phi.eval(r, th) * u * wv};
        };
        return detail::angular_sum(v, r, coef, n_th, n_xi);
    };
    return -face(eps) + face(m.a - eps);
}

// interior pairing over the truncated region eps <= r <= a - eps:
//   I(eps, v) = \int ( -V^r d_r(v u/(phi u0)) + F v u/(phi u0) ) dmu0
// adaptive in r, trapezoid in the angles (periodic-smooth integrands)
inline pairing_result pairing(const warped_metric& m, const test_function& v,
                              double eps, const quadrature_spec& spec = {},
                              int n_th = 128, int n_xi = 32) {
    if (!(eps > 0.0 && eps < 0.5 * m.a))
        throw domain_error("pairing: eps outside (0, a/2)");

    auto slice = [&](double r) -> double {
        const detail::background_terms b = detail::background_at(m.a, r);
        const double u = m.u.eval(r), du = m.u.d1(r);
        const double wv = detail::comparison_w(m, r);
        if (m.phi.radial_only && v.radial) {
            const double phi = m.phi.eval(r, 0.0);
            const double pr = m.phi.grad(r, 0.0)[0];
            const double J = u / (phi * b.u0);
            const double Jr = J * (du / u - pr / phi - b.du0 / b.u0);
            const double vr = phi * phi * wv;
            const double F = lee_lefloch_F(m, r, 0.0);
            const double val = v.eval(r, 0.0, 0.0), dval = v.grad(r, 0.0, 0.0)[0];
            return 4.0 * pi * pi * b.u0 * (-vr * (dval * J + val * Jr) + F * val * J);
        }
        auto coef = [&](double th) -> std::pair<double, double> {
            const double phi = m.phi.eval(r, th);
            const double pr = m.phi.grad(r, th)[0];
            const double J = u / (phi * b.u0);
            const double Jr = J * (du / u - pr / phi - b.du0 / b.u0);
            const double vr = phi * phi * wv;
            const double F = lee_lefloch_F(m, r, th);
            return {-vr * J, -vr * Jr + F * J};
        };
        return b.u0 * detail::angular_sum(v, r, coef, n_th, n_xi);
    };

    const quad_result q = integrate_segmented(slice, eps, m.a - eps, m.u.knots, spec);

    pairing_result out;
    out.interior_part = q.value;
    out.value = q.value;
    out.epsilon = eps;
    out.est_error = q.est_error;
    out.boundary_part = boundary_term(m, v, eps, std::max(2 * n_th, 128), std::max(2 * n_xi, 64));
    return out;
}

// one-sided majorant of the boundary flux for nonnegative v.  Uses
// u <= r and u'/u <= 1/r near the poles (concavity of the profile), so
//   B <= u(eps) [ 2/eps - u0 u0'/eps^2 - u0'/u0 ] oint phi v
// with the same bracket serving both faces.  Only an upper bound: deep
// fiber wells (u << u0) push B arbitrarily far negative, which is the
// harmless direction for the interior lower bound interior >= -bound.
inline double boundary_bound(const warped_metric& m, const test_function& v,
                             double eps, int n_th = 256, int n_xi = 64) {
    if (!(eps > 0.0 && eps < 0.5 * m.a))
        throw domain_error("boundary_bound: eps outside (0, a/2)");
    const detail::background_terms b = detail::background_at(m.a, eps);
    const double M = 2.0 / eps - b.u0 * b.du0 / (eps * eps) - b.du0 / b.u0;
    auto face = [&](double r) -> double {
        auto coef = [&](double th) -> std::pair<double, double> {
            return {0.0, m.phi.eval(r, th)};
        };
        // reuse the angular machinery; also police the sign assumption
        const double probe = v.eval(r, 0.0, 0.0);
        if (probe < -1e-12)
            throw domain_error("boundary_bound: test function must be nonnegative");
        return detail::angular_sum(v, r, coef, n_th, n_xi);
    };
    const double fm = face(eps), fp = face(m.a - eps);
    if (fm < -1e-9 || fp < -1e-9)
        throw domain_error("boundary_bound: test function must be nonnegative");
    return m.u.eval(eps) * M * fm + m.u.eval(m.a - eps) * M * fp;
}

// direct curvature pairing \int_{M_eps} Scalar v dmu_g; needs a classically
// smooth metric on the truncated region (masked points propagate)
inline quad_result scalar_pairing_direct(const warped_metric& m, const test_function& v,
                                         double eps, const quadrature_spec& spec = {},
                                         int n_th = 128, int n_xi = 32) {
    if (!(eps > 0.0 && eps < 0.5 * m.a))
        throw domain_error("scalar_pairing_direct: eps outside (0, a/2)");
    auto slice = [&](double r) -> double {
        if (m.phi.radial_only && v.radial) {
            const double sc = scalar_curvature(m, r, 0.0);
            const double dens = m.u.eval(r) / m.phi.eval(r, 0.0);
            return 4.0 * pi * pi * sc * v.eval(r, 0.0, 0.0) * dens;
        }
        auto coef = [&](double th) -> std::pair<double, double> {
            const double sc = scalar_curvature(m, r, th);
            const double dens = m.u.eval(r) / m.phi.eval(r, th);
            return {0.0, sc * dens};
        };
        return detail::angular_sum(v, r, coef, n_th, n_xi);
    };
    return integrate_segmented(slice, eps, m.a - eps, m.u.knots, spec);
}

struct extrapolation_result {
    double value = 0.0;
    double est_error = 0.0;
    std::array<double, 3> epsilons{};
    std::array<double, 3> interior{};
};

// interior pairing extrapolated to eps -> 0 over {eps0, eps0/2, eps0/4}:
// one stage against the eps^{3/2} boundary-decay model, one stage against
// the smooth eps^2 remainder
inline extrapolation_result pairing_extrapolated(const warped_metric& m,
                                                 const test_function& v, double eps0,
                                                 const quadrature_spec& spec = {},
                                                 int n_th = 128, int n_xi = 32) {
    extrapolation_result out;
    for (int i = 0; i < 3; ++i) {
        const double e = eps0 / (1 << i);
        out.epsilons[i] = e;
        out.interior[i] = pairing(m, v, e, spec, n_th, n_xi).interior_part;
    }
    const double c32 = std::pow(2.0, 1.5) - 1.0;
    const double r1a = out.interior[1] + (out.interior[1] - out.interior[0]) / c32;
    const double r1b = out.interior[2] + (out.interior[2] - out.interior[1]) / c32;
    out.value = r1b + (r1b - r1a) / 3.0;
    out.est_error = std::fabs(out.value - r1b);
    return out;
}

// decay table rows (eps, interior, boundary) for the truncation-rate plots
inline std::vector<std::array<double, 3>> pairing_decay_table(
    const warped_metric& m, const test_function& v, const std::vector<double>& eps_list,
    const quadrature_spec& spec = {}, int n_th = 128, int n_xi = 32) {
    std::vector<std::array<double, 3>> rows;
    rows.reserve(eps_list.size());
    for (double e : eps_list) {
        const pairing_result p = pairing(m, v, e, spec, n_th, n_xi);
        rows.push_back({e, p.interior_part, boundary_term(m, v, e, 2 * n_th, 2 * n_xi)});
    }
    return rows;
}

} // namespace warpgeo
