#pragma once

#include "warpgeo/common.hpp"

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace warpgeo {

enum class smoothness { smooth, piecewise_smooth };

// Uniform-grid cubic Hermite interpolant carrying values and exact first
// derivatives at the nodes (both supplied by the producing ODE integrator).
struct hermite_series {
    double s0 = 0.0;
    double ds = 1.0;
    std::vector<double> y, dy;

    double s_end() const { return s0 + ds * (static_cast<double>(y.size()) - 1.0); }

    int locate(double s) const {
        int n = static_cast<int>(y.size());
        if (n < 2) throw domain_error("hermite_series: need at least two nodes");
        double t = (s - s0) / ds;
        int i = static_cast<int>(std::floor(t));
        if (i < 0) i = 0;
        if (i > n - 2) i = n - 2;
        return i;
    }

    double eval(double s) const {
        int i = locate(s);
        double t = (s - (s0 + ds * i)) / ds;
        double h00 = ((2 * t - 3) * t) * t + 1;
        double h10 = ((t - 2) * t + 1) * t;
        double h01 = (3 - 2 * t) * t * t;
        double h11 = (t - 1) * t * t;
        return h00 * y[i] + h01 * y[i + 1] + ds * (h10 * dy[i] + h11 * dy[i + 1]);
    }

    double d1(double s) const {
        int i = locate(s);
        double t = (s - (s0 + ds * i)) / ds;
        double g00 = (6 * t - 6) * t;
        double g10 = (3 * t - 4) * t + 1;
        double g01 = (6 - 6 * t) * t;
        double g11 = (3 * t - 2) * t;
        return (g00 * y[i] + g01 * y[i + 1]) / ds + g10 * dy[i] + g11 * dy[i + 1];
    }

    double d2(double s) const {
        int i = locate(s);
        double t = (s - (s0 + ds * i)) / ds;
        return ((12 * t - 6) * (y[i] - y[i + 1]) / ds + (6 * t - 4) * dy[i] + (6 * t - 2) * dy[i + 1]) / ds;
    }
};

// One-dimensional radial profile u on [0, a].
struct radial_profile {
    double a = 0.0;
    smoothness smoothness_class = smoothness::smooth;
    std::function<double(double)> eval_fn, d1_fn, d2_fn;

    // serialization record
    std::string kind;
    std::vector<std::pair<std::string, double>> params;
    std::vector<double> knots, coeffs;

    void check_domain(double r) const {
        double slack = 1e-9 * a + 1e-12;
        if (!(r >= -slack && r <= a + slack))
            throw domain_error("radial_profile: r outside [0, a]");
    }

    double eval(double r) const {
        check_domain(r);
        return eval_fn(r);
    }
    double d1(double r) const {
        check_domain(r);
        return d1_fn(r);
    }
    double d2(double r) const {
        check_domain(r);
        return d2_fn(r);
    }
};

enum class singular_kind { empty, circle, points };

struct singular_descriptor {
    singular_kind kind = singular_kind::empty;
    double r0 = 0.0;                        // for circle r = r0
    std::vector<std::array<double, 2>> pts; // for isolated (r, θ) points

    bool contains(double r, double th, double tol = 1e-12) const {
        switch (kind) {
        case singular_kind::empty:
            return false;
        case singular_kind::circle:
            return std::fabs(r - r0) <= tol;
        case singular_kind::points:
            for (const auto& p : pts)
                if (std::fabs(r - p[0]) <= tol && std::fabs(wrap_angle(th - p[1])) <= tol)
                    return true;
            return false;
        }
        return false;
    }
};

// Two-dimensional warp factor φ(r, θ), 2π-periodic in θ.
struct warp_field {
    std::function<double(double, double)> eval_fn;
    std::function<std::array<double, 2>(double, double)> grad_fn;
    std::function<std::array<double, 3>(double, double)> hess_fn; // (rr, rθ, θθ)
    singular_descriptor singular_set;
    bool radial_only = false;

    std::string kind;
    std::vector<std::pair<std::string, double>> params;

    double eval(double r, double th) const { return eval_fn(r, th); }
    std::array<double, 2> grad(double r, double th) const { return grad_fn(r, th); }
    std::array<double, 3> hess(double r, double th) const {
        if (singular_set.contains(r, th))
            throw masked_point_error("warp_field: hessian queried on singular set");
        return hess_fn(r, th);
    }

    static warp_field constant(double value) {
        warp_field w;
        w.eval_fn = [value](double, double) { return value; };
        w.grad_fn = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
        w.hess_fn = [](double, double) { return std::array<double, 3>{0.0, 0.0, 0.0}; };
        w.radial_only = true;
        w.kind = "constant";
        w.params = {{"value", value}};
        return w;
    }
};

// φ(r,θ) = F(r) from radial callables.
inline warp_field make_radial_warp(std::function<double(double)> F,
                                   std::function<double(double)> dF,
                                   std::function<double(double)> ddF,
                                   std::string kind = "radial") {
    warp_field w;
    w.eval_fn = [F](double r, double) { return F(r); };
    w.grad_fn = [dF](double r, double) { return std::array<double, 2>{dF(r), 0.0}; };
    w.hess_fn = [ddF](double r, double) { return std::array<double, 3>{ddF(r), 0.0, 0.0}; };
    w.radial_only = true;
    w.kind = std::move(kind);
    return w;
}

// u(r) = (a/π) sin(πr/a): the round base of curvature 2(π/a)².
inline radial_profile make_round_profile(double a) {
    if (!(a > 0.0)) throw domain_error("make_round_profile: a must be positive");
    radial_profile p;
    p.a = a;
    p.smoothness_class = smoothness::smooth;
    double k = pi / a;
    p.eval_fn = [a, k](double r) { return (a / pi) * std::sin(k * r); };
    p.d1_fn = [k](double r) { return std::cos(k * r); };
    p.d2_fn = [a, k](double r) { return -k * std::sin(k * r); };
    p.kind = "round";
    p.params = {{"a", a}};
    return p;
}

// Rescale to domain length L: w(t) = (L/a) u(a t / L), endpoint slopes kept.
inline radial_profile normalize_profile(const radial_profile& p, double L) {
    if (!(L > 0.0)) throw domain_error("normalize_profile: L must be positive");
    if (L == p.a) return p;
    radial_profile q;
    q.a = L;
    q.smoothness_class = p.smoothness_class;
    double c = p.a / L;
    q.eval_fn = [p, c](double t) { return p.eval(c * t) / c; };
    q.d1_fn = [p, c](double t) { return p.d1(c * t); };
    q.d2_fn = [p, c](double t) { return c * p.d2(c * t); };
    q.kind = "normalized";
    q.params = {{"L", L}, {"a_original", p.a}};
    q.params.insert(q.params.end(), p.params.begin(), p.params.end());
    return q;
}

} // namespace warpgeo
