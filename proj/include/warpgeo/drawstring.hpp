#pragma once

#include "warpgeo/metric.hpp"
#include "warpgeo/smoothstep.hpp"

#include <memory>

namespace warpgeo {

struct drawstring_params {
    double A = 3.0;
    double ivp_tol = 1e-10;
    // monotone step, 0 for t ≤ 0 and 1 for t ≥ 1; defaults to the degree-7 polynomial
    std::function<double(double)> eta, eta_d1, eta_d2;
};

inline double drawstring_rho(double A) { return 0.1 * std::exp(-A * A * A); }

namespace detail {

struct drawstring_core {
    double A, rho, lambda, s0, s1;
    double ln2 = std::log(2.0);
    std::function<double(double)> eta, eta_d1, eta_d2;

    // well cutoff in s = ln r: ramps of width ln2 at both ends of [s0, s1]
    double psit(double s) const {
        return eta((s - s0) / ln2) * eta((s1 - s) / ln2);
    }
    double psit_d1(double s) const {
        return (eta_d1((s - s0) / ln2) * eta((s1 - s) / ln2) -
                eta((s - s0) / ln2) * eta_d1((s1 - s) / ln2)) / ln2;
    }

    // u/r and its s-derivative over the well; ∫ψ̃ with exact node slopes
    hermite_series W, Psi;
    double alpha1 = 1.0, beta1 = 0.0, u_tenth = 0.0;
    double cw_lo = 0.0, cw_hi = 0.0, wwin = 0.0, u_hi = 0.0;
};

inline void drawstring_validate_eta(const drawstring_core& c) {
    double prev = -1e-9;
    for (int i = 0; i <= 200; ++i) {
        double t = -0.2 + 1.4 * i / 200.0;
        double v = c.eta(t);
        if (v < -1e-9 || v > 1.0 + 1e-9 || v < prev - 1e-9)
            throw domain_error("drawstring: eta must be a monotone step into [0,1]");
        prev = v;
    }
    if (std::fabs(c.eta(0.0)) > 1e-9 || std::fabs(c.eta(1.0) - 1.0) > 1e-9)
        throw domain_error("drawstring: eta must run from 0 at t=0 to 1 at t=1");
}

inline std::shared_ptr<drawstring_core> drawstring_prepare(const drawstring_params& p,
                                                           bool solve_ivp) {
    if (!(p.A >= 1.0)) throw domain_error("drawstring: A must be at least 1");
    auto c = std::make_shared<drawstring_core>();
    c->A = p.A;
    c->eta = p.eta ? p.eta : [](double t) { return eta_step(t); };
    c->eta_d1 = p.eta_d1 ? p.eta_d1 : [](double t) { return eta_step_d1(t); };
    c->eta_d2 = p.eta_d2 ? p.eta_d2 : [](double t) { return s3_d2(t); };
    drawstring_validate_eta(*c);
    c->s0 = std::log(0.1) - p.A * p.A * p.A;
    c->s1 = std::log(0.1);
    c->rho = std::exp(c->s0);

    double range = c->s1 - c->s0;
    double ds_target = std::min(2e-3, std::max(1e-4, 1.8 * std::pow(p.ivp_tol, 0.25)));
    int n = static_cast<int>(std::ceil(range / ds_target));
    double ds = range / n;

    // ∫ψ̃ accumulated with per-step Gauss; node slopes are exact
    c->Psi.s0 = c->s0;
    c->Psi.ds = ds;
    c->Psi.y.resize(n + 1);
    c->Psi.dy.resize(n + 1);
    c->Psi.y[0] = 0.0;
    c->Psi.dy[0] = c->psit(c->s0);
    const auto& [gx, gw] = gauss_legendre(3);
    for (int i = 1; i <= n; ++i) {
        double a = c->s0 + (i - 1) * ds, mid = a + 0.5 * ds;
        double step = 0.0;
        for (int k = 0; k < 3; ++k) step += gw[k] * c->psit(mid + 0.5 * ds * gx[k]);
        c->Psi.y[i] = c->Psi.y[i - 1] + 0.5 * ds * step;
        c->Psi.dy[i] = c->psit(c->s0 + i * ds);
    }
    double I_psi = c->Psi.y[n];
    c->lambda = p.A / I_psi;
    if (!solve_ivp) return c;

    // W = u/r in s = ln r:  W'' + W' + λ²ψ̃²W = 0,  W(s0) = 1, W'(s0) = 0.
    // u' = W + W' must stay ≥ 1/2 and W > 0, else the construction fails.
    c->W.s0 = c->s0;
    c->W.ds = ds;
    c->W.y.resize(n + 1);
    c->W.dy.resize(n + 1);
    double la2 = c->lambda * c->lambda;
    auto rhs = [&](double s, double w, double dw) { return -dw - la2 * sqr(c->psit(s)) * w; };
    double w = 1.0, dw = 0.0;
    c->W.y[0] = w;
    c->W.dy[0] = dw;
    for (int i = 1; i <= n; ++i) {
        double s = c->s0 + (i - 1) * ds;
        double k1w = dw, k1v = rhs(s, w, dw);
        double k2w = dw + 0.5 * ds * k1v, k2v = rhs(s + 0.5 * ds, w + 0.5 * ds * k1w, dw + 0.5 * ds * k1v);
        double k3w = dw + 0.5 * ds * k2v, k3v = rhs(s + 0.5 * ds, w + 0.5 * ds * k2w, dw + 0.5 * ds * k2v);
        double k4w = dw + ds * k3v, k4v = rhs(s + ds, w + ds * k3w, dw + ds * k3v);
        w += ds / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        dw += ds / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        c->W.y[i] = w;
        c->W.dy[i] = dw;
        double r_here = std::exp(c->s0 + i * ds);
        if (!(w > 0.0))
            throw construction_error("drawstring: profile lost positivity at r = " +
                                     std::to_string(r_here));
        if (w + dw < 0.5)
            throw construction_error("drawstring: profile slope fell below 1/2 at r = " +
                                     std::to_string(r_here));
    }

    c->alpha1 = w + dw;          // u' is constant on [1/10, 1/5]
    c->u_tenth = 0.1 * w;        // u(1/10) = r·W
    c->beta1 = c->u_tenth + 0.1 * c->alpha1;

    // concave tail: slope descends from alpha1 to -1 across one smoothstep
    // window placed so that u(2) = 0 exactly
    double cstar = (2.0 + 0.2 * c->alpha1 - c->beta1) / (1.0 + c->alpha1);
    if (!(cstar > 0.2 && cstar < 1.8))
        throw construction_error("drawstring: tail window center outside (1/5, 9/5)");
    c->wwin = 2.0 * std::min(cstar - 0.2, 1.8 - cstar);
    c->cw_lo = cstar - 0.5 * c->wwin;
    c->cw_hi = cstar + 0.5 * c->wwin;
    c->u_hi = c->beta1 + c->alpha1 * (c->cw_lo - 0.2) +
              c->wwin * (c->alpha1 - 0.5 * (1.0 + c->alpha1));
    return c;
}

} // namespace detail

// λ = A / ∫ ψ̃ d(ln r): the well-depth normalizer; λ ≥ 1/A² always.
inline double lambda_of(const drawstring_params& p) {
    return detail::drawstring_prepare(p, false)->lambda;
}

// Metric on [0,2] with a deep thin fiber well: φ = e^f drops to e^{-A} below
// r = ρ = e^{-A³}/10, and u solves u'' = -|f'|²u through the well, then closes
// concavely with u = 2-r near the far pole.
inline warped_metric build_drawstring(const drawstring_params& p) {
    auto c = detail::drawstring_prepare(p, true);

    radial_profile u;
    u.a = 2.0;
    u.smoothness_class = smoothness::piecewise_smooth;
    u.kind = "drawstring_base";
    u.params = {{"A", c->A}, {"rho", c->rho}, {"lambda", c->lambda},
                {"alpha1", c->alpha1}, {"beta1", c->beta1}};
    u.knots = {0.0, c->rho, 0.1, 0.2, c->cw_lo, c->cw_hi, 2.0};
    u.eval_fn = [c](double r) {
        if (r <= 0.0) return 0.0;
        if (r < 0.1) {
            double s = std::log(r);
            if (s <= c->s0) return r;
            return r * c->W.eval(s);
        }
        if (r < 0.2) return c->u_tenth + c->alpha1 * (r - 0.1);
        if (r < c->cw_lo) return c->beta1 + c->alpha1 * (r - 0.2);
        if (r < c->cw_hi) {
            double x = (r - c->cw_lo) / c->wwin;
            return c->beta1 + c->alpha1 * (c->cw_lo - 0.2) +
                   c->wwin * (c->alpha1 * x - (1.0 + c->alpha1) * s3_int(x));
        }
        return c->u_hi - (r - c->cw_hi);
    };
    u.d1_fn = [c](double r) {
        if (r <= 0.0) return 1.0;
        if (r < 0.1) {
            double s = std::log(r);
            if (s <= c->s0) return 1.0;
            return c->W.eval(s) + c->W.d1(s);
        }
        if (r < c->cw_lo) return c->alpha1;
        if (r < c->cw_hi) {
            double x = (r - c->cw_lo) / c->wwin;
            return c->alpha1 - (1.0 + c->alpha1) * s3(x);
        }
        return -1.0;
    };
    u.d2_fn = [c](double r) {
        if (r <= 0.0) return 0.0;
        if (r < 0.1) {
            double s = std::log(r);
            if (s <= c->s0) return 0.0;
            // u'' = -f'² u exactly, avoiding spline second differences
            return -sqr(c->lambda * c->psit(s)) * c->W.eval(s) / r;
        }
        if (r < c->cw_lo) return 0.0;
        if (r < c->cw_hi) {
            double x = (r - c->cw_lo) / c->wwin;
            return -(1.0 + c->alpha1) * s3_d1(x) / c->wwin;
        }
        return 0.0;
    };

    auto fval = [c](double r) {
        if (r <= 0.0) return -c->A;
        double s = std::log(r);
        if (s <= c->s0) return -c->A;
        if (s < c->s1) return -c->A + c->lambda * c->Psi.eval(s);
        return 0.0;
    };
    auto fd1 = [c](double r) {
        if (r <= 0.0) return 0.0;
        double s = std::log(r);
        if (s <= c->s0 || s >= c->s1) return 0.0;
        return c->lambda * c->psit(s) / r;
    };
    auto fd2 = [c](double r) {
        if (r <= 0.0) return 0.0;
        double s = std::log(r);
        if (s <= c->s0 || s >= c->s1) return 0.0;
        return c->lambda * (c->psit_d1(s) - c->psit(s)) / (r * r);
    };
    warp_field phi = make_radial_warp(
        [fval](double r) { return std::exp(fval(r)); },
        [fval, fd1](double r) { return fd1(r) * std::exp(fval(r)); },
        [fval, fd1, fd2](double r) {
            double d1 = fd1(r);
            return (fd2(r) + d1 * d1) * std::exp(fval(r));
        },
        "drawstring_warp");
    phi.params = {{"A", c->A}, {"lambda", c->lambda}};

    warped_metric m = make_warped_metric(std::move(u), std::move(phi), "drawstring");
    m.params = {{"A", c->A}, {"rho", c->rho}, {"lambda", c->lambda},
                {"alpha1", c->alpha1}, {"beta1", c->beta1},
                {"window_lo", c->cw_lo}, {"window_hi", c->cw_hi}};
    return m;
}

} // namespace warpgeo
