#pragma once

#include "warpgeo/metric.hpp"
#include "warpgeo/profiles.hpp"
#include "warpgeo/quadrature.hpp"

#include <random>

namespace warpgeo {

// concave profile density μ = -w''  built from raised-cosine bumps:
// B(x) = a·(1+cos(πx/σ))/2 on |x| ≤ σ, C¹ with closed-form moments
struct cosine_bump {
    double c, s, a; // center, half-width, amplitude
};

namespace detail {

inline double bump_val(double x, double s) {
    if (std::fabs(x) >= s) return 0.0;
    return 0.5 * (1.0 + std::cos(pi * x / s));
}

// antiderivative of bump_val, pinned to 0 at x = -s
inline double bump_int(double x, double s) {
    if (x <= -s) return 0.0;
    if (x >= s) return s;
    return 0.5 * (x + s) + (s / (2.0 * pi)) * std::sin(pi * x / s);
}

// antiderivative of x·bump_val(x); constant plateau on both sides of the support
inline double bump_moment(double x, double s) {
    double xc = std::clamp(x, -s, s);
    return 0.25 * xc * xc + (s / (2.0 * pi)) * xc * std::sin(pi * xc / s)
         + (s * s / (2.0 * pi * pi)) * std::cos(pi * xc / s);
}

} // namespace detail

struct concave_density {
    double base = 0.0;
    std::vector<cosine_bump> bumps;

    double mu(double t) const {
        double v = base;
        for (const auto& b : bumps) v += b.a * detail::bump_val(t - b.c, b.s);
        return v;
    }
    // ∫₀ᵗ μ
    double mu_int(double t) const {
        double v = base * t;
        for (const auto& b : bumps)
            v += b.a * (detail::bump_int(t - b.c, b.s) - detail::bump_int(-b.c, b.s));
        return v;
    }
    // ∫₀ᵗ s·μ(s) ds
    double mu_moment(double t) const {
        double v = 0.5 * base * t * t;
        for (const auto& b : bumps)
            v += b.a * (b.c * (detail::bump_int(t - b.c, b.s) - detail::bump_int(-b.c, b.s))
                        + detail::bump_moment(t - b.c, b.s) - detail::bump_moment(-b.c, b.s));
        return v;
    }

    double w(double t) const { return t - t * mu_int(t) + mu_moment(t); }
    double dw(double t) const { return 1.0 - mu_int(t); }
    double ddw(double t) const { return -mu(t); }
};

struct admissible_pair {
    radial_profile w;
    bool mean_zero = true;
    double mean_shift = 0.0;
    std::function<double(double)> f_radial;
    std::function<double(double)> f_radial_d1;

    double f(double r, double) const { return f_radial(r); }
    std::array<double, 2> grad_f(double r, double) const {
        return {f_radial_d1(r), 0.0};
    }
};

namespace detail {

inline radial_profile profile_from_density(const concave_density& d, uint64_t seed,
                                           double roughness) {
    radial_profile p;
    p.a = 2.0;
    p.smoothness_class = smoothness::piecewise_smooth;
    p.eval_fn = [d](double t) { return d.w(t); };
    p.d1_fn = [d](double t) { return d.dw(t); };
    p.d2_fn = [d](double t) { return d.ddw(t); };
    p.kind = "sampled_concave";
    p.params = {{"seed", static_cast<double>(seed)},
                {"roughness", roughness},
                {"base", d.base}};
    for (const auto& b : d.bumps) {
        p.coeffs.push_back(b.c);
        p.coeffs.push_back(b.s);
        p.coeffs.push_back(b.a);
    }
    return p;
}

} // namespace detail

// Random admissible (w, f): concave w on [0,2] with endpoint slopes ±1 and a
// radial field obeying |f'|² ≤ -w''/w pointwise, shifted to mean zero in the
// measure w·dr·dθ.  Deterministic per (seed, roughness).
inline admissible_pair sample_admissible_pair(uint64_t seed, double roughness) {
    if (!(roughness >= 0.0 && roughness <= 1.0))
        throw domain_error("sample_admissible_pair: roughness outside [0,1]");

    if (roughness == 0.0) {
        admissible_pair pair;
        pair.w = normalize_profile(make_round_profile(pi), 2.0);
        pair.w.params.insert(pair.w.params.begin(),
                             {{"seed", static_cast<double>(seed)}, {"roughness", 0.0}});
        pair.f_radial = [](double) { return 0.0; };
        pair.f_radial_d1 = [](double) { return 0.0; };
        pair.mean_zero = true;
        return pair;
    }

    std::mt19937_64 gen(seed);
    double rough = roughness;
    concave_density density;
    bool ok = false;
    while (!ok) {
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            int nb = 3 + static_cast<int>(std::floor(5.0 * rough));
            concave_density d;
            d.base = 0.05;
            for (int j = 0; j < nb; ++j) {
                double c = 0.15 + 1.7 * detail::uniform01(gen);
                double smax = std::min({0.5, c - 0.02, 1.98 - c});
                double s = 0.1 + (smax - 0.1) * detail::uniform01(gen);
                double a = 0.35 * rough * detail::uniform01(gen);
                d.bumps.push_back({c, s, a});
            }
            // two fixed-shape correction bumps enforce ∫μ = 2 and ∫ s·μ = 2,
            // which pins w(2) = 0 and w'(2) = -1
            double P0 = d.mu_int(2.0), P1 = d.mu_moment(2.0);
            double S = (2.0 - P0) / 0.45;
            double T = 2.0 - P1;
            double d2 = (T - 0.225 * S) / 0.45;
            double d1 = S - d2;
            d.bumps.push_back({0.5, 0.45, d1});
            d.bumps.push_back({1.5, 0.45, d2});
            bool positive = true;
            for (int i = 0; i <= 2000 && positive; ++i)
                positive = d.mu(2.0 * i / 2000.0) > 1e-6;
            if (positive) {
                density = d;
                ok = true;
            }
        }
        if (!ok) rough *= 0.5;
    }

    // slope modulator: bounded sine mixture scaled by roughness
    std::array<double, 3> amp{}, phase{};
    double norm = 0.0;
    for (int m = 0; m < 3; ++m) {
        amp[m] = 2.0 * detail::uniform01(gen) - 1.0;
        phase[m] = two_pi * detail::uniform01(gen);
        norm += std::fabs(amp[m]);
    }
    auto cmod = [amp, phase, norm, rough](double t) {
        double v = 0.0;
        for (int m = 0; m < 3; ++m)
            v += amp[m] * std::sin((m + 1) * pi * t / 2.0 + phase[m]);
        return rough * v / norm;
    };

    // f'(t) = c(t)·√(μ/w); accumulate f in √-charts where the endpoint
    // singularity t^{-1/2} flattens to a smooth integrand
    auto slope = [&](double t) { return cmod(t) * std::sqrt(density.mu(t) / density.w(t)); };
    const int n_nodes = 2001;
    auto accumulate_chart = [&](bool left) {
        hermite_series h;
        h.s0 = 0.0;
        h.ds = 1.0 / (n_nodes - 1);
        h.y.resize(n_nodes);
        h.dy.resize(n_nodes);
        auto g = [&](double tau) {
            double t = left ? tau * tau : 2.0 - tau * tau;
            double sgn = left ? 1.0 : -1.0;
            if (tau < 1e-12) {
                double t0 = left ? 0.0 : 2.0;
                return sgn * 2.0 * tau * cmod(t0) * std::sqrt(density.mu(t0));
            }
            return sgn * 2.0 * tau * slope(t);
        };
        h.y[0] = 0.0;
        h.dy[0] = g(0.0);
        const auto& [gx, gw] = gauss_legendre(3);
        for (int i = 1; i < n_nodes; ++i) {
            double a = (i - 1) * h.ds, b = i * h.ds;
            double c = 0.5 * (a + b), hw = 0.5 * (b - a);
            double step = 0.0;
            for (int k = 0; k < 3; ++k) step += gw[k] * g(c + hw * gx[k]);
            h.y[i] = h.y[i - 1] + step * hw;
            h.dy[i] = g(b);
        }
        return h;
    };
    hermite_series Fl = accumulate_chart(true);
    hermite_series Fr = accumulate_chart(false);
    double Fl1 = Fl.y[n_nodes - 1], Fr1 = Fr.y[n_nodes - 1];

    auto f_hat = [Fl, Fr, Fl1, Fr1](double t) {
        if (t <= 1.0) return Fl.eval(std::sqrt(std::max(t, 0.0))) - Fl1;
        return Fr.eval(std::sqrt(std::max(2.0 - t, 0.0))) - Fr1;
    };

    quadrature_spec qs;
    qs.rel_tol = 1e-10;
    double area = integrate_adaptive([&](double t) { return density.w(t); }, 0.0, 2.0, qs).value;
    double fint = integrate_adaptive([&](double t) { return f_hat(t) * density.w(t); }, 0.0, 2.0, qs).value;
    double shift = fint / area;

    admissible_pair pair;
    pair.w = detail::profile_from_density(density, seed, roughness);
    pair.mean_shift = shift;
    pair.f_radial = [f_hat, shift](double t) { return f_hat(t) - shift; };
    pair.f_radial_d1 = [density, cmod](double t) {
        return cmod(t) * std::sqrt(density.mu(t) / density.w(t));
    };
    pair.mean_zero = true;
    return pair;
}

// the warped metric (u, phi) = (w, e^f) realized by a sampled pair.  The
// second derivative of e^f is taken by differences with the probe clamped
// away from the poles, where f' is unbounded; curvature consumers only read
// the gradient, so the clamp never surfaces.
inline warped_metric pair_metric(const admissible_pair& pr) {
    auto f = pr.f_radial;
    auto df = pr.f_radial_d1;
    const double a = pr.w.a;
    auto F = [f](double r) { return std::exp(f(r)); };
    auto dF = [f, df](double r) { return df(r) * std::exp(f(r)); };
    auto ddF = [f, df, a](double r) {
        const double h = 1e-5;
        const double rc = std::clamp(r, 2.0 * h, a - 2.0 * h);
        const double d2 = (df(rc + h) - df(rc - h)) / (2.0 * h);
        return (d2 + df(r) * df(r)) * std::exp(f(r));
    };
    return make_warped_metric(pr.w, make_radial_warp(F, dF, ddF, "exp_profile"),
                              "sampled_pair");
}

} // namespace warpgeo
