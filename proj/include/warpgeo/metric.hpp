#pragma once

#include "warpgeo/profiles.hpp"
#include "warpgeo/quadrature.hpp"

#include <limits>

namespace warpgeo {

struct metric_components {
    double g_rr, g_thth, g_xixi;
};

// Round product dr² + u₀² dθ² + dξ² with u₀(r) = (a/π) sin(πr/a).
// Exactly two nonzero Christoffel families.
struct background_metric {
    double a = pi;
    radial_profile u0;

    double scalar() const { return 2.0 * sqr(pi / a); }
    double gamma_r_thth(double r) const { return -u0.eval(r) * u0.d1(r); }
    double gamma_th_rth(double r) const { return u0.d1(r) / u0.eval(r); }
    double volume_element(double r) const { return u0.eval(r); }
};

inline background_metric make_background(double a) {
    return {a, make_round_profile(a)};
}

// g = φ⁻²(dr² + u² dθ²) + φ² dξ² on S²×S¹.
struct warped_metric {
    radial_profile u;
    warp_field phi;
    double a = 0.0;
    std::string family = "custom";
    std::vector<std::pair<std::string, double>> params;

    bool smooth_mask(double r, double th) const {
        return !phi.singular_set.contains(r, th);
    }
    double param(const std::string& name) const {
        for (const auto& kv : params)
            if (kv.first == name) return kv.second;
        throw domain_error("warped_metric: no parameter '" + name + "'");
    }
    // density of dμ_g relative to dr dθ dξ
    double volume_element(double r, double th) const {
        return u.eval(r) / phi.eval(r, th);
    }
};

inline warped_metric make_warped_metric(radial_profile u, warp_field phi,
                                        std::string family = "custom") {
    warped_metric m;
    m.a = u.a;
    m.u = std::move(u);
    m.phi = std::move(phi);
    m.family = std::move(family);
    return m;
}

inline void require_interior(const warped_metric& m, double r) {
    if (!(r > 1e-9 && r < m.a - 1e-9))
        throw domain_error("coordinate degeneracy: r within 1e-9 of a pole");
}

// Components are well-conditioned arbitrarily close to the poles (u enters
// only as a factor), so only strict interiority is demanded here; operations
// that divide by u keep the 1e-9 margin of require_interior.
inline metric_components metric_at(const warped_metric& m, double r, double th) {
    if (!(r > 0.0 && r < m.a))
        throw domain_error("coordinate degeneracy: r at a pole");
    double phi = m.phi.eval(r, th);
    double u = m.u.eval(r);
    double ip2 = 1.0 / (phi * phi);
    return {ip2, ip2 * u * u, phi * phi};
}

// Scalar = φ²(−2u″/u) − 2(φ_r² + φ_θ²/u²)
inline double scalar_curvature(const warped_metric& m, double r, double th) {
    require_interior(m, r);
    if (!m.smooth_mask(r, th))
        throw masked_point_error("scalar_curvature: point on singular set");
    double u = m.u.eval(r), ddu = m.u.d2(r);
    double phi = m.phi.eval(r, th);
    auto g = m.phi.grad(r, th);
    return phi * phi * (-2.0 * ddu / u) - 2.0 * (g[0] * g[0] + g[1] * g[1] / (u * u));
}

// Ric(∂_r, ∂_θ) against the normalized frame: −φ_{rθ}/φ − 2φ_rφ_θ/φ² + (φ_θ/φ)(u′/u)
inline double ricci_mixed_rth(const warped_metric& m, double r, double th) {
    require_interior(m, r);
    double u = m.u.eval(r), du = m.u.d1(r);
    double phi = m.phi.eval(r, th);
    auto g = m.phi.grad(r, th);
    auto h = m.phi.hess(r, th); // throws masked_point_error on the singular set
    return -h[1] / phi - 2.0 * g[0] * g[1] / (phi * phi) + (g[1] / phi) * (du / u);
}

// Γ[k][i][j], coordinates (0,1,2) = (r,θ,ξ); symmetric in (i,j) by storage.
struct christoffel_symbols {
    double g[3][3][3] = {};
    double operator()(int k, int i, int j) const { return g[k][i][j]; }
    void set(int k, int i, int j, double v) {
        g[k][i][j] = v;
        g[k][j][i] = v;
    }
};

// First-order difference tensor against the round background of the same
// domain length: ½ g^{kl}(∇̄_i g_{jl} + ∇̄_j g_{il} − ∇̄_l g_{ij}).
// Identically zero when (u, φ) is the background itself.
inline christoffel_symbols difference_christoffel(const warped_metric& m, double r, double th) {
    require_interior(m, r);
    if (!m.smooth_mask(r, th))
        throw masked_point_error("difference_christoffel: point on singular set");
    double u = m.u.eval(r), du = m.u.d1(r);
    double phi = m.phi.eval(r, th);
    auto gr = m.phi.grad(r, th);
    double pr = gr[0] / phi, pt = gr[1] / phi; // φ_r/φ, φ_θ/φ
    double k0 = pi / m.a;
    double v0 = (m.a / pi) * std::sin(k0 * r), dv0 = std::cos(k0 * r);
    christoffel_symbols G;
    G.set(0, 0, 0, -pr);
    G.set(0, 1, 1, -u * du + u * u * pr + v0 * dv0);
    G.set(0, 2, 2, -phi * phi * phi * gr[0]);
    G.set(0, 0, 1, -pt);
    G.set(1, 0, 0, gr[1] / (u * u * phi));
    G.set(1, 1, 1, -pt);
    G.set(1, 2, 2, -phi * phi * phi * gr[1] / (u * u));
    G.set(1, 0, 1, du / u - pr - dv0 / v0);
    G.set(2, 0, 2, pr);
    G.set(2, 1, 2, pt);
    return G;
}

// Full Levi-Civita symbols, assembled as background plus difference tensor.
inline christoffel_symbols christoffel(const warped_metric& m, double r, double th) {
    christoffel_symbols G = difference_christoffel(m, r, th);
    double k0 = pi / m.a;
    double v0 = (m.a / pi) * std::sin(k0 * r), dv0 = std::cos(k0 * r);
    G.set(0, 1, 1, G(0, 1, 1) - v0 * dv0);
    G.set(1, 0, 1, G(1, 0, 1) + dv0 / v0);
    return G;
}

// Cross-check oracle: Γ from central finite differences of the components.
inline christoffel_symbols christoffel_fd(const warped_metric& m, double r, double th,
                                          double h = 0.0) {
    require_interior(m, r);
    if (h <= 0.0) h = std::cbrt(std::numeric_limits<double>::epsilon());
    auto comps = [&](double rr, double tt) {
        metric_components c = metric_at(m, rr, tt);
        return std::array<double, 3>{c.g_rr, c.g_thth, c.g_xixi};
    };
    std::array<double, 3> g = comps(r, th);
    // dg[l][c] = ∂_l g_cc ; ξ-derivatives vanish
    double dg[3][3] = {};
    auto gp = comps(r + h, th), gm = comps(r - h, th);
    auto tp = comps(r, th + h), tm = comps(r, th - h);
    for (int c = 0; c < 3; ++c) {
        dg[0][c] = (gp[c] - gm[c]) / (2.0 * h);
        dg[1][c] = (tp[c] - tm[c]) / (2.0 * h);
    }
    christoffel_symbols G;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                double v = 0.5 / g[k] * ((i == k ? dg[j][k] : 0.0) + (j == k ? dg[i][k] : 0.0) -
                                         (k < 2 && i == j ? dg[k][i] : 0.0));
                G.set(k, i, j, v);
            }
    return G;
}

// Mean curvature of the torus {r = const}: H(θ) = φ(r,θ) u′(r)/u(r)
inline std::function<double(double)> torus_mean_curvature(const warped_metric& m, double r) {
    require_interior(m, r);
    double ratio = m.u.d1(r) / m.u.eval(r);
    const warp_field& phi = m.phi;
    return [phi, r, ratio](double th) { return phi.eval(r, th) * ratio; };
}

// |½·2π ∫ (−2u″/u)·u dr − 4π|: Gauss-Bonnet defect of the base profile.
inline double gauss_bonnet_residual(const warped_metric& m) {
    quadrature_spec qs;
    qs.rel_tol = 1e-10;
    double total =
        integrate_segmented([&](double r) { return -m.u.d2(r); }, 0.0, m.a, m.u.knots, qs).value;
    return std::fabs(2.0 * pi * total - 4.0 * pi);
}

} // namespace warpgeo
