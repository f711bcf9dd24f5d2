#pragma once

#include "warpgeo/metric.hpp"
#include "warpgeo/smoothstep.hpp"

namespace warpgeo {

enum class region_tag { zero, transition, pure_plus, pure_minus };

struct c1alpha_params {
    double alpha = 0.5;
    double k = 1.0;
    // interpolation step on [0,1]; budgets |b'| ≤ 10, |b''| ≤ 100
    std::function<double(double)> b, b_d1, b_d2;
};

struct psi_alpha_result {
    double value = 0.0, dr = 0.0, dth = 0.0;
    double drr = 0.0, drth = 0.0, dthth = 0.0;
    region_tag region = region_tag::zero;
};

// K*(α) = (1+α²)/(1−α²) · (arctan(1/α) − arctan α): the t⁵-coefficient
// sign threshold for the wedge experiment.
inline double kstar(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("kstar: alpha outside (0,1)");
    return (1.0 + alpha * alpha) / (1.0 - alpha * alpha) *
           (std::atan(1.0 / alpha) - std::atan(alpha));
}

// the three-way cap on the cutoff radius of the warp perturbation
inline double rho_star(double alpha, double k) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("rho_star: alpha outside (0,1)");
    double ak = 1.0 + std::fabs(k);
    double c = std::sqrt(1.0 + sqr(1.0 / std::cos(0.5)));
    return std::min({0.25, 1.0 / (4.0 * ak), 1.0 / (4.0 * ak * (15.0 + 10.0 / alpha) * c)});
}

namespace detail {

struct b_eval {
    double v = 0.0;   // bare argument; only consumed next to its own db/ddb
    double b = 0.0, db = 0.0, ddb = 0.0;
};

// classify one cutoff argument from its logarithm without forming exp(ln)
// when the value is off-ramp (it may overflow there)
template <class F1, class F2, class F3>
b_eval eval_ramp(double lnx, const F1& bf, const F2& bd1, const F3& bd2) {
    b_eval e;
    if (lnx <= -std::log(2.0)) return e;       // x ≤ 1/2: cutoff dead
    if (lnx >= 0.0) {                          // x ≥ 1: cutoff saturated
        e.b = 1.0;
        return e;
    }
    e.v = std::exp(lnx);
    e.b = bf(e.v);
    e.db = bd1(e.v);
    e.ddb = bd2(e.v);
    return e;
}

} // namespace detail

// ψ_α(r,θ) = |rθ| b(|θ|/|r|^{1/α}) b(|r|/|θ|^{1/α}) with value 0 on the axes;
// full derivative set via the quotient rules, region classification included.
inline psi_alpha_result psi_alpha_full(const c1alpha_params& p, double r, double th) {
    if (r == 0.0 && th == 0.0)
        throw masked_point_error("psi_alpha: origin is the singular point");
    psi_alpha_result out;
    if (r == 0.0 || th == 0.0) return out; // zero region includes the punctured axes

    double alpha = p.alpha;
    auto bf = p.b ? p.b : [](double t) { return bump_b(t); };
    auto bd1 = p.b_d1 ? p.b_d1 : [](double t) { return bump_b_d1(t); };
    auto bd2 = p.b_d2 ? p.b_d2 : [](double t) { return bump_b_d2(t); };

    double ax = std::fabs(r), ay = std::fabs(th);
    double sg = (r > 0) == (th > 0) ? 1.0 : -1.0;
    double lnA = std::log(ay) - std::log(ax) / alpha;
    double lnB = std::log(ax) - std::log(ay) / alpha;

    double lhalf = -std::log(2.0);
    if (lnA <= lhalf || lnB <= lhalf) return out;
    if (lnA >= 0.0 && lnB >= 0.0) {
        out.value = ax * ay;
        out.dr = sg * th;
        out.dth = sg * r;
        out.drth = sg;
        out.region = sg > 0 ? region_tag::pure_plus : region_tag::pure_minus;
        return out;
    }

    detail::b_eval A = detail::eval_ramp(lnA, bf, bd1, bd2);
    detail::b_eval B = detail::eval_ramp(lnB, bf, bd1, bd2);
    double ia = 1.0 / alpha;

    double Qr = A.b * B.b - (A.v * ia) * A.db * B.b + B.v * A.b * B.db;
    double Qt = A.b * B.b + A.v * A.db * B.b - (B.v * ia) * A.b * B.db;
    double dQr_dA = (1.0 - ia) * A.db * B.b - (A.v * ia) * A.ddb * B.b + B.v * A.db * B.db;
    double dQr_dB = 2.0 * A.b * B.db - (A.v * ia) * A.db * B.db + B.v * A.b * B.ddb;
    double dQt_dA = 2.0 * A.db * B.b + A.v * A.ddb * B.b - (B.v * ia) * A.db * B.db;
    double dQt_dB = (1.0 - ia) * A.b * B.db + A.v * A.db * B.db - (B.v * ia) * A.b * B.ddb;

    out.value = ax * ay * A.b * B.b;
    out.dr = sg * th * Qr;
    out.dth = sg * r * Qt;
    out.drr = sg * th * (-(A.v * ia / r) * dQr_dA + (B.v / r) * dQr_dB);
    out.drth = sg * (Qr + A.v * dQr_dA - (B.v * ia) * dQr_dB);
    out.dthth = sg * r * ((A.v / th) * dQt_dA - (B.v * ia / th) * dQt_dB);
    out.region = region_tag::transition;
    return out;
}

// value, first derivatives, and region; the origin raises instead
inline psi_alpha_result psi_alpha_eval(const c1alpha_params& p, double r, double th) {
    return psi_alpha_full(p, r, th);
}

// the continuous-extension values at the singular origin
inline psi_alpha_result psi_alpha_origin() { return {}; }

// χ(x,y) scaled to plateau [−ρ,ρ]², support [−2ρ,2ρ]², with derivatives
struct plateau_cutoff {
    double rho = 1.0;
    double eval(double x, double y) const {
        return plateau_c(x / rho) * plateau_c(y / rho);
    }
    std::array<double, 2> grad(double x, double y) const {
        return {plateau_c_d1(x / rho) * plateau_c(y / rho) / rho,
                plateau_c(x / rho) * plateau_c_d1(y / rho) / rho};
    }
    std::array<double, 3> hess(double x, double y) const {
        double r2 = rho * rho;
        return {plateau_c_d2(x / rho) * plateau_c(y / rho) / r2,
                plateau_c_d1(x / rho) * plateau_c_d1(y / rho) / r2,
                plateau_c(x / rho) * plateau_c_d2(y / rho) / r2};
    }
};

// φ = 1 + k χ_{ρ*} ψ_α in chart coordinates centered at the singular point;
// native accessors avoid the polar-offset round trip in Jacobian work.
struct c1alpha_field {
    c1alpha_params params;
    double rho_star_val = 0.0;
    plateau_cutoff chi;

    bool in_support(double x, double y) const {
        return std::fabs(x) < 2.0 * rho_star_val && std::fabs(y) < 2.0 * rho_star_val;
    }
    bool singular(double x, double y) const { return x == 0.0 && y == 0.0; }

    double eval(double x, double y) const {
        if (!in_support(x, y) || singular(x, y)) return 1.0;
        psi_alpha_result psi = psi_alpha_full(params, x, y);
        return 1.0 + params.k * chi.eval(x, y) * psi.value;
    }
    std::array<double, 2> grad(double x, double y) const {
        if (!in_support(x, y) || singular(x, y)) return {0.0, 0.0};
        psi_alpha_result psi = psi_alpha_full(params, x, y);
        double cv = chi.eval(x, y);
        auto cg = chi.grad(x, y);
        return {params.k * (cg[0] * psi.value + cv * psi.dr),
                params.k * (cg[1] * psi.value + cv * psi.dth)};
    }
    std::array<double, 3> hess(double x, double y) const {
        if (singular(x, y))
            throw masked_point_error("c1alpha: hessian queried at the singular point");
        if (!in_support(x, y)) return {0.0, 0.0, 0.0};
        psi_alpha_result psi = psi_alpha_full(params, x, y);
        double cv = chi.eval(x, y);
        auto cg = chi.grad(x, y);
        auto ch = chi.hess(x, y);
        double k = params.k;
        return {k * (ch[0] * psi.value + 2.0 * cg[0] * psi.dr + cv * psi.drr),
                k * (ch[1] * psi.value + cg[0] * psi.dth + cg[1] * psi.dr + cv * psi.drth),
                k * (ch[2] * psi.value + 2.0 * cg[1] * psi.dth + cv * psi.dthth)};
    }
};

inline c1alpha_field make_c1alpha_field(const c1alpha_params& p) {
    if (!(p.alpha > 0.0 && p.alpha < 1.0))
        throw domain_error("c1alpha: alpha outside (0,1)");
    if (p.b) {
        if (!p.b_d1 || !p.b_d2)
            throw domain_error("c1alpha: custom b requires both derivative callables");
        for (int i = 0; i <= 1000; ++i) {
            double t = i / 1000.0;
            if (std::fabs(p.b_d1(t)) > 10.0 + 1e-9 || std::fabs(p.b_d2(t)) > 100.0 + 1e-9)
                throw domain_error("c1alpha: custom b exceeds derivative budgets");
        }
    }
    c1alpha_field f;
    f.params = p;
    f.rho_star_val = rho_star(p.alpha, p.k);
    f.chi.rho = f.rho_star_val;
    return f;
}

// Full metric: round base u = sin ρ on [0,π]; the chart x = ρ − π/2 carries
// h = dx² + cos²x dθ² with the perturbation supported near the equator point
// (π/2, 0), which is the one non-smooth locus (a single fiber circle).
inline warped_metric build_c1alpha(const c1alpha_params& p) {
    c1alpha_field field = make_c1alpha_field(p);
    double half = 0.5 * pi;

    warp_field phi;
    phi.eval_fn = [field, half](double rho, double th) {
        return field.eval(rho - half, wrap_angle(th));
    };
    phi.grad_fn = [field, half](double rho, double th) {
        return field.grad(rho - half, wrap_angle(th));
    };
    phi.hess_fn = [field, half](double rho, double th) {
        return field.hess(rho - half, wrap_angle(th));
    };
    phi.singular_set.kind = singular_kind::points;
    phi.singular_set.pts = {{half, 0.0}};
    phi.radial_only = false;
    phi.kind = "c1alpha_warp";
    phi.params = {{"alpha", p.alpha}, {"k", p.k}, {"rho_star", field.rho_star_val}};

    warped_metric m = make_warped_metric(make_round_profile(pi), std::move(phi), "c1alpha");
    m.params = {{"alpha", p.alpha}, {"k", p.k}, {"rho_star", field.rho_star_val}};
    return m;
}

} // namespace warpgeo
