#pragma once

// Geodesic flow for warped product metrics: adaptive integration with a
// speed-drift accuracy gauge, the exponential map with explicit branch
// selection at the singular point, tangent-space sampling regions, and the
// volume-expansion extraction used for curvature sign experiments.
//
// Tangent vectors are expressed in the g-orthonormal frame at the base point
// (which is the coordinate frame whenever phi = u = 1 there), so Euclidean
// regions in the tangent space transfer verbatim.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "warpgeo/common.hpp"
#include "warpgeo/metric.hpp"
#include "warpgeo/quadrature.hpp"

namespace warpgeo {

struct geodesic_state {
    double r = 0.0, th = 0.0, xi = 0.0;
    double vr = 0.0, vth = 0.0, vxi = 0.0;
};

inline double g_speed(const warped_metric& m, const geodesic_state& s) {
    const metric_components g = metric_at(m, s.r, s.th);
    return std::sqrt(g.g_rr * s.vr * s.vr + g.g_thth * s.vth * s.vth +
                     g.g_xixi * s.vxi * s.vxi);
}

struct step_control {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    double h_init = 1e-3;
    double h_min = 1e-12;
    double h_max = 0.1;
    double locus_step_cap = 1e-4;  // max arclength per step near a rough locus
    double locus_radius = 1e-2;
    double drift_tol = 1e-4;       // hard accuracy gate on speed drift
    int max_steps = 2000000;
    bool record = false;
};

struct trajectory_sample {
    double s = 0.0;
    geodesic_state state;
    double drift = 0.0;
};

struct trajectory {
    std::vector<trajectory_sample> samples;  // first and last always kept
    geodesic_state final_state;
    double s_end = 0.0;      // requested parameter length
    double s_reached = 0.0;  // attained (smaller on chart exit)
    bool chart_exit = false;
    double max_drift = 0.0;
    int n_steps = 0;
};

namespace detail {

// coordinate distance from (r, th) to the rough locus; +inf when none
inline double locus_distance(const warped_metric& m, double r, double th) {
    constexpr double far = std::numeric_limits<double>::infinity();
    switch (m.phi.singular_set.kind) {
    case singular_kind::empty:
        return far;
    case singular_kind::circle:
        return std::fabs(r - m.phi.singular_set.r0);
    case singular_kind::points: {
        double d = far;
        for (const auto& p : m.phi.singular_set.pts)
            d = std::min(d, std::hypot(r - p[0], wrap_angle(th - p[1])));
        return d;
    }
    }
    return far;
}

inline std::array<double, 6> geodesic_rhs(const warped_metric& m,
                                          const std::array<double, 6>& y) {
    const christoffel_symbols G = christoffel(m, y[0], y[1]);
    const double v[3] = {y[3], y[4], y[5]};
    std::array<double, 6> dy;
    dy[0] = v[0];
    dy[1] = v[1];
    dy[2] = v[2];
    for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) acc -= G(k, i, j) * v[i] * v[j];
        dy[3 + k] = acc;
    }
    return dy;
}

// Dormand-Prince 5(4) tableau
constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double dp_b5[7] = {35.0 / 384,     0.0,           500.0 / 1113, 125.0 / 192,
                             -2187.0 / 6784, 11.0 / 84,     0.0};
constexpr double dp_b4[7] = {5179.0 / 57600,    0.0,         7571.0 / 16695, 393.0 / 640,
                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

} // namespace detail

// Adaptive integration of the geodesic equation.  Near a rough locus the
// step is capped in arclength and steps are accepted on the speed-drift
// gauge instead of the embedded estimate (whose order assumption fails
// there).  Exiting the chart ends the trajectory early with the partial
// result flagged; drift beyond the gate is an accuracy error.
inline trajectory integrate_geodesic(const warped_metric& m, const geodesic_state& s0,
                                     double t_end, const step_control& ctrl = {}) {
    if (!(t_end >= 0.0)) throw domain_error("integrate_geodesic: negative span");
    trajectory out;
    out.s_end = t_end;
    out.samples.push_back({0.0, s0, 0.0});
    out.final_state = s0;
    if (t_end == 0.0) return out;

    const double speed0 = g_speed(m, s0);
    if (speed0 == 0.0) {
        out.s_reached = t_end;
        return out;
    }

    std::array<double, 6> y{s0.r, s0.th, s0.xi, s0.vr, s0.vth, s0.vxi};
    double s = 0.0;
    double h = std::min({ctrl.h_init, ctrl.h_max, t_end});

    auto state_of = [](const std::array<double, 6>& z) {
        return geodesic_state{z[0], z[1], z[2], z[3], z[4], z[5]};
    };

    while (s < t_end) {
        h = std::min(h, t_end - s);
        const double speed_here = g_speed(m, state_of(y));
        const double d_locus = detail::locus_distance(m, y[0], y[1]);
        const bool near = d_locus < ctrl.locus_radius;
        if (near) {
            h = std::min(h, ctrl.locus_step_cap / std::max(speed_here, 1e-300));
        } else if (std::isfinite(d_locus)) {
            // an approach step may not jump across the capped neighborhood:
            // limit the coordinate advance to the remaining gap, floored by
            // the in-ball cap so progress never stalls at the boundary
            const double vc = std::hypot(y[3], y[4]);
            if (vc > 0.0) {
                const double gap = (d_locus - ctrl.locus_radius) / (1.2 * vc);
                h = std::min(h, std::max(gap, ctrl.locus_step_cap /
                                                  std::max(speed_here, 1e-300)));
            }
        }

        std::array<double, 6> k[7];
        std::array<double, 6> ynew, y4;
        bool stage_ok = true;
        try {
            k[0] = detail::geodesic_rhs(m, y);
            for (int st = 1; st < 7; ++st) {
                std::array<double, 6> arg = y;
                for (int j = 0; j < st; ++j) {
                    const double a = detail::dp_a[st][j];
                    if (a == 0.0) continue;
                    for (int c = 0; c < 6; ++c) arg[c] += h * a * k[j][c];
                }
                k[st] = detail::geodesic_rhs(m, arg);
            }
        } catch (const domain_error&) {
            stage_ok = false;
        } catch (const masked_point_error&) {
            stage_ok = false;
        }
        if (!stage_ok) {
            h *= 0.5;
            if (h < ctrl.h_min) {
                out.chart_exit = true;
                break;
            }
            continue;
        }

        ynew = y;
        y4 = y;
        for (int st = 0; st < 7; ++st)
            for (int c = 0; c < 6; ++c) {
                ynew[c] += h * detail::dp_b5[st] * k[st][c];
                y4[c] += h * detail::dp_b4[st] * k[st][c];
            }

        double err = 0.0;
        for (int c = 0; c < 6; ++c) {
            const double sc = ctrl.abs_tol +
                              ctrl.rel_tol * std::max(std::fabs(y[c]), std::fabs(ynew[c]));
            const double e = (ynew[c] - y4[c]) / sc;
            err += e * e;
        }
        err = std::sqrt(err / 6.0);

        if (!near && err > 1.0 && h > ctrl.h_min) {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            continue;
        }

        if (ynew[0] <= 1e-8 || ynew[0] >= m.a - 1e-8) {
            out.chart_exit = true;
            break;
        }

        y = ynew;
        s += h;
        ++out.n_steps;

        const geodesic_state st_now = state_of(y);
        const double drift = std::fabs(g_speed(m, st_now) / speed0 - 1.0);
        out.max_drift = std::max(out.max_drift, drift);
        if (drift > ctrl.drift_tol)
            throw accuracy_error("integrate_geodesic: speed drift exceeded the gate");
        if (ctrl.record) out.samples.push_back({s, st_now, drift});
        if (out.n_steps > ctrl.max_steps)
            throw accuracy_error("integrate_geodesic: step budget exhausted");

        if (!near && err > 0.0)
            h = std::min(h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0), ctrl.h_max);
        else if (!near)
            h = std::min(h * 5.0, ctrl.h_max);
    }

    if (!out.chart_exit) out.s_reached = s;
    else out.s_reached = s;
    out.final_state = state_of(y);
    if (!ctrl.record || out.samples.back().s != s)
        out.samples.push_back({s, out.final_state, out.max_drift});
    return out;
}

// Exponential map with branch selection at the singular point: axis-plane
// directions (a*b = 0) take the totally geodesic plane solutions; all other
// directions take the unique rough-branch geodesic, started with one
// zero-acceleration substep since the symbols are masked exactly at the
// point (their continuous extension vanishes there).
inline std::array<double, 3> exp_map(const warped_metric& m, const std::array<double, 3>& q,
                                     const std::array<double, 3>& v, double t,
                                     const step_control& ctrl = {}) {
    if (t == 0.0) return q;
    const bool sing = m.phi.singular_set.contains(q[0], q[1]);
    if (sing) {
        const double mag = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        const double tol = 1e-12 * mag;
        const double a = v[0], b = v[1], c = v[2];
        if (std::fabs(a) <= tol && std::fabs(b) <= tol)
            return {q[0], q[1], q[2] + c * t};
        if (std::fabs(b) <= tol) return {q[0] + a * t, q[1], q[2] + c * t};
        if (std::fabs(a) <= tol) return {q[0], q[1] + b * t, q[2] + c * t};
        const double h0 = std::min(1e-8, 1e-3 * t);
        const geodesic_state s1{q[0] + a * h0, q[1] + b * h0, q[2] + c * h0, a, b, c};
        const trajectory tr = integrate_geodesic(m, s1, t - h0, ctrl);
        if (tr.chart_exit) throw domain_error("exp_map: trajectory exited the chart");
        return {tr.final_state.r, tr.final_state.th, tr.final_state.xi};
    }
    const geodesic_state s0{q[0], q[1], q[2], v[0], v[1], v[2]};
    const trajectory tr = integrate_geodesic(m, s0, t, ctrl);
    if (tr.chart_exit) throw domain_error("exp_map: trajectory exited the chart");
    return {tr.final_state.r, tr.final_state.th, tr.final_state.xi};
}

// region of tangent vectors; sample maps the unit cube onto the region
// uniformly (measure-preserving), which is what keeps quasi-Monte-Carlo
// smooth -- membership alone would force rejection and wreck the rate
struct tangent_region {
    std::function<bool(double, double, double)> membership;
    std::function<std::array<double, 3>(double, double, double)> sample;
    std::array<double, 6> bbox{};
    double euclid_volume = 0.0;
    bool symmetry_certified = false;
    std::string kind;
    std::vector<std::pair<std::string, double>> params;
};

// double wedge about the diagonal directions of the (r, theta)-plane,
// extruded in the fiber: alpha |x| <= |y| <= |x|/alpha, |(x,y)| <= rho0,
// |z| < sqrt(3) rho0 / 2.  The caller is responsible for rho0 <= rho*/2,
// which depends on the field strength and not on the region.
inline tangent_region wedge_region(double alpha, double rho0) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw domain_error("wedge_region: alpha outside (0,1)");
    const double cap = std::sqrt(1.0 + alpha * alpha) *
                       std::pow(alpha, alpha / (1.0 - alpha));
    if (!(rho0 > 0.0 && rho0 <= cap * (1.0 + 1e-12)))
        throw domain_error("wedge_region: rho0 violates the smallness precondition");

    const double delta = std::atan(1.0 / alpha) - std::atan(alpha);
    const double zh = 0.5 * std::sqrt(3.0) * rho0;
    const double t0 = std::atan(alpha), t1 = std::atan(1.0 / alpha);

    tangent_region reg;
    reg.membership = [alpha, rho0, zh](double x, double y, double z) {
        const double s = std::hypot(x, y);
        return s > 0.0 && s <= rho0 && alpha * std::fabs(x) <= std::fabs(y) &&
               alpha * std::fabs(y) <= std::fabs(x) && std::fabs(z) < zh;
    };
    reg.sample = [rho0, zh, delta, t0, t1](double u1, double u2, double u3) {
        const double s = rho0 * std::sqrt(u1);
        int arc = static_cast<int>(u2 * 4.0);
        if (arc > 3) arc = 3;
        const double f = u2 * 4.0 - arc;
        const double base[4] = {t0, pi - t1, pi + t0, two_pi - t1};
        const double beta = base[arc] + f * delta;
        return std::array<double, 3>{s * std::cos(beta), s * std::sin(beta),
                                     zh * (2.0 * u3 - 1.0)};
    };
    reg.bbox = {-rho0, rho0, -rho0, rho0, -zh, zh};
    reg.euclid_volume = 2.0 * std::sqrt(3.0) * delta * rho0 * rho0 * rho0;
    reg.symmetry_certified = true;
    reg.kind = "wedge";
    reg.params = {{"alpha", alpha}, {"rho0", rho0}, {"delta", delta}};
    return reg;
}

namespace detail {

inline double radical_inverse(std::uint64_t i, std::uint32_t base) {
    double f = 1.0, r = 0.0;
    while (i) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

inline double frac01(double x) {
    x -= std::floor(x);
    return x < 1.0 ? x : 0.0;
}

inline double det3(const std::array<double, 3>& c0, const std::array<double, 3>& c1,
                   const std::array<double, 3>& c2) {
    return c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) -
           c1[0] * (c0[1] * c2[2] - c0[2] * c2[1]) +
           c2[0] * (c0[1] * c1[2] - c0[2] * c1[1]);
}

// diagonal g-orthonormal frame at a base point: e = diag(phi, phi/u, 1/phi)
inline std::array<double, 3> frame_diag(const warped_metric& m, double r, double th) {
    const double phi = m.phi.eval(r, th);
    const double u = m.u.eval(r);
    return {phi, phi / u, 1.0 / phi};
}

struct flow_point {
    std::array<double, 3> pos;  // offsets from the base point
    std::array<double, 3> vel;
};

inline void rk4_offset_step(const warped_metric& m, const std::array<double, 3>& q,
                            std::array<double, 6>& y, double h) {
    auto rhs = [&](const std::array<double, 6>& z) {
        const std::array<double, 6> abs{q[0] + z[0], q[1] + z[1], q[2] + z[2],
                                        z[3], z[4], z[5]};
        return geodesic_rhs(m, abs);
    };
    const std::array<double, 6> k1 = rhs(y);
    std::array<double, 6> a;
    for (int c = 0; c < 6; ++c) a[c] = y[c] + 0.5 * h * k1[c];
    const std::array<double, 6> k2 = rhs(a);
    for (int c = 0; c < 6; ++c) a[c] = y[c] + 0.5 * h * k2[c];
    const std::array<double, 6> k3 = rhs(a);
    for (int c = 0; c < 6; ++c) a[c] = y[c] + h * k3[c];
    const std::array<double, 6> k4 = rhs(a);
    for (int c = 0; c < 6; ++c)
        y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
}

// fixed-step offset integration: deterministic step count so the truncation
// error stays a smooth function of the initial data and differentiates away
// under the central-difference Jacobians; bootstraps off a masked start with
// one zero-acceleration substep
inline flow_point exp_fixed(const warped_metric& m, const std::array<double, 3>& q,
                            const std::array<double, 3>& v, double T, int n,
                            bool masked_start) {
    std::array<double, 6> y{0.0, 0.0, 0.0, v[0], v[1], v[2]};
    const double h = T / n;
    for (int i = 0; i < n; ++i) {
        if (masked_start && i == 0) {
            y[0] += h * y[3];
            y[1] += h * y[4];
            y[2] += h * y[5];
            continue;
        }
        rk4_offset_step(m, q, y, h);
    }
    return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
}

// states at the given arclength nodes along one shot ray (nodes ascending)
inline std::vector<flow_point> shoot_nodes(const warped_metric& m,
                                           const std::array<double, 3>& q,
                                           const std::array<double, 3>& v,
                                           const std::vector<double>& s_nodes,
                                           double h_cap, bool masked_start) {
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    std::vector<flow_point> out;
    out.reserve(s_nodes.size());
    std::array<double, 6> y{0.0, 0.0, 0.0, v[0], v[1], v[2]};
    double s_prev = 0.0;
    bool first = masked_start;
    for (double s_k : s_nodes) {
        const double span = s_k - s_prev;
        const int nsub = std::max(1, static_cast<int>(std::ceil(span * speed / h_cap)));
        const double h = span / nsub;
        for (int i = 0; i < nsub; ++i) {
            if (first) {
                y[0] += h * y[3];
                y[1] += h * y[4];
                y[2] += h * y[5];
                first = false;
                continue;
            }
            rk4_offset_step(m, q, y, h);
        }
        out.push_back({{y[0], y[1], y[2]}, {y[3], y[4], y[5]}});
        s_prev = s_k;
    }
    return out;
}

inline double drift_of(const warped_metric& m, const std::array<double, 3>& q,
                       const flow_point& p, double speed0) {
    const geodesic_state st{q[0] + p.pos[0], q[1] + p.pos[1], q[2] + p.pos[2],
                            p.vel[0], p.vel[1], p.vel[2]};
    return std::fabs(g_speed(m, st) / speed0 - 1.0);
}

} // namespace detail

struct region_volume_result {
    double value = 0.0;
    double std_error = 0.0;
    long n_total = 0;
    long n_rejected = 0;
    double rejected_fraction = 0.0;
};

// Vol_g(exp_q(t*Omega)) by quasi-Monte-Carlo over the region: Halton points
// (bases 2,3,5) under 8 Cranley-Patterson shifts drawn from the seed; each
// sample contributes metric density at the endpoint times the absolute
// Jacobian determinant of v -> exp_q(t v), taken by central differences with
// stencil step t*1e-3 scaled by the region's characteristic length.  At a
// masked base point, samples whose stencil straddles an axis plane (where
// the branch is not unique) are rejected and counted; the fraction must
// stay below 1e-3.
inline region_volume_result region_volume_via_exp(const warped_metric& m,
                                                  const std::array<double, 3>& q,
                                                  const tangent_region& region, double t,
                                                  long n_samples, std::uint64_t seed = 2026,
                                                  int n_shifts = 8) {
    if (!(t > 0.0)) throw domain_error("region_volume_via_exp: t must be positive");
    if (n_samples < 16) throw domain_error("region_volume_via_exp: too few samples");
    if (!region.sample)
        throw domain_error("region_volume_via_exp: region lacks a unit-cube sampler");

    const bool sing = m.phi.singular_set.contains(q[0], q[1]);
    const std::array<double, 3> B = detail::frame_diag(m, q[0], q[1]);
    const double scale = std::cbrt(region.euclid_volume);
    const double h_v = t * 1e-3 * scale;

    std::mt19937_64 gen(seed);
    std::vector<std::array<double, 3>> shifts(n_shifts);
    for (auto& sh : shifts)
        for (double& c : sh) c = detail::uniform01(gen);

    const std::uint32_t bases[3] = {2, 3, 5};
    std::vector<double> shift_means(n_shifts, 0.0);
    long n_rejected = 0;

    // samples are independent: fill one slot per index in parallel, then
    // reduce serially in index order so the result is thread-count invariant
    std::vector<double> slot(static_cast<std::size_t>(n_samples));
    std::vector<unsigned char> accepted(static_cast<std::size_t>(n_samples));
    for (int sh = 0; sh < n_shifts; ++sh) {
        std::fill(accepted.begin(), accepted.end(), static_cast<unsigned char>(0));
        parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t idx) {
            const std::uint64_t i = static_cast<std::uint64_t>(idx) + 1;
            double u[3];
            for (int d = 0; d < 3; ++d)
                u[d] = detail::frac01(detail::radical_inverse(i, bases[d]) + shifts[sh][d]);
            const std::array<double, 3> vE = region.sample(u[0], u[1], u[2]);
            if (sing && (std::fabs(vE[0]) <= h_v || std::fabs(vE[1]) <= h_v)) return;
            const double speed0 = std::sqrt(vE[0] * vE[0] + vE[1] * vE[1] + vE[2] * vE[2]);
            const double arc = t * speed0;
            const double h_cap = sing ? 1e-4 : 2e-3;
            const int nstep = std::max(32, static_cast<int>(std::ceil(arc / h_cap)));

            auto shoot = [&](const std::array<double, 3>& ve) {
                const std::array<double, 3> vc{B[0] * ve[0], B[1] * ve[1], B[2] * ve[2]};
                return detail::exp_fixed(m, q, vc, t, nstep, sing);
            };

            const detail::flow_point center = shoot(vE);
            if (detail::drift_of(m, q, center, speed0) > 1e-4)
                throw accuracy_error("region_volume_via_exp: speed drift exceeded");

            std::array<double, 3> cols[3];
            for (int d = 0; d < 3; ++d) {
                std::array<double, 3> vp = vE, vm = vE;
                vp[d] += h_v;
                vm[d] -= h_v;
                const double denom = vp[d] - vm[d];  // realized step
                const detail::flow_point fp = shoot(vp);
                const detail::flow_point fm = shoot(vm);
                for (int c = 0; c < 3; ++c) cols[d][c] = (fp.pos[c] - fm.pos[c]) / denom;
            }
            const double dens = m.volume_element(q[0] + center.pos[0], q[1] + center.pos[1]);
            slot[idx] = dens * std::fabs(detail::det3(cols[0], cols[1], cols[2]));
            accepted[idx] = 1;
        });
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(n_samples));
        for (std::size_t idx = 0; idx < static_cast<std::size_t>(n_samples); ++idx) {
            if (accepted[idx])
                vals.push_back(slot[idx]);
            else
                ++n_rejected;
        }
        if (vals.empty())
            throw accuracy_error("region_volume_via_exp: all samples rejected");
        shift_means[sh] = region.euclid_volume * pairwise_sum(vals) /
                          static_cast<double>(vals.size());
    }

    region_volume_result out;
    out.n_total = static_cast<long>(n_shifts) * n_samples;
    out.n_rejected = n_rejected;
    out.rejected_fraction = static_cast<double>(n_rejected) / static_cast<double>(out.n_total);
    if (out.rejected_fraction >= 1e-3)
        throw accuracy_error("region_volume_via_exp: rejected fraction reached 1e-3");
    out.value = pairwise_sum(shift_means) / n_shifts;
    double var = 0.0;
    for (double v : shift_means) var += sqr(v - out.value);
    var /= std::max(1, n_shifts - 1);
    out.std_error = std::sqrt(var / n_shifts);
    return out;
}

// volume of the geodesic ball of radius t about q: unit-speed shooting over
// a Gauss (polar) x trapezoid (azimuth) direction grid, radial Gauss nodes
// along each ray, with the angular Jacobian taken by central differences of
// the ray map.  Treats the ball as the exp image of the g-unit ball, which
// is sound for the small radii used here (short-time minimality).
inline double ball_volume(const warped_metric& m, const std::array<double, 3>& q, double t,
                          int n_dirs = 1152) {
    if (!(t > 0.0 && t <= 0.2)) throw domain_error("ball_volume: need 0 < t <= 0.2");
    const bool sing = m.phi.singular_set.contains(q[0], q[1]);
    const std::array<double, 3> B = detail::frame_diag(m, q[0], q[1]);
    const double h_cap = sing ? 1e-4 : 2e-3;
    const double h_dir = 1e-4;

    const int n_mu = std::max(6, static_cast<int>(std::llround(std::sqrt(n_dirs / 2.0))));
    const int n_phi = 2 * n_mu;

    const auto& [gx, gw] = gauss_legendre(16);
    std::vector<double> s_nodes(16), s_w(16);
    for (int k = 0; k < 16; ++k) {
        s_nodes[k] = 0.5 * t * (gx[k] + 1.0);
        s_w[k] = 0.5 * t * gw[k];
    }

    const auto& [mx, mw] = gauss_legendre(n_mu);

    auto ray_nodes = [&](double mu, double phi) {
        const double cmu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        const std::array<double, 3> w{cmu * std::cos(phi), cmu * std::sin(phi), mu};
        const std::array<double, 3> v{B[0] * w[0], B[1] * w[1], B[2] * w[2]};
        const double tol = 1e-12;
        if (sing && (std::fabs(w[0]) <= tol || std::fabs(w[1]) <= tol)) {
            // totally geodesic plane solution along an axis direction
            std::vector<detail::flow_point> out;
            out.reserve(s_nodes.size());
            std::array<double, 3> dir = v;
            if (std::fabs(w[0]) <= tol) dir[0] = 0.0;
            if (std::fabs(w[1]) <= tol) dir[1] = 0.0;
            for (double s_k : s_nodes)
                out.push_back({{dir[0] * s_k, dir[1] * s_k, dir[2] * s_k}, dir});
            return out;
        }
        return detail::shoot_nodes(m, q, v, s_nodes, h_cap, sing);
    };

    std::vector<double> mu_contrib(n_mu, 0.0);
    parallel_for(n_mu, [&](int i) {
        const double mu = mx[i];
        const double h_mu = std::min(h_dir, 0.5 * (1.0 - std::fabs(mu)));
        std::vector<double> phi_vals(n_phi);
        for (int j = 0; j < n_phi; ++j) {
            const double phi = two_pi * j / n_phi;
            const auto center = ray_nodes(mu, phi);
            const auto up = ray_nodes(mu + h_mu, phi);
            const auto dn = ray_nodes(mu - h_mu, phi);
            const auto rt = ray_nodes(mu, phi + h_dir);
            const auto lt = ray_nodes(mu, phi - h_dir);
            std::vector<double> s_vals(s_nodes.size());
            for (std::size_t kk = 0; kk < s_nodes.size(); ++kk) {
                std::array<double, 3> cmu_col, cphi_col;
                for (int c = 0; c < 3; ++c) {
                    cmu_col[c] = (up[kk].pos[c] - dn[kk].pos[c]) / (2.0 * h_mu);
                    cphi_col[c] = (rt[kk].pos[c] - lt[kk].pos[c]) / (2.0 * h_dir);
                }
                const double dens = m.volume_element(q[0] + center[kk].pos[0],
                                                     q[1] + center[kk].pos[1]);
                s_vals[kk] = s_w[kk] * dens *
                             std::fabs(detail::det3(center[kk].vel, cmu_col, cphi_col));
            }
            phi_vals[j] = pairwise_sum(s_vals);
        }
        mu_contrib[i] = mw[i] * pairwise_sum(phi_vals) * (two_pi / n_phi);
    });
    return pairwise_sum(mu_contrib);
}

struct expansion_fit {
    double c3 = 0.0, c5 = 0.0, c6 = 0.0;
    double c3_err = 0.0, c5_err = 0.0, c6_err = 0.0;
    double residual_rms = 0.0;
    bool c6_used = false;
    bool c3_constrained = false;
};

// least squares for V(t) = c3 t^3 + c5 t^5 (+ c6 t^6 with >= 4 points);
// a supplied c3 is constrained exactly.  Errors are the usual residual-based
// standard errors of the linear fit.
inline expansion_fit fit_expansion(const std::vector<std::pair<double, double>>& volumes,
                                   std::optional<double> c3_known = std::nullopt) {
    const int n = static_cast<int>(volumes.size());
    if (n < 3) throw domain_error("fit_expansion: need at least 3 points");
    double tmin = volumes[0].first, tmax = volumes[0].first;
    for (const auto& [tt, vv] : volumes) {
        if (!(tt > 0.0)) throw domain_error("fit_expansion: t values must be positive");
        tmin = std::min(tmin, tt);
        tmax = std::max(tmax, tt);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (volumes[i].first == volumes[j].first)
                throw domain_error("fit_expansion: duplicate t values");
    if (tmax / tmin < 2.0 * (1.0 - 1e-12))
        throw accuracy_error("fit_expansion: ill-conditioned design (t span < factor 2)");

    std::vector<int> pw;
    if (!c3_known) pw.push_back(3);
    pw.push_back(5);
    if (n >= 4) pw.push_back(6);
    const int p = static_cast<int>(pw.size());

    // column-scaled normal equations in extended precision
    std::vector<std::vector<long double>> X(n, std::vector<long double>(p));
    std::vector<long double> yv(n), colscale(p, 0.0L);
    for (int i = 0; i < n; ++i) {
        const long double tt = volumes[i].first;
        yv[i] = volumes[i].second;
        if (c3_known) yv[i] -= static_cast<long double>(*c3_known) * tt * tt * tt;
        for (int j = 0; j < p; ++j) X[i][j] = std::pow(tt, static_cast<long double>(pw[j]));
    }
    for (int j = 0; j < p; ++j) {
        long double s = 0.0L;
        for (int i = 0; i < n; ++i) s += X[i][j] * X[i][j];
        colscale[j] = std::sqrt(s);
        for (int i = 0; i < n; ++i) X[i][j] /= colscale[j];
    }

    long double G[3][3] = {}, rhs[3] = {};
    for (int a = 0; a < p; ++a) {
        for (int b = 0; b < p; ++b) {
            long double s = 0.0L;
            for (int i = 0; i < n; ++i) s += X[i][a] * X[i][b];
            G[a][b] = s;
        }
        long double s = 0.0L;
        for (int i = 0; i < n; ++i) s += X[i][a] * yv[i];
        rhs[a] = s;
    }

    // invert G alongside the solve (augmented Gaussian elimination)
    long double A[3][7] = {};
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) A[i][j] = G[i][j];
        A[i][p] = rhs[i];
        for (int j = 0; j < p; ++j) A[i][p + 1 + j] = (i == j) ? 1.0L : 0.0L;
    }
    const int w = 2 * p + 1;
    for (int col = 0; col < p; ++col) {
        int piv = col;
        for (int i = col + 1; i < p; ++i)
            if (std::fabs(static_cast<double>(A[i][col])) >
                std::fabs(static_cast<double>(A[piv][col])))
                piv = i;
        if (A[piv][col] == 0.0L)
            throw accuracy_error("fit_expansion: singular normal equations");
        if (piv != col)
            for (int j = 0; j < w; ++j) std::swap(A[piv][j], A[col][j]);
        const long double d = A[col][col];
        for (int j = 0; j < w; ++j) A[col][j] /= d;
        for (int i = 0; i < p; ++i) {
            if (i == col) continue;
            const long double f = A[i][col];
            if (f == 0.0L) continue;
            for (int j = 0; j < w; ++j) A[i][j] -= f * A[col][j];
        }
    }

    std::vector<long double> coef(p);
    for (int i = 0; i < p; ++i) coef[i] = A[i][p];

    long double rss = 0.0L;
    for (int i = 0; i < n; ++i) {
        long double fit = 0.0L;
        for (int j = 0; j < p; ++j) fit += X[i][j] * coef[j];
        rss += (yv[i] - fit) * (yv[i] - fit);
    }
    const int dof = n - p;
    const long double sigma2 = dof > 0 ? rss / dof : 0.0L;

    expansion_fit out;
    out.c3_constrained = c3_known.has_value();
    if (c3_known) out.c3 = *c3_known;
    for (int j = 0; j < p; ++j) {
        const double cj = static_cast<double>(coef[j] / colscale[j]);
        const double ej = std::sqrt(std::max(0.0, static_cast<double>(
                              sigma2 * A[j][p + 1 + j]))) /
                          static_cast<double>(colscale[j]);
        if (pw[j] == 3) {
            out.c3 = cj;
            out.c3_err = ej;
        } else if (pw[j] == 5) {
            out.c5 = cj;
            out.c5_err = ej;
        } else {
            out.c6 = cj;
            out.c6_err = ej;
            out.c6_used = true;
        }
    }
    out.residual_rms = std::sqrt(std::max(0.0, static_cast<double>(rss / n)));
    return out;
}

} // namespace warpgeo
