#pragma once

#include "warpgeo/metric.hpp"

namespace warpgeo {

struct geom_result {
    double value = 0.0;
    double est_error = 0.0;
    int panels = 0;
    operator double() const { return value; }
};

namespace detail {

// ∬ f(r,θ) dr dθ over [lo,hi]×[0,2π): adaptive in r, periodic trapezoid in θ
template <class F>
geom_result integrate_rth(F&& f, double lo, double hi, const std::vector<double>& knots,
                          const quadrature_spec& spec, int n_theta = 256) {
    auto radial = [&](double r) {
        return periodic_trapezoid([&](double th) { return f(r, th); }, n_theta);
    };
    quad_result q = integrate_segmented(radial, lo, hi, knots, spec);
    return {q.value, q.est_error, q.panels};
}

} // namespace detail

// volume of the shell {lo < r < hi}: ∫ u/φ over the shell times the fiber 2π
inline geom_result shell_volume(const warped_metric& m, double lo, double hi,
                                const quadrature_spec& spec = {}) {
    if (m.phi.radial_only) {
        quad_result q = integrate_segmented(
            [&](double r) { return m.u.eval(r) / m.phi.eval(r, 0.0); }, lo, hi, m.u.knots, spec);
        return {4.0 * pi * pi * q.value, 4.0 * pi * pi * q.est_error, q.panels};
    }
    geom_result q = detail::integrate_rth(
        [&](double r, double th) { return m.u.eval(r) / m.phi.eval(r, th); }, lo, hi,
        m.u.knots, spec);
    return {two_pi * q.value, two_pi * q.est_error, q.panels};
}

inline geom_result total_volume(const warped_metric& m, const quadrature_spec& spec = {}) {
    return shell_volume(m, 0.0, m.a, spec);
}

// Area of the base sphere: 2π ∫ u dr
inline geom_result base_area(const warped_metric& m, const quadrature_spec& spec = {}) {
    quad_result q =
        integrate_segmented([&](double r) { return m.u.eval(r); }, 0.0, m.a, m.u.knots, spec);
    return {two_pi * q.value, two_pi * q.est_error, q.panels};
}

// The base diameter is realized by the pole-to-pole meridian.
inline double base_diameter(const warped_metric& m) { return m.a; }

// Volume of the two polar shells of thickness ε.
inline geom_result cap_volume(const warped_metric& m, double eps,
                              const quadrature_spec& spec = {}) {
    if (!(eps > 0.0 && eps < 0.5 * m.a))
        throw domain_error("cap_volume: eps outside (0, a/2)");
    geom_result lo = shell_volume(m, 0.0, eps, spec);
    geom_result hi = shell_volume(m, m.a - eps, m.a, spec);
    return {lo.value + hi.value, lo.est_error + hi.est_error, lo.panels + hi.panels};
}

// ∫_{r_a}^{r_b} dr/φ(r,θ): the cost of the radial path at fixed θ.
inline geom_result radial_cost(const warped_metric& m, double r_a, double r_b, double th,
                               const quadrature_spec& spec = {}) {
    if (!(0.0 < r_a && r_a < r_b && r_b < m.a))
        throw domain_error("radial_cost: need 0 < r_a < r_b < a");
    auto f = [&](double r) { return 1.0 / m.phi.eval(r, th); };
    quad_result q;
    if (r_a < 1e-3) {
        quadrature_spec ls = spec;
        ls.strategy = endpoint_strategy::log_substitution;
        q = detail::integrate_log(f, r_a, r_b, ls);
    } else {
        q = integrate_segmented(f, r_a, r_b, m.u.knots, spec);
    }
    return {q.value, q.est_error, q.panels};
}

struct mina_candidate {
    std::string kind; // "torus" (r = r_c) or "slice" (ξ = const)
    double r_c = std::numeric_limits<double>::quiet_NaN();
    double area = 0.0;
};

// Rotationally symmetric minimal-surface competitors: tori at the critical
// radii of u (area 4π²u, independent of φ) and the ξ-slice copy of the base
// (area ∫ φ⁻² dvol_h).  The minimum is a certified upper bound for MinA only.
inline std::vector<mina_candidate> min_torus_area_candidates(const warped_metric& m,
                                                             const quadrature_spec& spec = {}) {
    std::vector<mina_candidate> out;
    const int n = 10000;
    double margin = 1e-6 * m.a;
    double lo = margin, hi = m.a - margin;
    double step = (hi - lo) / n;
    double prev_r = lo, prev_v = m.u.d1(lo);
    std::vector<double> roots;
    for (int i = 1; i <= n; ++i) {
        double r = lo + i * step, v = m.u.d1(r);
        if (v == 0.0) {
            roots.push_back(r);
        } else if (prev_v * v < 0.0) {
            double a = prev_r, b = r;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (a + b);
                double fm = m.u.d1(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if (fm * prev_v < 0.0)
                    b = mid;
                else
                    a = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_r = r;
        prev_v = v;
    }
    std::vector<double> merged;
    for (double r : roots)
        if (merged.empty() || r - merged.back() > 2.0 * step) merged.push_back(r);
    if (merged.empty())
        throw accuracy_error("min_torus_area_candidates: no critical point of u found");
    for (double r : merged) out.push_back({"torus", r, 4.0 * pi * pi * m.u.eval(r)});

    geom_result slice =
        m.phi.radial_only
            ? geom_result{two_pi * integrate_segmented(
                              [&](double r) { return m.u.eval(r) / sqr(m.phi.eval(r, 0.0)); },
                              0.0, m.a, m.u.knots, spec)
                              .value,
                          0.0, 0}
            : geom_result{detail::integrate_rth(
                              [&](double r, double th) {
                                  return m.u.eval(r) / sqr(m.phi.eval(r, th));
                              },
                              0.0, m.a, m.u.knots, spec)
                              .value,
                          0.0, 0};
    out.push_back({"slice", std::numeric_limits<double>::quiet_NaN(), slice.value});
    std::sort(out.begin(), out.end(),
              [](const mina_candidate& x, const mina_candidate& y) { return x.area < y.area; });
    return out;
}

// Both sides of the warp-gradient budget ∫|∇lnφ|² dvol_h ≤ ½∫Scalar_h dvol_h.
inline std::pair<double, double> grad_log_phi_budget(const warped_metric& m,
                                                     const quadrature_spec& spec = {}) {
    double lhs;
    if (m.phi.radial_only) {
        lhs = two_pi * integrate_segmented(
                           [&](double r) {
                               double phi = m.phi.eval(r, 0.0);
                               return sqr(m.phi.grad(r, 0.0)[0] / phi) * m.u.eval(r);
                           },
                           0.0, m.a, m.u.knots, spec)
                           .value;
    } else {
        lhs = detail::integrate_rth(
                  [&](double r, double th) {
                      double phi = m.phi.eval(r, th);
                      auto g = m.phi.grad(r, th);
                      double u = m.u.eval(r);
                      return (sqr(g[0] / phi) + sqr(g[1] / phi) / (u * u)) * u;
                  },
                  0.0, m.a, m.u.knots, spec)
                  .value;
    }
    double rhs = two_pi * integrate_segmented([&](double r) { return -m.u.d2(r); }, 0.0, m.a,
                                              m.u.knots, spec)
                           .value;
    return {lhs, rhs};
}

} // namespace warpgeo
