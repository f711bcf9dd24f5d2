#pragma once

#include "warpgeo/common.hpp"

#include <map>
#include <mutex>
#include <queue>

namespace warpgeo {

enum class endpoint_strategy { plain, log_substitution, power_weight, auto_select };

struct quadrature_spec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_panels = 1 << 14;
    endpoint_strategy strategy = endpoint_strategy::plain;
    double beta = 0.0; // power_weight exponent, integrand ~ (dist to endpoint)^beta

    void validate() const {
        if (rel_tol < 1e-14) throw domain_error("quadrature_spec: rel_tol below 1e-14");
        if (max_panels < 8) throw domain_error("quadrature_spec: max_panels below 8");
    }
};

struct quad_result {
    double value = 0.0;
    double est_error = 0.0;
    int panels = 0;
};

namespace detail {

// Gauss 7 / Kronrod 15 pair on [-1,1]
inline constexpr double gk_x[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993945,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
inline constexpr double gk_wk[8] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.06309209262997855,
    0.02293532201052922,
};
inline constexpr double gk_wg[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

struct panel {
    double a, b, value, err;
    bool operator<(const panel& o) const { return err < o.err; }
};

template <class F>
panel eval_panel(F&& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double k = gk_wk[0] * fc;
    double g = gk_wg[0] * fc;
    for (int i = 1; i < 8; ++i) {
        double f1 = f(c - h * gk_x[i]);
        double f2 = f(c + h * gk_x[i]);
        k += gk_wk[i] * (f1 + f2);
        if (i % 2 == 0) g += gk_wg[i / 2] * (f1 + f2);
    }
    k *= h;
    g *= h;
    return {a, b, k, std::fabs(k - g)};
}

} // namespace detail

// Adaptive G7K15 with worst-panel-first refinement.
template <class F>
quad_result integrate_adaptive(F&& f, double a, double b, const quadrature_spec& spec) {
    spec.validate();
    if (a == b) return {0.0, 0.0, 0};
    std::priority_queue<detail::panel> heap;
    detail::panel root = detail::eval_panel(f, a, b);
    heap.push(root);
    double total = root.value, err = root.err;
    int panels = 1;
    auto finish = [&](std::priority_queue<detail::panel>& h, int np) -> quad_result {
        std::vector<double> vals, errs;
        vals.reserve(h.size());
        errs.reserve(h.size());
        while (!h.empty()) {
            vals.push_back(h.top().value);
            errs.push_back(h.top().err);
            h.pop();
        }
        return {pairwise_sum(vals), pairwise_sum(errs), np};
    };
    for (;;) {
        double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
        if (err <= tol) return finish(heap, panels);
        if (panels >= spec.max_panels)
            throw tolerance_error("integrate_adaptive: panel budget exhausted", finish(heap, panels).value);
        detail::panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw tolerance_error("integrate_adaptive: panel width underflow", finish(heap, panels).value);
        detail::panel lo = detail::eval_panel(f, worst.a, mid);
        detail::panel hi = detail::eval_panel(f, mid, worst.b);
        total += lo.value + hi.value - worst.value;
        err += lo.err + hi.err - worst.err;
        heap.push(lo);
        heap.push(hi);
        ++panels;
    }
}

namespace detail {

template <class F>
quad_result integrate_log(F&& f, double a, double b, const quadrature_spec& spec) {
    if (a <= 0.0) throw domain_error("log_substitution needs a > 0");
    auto g = [&](double s) {
        double r = std::exp(s);
        return f(r) * r;
    };
    return integrate_adaptive(g, std::log(a), std::log(b), spec);
}

// substitute r = end +/- tau^p so that an (r-end)^beta singularity flattens
template <class F>
quad_result integrate_power(F&& f, double a, double b, const quadrature_spec& spec,
                            bool left_singular, bool right_singular) {
    double beta = std::max(spec.beta, -0.999);
    double p = std::max(2.0 / (1.0 + beta), 1.0);
    double mid = 0.5 * (a + b);
    quadrature_spec half = spec;
    half.abs_tol = 0.5 * spec.abs_tol;
    quad_result total{0.0, 0.0, 0};
    auto accumulate = [&](const quad_result& q) {
        total.value += q.value;
        total.est_error += q.est_error;
        total.panels += q.panels;
    };
    if (left_singular) {
        auto g = [&](double tau) { return f(a + std::pow(tau, p)) * p * std::pow(tau, p - 1.0); };
        accumulate(integrate_adaptive(g, 0.0, std::pow(mid - a, 1.0 / p), half));
    } else {
        accumulate(integrate_adaptive(f, a, mid, half));
    }
    if (right_singular) {
        auto g = [&](double tau) { return f(b - std::pow(tau, p)) * p * std::pow(tau, p - 1.0); };
        accumulate(integrate_adaptive(g, 0.0, std::pow(b - mid, 1.0 / p), half));
    } else {
        accumulate(integrate_adaptive(f, mid, b, half));
    }
    return total;
}

// log-log slope of |f| walking into the interval from endpoint e
template <class F>
double endpoint_slope(F&& f, double e, double inward) {
    double h1 = 1e-7 * std::fabs(inward), h2 = 1e-5 * std::fabs(inward);
    double s = (inward > 0) ? 1.0 : -1.0;
    double f1 = std::fabs(f(e + s * h1));
    double f2 = std::fabs(f(e + s * h2));
    if (f1 < 1e-300 || f2 < 1e-300) return 0.0;
    return (std::log(f2) - std::log(f1)) / (std::log(h2) - std::log(h1));
}

} // namespace detail

// Strategy-dispatching 1-D integral over [a, b].
template <class F>
quad_result integrate(F&& f, double a, double b, const quadrature_spec& spec = {}) {
    switch (spec.strategy) {
    case endpoint_strategy::plain:
        return integrate_adaptive(f, a, b, spec);
    case endpoint_strategy::log_substitution:
        return detail::integrate_log(f, a, b, spec);
    case endpoint_strategy::power_weight:
        return detail::integrate_power(f, a, b, spec, true, true);
    case endpoint_strategy::auto_select: {
        double len = b - a;
        double sa = detail::endpoint_slope(f, a, len);
        double sb = detail::endpoint_slope(f, b, -len);
        double worst = std::min(sa, sb);
        if (worst <= -1.0 + 1e-3)
            throw domain_error("integrate: endpoint slope not integrable");
        if (worst < -1e-3) {
            quadrature_spec pw = spec;
            pw.strategy = endpoint_strategy::power_weight;
            pw.beta = worst;
            return detail::integrate_power(f, a, b, pw, sa < -1e-3, sb < -1e-3);
        }
        return integrate_adaptive(f, a, b, spec);
    }
    }
    return {};
}

// Integrate over [lo, hi] split at the supplied interior knots; segments
// spanning three-plus decades away from zero go through the log variable.
// Piecewise profiles (wells at r ~ e^{-A³}) are exactly the callers.
template <class F>
quad_result integrate_segmented(F&& f, double lo, double hi,
                                const std::vector<double>& knots,
                                const quadrature_spec& spec = {}) {
    std::vector<double> bounds{lo};
    for (double k : knots)
        if (k > lo && k < hi) bounds.push_back(k);
    bounds.push_back(hi);
    std::sort(bounds.begin(), bounds.end());
    quadrature_spec seg = spec;
    seg.abs_tol = spec.abs_tol / static_cast<double>(bounds.size() - 1);
    quad_result total;
    for (size_t i = 0; i + 1 < bounds.size(); ++i) {
        double x0 = bounds[i], x1 = bounds[i + 1];
        if (x1 - x0 < 1e-300) continue;
        quad_result q = (x0 > 0.0 && x1 / x0 >= 1e3)
                            ? detail::integrate_log(f, x0, x1, seg)
                            : integrate_adaptive(f, x0, x1, seg);
        total.value += q.value;
        total.est_error += q.est_error;
        total.panels += q.panels;
    }
    return total;
}

// Trapezoid over one period of a 2*pi-periodic function (spectral accuracy).
template <class F>
double periodic_trapezoid(F&& f, int n) {
    std::vector<double> vals(n);
    double h = two_pi / n;
    for (int i = 0; i < n; ++i) vals[i] = f(i * h);
    return pairwise_sum(vals) * h;
}

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on P_n.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::fabs(dt) < 1e-16) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    auto [pos, ok] = cache.emplace(n, std::make_pair(std::move(x), std::move(w)));
    return pos->second;
}

// fixed-order Gauss on [a,b]
template <class F>
double gauss_fixed(F&& f, double a, double b, int n) {
    const auto& [x, w] = gauss_legendre(n);
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = w[i] * f(c + h * x[i]);
    return pairwise_sum(vals) * h;
}

} // namespace warpgeo
