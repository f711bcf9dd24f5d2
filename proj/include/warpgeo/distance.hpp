#pragma once

// Distance estimation: explicit path families give certified upper bounds
// (each candidate is a genuine piecewise path), a 26-neighbor grid Dijkstra
// gives a shortest-path approximation from above, and a monotone
// straightening pass tightens the grid path toward the geodesic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "warpgeo/common.hpp"
#include "warpgeo/drawstring.hpp"
#include "warpgeo/geometry.hpp"
#include "warpgeo/metric.hpp"
#include "warpgeo/quadrature.hpp"

namespace warpgeo {

enum class segment_mode { radial, angular, fiber, general };

// ordered polyline; modes[i] constrains which coordinates pts[i] -> pts[i+1]
// may change
struct path_polyline {
    std::vector<std::array<double, 3>> pts;
    std::vector<segment_mode> modes;
    double total_length = 0.0;
};

namespace detail {

// metric length of the straight coordinate segment c0 -> c1 (angles taken
// literally, no wrapping: callers pass unwrapped representatives)
inline double straight_length(const warped_metric& m, const std::array<double, 3>& c0,
                              const std::array<double, 3>& c1, int n_gauss = 8) {
    const double dr = c1[0] - c0[0], dth = c1[1] - c0[1], dxi = c1[2] - c0[2];
    if (dr == 0.0 && dth == 0.0 && dxi == 0.0) return 0.0;
    const auto& [gx, gw] = gauss_legendre(n_gauss);
    std::vector<double> vals(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double s = 0.5 * (gx[i] + 1.0);
        const metric_components g = metric_at(m, c0[0] + s * dr, c0[1] + s * dth);
        vals[i] = 0.5 * gw[i] * std::sqrt(g.g_rr * dr * dr + g.g_thth * dth * dth +
                                          g.g_xixi * dxi * dxi);
    }
    return pairwise_sum(vals);
}

inline double segment_length(const warped_metric& m, const std::array<double, 3>& c0,
                             const std::array<double, 3>& c1, segment_mode mode) {
    switch (mode) {
    case segment_mode::radial: {
        const double lo = std::min(c0[0], c1[0]), hi = std::max(c0[0], c1[0]);
        if (lo == hi) return 0.0;
        const double th = c0[1];
        quad_result q = integrate_segmented(
            [&](double r) { return 1.0 / m.phi.eval(r, th); }, lo, hi, m.u.knots, {});
        return q.value;
    }
    case segment_mode::angular: {
        const double r = c0[0], dth = c1[1] - c0[1];
        if (dth == 0.0) return 0.0;
        quad_result q = integrate(
            [&](double s) {
                const double th = c0[1] + s * dth;
                return m.u.eval(r) / m.phi.eval(r, th) * std::fabs(dth);
            },
            0.0, 1.0, {});
        return q.value;
    }
    case segment_mode::fiber:
        return m.phi.eval(c0[0], c0[1]) * std::fabs(c1[2] - c0[2]);
    case segment_mode::general:
        return straight_length(m, c0, c1);
    }
    return 0.0;
}

} // namespace detail

inline void append_segment(const warped_metric& m, path_polyline& path,
                           const std::array<double, 3>& next, segment_mode mode) {
    const auto& prev = path.pts.back();
    if (prev == next) return;
    path.total_length += detail::segment_length(m, prev, next, mode);
    path.pts.push_back(next);
    path.modes.push_back(mode);
}

// radial -> angular at r_mid -> fiber at r_mid -> radial; degenerate
// segments are dropped.  Fiber displacement takes the short way around.
inline path_polyline composite_path(const warped_metric& m, const std::array<double, 3>& p,
                                    const std::array<double, 3>& q, double r_mid) {
    path_polyline path;
    path.pts.push_back(p);
    const double dth = wrap_angle(q[1] - p[1]);
    const double dxi = wrap_angle(q[2] - p[2]);
    append_segment(m, path, {r_mid, p[1], p[2]}, segment_mode::radial);
    append_segment(m, path, {r_mid, p[1] + dth, p[2]}, segment_mode::angular);
    append_segment(m, path, {r_mid, p[1] + dth, p[2] + dxi}, segment_mode::fiber);
    append_segment(m, path, {q[0], p[1] + dth, p[2] + dxi}, segment_mode::radial);
    return path;
}

// radius minimizing phi along theta = 0, when the minimum is an actual well
// (phi dips below 1/2); scanned on a mixed log/linear grid so wells at
// exponentially small radii are seen
inline std::optional<double> deep_well_radius(const warped_metric& m) {
    double best_r = 0.0, best_phi = std::numeric_limits<double>::infinity();
    auto probe = [&](double r) {
        const double f = m.phi.eval(r, 0.0);
        if (f < best_phi) {
            best_phi = f;
            best_r = r;
        }
    };
    const double r_hi = m.a * (1.0 - 1e-6);
    for (int i = 0; i <= 600; ++i)
        probe(1e-300 * std::pow(r_hi / 1e-300, i / 600.0));
    for (int i = 1; i <= 2000; ++i) probe(r_hi * i / 2000.0);
    if (best_phi < 0.5) return best_r;
    return std::nullopt;
}

struct path_bound {
    path_polyline path;
    double length = 0.0;
};

// best of the mid-latitude composite and (when phi has a deep well) the same
// family routed through the well radius, where the fiber hop is cheap
inline path_bound path_family_upper_bound(const warped_metric& m,
                                          const std::array<double, 3>& p,
                                          const std::array<double, 3>& q) {
    require_interior(m, p[0]);
    require_interior(m, q[0]);
    path_polyline best = composite_path(m, p, q, 0.5 * m.a);
    if (auto rw = deep_well_radius(m)) {
        path_polyline alt = composite_path(m, p, q, *rw);
        if (alt.total_length < best.total_length) best = std::move(alt);
    }
    return {best, best.total_length};
}

struct grid_options {
    bool refine = true;        // straighten the Dijkstra path (monotone descent)
    bool log_graded = false;   // geometric radial spacing from r_lo
    double r_lo = -1.0;        // log-graded floor; required when log_graded
    double r_margin = -1.0;    // uniform-grid pole margin; default a/1024
};

namespace detail {

struct dist_grid {
    std::vector<double> r_nodes;
    int n_th = 0, n_xi = 0;
    double dth = 0.0, dxi = 0.0;

    int id(int ir, int it, int ix) const {
        return (ir * n_th + it) * n_xi + ix;
    }
    std::array<double, 3> coords(int ir, int it, int ix) const {
        return {r_nodes[ir], it * dth, ix * dxi};
    }
};

inline dist_grid make_grid(const warped_metric& m, int n_r, int n_th, int n_xi,
                           const grid_options& opt) {
    if (n_r < 16 || n_th < 16 || n_xi < 16)
        throw domain_error("grid_distance: resolutions must be >= 16");
    dist_grid g;
    g.n_th = n_th;
    g.n_xi = n_xi;
    g.dth = two_pi / n_th;
    g.dxi = two_pi / n_xi;
    g.r_nodes.resize(n_r + 1);
    if (opt.log_graded) {
        if (!(opt.r_lo > 0.0 && opt.r_lo < m.a))
            throw domain_error("grid_distance: log-graded grid needs r_lo");
        const double hi = m.a * (1.0 - 1.0 / 1024.0);
        for (int i = 0; i <= n_r; ++i)
            g.r_nodes[i] = opt.r_lo * std::pow(hi / opt.r_lo, double(i) / n_r);
    } else {
        const double margin = opt.r_margin > 0.0 ? opt.r_margin : m.a / 1024.0;
        const double lo = margin, hi = m.a - margin;
        for (int i = 0; i <= n_r; ++i)
            g.r_nodes[i] = lo + (hi - lo) * double(i) / n_r;
    }
    return g;
}

inline int snap_radial(const dist_grid& g, double r) {
    const auto& rn = g.r_nodes;
    if (r < rn.front() - (rn[1] - rn[0]) || r > rn.back() + (rn.back() - rn[rn.size() - 2]))
        throw domain_error("grid_distance: point outside grid interior margin");
    const auto it = std::lower_bound(rn.begin(), rn.end(), r);
    if (it == rn.begin()) return 0;
    if (it == rn.end()) return static_cast<int>(rn.size()) - 1;
    const int hi = static_cast<int>(it - rn.begin());
    return (r - rn[hi - 1] <= rn[hi] - r) ? hi - 1 : hi;
}

inline int snap_periodic(double x, double step, int n) {
    int k = static_cast<int>(std::llround(wrap_positive(x) / step)) % n;
    if (k < 0) k += n;
    return k;
}

} // namespace detail

struct grid_distance_result {
    double value = 0.0;      // refined when requested, else the raw graph value
    double raw_value = 0.0;  // graph shortest path
    path_polyline path;      // straightened polyline (raw path if refine off)
};

// Dijkstra over the product grid with the full 26-neighbor stencil and
// periodic wraparound in both angles; edge weights are 8-point Gauss lengths
// of the straight coordinate segments.  The optional refinement straightens
// the returned path by vertex elimination and single-cell vertex slides,
// accepting only strict decreases, so value <= raw_value always.
inline grid_distance_result grid_distance_detail(const warped_metric& m,
                                                 const std::array<double, 3>& p,
                                                 const std::array<double, 3>& q, int n_r,
                                                 int n_th, int n_xi,
                                                 const grid_options& opt = {}) {
    const detail::dist_grid g = detail::make_grid(m, n_r, n_th, n_xi, opt);
    const int nr_nodes = static_cast<int>(g.r_nodes.size());
    const int n_nodes = nr_nodes * n_th * n_xi;

    auto snap = [&](const std::array<double, 3>& x) {
        return std::array<int, 3>{detail::snap_radial(g, x[0]),
                                  detail::snap_periodic(x[1], g.dth, n_th),
                                  detail::snap_periodic(x[2], g.dxi, n_xi)};
    };
    std::array<int, 3> sp = snap(p), sq = snap(q);
    // canonical orientation makes d(p,q) and d(q,p) bit-identical
    if (g.id(sq[0], sq[1], sq[2]) < g.id(sp[0], sp[1], sp[2])) std::swap(sp, sq);
    const int src = g.id(sp[0], sp[1], sp[2]);
    const int dst = g.id(sq[0], sq[1], sq[2]);

    std::vector<double> dist(n_nodes, std::numeric_limits<double>::infinity());
    std::vector<int> pred(n_nodes, -1);
    using qe = std::pair<double, int>;
    std::priority_queue<qe, std::vector<qe>, std::greater<qe>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});

    auto edge_len = [&](int ir0, int it0, int ix0, int dr, int dt, int dx) {
        const std::array<double, 3> c0 = g.coords(ir0, it0, ix0);
        const std::array<double, 3> c1{g.r_nodes[ir0 + dr], c0[1] + dt * g.dth,
                                       c0[2] + dx * g.dxi};
        return detail::straight_length(m, c0, c1);
    };

    while (!pq.empty()) {
        const auto [d0, v] = pq.top();
        pq.pop();
        if (d0 > dist[v]) continue;
        if (v == dst) break;
        const int ix = v % n_xi, it = (v / n_xi) % n_th, ir = v / (n_xi * n_th);
        for (int dr = -1; dr <= 1; ++dr) {
            if (ir + dr < 0 || ir + dr >= nr_nodes) continue;
            for (int dt = -1; dt <= 1; ++dt)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dr == 0 && dt == 0 && dx == 0) continue;
                    const int it2 = (it + dt + n_th) % n_th;
                    const int ix2 = (ix + dx + n_xi) % n_xi;
                    const int w = g.id(ir + dr, it2, ix2);
                    const double nd = d0 + edge_len(ir, it, ix, dr, dt, dx);
                    if (nd < dist[w]) {
                        dist[w] = nd;
                        pred[w] = v;
                        pq.push({nd, w});
                    }
                }
        }
    }
    if (!(dist[dst] < std::numeric_limits<double>::infinity()))
        throw accuracy_error("grid_distance: target unreachable");

    grid_distance_result out;
    out.raw_value = dist[dst];

    // unwrap the node path into continuous coordinates (steps are one cell,
    // so the signed angular increments are unambiguous)
    std::vector<int> ids;
    for (int v = dst; v != -1; v = pred[v]) ids.push_back(v);
    std::reverse(ids.begin(), ids.end());
    std::vector<std::array<double, 3>> verts;
    verts.reserve(ids.size());
    for (std::size_t s = 0; s < ids.size(); ++s) {
        const int v = ids[s];
        const int ix = v % n_xi, it = (v / n_xi) % n_th, ir = v / (n_xi * n_th);
        if (s == 0) {
            verts.push_back(g.coords(ir, it, ix));
        } else {
            const int pv = ids[s - 1];
            const int pix = pv % n_xi, pit = (pv / n_xi) % n_th;
            int dt = it - pit;
            if (dt > 1) dt -= n_th;
            if (dt < -1) dt += n_th;
            int dx = ix - pix;
            if (dx > 1) dx -= n_xi;
            if (dx < -1) dx += n_xi;
            const auto& prev = verts.back();
            verts.push_back({g.r_nodes[ir], prev[1] + dt * g.dth, prev[2] + dx * g.dxi});
        }
    }

    auto seg = [&](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return detail::straight_length(m, a, b);
    };

    if (opt.refine && verts.size() >= 2) {
        // Multiscale elastic shortening.  The raw path contributes only its
        // unwrapped endpoints (hence the homotopy class); the polyline is
        // then rebuilt from the straight chord, doubling the piece count and
        // pattern-searching every interior vertex with a shrinking step.
        // Every candidate is a genuine coordinate polyline measured by the
        // same quadrature, so the certified-upper-bound property survives.
        const std::array<double, 3> pa = verts.front(), pb = verts.back();
        const double r_min = g.r_nodes.front(), r_max = g.r_nodes.back();
        const double span =
            std::max({std::fabs(pb[0] - pa[0]), std::fabs(pb[1] - pa[1]),
                      std::fabs(pb[2] - pa[2]), 1e-3});
        std::vector<std::array<double, 3>> s = {pa, pb};
        for (int pieces = 2; pieces <= 32; pieces *= 2) {
            std::vector<std::array<double, 3>> w;
            w.reserve(2 * s.size());
            for (std::size_t i = 0; i + 1 < s.size(); ++i) {
                w.push_back(s[i]);
                w.push_back({0.5 * (s[i][0] + s[i + 1][0]),
                             0.5 * (s[i][1] + s[i + 1][1]),
                             0.5 * (s[i][2] + s[i + 1][2])});
            }
            w.push_back(s.back());
            s = std::move(w);

            double delta = 1.5 * span / pieces;
            const double delta_min = span / (pieces * 512.0);
            for (int sweep = 0; sweep < 100 && delta > delta_min; ++sweep) {
                bool improved = false;
                for (std::size_t i = 1; i + 1 < s.size(); ++i) {
                    double cur = seg(s[i - 1], s[i]) + seg(s[i], s[i + 1]);
                    for (int c = 0; c < 3; ++c)
                        for (double sgn : {1.0, -1.0}) {
                            std::array<double, 3> cand = s[i];
                            cand[c] += sgn * delta;
                            if (c == 0) cand[0] = std::clamp(cand[0], r_min, r_max);
                            if (cand[c] == s[i][c]) continue;
                            const double trial =
                                seg(s[i - 1], cand) + seg(cand, s[i + 1]);
                            if (trial < cur) {
                                s[i] = cand;
                                cur = trial;
                                improved = true;
                            }
                        }
                }
                if (!improved) delta *= 0.5;
            }
        }
        verts = std::move(s);
    }

    std::vector<double> lens(verts.size() - 1);
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) lens[i] = seg(verts[i], verts[i + 1]);
    out.path.pts = std::move(verts);
    out.path.modes.assign(lens.size(), segment_mode::general);
    out.path.total_length = pairwise_sum(lens);
    out.value = opt.refine ? std::min(out.path.total_length, out.raw_value) : out.raw_value;
    return out;
}

inline double grid_distance(const warped_metric& m, const std::array<double, 3>& p,
                            const std::array<double, 3>& q, int n_r, int n_th, int n_xi,
                            const grid_options& opt = {}) {
    return grid_distance_detail(m, p, q, n_r, n_th, n_xi, opt).value;
}

// sup of the path-family bound over a 12 x 12 x 4 point sample; the family
// integrals are tabulated once per mid radius so the pair loop is O(1) per
// pair
inline double diameter_upper_bound(const warped_metric& m) {
    const int NR = 12, NT = 12, NX = 4;
    std::vector<double> rs(NR), ths(NT), xis(NX);
    for (int i = 0; i < NR; ++i) rs[i] = m.a * (i + 0.5) / NR;
    for (int j = 0; j < NT; ++j) ths[j] = two_pi * j / NT;
    for (int k = 0; k < NX; ++k) xis[k] = two_pi * k / NX;

    std::vector<double> mids = {0.5 * m.a};
    if (auto rw = deep_well_radius(m)) mids.push_back(*rw);

    const int n_prefix = 3072;  // multiple of NT so sample angles sit on prefix nodes
    struct mid_tables {
        std::vector<std::vector<double>> rad;  // [NR][NT] radial cost to mid
        std::vector<double> prefix;            // cumulative angular cost at mid
        std::vector<double> fib;               // phi at (mid, theta_j)
        double ring = 0.0;                     // full angular loop at mid
    };
    std::vector<mid_tables> tabs(mids.size());
    for (std::size_t mi = 0; mi < mids.size(); ++mi) {
        const double mid = mids[mi];
        auto& T = tabs[mi];
        T.rad.assign(NR, std::vector<double>(NT, 0.0));
        for (int i = 0; i < NR; ++i)
            for (int j = 0; j < NT; ++j) {
                const double lo = std::min(rs[i], mid), hi = std::max(rs[i], mid);
                if (lo == hi) continue;
                T.rad[i][j] = integrate_segmented(
                                  [&](double r) { return 1.0 / m.phi.eval(r, ths[j]); },
                                  lo, hi, m.u.knots, {})
                                  .value;
            }
        T.prefix.assign(n_prefix + 1, 0.0);
        const double h = two_pi / n_prefix;
        double acc = 0.0;
        double f_prev = m.u.eval(mid) / m.phi.eval(mid, 0.0);
        for (int s = 1; s <= n_prefix; ++s) {
            const double f = m.u.eval(mid) / m.phi.eval(mid, s * h);
            acc += 0.5 * (f_prev + f) * h;
            T.prefix[s] = acc;
            f_prev = f;
        }
        T.ring = acc;
        T.fib.resize(NT);
        for (int j = 0; j < NT; ++j) T.fib[j] = m.phi.eval(mid, ths[j]);
    }

    auto ang_cost = [&](const mid_tables& T, int j0, int j1) {
        const double a0 = T.prefix[j0 * (n_prefix / NT)];
        const double a1 = T.prefix[j1 * (n_prefix / NT)];
        const double fwd = std::fabs(a1 - a0);
        return std::min(fwd, T.ring - fwd);
    };

    double sup = 0.0;
    for (int i0 = 0; i0 < NR; ++i0)
        for (int j0 = 0; j0 < NT; ++j0)
            for (int k0 = 0; k0 < NX; ++k0)
                for (int i1 = 0; i1 < NR; ++i1)
                    for (int j1 = 0; j1 < NT; ++j1)
                        for (int k1 = 0; k1 < NX; ++k1) {
                            const double dxi =
                                std::fabs(wrap_angle(xis[k1] - xis[k0]));
                            double best = std::numeric_limits<double>::infinity();
                            for (const auto& T : tabs) {
                                const double v = T.rad[i0][j0] + ang_cost(T, j0, j1) +
                                                 T.fib[j1] * dxi + T.rad[i1][j1];
                                best = std::min(best, v);
                            }
                            sup = std::max(sup, best);
                        }
    return sup;
}

struct shortcut_row {
    double A = 0.0;
    double d_upper = 0.0;
    double d_limit = pi;  // fiber distance of the limit metric
    double gap = 0.0;
};

struct shortcut_table {
    std::vector<shortcut_row> rows;
    bool all_below_limit = true;
    bool decreasing = true;       // d_upper decreasing in A
    bool gaps_tightening = true;  // successive differences decreasing
};

// antipodal fiber pair at radius r*: upper bounds across the family against
// the limit distance pi
inline shortcut_table shortcut_experiment(const std::vector<double>& A_list, double r_star) {
    if (!(r_star > 0.0 && r_star < 1.0 / 40.0))
        throw domain_error("shortcut_experiment: need 0 < r* < 1/40");
    shortcut_table tab;
    for (double A : A_list) {
        drawstring_params prm;
        prm.A = A;
        const warped_metric m = build_drawstring(prm);
        const std::array<double, 3> p{r_star, 0.0, 0.0};
        const std::array<double, 3> q{r_star, 0.0, pi};
        const path_bound b = path_family_upper_bound(m, p, q);
        shortcut_row row;
        row.A = A;
        row.d_upper = b.length;
        row.gap = pi - b.length;
        if (!(row.d_upper < pi) && A >= 2.0) tab.all_below_limit = false;
        tab.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < tab.rows.size(); ++i)
        if (!(tab.rows[i + 1].d_upper < tab.rows[i].d_upper)) tab.decreasing = false;
    for (std::size_t i = 0; i + 2 < tab.rows.size(); ++i) {
        const double d0 = tab.rows[i].d_upper - tab.rows[i + 1].d_upper;
        const double d1 = tab.rows[i + 1].d_upper - tab.rows[i + 2].d_upper;
        if (!(d1 < d0)) tab.gaps_tightening = false;
    }
    return tab;
}

} // namespace warpgeo
