// Small-radius volume expansions: the background geodesic ball against its
// closed-form series, then the corner-wedge image volume whose t^5
// coefficient flips sign as the fiber slope k crosses its critical value.

#include <cstdio>

#include "warpgeo/c1alpha.hpp"
#include "warpgeo/geodesics.hpp"

using namespace warpgeo;

int main() {
    const warped_metric g0 =
        make_warped_metric(make_round_profile(pi), warp_field::constant(1.0), "round");
    const std::array<double, 3> q{0.5 * pi, 0.0, 0.0};

    std::printf("background ball volumes\n");
    std::vector<std::pair<double, double>> vols;
    for (double t : {0.1, 0.05, 0.025}) {
        const double v = ball_volume(g0, q, t, 512);
        const double series = 4.0 * pi / 3.0 * t * t * t * (1.0 - t * t / 15.0);
        std::printf("  t=%-6g vol %.12e   series %.12e\n", t, v, series);
        vols.emplace_back(t, v);
    }
    const expansion_fit fit = fit_expansion(vols);
    std::printf("  c3 %.8e (exact %.8e)\n", fit.c3, 4.0 * pi / 3.0);
    std::printf("  c5 %.8e (exact %.8e)\n\n", fit.c5, -4.0 * pi / 45.0);

    const double alpha = 0.5;
    const double ks = kstar(alpha);
    const double rho0 = 0.5 * rho_star(alpha, 2.0 * ks);
    const double delta = std::atan(1.0 / alpha) - std::atan(alpha);
    std::printf("corner wedge, alpha = 1/2, rho0 = %.6e (reduced sampling)\n", rho0);
    const tangent_region region = wedge_region(alpha, rho0);
    for (double k : {0.0, ks, 2.0 * ks}) {
        c1alpha_params cp;
        cp.alpha = alpha;
        cp.k = k;
        const warped_metric m = build_c1alpha(cp);
        std::vector<std::pair<double, double>> wv;
        for (double t : {1.0, 0.5, 0.25})
            wv.emplace_back(t, region_volume_via_exp(m, q, region, t, 5000, 2026, 4).value);
        const expansion_fit wfit = fit_expansion(wv);
        const double closed = std::sqrt(3.0) * std::pow(rho0, 5) / 6.0 *
                              (k * (1.0 - alpha * alpha) / (1.0 + alpha * alpha) - delta);
        std::printf("  k=%-10.6g c5 %.6e   closed form %.6e\n", k, wfit.c5, closed);
    }
    return 0;
}
