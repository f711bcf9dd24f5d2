// Geometry summary across the built-in families: total volume, base area,
// minimal-area candidates, polar-cap volumes, and a diameter bound from
// explicit path families.

#include <cstdio>

#include "warpgeo/c1alpha.hpp"
#include "warpgeo/distance.hpp"
#include "warpgeo/drawstring.hpp"
#include "warpgeo/geometry.hpp"

using namespace warpgeo;

static void report(const warped_metric& m, const char* label) {
    std::printf("%s\n", label);
    std::printf("  volume              %.10g\n", total_volume(m).value);
    std::printf("  base area           %.10g\n", base_area(m).value);
    std::printf("  chart diameter      %.10g\n", base_diameter(m));
    std::printf("  path diameter bound %.10g\n", diameter_upper_bound(m));
    for (const auto& c : min_torus_area_candidates(m))
        std::printf("  candidate %-6s r=%-12.6g area %.10g\n", c.kind.c_str(), c.r_c,
                    c.area);
    for (double eps : {0.2, 0.1, 0.05})
        std::printf("  cap volume eps=%-5.3g %.10g\n", eps, cap_volume(m, eps).value);
    std::printf("\n");
}

int main() {
    report(make_warped_metric(make_round_profile(pi), warp_field::constant(1.0), "round"),
           "round product (u = sin r, phi = 1)");
    for (double A : {2.0, 3.0, 4.0}) {
        drawstring_params p;
        p.A = A;
        char label[64];
        std::snprintf(label, sizeof label, "drawstring well, A = %g", A);
        report(build_drawstring(p), label);
    }
    c1alpha_params cp; // corner metric at twice its critical slope
    cp.alpha = 0.5;
    cp.k = 2.0 * kstar(0.5);
    report(build_c1alpha(cp), "corner metric, alpha = 1/2, k = 2k*");
    return 0;
}
