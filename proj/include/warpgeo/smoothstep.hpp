#pragma once

#include "warpgeo/common.hpp"

namespace warpgeo {

// Degree-7 smoothstep: s3(0)=0, s3(1)=1, C^3 across the clamped joins.
inline double s3(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return ((( -20.0 * x + 70.0) * x - 84.0) * x + 35.0) * x * x * x * x;
}

inline double s3_d1(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double y = 1.0 - x;
    return 140.0 * x * x * x * y * y * y;   // max 140/64 = 2.1875 at x = 1/2
}

inline double s3_d2(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double y = 1.0 - x;
    return 420.0 * x * x * y * y * (1.0 - 2.0 * x);
}

// antiderivative of s3 vanishing at 0, extended linearly past 1
inline double s3_int(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 0.5 + (x - 1.0);
    return (((( -2.5 * x + 10.0) * x - 14.0) * x + 7.0)) * x * x * x * x * x;
}

// monotone step used by drawstring ramps: 0 for t<=0, 1 for t>=1
inline double eta_step(double t) { return s3(t); }
inline double eta_step_d1(double t) { return s3_d1(t); }

// cutoff bump of the C^{1,alpha} construction: 0 for x<=1/2, 1 for x>=1,
// with |b'| <= 4.375 and |b''| <= 15.74 (inside the 10 / 100 budgets)
inline double bump_b(double x) { return s3(2.0 * x - 1.0); }
inline double bump_b_d1(double x) { return 2.0 * s3_d1(2.0 * x - 1.0); }
inline double bump_b_d2(double x) { return 4.0 * s3_d2(2.0 * x - 1.0); }

// 1-D plateau cutoff: 1 on |x|<=1, 0 on |x|>=2
inline double plateau_c(double x) {
    double ax = std::fabs(x);
    if (ax <= 1.0) return 1.0;
    if (ax >= 2.0) return 0.0;
    return 1.0 - s3(ax - 1.0);
}

inline double plateau_c_d1(double x) {
    double ax = std::fabs(x);
    if (ax <= 1.0 || ax >= 2.0) return 0.0;
    double s = (x > 0.0) ? 1.0 : -1.0;
    return -s * s3_d1(ax - 1.0);
}

inline double plateau_c_d2(double x) {
    double ax = std::fabs(x);
    if (ax <= 1.0 || ax >= 2.0) return 0.0;
    return -s3_d2(ax - 1.0);
}

} // namespace warpgeo
