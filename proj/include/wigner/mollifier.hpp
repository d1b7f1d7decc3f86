#pragma once

#include <cmath>

namespace wigner {

// C-infinity transition s : R -> [0,1] built from sigma(x) = exp(-1/x),
// s(x) = sigma(x) / (sigma(x) + sigma(1-x)).  s = 0 for x <= 0, s = 1 for
// x >= 1, s(1/2) = 1/2.  All smooth cutoffs in the project (f_E, r, chi,
// rho, g1, g2) are rescalings of this one function, so derivative bounds
// transfer by the chain rule.
namespace mollifier {

inline double sigma(double x) {
    return x > 0.0 ? std::exp(-1.0 / x) : 0.0;
}

inline double sigma_p(double x) {  // sigma'
    if (x <= 0.0) return 0.0;
    const double s = std::exp(-1.0 / x);
    return s / (x * x);
}

inline double sigma_pp(double x) {  // sigma''
    if (x <= 0.0) return 0.0;
    const double s = std::exp(-1.0 / x);
    return s * (1.0 - 2.0 * x) / (x * x * x * x);
}

inline double s(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = sigma(x);
    const double b = sigma(1.0 - x);
    return a / (a + b);
}

inline double s_p(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = sigma(x), b = sigma(1.0 - x);
    const double ap = sigma_p(x), bp = sigma_p(1.0 - x);
    const double d = a + b;
    // d/dx [a/(a+b)] with b' = -sigma'(1-x)
    return (ap * b + a * bp) / (d * d);
}

inline double s_pp(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = sigma(x), b = sigma(1.0 - x);
    const double ap = sigma_p(x), bp = sigma_p(1.0 - x);
    const double app = sigma_pp(x), bpp = sigma_pp(1.0 - x);
    const double d = a + b;
    const double num = ap * b + a * bp;        // numerator of s'
    const double dp = ap - bp;                 // d'
    const double nump = app * b - a * bpp;     // num' (the ap*bp terms cancel)
    return (nump * d - 2.0 * num * dp) / (d * d * d);
}

// increasing step: 0 left of [a,b], 1 right of it
inline double step_up(double x, double a, double b) {
    return s((x - a) / (b - a));
}

// decreasing step: 1 left of [a,b], 0 right of it
inline double step_down(double x, double a, double b) {
    return 1.0 - s((x - a) / (b - a));
}

// symmetric bump cutoff: 1 on [-1,1], 0 outside [-2,2]
inline double chi(double x) {
    return step_down(std::abs(x), 1.0, 2.0);
}

inline double chi_p(double x) {
    const double ax = std::abs(x);
    if (ax <= 1.0 || ax >= 2.0) return 0.0;
    const double d = -s_p(ax - 1.0);
    return x > 0.0 ? d : -d;
}

}  // namespace mollifier
}  // namespace wigner
