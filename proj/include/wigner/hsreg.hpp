#pragma once

#include <functional>
#include <vector>

#include "wigner/spectral.hpp"

namespace wigner {

// Quadrature controls for the Helffer-Sjostrand plane integrals.
struct QuadControls {
    int n_gl = 16;        // Gauss-Legendre points per panel
    int n_panels_e = 8;   // panels across the eta1 transition window in e
    int n_sigma = 12;     // sigma panels on the chi' support [1, 2]
    int refine = 1;       // multiply all panel counts (error estimation)
};

struct HSParams {
    double delta = 0.05;  // regularization exponent, delta1 = delta2 = delta
    double eps = 0.1;     // accuracy exponent, eps1 = eps/2
    QuadControls quad;

    double eta1(int n) const;  // N^{-1-delta}
    double eta2(int n) const;  // N^{-delta}/N
    void validate() const;     // 0 < delta < 1, 0 < eps < 1
};

// C-infinity counting kernel: f_E(x) = 1 for x <= E, 0 for x >= E + eta1.
struct CountingKernel {
    double e_center = 0.0;
    double eta1 = 0.0;

    double operator()(double x) const;
    double d1(double x) const;
    double d2(double x) const;
};

CountingKernel smoothed_counting_kernel(double e_center, double eta1);

// One evaluation of the Helffer-Sjostrand representation of tr f_E from the
// empirical Stieltjes transform.  A_E carries the chi' terms, B_E the
// sigma > eta2 Re-part, dropped_terms the two small-sigma remainders; the
// exact identity A_E + B_E + dropped_terms = tr f_E holds up to quadrature.
struct HSFunctional {
    double a_e = 0.0;
    double b_e = 0.0;
    double dropped_terms = 0.0;

    double total() const { return a_e + b_e + dropped_terms; }
};

HSFunctional hs_functional(const Spectrum& s, const CountingKernel& f_e,
                           const HSParams& p);

// direct trace, for identity checks
double trace_kernel(const Spectrum& s, const CountingKernel& f_e);

struct RegularizedEigenvalue {
    int i = 0;
    double value = 0.0;
    double window_lo = 0.0, window_hi = 0.0;  // I = [gamma_j, gamma_k]
    double quad_error_estimate = 0.0;
    double exact_gap_to_lambda = 0.0;  // |tilde lambda_i - lambda_i|
};

// Frozen E-integration layout for tilde_lambda.  Building it once from a
// base spectrum and reusing it across entry-perturbed copies makes finite
// differences of tilde_lambda smooth in the perturbation.
struct TildeGrid {
    int i = 0;
    double gamma_j = 0.0, gamma_k = 0.0;
    double e_lo = 0.0, e_hi = 0.0;  // numeric window around lambda_i
    std::vector<double> panel_edges;
};

TildeGrid make_tilde_grid(const Spectrum& s, int i, const HSParams& p);

RegularizedEigenvalue tilde_lambda(const Spectrum& s, const TildeGrid& grid,
                                   const HSParams& p,
                                   bool with_error_estimate = false);
RegularizedEigenvalue tilde_lambda(const Spectrum& s, int i, const HSParams& p,
                                   bool with_error_estimate = false);
RegularizedEigenvalue tilde_lambda(const MatrixSample& m, int i,
                                   const HSParams& p,
                                   bool with_error_estimate = false);

// smallest and largest admissible bulk index for the window construction
std::pair<int, int> tilde_index_range(int n, const HSParams& p, double alpha);

// Central finite difference of a scalar matrix functional in the (a, b)
// entry direction (mirrored to keep the matrix self-adjoint), evaluated at
// theta^{ab} H, with Richardson extrapolation over steps {h, h/2}.
struct FDProbe {
    double estimate = 0.0;
    double error_gauge = 0.0;  // |D(h/2) - D(h)|
    bool noisy = false;        // gauge exceeds 10% of the estimate
};

using MatrixFunctional = std::function<double(const MatrixSample&)>;

FDProbe fd_entry_derivative(const MatrixFunctional& fun, const MatrixSample& m,
                            int a, int b, int order, double theta = 1.0,
                            double h = 0.0, bool imag_dir = false);

}  // namespace wigner
