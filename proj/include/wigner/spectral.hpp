#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wigner/ensembles.hpp"

namespace wigner {

using Complex = std::complex<double>;

// Sorted eigenvalues of one matrix sample, optionally with eigenvector
// sup-norms.
struct Spectrum {
    Eigen::VectorXd lambda;  // ascending
    std::optional<Eigen::VectorXd> evec_supnorms;
    std::uint64_t source_seed = 0;

    int n() const { return static_cast<int>(lambda.size()); }
};

// Full eigendecomposition; the single source of truth for Green's function
// entries and m_N.  Exactly one of u_real / u_cplx is populated.
struct EigenSystem {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd u_real;
    Eigen::MatrixXcd u_cplx;
    bool complex_basis = false;

    int n() const { return static_cast<int>(lambda.size()); }
    Spectrum spectrum(bool with_supnorms = false) const;
};

// LAPACK-backed exact diagonalization (dsyevd/zheevd).
Spectrum eigenvalues(const MatrixSample& m, bool want_vectors = false);
EigenSystem eigensystem(const MatrixSample& m);
Eigen::VectorXd eigenvalues_only(const MatrixSample& m);

// semicircle density sqrt((4 - e^2)_+) / (2 pi)
double rho_sc(double e);

// Stieltjes transform of the semicircle law: the root of m^2 + z m + 1 = 0
// with positive imaginary part.  Requires Im z > 0.
Complex m_sc(Complex z);

// cumulative semicircle law: integral of rho_sc over (-2, x]
double semicircle_cdf(double x);

struct ClassicalLocations {
    int n = 0;
    Eigen::VectorXd gamma;  // strictly increasing, gamma(n-1) == 2

    // gamma_i for 1-based index i
    double operator()(int i) const { return gamma(i - 1); }
};

ClassicalLocations classical_locations(int n);

// single classical location: root of semicircle_cdf(x) = q, q in (0, 1]
double classical_location(double q);

// m_N(z) = (1/N) sum 1/(lambda_i - z); requires Im z != 0
Complex empirical_stieltjes(const Spectrum& s, Complex z);

// G_ij(z) from the eigendecomposition
Complex green_entry(const EigenSystem& sys, int i, int j, Complex z);
Complex green_entry(const MatrixSample& m, int i, int j, Complex z);

struct RigidityReport {
    double max_scaled_dev = 0.0;  // max bulk N |lambda_i - gamma_i|
    int worst_index = 0;          // 1-based
    Eigen::VectorXd edge_adaptive;  // per-index N^{2/3} min(i, N-i+1)^{1/3} |..|
};

RigidityReport rigidity_report(const Spectrum& s, double alpha);

// max over i of sqrt(N) ||u_i||_inf; requires evec_supnorms
double delocalization_report(const Spectrum& s);

// sup over a rectangular grid of the spectral domain D of |m_N - m_sc| N eta,
// with eta >= N^-eta_exponent; the local-law diagnostic.
struct LocalLawReport {
    double sup_scaled_dev = 0.0;  // sup |m_N - m_sc| * N * eta
    double worst_e = 0.0, worst_eta = 0.0;
};

LocalLawReport local_law_report(const Spectrum& s, int n_energies, int n_etas,
                                double eta_min, double eta_max = 10.0,
                                double e_max = 10.0);

}  // namespace wigner
