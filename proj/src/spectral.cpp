#include "wigner/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace wigner {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd supnorms_real(const Eigen::MatrixXd& u) {
    const int n = static_cast<int>(u.cols());
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) out(j) = u.col(j).cwiseAbs().maxCoeff();
    return out;
}

Eigen::VectorXd supnorms_cplx(const Eigen::MatrixXcd& u) {
    const int n = static_cast<int>(u.cols());
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) out(j) = u.col(j).cwiseAbs().maxCoeff();
    return out;
}

void syevd(Eigen::MatrixXd& a, Eigen::VectorXd& w, bool vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N',
                                     'L', n, a.data(), n, w.data());
    if (info != 0) throw std::runtime_error("dsyevd failed");
}

void heevd(Eigen::MatrixXcd& a, Eigen::VectorXd& w, bool vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    lapack_int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n,
        reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
    if (info != 0) throw std::runtime_error("zheevd failed");
}

}  // namespace

Spectrum EigenSystem::spectrum(bool with_supnorms) const {
    Spectrum s;
    s.lambda = lambda;
    if (with_supnorms) {
        s.evec_supnorms =
            complex_basis ? supnorms_cplx(u_cplx) : supnorms_real(u_real);
    }
    return s;
}

Spectrum eigenvalues(const MatrixSample& m, bool want_vectors) {
    const int n = m.n();
    Spectrum s;
    s.lambda.resize(n);
    s.source_seed = m.seed;
    if (m.is_complex()) {
        Eigen::MatrixXcd a = m.hc;
        heevd(a, s.lambda, want_vectors);
        if (want_vectors) s.evec_supnorms = supnorms_cplx(a);
    } else {
        Eigen::MatrixXd a = m.hr;
        syevd(a, s.lambda, want_vectors);
        if (want_vectors) s.evec_supnorms = supnorms_real(a);
    }
    return s;
}

EigenSystem eigensystem(const MatrixSample& m) {
    const int n = m.n();
    EigenSystem sys;
    sys.lambda.resize(n);
    if (m.is_complex()) {
        sys.complex_basis = true;
        sys.u_cplx = m.hc;
        heevd(sys.u_cplx, sys.lambda, true);
    } else {
        sys.u_real = m.hr;
        syevd(sys.u_real, sys.lambda, true);
    }
    return sys;
}

Eigen::VectorXd eigenvalues_only(const MatrixSample& m) {
    return eigenvalues(m, false).lambda;
}

double rho_sc(double e) {
    const double d = 4.0 - e * e;
    return d > 0.0 ? std::sqrt(d) / (2.0 * kPi) : 0.0;
}

Complex m_sc(Complex z) {
    if (z.imag() <= 0.0) throw std::invalid_argument("m_sc: need Im z > 0");
    // (-z + sqrt(z^2 - 4)) / 2 with the branch chosen so Im m > 0
    Complex r = std::sqrt(z * z - 4.0);
    if ((z + r).imag() <= 0.0) r = -r;
    return (-z + r) / 2.0;
}

double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * kPi) +
           std::asin(x / 2.0) / kPi;
}

double classical_location(double q) {
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("classical_location: q outside (0,1]");
    if (q == 1.0) return 2.0;
    double lo = -2.0, hi = 2.0;
    // bisection; semicircle_cdf is strictly increasing on [-2, 2]
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (semicircle_cdf(mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ClassicalLocations classical_locations(int n) {
    ClassicalLocations cl;
    cl.n = n;
    cl.gamma.resize(n);
    for (int i = 1; i <= n; ++i)
        cl.gamma(i - 1) = classical_location(static_cast<double>(i) / n);
    return cl;
}

Complex empirical_stieltjes(const Spectrum& s, Complex z) {
    if (z.imag() == 0.0)
        throw std::invalid_argument("empirical_stieltjes: z must be off-axis");
    Complex acc = 0.0;
    for (int i = 0; i < s.n(); ++i) acc += 1.0 / (s.lambda(i) - z);
    return acc / static_cast<double>(s.n());
}

Complex green_entry(const EigenSystem& sys, int i, int j, Complex z) {
    Complex acc = 0.0;
    if (sys.complex_basis) {
        for (int k = 0; k < sys.n(); ++k)
            acc += sys.u_cplx(i, k) * std::conj(sys.u_cplx(j, k)) /
                   (sys.lambda(k) - z);
    } else {
        for (int k = 0; k < sys.n(); ++k)
            acc += sys.u_real(i, k) * sys.u_real(j, k) / (sys.lambda(k) - z);
    }
    return acc;
}

Complex green_entry(const MatrixSample& m, int i, int j, Complex z) {
    return green_entry(eigensystem(m), i, j, z);
}

RigidityReport rigidity_report(const Spectrum& s, double alpha) {
    const int n = s.n();
    const ClassicalLocations cl = classical_locations(n);
    RigidityReport r;
    r.edge_adaptive.resize(n);
    const int lo = static_cast<int>(std::ceil(alpha * n));
    const int hi = static_cast<int>(std::floor((1.0 - alpha) * n));
    for (int i = 1; i <= n; ++i) {
        const double dev = std::abs(s.lambda(i - 1) - cl(i));
        const double k = std::min(i, n - i + 1);
        r.edge_adaptive(i - 1) =
            std::pow(n, 2.0 / 3.0) * std::cbrt(k) * dev / n;
        if (i >= lo && i <= hi) {
            const double scaled = n * dev;
            if (scaled > r.max_scaled_dev) {
                r.max_scaled_dev = scaled;
                r.worst_index = i;
            }
        }
    }
    return r;
}

double delocalization_report(const Spectrum& s) {
    if (!s.evec_supnorms)
        throw std::invalid_argument("delocalization_report: no eigenvectors");
    return std::sqrt(static_cast<double>(s.n())) *
           s.evec_supnorms->maxCoeff();
}

LocalLawReport local_law_report(const Spectrum& s, int n_energies, int n_etas,
                                double eta_min, double eta_max, double e_max) {
    LocalLawReport rep;
    const double n = static_cast<double>(s.n());
    for (int a = 0; a < n_energies; ++a) {
        const double e = -e_max + 2.0 * e_max * (a + 0.5) / n_energies;
        for (int b = 0; b < n_etas; ++b) {
            // geometric grid in eta
            const double t = (n_etas == 1) ? 0.0
                                           : static_cast<double>(b) /
                                                 (n_etas - 1);
            const double eta =
                eta_min * std::pow(eta_max / eta_min, t);
            const Complex z(e, eta);
            const double dev =
                std::abs(empirical_stieltjes(s, z) - m_sc(z)) * n * eta;
            if (dev > rep.sup_scaled_dev) {
                rep.sup_scaled_dev = dev;
                rep.worst_e = e;
                rep.worst_eta = eta;
            }
        }
    }
    return rep;
}

}  // namespace wigner
