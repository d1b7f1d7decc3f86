#include "wigner/hsreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wigner/mollifier.hpp"

namespace wigner {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration
struct GLRule {
    std::vector<double> x, w;
};

const GLRule& gl_rule(int n) {
    static std::vector<GLRule> cache(65);
    if (n < 1 || n > 64) throw std::invalid_argument("gl_rule: bad order");
    GLRule& r = cache[n];
    if (!r.x.empty()) return r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

template <typename F>
double integrate_panels(F&& f, double a, double b, int n_panels, int n_gl) {
    const GLRule& r = gl_rule(n_gl);
    double acc = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        const double lo = a + (b - a) * p / n_panels;
        const double hi = a + (b - a) * (p + 1) / n_panels;
        const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        for (int q = 0; q < n_gl; ++q) acc += r.w[q] * hw * f(c + hw * r.x[q]);
    }
    return acc;
}

}  // namespace

double HSParams::eta1(int n) const {
    return std::pow(static_cast<double>(n), -1.0 - delta);
}

double HSParams::eta2(int n) const {
    return std::pow(static_cast<double>(n), -delta) / n;
}

void HSParams::validate() const {
    if (!(delta > 0.0 && delta < 1.0 && eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("HSParams: need delta, eps in (0,1)");
}

double CountingKernel::operator()(double x) const {
    return 1.0 - mollifier::s((x - e_center) / eta1);
}

double CountingKernel::d1(double x) const {
    return -mollifier::s_p((x - e_center) / eta1) / eta1;
}

double CountingKernel::d2(double x) const {
    return -mollifier::s_pp((x - e_center) / eta1) / (eta1 * eta1);
}

CountingKernel smoothed_counting_kernel(double e_center, double eta1) {
    if (!(eta1 > 0.0))
        throw std::invalid_argument("smoothed_counting_kernel: eta1 <= 0");
    return CountingKernel{e_center, eta1};
}

double trace_kernel(const Spectrum& s, const CountingKernel& f_e) {
    double acc = 0.0;
    for (int i = 0; i < s.n(); ++i) acc += f_e(s.lambda(i));
    return acc;
}

namespace {

// sum-over-eigenvalue building blocks (each 1/N-normalized, i.e. values of
// m_N and of its analytic e- and sigma-antiderivatives)

double im_m(const Spectrum& s, double e, double sig) {
    double acc = 0.0;
    for (int i = 0; i < s.n(); ++i) {
        const double d = s.lambda(i) - e;
        acc += sig / (d * d + sig * sig);
    }
    return acc / s.n();
}

double re_m(const Spectrum& s, double e, double sig) {
    double acc = 0.0;
    for (int i = 0; i < s.n(); ++i) {
        const double d = s.lambda(i) - e;
        acc += d / (d * d + sig * sig);
    }
    return acc / s.n();
}

// integral of Im m(e + i sig) over e in (-inf, E]
double int_im_left(const Spectrum& s, double e_up, double sig) {
    double acc = 0.0;
    for (int i = 0; i < s.n(); ++i)
        acc += std::atan((e_up - s.lambda(i)) / sig) + kPi / 2.0;
    return acc / s.n();
}

// integral of Re m(e + i sig) over sig in [eta2, 1]
double int_re_sigma(const Spectrum& s, double e, double eta2) {
    double acc = 0.0;
    for (int i = 0; i < s.n(); ++i) {
        const double d = s.lambda(i) - e;
        if (d != 0.0) acc += std::atan(1.0 / d) - std::atan(eta2 / d);
    }
    return acc / s.n();
}

// integral of sig * Im m(e + i sig) over sig in (0, eta2]
double int_sig_im_small(const Spectrum& s, double e, double eta2) {
    double acc = 0.0;
    for (int i = 0; i < s.n(); ++i) {
        const double d = s.lambda(i) - e;
        acc += (d == 0.0) ? eta2 : eta2 - d * std::atan(eta2 / d);
    }
    return acc / s.n();
}

}  // namespace

HSFunctional hs_functional(const Spectrum& s, const CountingKernel& f_e,
                           const HSParams& p) {
    p.validate();
    const int n = s.n();
    const double eta2 = p.eta2(n);
    const double e0 = f_e.e_center, e1 = f_e.e_center + f_e.eta1;
    const int pe = p.quad.n_panels_e * p.quad.refine;
    const int ps = p.quad.n_sigma * p.quad.refine;
    const int ng = p.quad.n_gl;

    // inner e-integrals over the transition window at fixed sigma
    auto trans_f_im = [&](double sig) {
        return integrate_panels(
            [&](double e) { return f_e(e) * im_m(s, e, sig); }, e0, e1, pe, ng);
    };
    auto trans_fp_re = [&](double sig) {
        return integrate_panels(
            [&](double e) { return f_e.d1(e) * re_m(s, e, sig); }, e0, e1, pe,
            ng);
    };

    HSFunctional out;

    // A_E = -(N/pi) int_{sigma>0} [f_E Im m + sigma f'_E Re m] chi'(sigma),
    // plus the sigma-part of B_E on [1,2] where d(sigma chi) = chi + s chi';
    // both share the same sigma nodes
    double a_acc = 0.0, b2_acc = 0.0;
    {
        const GLRule& r = gl_rule(ng);
        for (int ppanel = 0; ppanel < ps; ++ppanel) {
            const double lo = 1.0 + static_cast<double>(ppanel) / ps;
            const double hi = 1.0 + static_cast<double>(ppanel + 1) / ps;
            const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
            for (int q = 0; q < ng; ++q) {
                const double sig = c + hw * r.x[q];
                const double wq = r.w[q] * hw;
                const double chi = mollifier::chi(sig);
                const double chi_p = mollifier::chi_p(sig);
                const double i_f_im = int_im_left(s, e0, sig) + trans_f_im(sig);
                const double i_fp_re = trans_fp_re(sig);
                a_acc += wq * chi_p * (i_f_im + sig * i_fp_re);
                b2_acc += wq * (chi + sig * chi_p) * i_fp_re;
            }
        }
    }
    out.a_e = -(n / kPi) * a_acc;

    // B_E on eta2 < sigma <= 1 (chi == 1 there): analytic sigma integral
    const double b1 = integrate_panels(
        [&](double e) { return f_e.d1(e) * int_re_sigma(s, e, eta2); }, e0, e1,
        pe, ng);
    out.b_e = (n / kPi) * (b1 + b2_acc);

    // dropped small-sigma remainders
    const double d1 = integrate_panels(
        [&](double e) { return f_e.d1(e) * re_m(s, e, eta2); }, e0, e1, pe, ng);
    const double d2 = integrate_panels(
        [&](double e) { return f_e.d2(e) * int_sig_im_small(s, e, eta2); }, e0,
        e1, pe, ng);
    out.dropped_terms = (n / kPi) * (eta2 * d1 - d2);
    return out;
}

std::pair<int, int> tilde_index_range(int n, const HSParams& p, double alpha) {
    const int off = static_cast<int>(
        std::ceil(1.5 * std::pow(static_cast<double>(n), p.eps / 2.0)));
    int lo = std::max(off + 1, static_cast<int>(std::ceil(alpha * n)));
    int hi = std::min(n - off,
                      static_cast<int>(std::floor((1.0 - alpha) * n)));
    return {lo, hi};
}

TildeGrid make_tilde_grid(const Spectrum& s, int i, const HSParams& p) {
    p.validate();
    const int n = s.n();
    const int off = static_cast<int>(
        std::ceil(1.5 * std::pow(static_cast<double>(n), p.eps / 2.0)));
    const int j = i - off, k = i + off;
    if (j < 1 || k > n)
        throw std::invalid_argument("make_tilde_grid: window exits [1, N]");
    TildeGrid g;
    g.i = i;
    g.gamma_j = classical_location(static_cast<double>(j) / n);
    g.gamma_k = classical_location(static_cast<double>(k) / n);

    // F_E crosses the r-transition only for E within ~eta1 of lambda_i; the
    // integrand is exactly 1 left of the window and exactly 0 right of it
    const double eta1 = p.eta1(n);
    const double li = s.lambda(i - 1);
    g.e_lo = std::max(g.gamma_j, li - 3.0 * eta1);
    g.e_hi = std::min(g.gamma_k, li + 3.0 * eta1);
    const int n_panels =
        std::max(2, static_cast<int>(std::ceil((g.e_hi - g.e_lo) / (eta1 / 2.0))));
    for (int t = 0; t <= n_panels; ++t)
        g.panel_edges.push_back(g.e_lo +
                                (g.e_hi - g.e_lo) * t / n_panels);
    return g;
}

namespace {

double tilde_integral(const Spectrum& s, const TildeGrid& g, const HSParams& p) {
    const double eta1 = p.eta1(s.n());
    // r: 0 for x <= i - 1/2, 1 for x >= i
    auto integrand = [&](double e) {
        const HSFunctional h =
            hs_functional(s, smoothed_counting_kernel(e, eta1), p);
        const double f_kept = h.a_e + h.b_e;
        return 1.0 - mollifier::s(2.0 * (f_kept - g.i + 0.5));
    };
    const GLRule& r = gl_rule(p.quad.n_gl);
    double acc = g.e_lo - g.gamma_j;  // exact plateau: integrand == 1 there
    for (std::size_t t = 0; t + 1 < g.panel_edges.size(); ++t) {
        const double lo = g.panel_edges[t], hi = g.panel_edges[t + 1];
        const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        for (int q = 0; q < p.quad.n_gl; ++q)
            acc += r.w[q] * hw * integrand(c + hw * r.x[q]);
    }
    return acc;  // plateau right of e_hi: integrand == 0, contributes nothing
}

}  // namespace

RegularizedEigenvalue tilde_lambda(const Spectrum& s, const TildeGrid& grid,
                                   const HSParams& p,
                                   bool with_error_estimate) {
    RegularizedEigenvalue out;
    out.i = grid.i;
    out.window_lo = grid.gamma_j;
    out.window_hi = grid.gamma_k;
    out.value = grid.gamma_j + tilde_integral(s, grid, p);
    if (with_error_estimate) {
        HSParams fine = p;
        fine.quad.refine = p.quad.refine * 2;
        const double v2 = grid.gamma_j + tilde_integral(s, grid, fine);
        out.quad_error_estimate = std::abs(v2 - out.value);
    }
    out.exact_gap_to_lambda = std::abs(out.value - s.lambda(grid.i - 1));
    return out;
}

RegularizedEigenvalue tilde_lambda(const Spectrum& s, int i, const HSParams& p,
                                   bool with_error_estimate) {
    return tilde_lambda(s, make_tilde_grid(s, i, p), p, with_error_estimate);
}

RegularizedEigenvalue tilde_lambda(const MatrixSample& m, int i,
                                   const HSParams& p,
                                   bool with_error_estimate) {
    return tilde_lambda(eigenvalues(m, false), i, p, with_error_estimate);
}

namespace {

MatrixSample perturb_entry(const MatrixSample& m, int a, int b, double step,
                           bool imag_dir) {
    MatrixSample out = m;
    if (m.is_complex()) {
        if (a == b) {
            if (imag_dir)
                throw std::invalid_argument(
                    "fd_entry_derivative: diagonal has no imaginary direction");
            out.hc(a, a) += step;
        } else if (imag_dir) {
            out.hc(a, b) += std::complex<double>(0.0, step);
            out.hc(b, a) -= std::complex<double>(0.0, step);
        } else {
            out.hc(a, b) += step;
            out.hc(b, a) += step;
        }
    } else {
        if (imag_dir)
            throw std::invalid_argument(
                "fd_entry_derivative: real matrix has no imaginary direction");
        out.hr(a, b) += step;
        if (a != b) out.hr(b, a) += step;
    }
    return out;
}

MatrixSample scale_entry(const MatrixSample& m, int a, int b, double theta) {
    MatrixSample out = m;
    if (m.is_complex()) {
        out.hc(a, b) *= theta;
        if (a != b) out.hc(b, a) *= theta;
    } else {
        out.hr(a, b) *= theta;
        if (a != b) out.hr(b, a) *= theta;
    }
    return out;
}

}  // namespace

FDProbe fd_entry_derivative(const MatrixFunctional& fun, const MatrixSample& m,
                            int a, int b, int order, double theta, double h,
                            bool imag_dir) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("fd_entry_derivative: order must be 1 or 2");
    const MatrixSample base =
        (theta == 1.0) ? m : scale_entry(m, a, b, theta);
    if (h <= 0.0) h = 1e-4 / std::sqrt(static_cast<double>(m.n()));

    auto eval = [&](double step) {
        return fun(perturb_entry(base, a, b, step, imag_dir));
    };

    double d_h, d_h2;
    if (order == 1) {
        d_h = (eval(h) - eval(-h)) / (2.0 * h);
        d_h2 = (eval(h / 2.0) - eval(-h / 2.0)) / h;
    } else {
        const double f0 = fun(base);
        d_h = (eval(h) - 2.0 * f0 + eval(-h)) / (h * h);
        d_h2 = (eval(h / 2.0) - 2.0 * f0 + eval(-h / 2.0)) / (h * h / 4.0);
    }

    FDProbe probe;
    probe.estimate = (4.0 * d_h2 - d_h) / 3.0;
    probe.error_gauge = std::abs(d_h2 - d_h);
    probe.noisy = probe.error_gauge > 0.1 * std::abs(probe.estimate);
    return probe;
}

}  // namespace wigner
