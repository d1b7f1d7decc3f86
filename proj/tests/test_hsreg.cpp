#include "doctest.h"

#include <cmath>

#include "wigner/hsreg.hpp"
#include "wigner/rng.hpp"

using namespace wigner;

namespace {

Spectrum classical_spectrum(int n) {
    Spectrum s;
    s.lambda = classical_locations(n).gamma;
    return s;
}

}  // namespace

TEST_CASE("HS params") {
    HSParams p;
    CHECK(p.eta1(100) == doctest::Approx(std::pow(100.0, -1.05)));
    CHECK(p.eta2(100) == doctest::Approx(std::pow(100.0, -0.05) / 100.0));
    CHECK(p.eta1(100) == doctest::Approx(p.eta2(100)));  // delta1 == delta2
    CHECK_NOTHROW(p.validate());
    p.delta = 0.0;
    CHECK_THROWS(p.validate());
}

TEST_CASE("counting kernel plateaus and derivatives") {
    const double eta1 = 0.01;
    const auto f = smoothed_counting_kernel(0.3, eta1);
    CHECK(f(0.3) == 1.0);
    CHECK(f(-5.0) == 1.0);
    CHECK(f(0.3 + eta1) == 0.0);
    CHECK(f(2.0) == 0.0);
    CHECK(f(0.3 + eta1 / 2.0) == doctest::Approx(0.5).epsilon(1e-14));

    // grid sup of |f'| eta1 equals the mollifier slope bound 2
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double x = 0.3 + eta1 * i / 4000.0;
        sup = std::max(sup, std::abs(f.d1(x)) * eta1);
    }
    CHECK(sup == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(sup <= 4.0);

    // d1, d2 against central differences
    const double h = 1e-7 * eta1;
    for (double x : {0.3 + 0.2 * eta1, 0.3 + 0.5 * eta1, 0.3 + 0.8 * eta1}) {
        const double fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
        const double fd2 = (f.d1(x + h) - f.d1(x - h)) / (2.0 * h);
        CHECK(f.d1(x) == doctest::Approx(fd1).epsilon(1e-5));
        CHECK(f.d2(x) == doctest::Approx(fd2).epsilon(1e-5));
    }
    CHECK_THROWS(smoothed_counting_kernel(0.0, 0.0));
}

TEST_CASE("HS identity A + B + dropped == tr f on deterministic spectra") {
    HSParams p;
    const auto s = classical_spectrum(30);
    for (double e : {-1.0, 0.0, 0.37, 1.2}) {
        const auto f = smoothed_counting_kernel(e, p.eta1(30));
        const auto h = hs_functional(s, f, p);
        CHECK(h.total() ==
              doctest::Approx(trace_kernel(s, f)).epsilon(1e-5));
    }
    // kernel centered exactly on an eigenvalue
    const auto f_on = smoothed_counting_kernel(s.lambda(14), p.eta1(30));
    const auto h_on = hs_functional(s, f_on, p);
    CHECK(h_on.total() ==
          doctest::Approx(trace_kernel(s, f_on)).epsilon(1e-5));
}

TEST_CASE("HS identity on a sampled matrix") {
    Rng rng(23);
    const auto m = sample_matrix(goe_spec(40), rng, 23);
    const auto s = eigenvalues(m);
    HSParams p;
    const auto f = smoothed_counting_kernel(0.1, p.eta1(40));
    const auto h = hs_functional(s, f, p);
    const double tr = trace_kernel(s, f);
    CHECK(h.total() == doctest::Approx(tr).epsilon(1e-5));
    // the dropped remainder is small next to the kept part
    CHECK(std::abs(h.dropped_terms) < 1.0);
}

TEST_CASE("tilde index range and window validation") {
    HSParams p;
    const auto [lo, hi] = tilde_index_range(200, p, 0.1);
    CHECK(lo >= 2);
    CHECK(hi <= 199);
    CHECK(lo <= hi);
    const auto s = classical_spectrum(60);
    CHECK_THROWS(make_tilde_grid(s, 1, p));
    CHECK_THROWS(make_tilde_grid(s, 60, p));
    CHECK_NOTHROW(make_tilde_grid(s, 30, p));
}

TEST_CASE("tilde lambda tracks the eigenvalue on a deterministic spectrum") {
    HSParams p;
    const int n = 60;
    const auto s = classical_spectrum(n);
    const double eta1 = p.eta1(n);

    const auto r30 = tilde_lambda(s, 30, p);
    CHECK(r30.window_lo < s.lambda(29));
    CHECK(r30.window_hi > s.lambda(29));
    // the construction confines tilde lambda to lambda_i +- 3 eta1, and the
    // smoothing bias keeps it well inside
    CHECK(r30.exact_gap_to_lambda <= 3.0 * eta1);
    CHECK(r30.exact_gap_to_lambda <=
          10.0 * std::pow(static_cast<double>(n), -1.0 - p.delta / 2.0));

    // frozen grid reproduces the index-based overload exactly
    const auto grid = make_tilde_grid(s, 30, p);
    CHECK(tilde_lambda(s, grid, p).value == r30.value);

    // monotone across neighboring indices
    const auto r31 = tilde_lambda(s, 31, p);
    CHECK(r31.value > r30.value);

    // quadrature error estimate is tiny on the frozen grid
    const auto est = tilde_lambda(s, 30, p, true);
    CHECK(est.quad_error_estimate <= 1e-6);
}

TEST_CASE("fd_entry_derivative closed forms") {
    Rng rng(31);
    const auto m = sample_matrix(goe_spec(12), rng, 31);

    MatrixFunctional trace = [](const MatrixSample& x) { return x.trace(); };
    MatrixFunctional frob2 = [](const MatrixSample& x) {
        const double f = x.frobenius_norm();
        return f * f;
    };

    SUBCASE("trace derivative") {
        const auto dd = fd_entry_derivative(trace, m, 3, 3, 1);
        CHECK(dd.estimate == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(!dd.noisy);
        const auto od = fd_entry_derivative(trace, m, 1, 4, 1);
        CHECK(od.estimate == doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("squared Frobenius norm, first and second order") {
        const auto d1 = fd_entry_derivative(frob2, m, 2, 5, 1);
        CHECK(d1.estimate ==
              doctest::Approx(4.0 * m.hr(2, 5)).epsilon(1e-8));
        const auto d1d = fd_entry_derivative(frob2, m, 4, 4, 1);
        CHECK(d1d.estimate ==
              doctest::Approx(2.0 * m.hr(4, 4)).epsilon(1e-8));
        const auto d2 = fd_entry_derivative(frob2, m, 2, 5, 2);
        CHECK(d2.estimate == doctest::Approx(4.0).epsilon(1e-3));
        const auto d2d = fd_entry_derivative(frob2, m, 4, 4, 2);
        CHECK(d2d.estimate == doctest::Approx(2.0).epsilon(1e-3));
    }

    SUBCASE("theta rescales the base point") {
        const auto d = fd_entry_derivative(frob2, m, 2, 5, 1, 0.5);
        CHECK(d.estimate ==
              doctest::Approx(4.0 * 0.5 * m.hr(2, 5)).epsilon(1e-8));
    }

    SUBCASE("imaginary direction") {
        Rng crng(32);
        const auto cm = sample_matrix(gue_spec(10), crng, 32);
        const auto d = fd_entry_derivative(frob2, cm, 1, 6, 1, 1.0, 0.0, true);
        CHECK(d.estimate ==
              doctest::Approx(4.0 * cm.hc(1, 6).imag()).epsilon(1e-8));
        CHECK_THROWS(fd_entry_derivative(frob2, cm, 2, 2, 1, 1.0, 0.0, true));
        CHECK_THROWS(fd_entry_derivative(frob2, m, 1, 4, 1, 1.0, 0.0, true));
    }

    SUBCASE("order validation") {
        CHECK_THROWS(fd_entry_derivative(frob2, m, 0, 1, 3));
    }
}
