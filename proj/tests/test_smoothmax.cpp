#include "doctest.h"

#include <cmath>
#include <vector>

#include "wigner/smoothmax.hpp"
#include "wigner/spectral.hpp"

using namespace wigner;

namespace {

// deterministic pseudo-random doubles in (0, 1) for fuzz configurations
double next01(std::uint64_t& state) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return (static_cast<double>(state >> 11) + 0.5) /
           static_cast<double>(1ull << 53);
}

Eigen::VectorXd ascending_fuzz(int n, std::uint64_t seed, double step) {
    Eigen::VectorXd v(n);
    std::uint64_t st = seed;
    double acc = -1.0;
    for (int i = 0; i < n; ++i) {
        acc += step * (0.1 + next01(st));
        v(i) = acc;
    }
    return v;
}

}  // namespace

TEST_CASE("params factory and validation") {
    const auto p = RegularizationParams::for_n(100, 0.5, 0.1);
    CHECK(p.beta == doctest::Approx(10.0));
    CHECK(p.nu == doctest::Approx(100.0 / std::sqrt(std::log(100.0))));
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.frak_a = 0.6;  // frak_a >= gamma
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.beta = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("log_esp closed forms") {
    CHECK(log_esp({0.3, 1.7}, 0) == 0.0);
    // equal weights 1: e_2(1,1,1) = C(3,2) = 3
    CHECK(log_esp({0.0, 0.0, 0.0}, 2) == doctest::Approx(std::log(3.0)));
    // e_2(1,2,3) = 11
    CHECK(log_esp({std::log(1.0), std::log(2.0), std::log(3.0)}, 2) ==
          doctest::Approx(std::log(11.0)).epsilon(1e-14));
    // e_3(1,2,3) = 6
    CHECK(log_esp({std::log(1.0), std::log(2.0), std::log(3.0)}, 3) ==
          doctest::Approx(std::log(6.0)).epsilon(1e-14));
    // ell beyond the weight count
    CHECK(std::isinf(log_esp({0.0, 0.0}, 3)));
    // extreme magnitudes stay finite in log domain
    const double big = log_esp({800.0, 750.0, -700.0}, 2);
    CHECK(big == doctest::Approx(1550.0).epsilon(1e-12));
}

TEST_CASE("log_esp against brute-force subset enumeration") {
    std::vector<double> lw;
    std::uint64_t st = 77;
    for (int i = 0; i < 10; ++i) lw.push_back(4.0 * next01(st) - 2.0);
    for (int ell = 1; ell <= 4; ++ell) {
        double sum = 0.0;
        for (int mask = 0; mask < (1 << 10); ++mask) {
            if (__builtin_popcount(static_cast<unsigned>(mask)) != ell)
                continue;
            double prod = 0.0;
            for (int t = 0; t < 10; ++t)
                if (mask & (1 << t)) prod += lw[t];
            sum += std::exp(prod);
        }
        CHECK(log_esp(lw, ell) ==
              doctest::Approx(std::log(sum)).epsilon(1e-10));
    }
}

TEST_CASE("f_ell closed forms") {
    const auto p = RegularizationParams::for_n(50, 0.6);
    Eigen::VectorXd v(4);
    v << 0.0, 0.25, 0.5, 0.9;
    SUBCASE("single gap") {
        const auto sel = GapSelector::index_set({2});
        CHECK(f_ell(v, sel, 1, p) == doctest::Approx(p.nu * 0.25).epsilon(1e-12));
    }
    SUBCASE("two equal gaps") {
        const auto sel = GapSelector::index_set({1, 2});
        // Z_1 = 2 exp(beta nu g) -> F_1 = nu g + log(2)/beta
        CHECK(f_ell(v, sel, 1, p) ==
              doctest::Approx(p.nu * 0.25 + std::log(2.0) / p.beta)
                  .epsilon(1e-12));
    }
    SUBCASE("ell exceeding gap count throws") {
        const auto sel = GapSelector::index_set({1, 2});
        CHECK_THROWS(f_ell(v, sel, 3, p));
    }
}

TEST_CASE("entropy bound: |nu T_ell - F_ell| <= 2 ell log N / beta") {
    const int n = 40;
    const auto p = RegularizationParams::for_n(n, 0.7);
    std::vector<int> jset;
    for (int j = 5; j <= 30; j += 2) jset.push_back(j);
    const auto sel = GapSelector::index_set(jset);
    for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull}) {
        const auto v = ascending_fuzz(n, seed, 0.05);
        for (int ell = 1; ell <= 3; ++ell) {
            const double f = f_ell(v, sel, ell, p);
            const double t = p.nu * t_ell(v, sel, ell);
            CHECK(std::abs(f - t) <= 2.0 * ell * std::log(n) / p.beta);
        }
    }
}

TEST_CASE("gradient properties") {
    const int n = 20;
    const auto p = RegularizationParams::for_n(n, 0.5);
    const auto v = ascending_fuzz(n, 99, 0.08);
    const auto sel = GapSelector::index_set({2, 4, 5, 9, 13, 17});
    for (int ell : {1, 2, 3}) {
        const auto g = grad_f(v, sel, ell, p);
        // translation invariance: entries sum to zero
        CHECK(std::abs(g.sum()) <= 1e-10 * p.nu);
        // l1 bound 2 nu ell
        CHECK(g.cwiseAbs().sum() <= 2.0 * p.nu * ell + 1e-9);
        // central-difference oracle
        const double h = 1e-6;
        for (int j : {1, 3, 4, 9, 12, 16, 17}) {
            Eigen::VectorXd vp = v, vm = v;
            vp(j) += h;
            vm(j) -= h;
            const double fd = (f_ell(vp, sel, ell, p) - f_ell(vm, sel, ell, p)) /
                              (2.0 * h);
            CHECK(g(j) == doctest::Approx(fd).epsilon(1e-6));
        }
        // indices touching no selected gap have zero gradient
        CHECK(g(10) == 0.0);
        CHECK(g(19) == 0.0);
    }
    CHECK_THROWS(grad_f(v, sel, 7, p));
}

TEST_CASE("cutoff bundle geometry") {
    const int n = 50;
    const CutoffSpec cut;
    const CutoffBundle bundle = cutoff_functions(cut, n, -0.5, 0.5);
    const double scale = std::pow(50.0, 1.1);

    // J_r is contiguous, 1-based, within [1, n-1]
    REQUIRE(!bundle.J_r.empty());
    CHECK(bundle.J_r.front() >= 1);
    CHECK(bundle.J_r.back() <= n - 1);
    for (std::size_t t = 1; t < bundle.J_r.size(); ++t)
        CHECK(bundle.J_r[t] == bundle.J_r[t - 1] + 1);

    // g2: 1 up to b + 0.1/scale, 0 beyond b + 0.2/scale
    CHECK(bundle.g2(0.5) == 1.0);
    CHECK(bundle.g2(0.5 + 0.05 / scale) == 1.0);
    CHECK(bundle.g2(0.5 + 0.2 / scale) == 0.0);
    const double mid = bundle.g2(0.5 + 0.15 / scale);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    // g1 mirrors g2 about the left endpoint
    CHECK(bundle.g1(-0.5) == 1.0);
    CHECK(bundle.g1(-0.5 - 0.2 / scale) == 0.0);

    // transition derivative sup norms
    CHECK(bundle.s_d1_max == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(bundle.s_d2_max > 0.0);
    CHECK(std::isfinite(bundle.s_d3_max));
    CHECK(bundle.s_d3_max > bundle.s_d2_max);
}

TEST_CASE("f_hat endpoint guard and interior consistency") {
    const int n = 50;
    const auto p = RegularizationParams::for_n(n, 0.6);
    const CutoffSpec cut;
    const auto cl = classical_locations(n);
    Eigen::VectorXd v = cl.gamma;

    // endpoints midway between classical locations; all eigenvalues stay
    // outside the rho windows of width n^{-1-eps_w}
    const int ia = 15, ib = 35;
    const double a = 0.5 * (cl(ia) + cl(ia + 1));
    const double b = 0.5 * (cl(ib) + cl(ib + 1));

    SUBCASE("matches the index-set free energy when cutoffs are flat") {
        std::vector<int> inside;
        for (int i = 1; i <= n - 1; ++i)
            if (v(i - 1) > a && v(i - 1) < b) inside.push_back(i);
        const auto sel = GapSelector::index_set(inside);
        for (int ell : {1, 2, 3})
            CHECK(f_hat(v, a, b, ell, p, cut) ==
                  doctest::Approx(f_ell(v, sel, ell, p)).epsilon(1e-12));
    }

    SUBCASE("eigenvalue on the endpoint kills the guard") {
        Eigen::VectorXd w = v;
        w(ia) = a;  // still ascending; exactly on the left endpoint
        CHECK(f_hat(w, a, b, 1, p, cut) == 0.0);
    }

    SUBCASE("insensitive to spectrum far outside the window") {
        const double base = f_hat(v, a, b, 2, p, cut);
        Eigen::VectorXd w = v;
        w(0) -= 0.3;  // index 1 is far outside J_r
        w(n - 1) += 0.3;
        CHECK(f_hat(w, a, b, 2, p, cut) == base);
    }

    SUBCASE("ell larger than the candidate count returns zero") {
        CHECK(f_hat(v, a, b, 45, p, cut) == 0.0);
    }
}
