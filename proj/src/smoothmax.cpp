#include "wigner/smoothmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wigner/mollifier.hpp"
#include "wigner/spectral.hpp"

namespace wigner {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double x, double y) {
    if (x == kNegInf) return y;
    if (y == kNegInf) return x;
    const double m = std::max(x, y);
    return m + std::log1p(std::exp(-std::abs(x - y)));
}

// (lower, upper) 0-based vector positions of each selected gap
std::vector<std::pair<int, int>> gap_positions(const Eigen::VectorXd& v,
                                               const GapSelector& sel) {
    std::vector<std::pair<int, int>> pos;
    const int n = static_cast<int>(v.size());
    if (sel.mode == GapSelector::Mode::index_set) {
        for (int j : sel.J) {
            if (j < 1 || j > n - 1)
                throw std::invalid_argument("smoothmax: index out of range");
            pos.emplace_back(j - 1, j);
        }
    } else {
        for (int i = 0; i + 1 < n; ++i)
            if (v(i) >= sel.a && v(i) <= sel.b) pos.emplace_back(i, i + 1);
    }
    return pos;
}

}  // namespace

RegularizationParams RegularizationParams::for_n(int n, double gamma,
                                                 double frak_a) {
    RegularizationParams p;
    p.gamma = gamma;
    p.frak_a = frak_a;
    p.beta = std::pow(static_cast<double>(n), gamma);
    p.nu = wigner::nu(n);
    return p;
}

void RegularizationParams::validate() const {
    if (!(beta > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("RegularizationParams: beta, nu > 0");
    if (!(gamma > frak_a) || frak_a < 0.0)
        throw std::invalid_argument("RegularizationParams: need gamma > frak_a >= 0");
}

double log_esp(const std::vector<double>& lw, int ell) {
    if (ell < 0) throw std::invalid_argument("log_esp: ell < 0");
    if (ell == 0) return 0.0;
    if (static_cast<std::size_t>(ell) > lw.size()) return kNegInf;
    // log e_k updated one weight at a time; stays exact for weights of any
    // magnitude because nothing ever leaves log domain
    std::vector<double> le(ell + 1, kNegInf);
    le[0] = 0.0;
    for (double w : lw)
        for (int k = ell; k >= 1; --k) le[k] = logaddexp(le[k], w + le[k - 1]);
    return le[ell];
}

double z_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell,
             const RegularizationParams& p) {
    const auto gaps = selected_gaps(v, sel);
    std::vector<double> lw(gaps.size());
    for (std::size_t t = 0; t < gaps.size(); ++t)
        lw[t] = p.beta * p.nu * gaps[t];
    return log_esp(lw, ell);
}

double f_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell,
             const RegularizationParams& p) {
    if (ell < 1) throw std::invalid_argument("f_ell: ell < 1");
    const double lz = z_ell(v, sel, ell, p);
    if (lz == kNegInf)
        throw std::invalid_argument("f_ell: ell exceeds number of gaps");
    const double lz_prev = (ell == 1) ? 0.0 : z_ell(v, sel, ell - 1, p);
    return (lz - lz_prev) / p.beta;
}

Eigen::VectorXd grad_f(const Eigen::VectorXd& v, const GapSelector& sel,
                       int ell, const RegularizationParams& p) {
    if (ell < 1) throw std::invalid_argument("grad_f: ell < 1");
    const auto pos = gap_positions(v, sel);
    const int m = static_cast<int>(pos.size());
    if (ell > m) throw std::invalid_argument("grad_f: ell exceeds gap count");

    std::vector<double> lw(m);
    for (int t = 0; t < m; ++t)
        lw[t] = p.beta * p.nu * (v(pos[t].second) - v(pos[t].first));

    // prefix/suffix log-ESP tables: pre[t][k] = log e_k(lw_0..lw_{t-1}),
    // suf[t][k] = log e_k(lw_t..lw_{m-1})
    const int kmax = ell;
    std::vector<std::vector<double>> pre(m + 1,
                                         std::vector<double>(kmax + 1, kNegInf));
    std::vector<std::vector<double>> suf(m + 1,
                                         std::vector<double>(kmax + 1, kNegInf));
    pre[0][0] = suf[m][0] = 0.0;
    for (int t = 0; t < m; ++t) {
        pre[t + 1] = pre[t];
        for (int k = kmax; k >= 1; --k)
            pre[t + 1][k] = logaddexp(pre[t][k], lw[t] + pre[t][k - 1]);
    }
    for (int t = m - 1; t >= 0; --t) {
        suf[t] = suf[t + 1];
        for (int k = kmax; k >= 1; --k)
            suf[t][k] = logaddexp(suf[t + 1][k], lw[t] + suf[t + 1][k - 1]);
    }

    // inclusion probability of gap t at rank k:
    //   P_t^{(k)} = w_t e_{k-1}(w without t) / e_k(w)
    auto log_p = [&](int t, int k) {
        double acc = kNegInf;
        for (int a = 0; a <= k - 1; ++a)
            acc = logaddexp(acc, pre[t][a] + suf[t + 1][k - 1 - a]);
        return lw[t] + acc - pre[m][k];
    };

    Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
    for (int t = 0; t < m; ++t) {
        const double p_ell = std::exp(log_p(t, ell));
        const double p_prev = (ell == 1) ? 0.0 : std::exp(log_p(t, ell - 1));
        const double c = p.nu * (p_ell - p_prev);
        g(pos[t].second) += c;
        g(pos[t].first) -= c;
    }
    return g;
}

CutoffBundle cutoff_functions(const CutoffSpec& cut, int n, double a,
                              double b) {
    using mollifier::step_down;
    CutoffBundle bundle;
    const double scale = std::pow(static_cast<double>(n), 1.0 + cut.eps_w);

    // rho: even bump, 1 on |x| <= 1/2 and 0 on |x| >= 1
    auto rho = [](double x) { return step_down(std::abs(x), 0.5, 1.0); };
    // r: 1 for x <= 1/2, 0 for x >= 1
    auto r = [](double x) { return step_down(x, 0.5, 1.0); };
    // one-sided chi: 1 for x <= 1, 0 for x >= 2
    auto chi1 = [](double x) { return step_down(x, 1.0, 2.0); };

    const ClassicalLocations cl = classical_locations(n);
    auto nearest = [&](double e) {
        int best = 1;
        for (int i = 2; i <= n; ++i)
            if (std::abs(cl(i) - e) < std::abs(cl(best) - e)) best = i;
        return best;
    };
    const int i0 = nearest(a), j0 = nearest(b);
    const int pad = static_cast<int>(std::ceil(std::pow(n, cut.eps_r)));
    const int lo = std::max(1, i0 - pad);
    const int hi = std::min(n - 1, j0 + pad);
    for (int i = lo; i <= hi; ++i) bundle.J_r.push_back(i);

    auto endpoint_guard = [rho, r, scale, Jr = bundle.J_r](double e) {
        return [rho, r, scale, Jr, e](const Eigen::VectorXd& v) {
            double acc = 0.0;
            for (int i : Jr) acc += rho(scale * (v(i - 1) - e));
            return r(acc);
        };
    };
    bundle.f1 = endpoint_guard(a);
    bundle.f2 = endpoint_guard(b);
    bundle.g1 = [chi1, scale, a](double x) { return chi1(10.0 * scale * (a - x)); };
    bundle.g2 = [chi1, scale, b](double x) { return chi1(10.0 * scale * (x - b)); };

    // dense-grid sup norms of the transition's first three derivatives
    const int grid = 20001;
    double prev_d2 = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double x = static_cast<double>(i) / grid;
        const double d1 = std::abs(mollifier::s_p(x));
        const double d2 = mollifier::s_pp(x);
        bundle.s_d1_max = std::max(bundle.s_d1_max, d1);
        bundle.s_d2_max = std::max(bundle.s_d2_max, std::abs(d2));
        if (i > 0)
            bundle.s_d3_max =
                std::max(bundle.s_d3_max, std::abs(d2 - prev_d2) * grid);
        prev_d2 = d2;
    }
    return bundle;
}

double f_hat(const Eigen::VectorXd& v, double a, double b, int ell,
             const RegularizationParams& p, const CutoffSpec& cut) {
    if (ell < 1) throw std::invalid_argument("f_hat: ell < 1");
    const int n = static_cast<int>(v.size());
    const CutoffBundle bundle = cutoff_functions(cut, n, a, b);

    const double guard = bundle.f1(v) * bundle.f2(v);
    if (guard == 0.0) return 0.0;

    std::vector<double> lu;
    lu.reserve(bundle.J_r.size());
    for (int i : bundle.J_r) {
        const double g = bundle.g1(v(i - 1)) * bundle.g2(v(i - 1));
        if (g == 0.0) continue;
        lu.push_back(std::log(g) + p.beta * p.nu * (v(i) - v(i - 1)));
    }
    const double lz = log_esp(lu, ell);
    if (lz == kNegInf) return 0.0;
    const double lz_prev = (ell == 1) ? 0.0 : log_esp(lu, ell - 1);
    return guard * (lz - lz_prev) / p.beta;
}

}  // namespace wigner
