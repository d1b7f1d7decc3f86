#include "wigner/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace wigner {

GapSelector GapSelector::index_set(std::vector<int> j, double alpha) {
    GapSelector s;
    s.mode = Mode::index_set;
    s.J = std::move(j);
    std::sort(s.J.begin(), s.J.end());
    s.alpha = alpha;
    return s;
}

GapSelector GapSelector::interval(double a, double b, double kappa) {
    GapSelector s;
    s.mode = Mode::energy_interval;
    s.a = a;
    s.b = b;
    s.kappa = kappa;
    return s;
}

void GapSelector::validate(int n) const {
    if (mode == Mode::index_set) {
        if (J.empty()) throw std::invalid_argument("GapSelector: empty J");
        for (std::size_t t = 0; t < J.size(); ++t) {
            if (J[t] < 1) throw std::invalid_argument("GapSelector: j < 1");
            if (t > 0 && J[t] <= J[t - 1])
                throw std::invalid_argument("GapSelector: J not sorted/unique");
        }
        if (n > 0) {
            if (J.back() > n - 1)
                throw std::invalid_argument("GapSelector: j > N-1");
            if (alpha > 0.0) {
                const int lo = static_cast<int>(std::ceil(alpha * n));
                const int hi = static_cast<int>(std::floor((1.0 - alpha) * n));
                if (J.front() < lo || J.back() > hi)
                    throw std::invalid_argument(
                        "GapSelector: J outside bulk range");
            }
        }
    } else {
        if (!(a < b) && !(a == b))
            throw std::invalid_argument("GapSelector: need a <= b");
        if (a < -2.0 + kappa || b > 2.0 - kappa)
            throw std::invalid_argument("GapSelector: interval outside bulk");
    }
}

nlohmann::json GapSelector::to_json() const {
    if (mode == Mode::index_set)
        return {{"mode", "index_set"}, {"alpha", alpha}, {"J", J}};
    return {{"mode", "interval"}, {"a", a}, {"b", b}, {"kappa", kappa}};
}

GapSelector GapSelector::from_json(const nlohmann::json& j) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "index_set") {
        return index_set(j.at("J").get<std::vector<int>>(),
                         j.value("alpha", 0.0));
    }
    if (mode == "interval") {
        return interval(j.at("a").get<double>(), j.at("b").get<double>(),
                        j.value("kappa", 0.0));
    }
    throw std::invalid_argument("GapSelector: unknown mode " + mode);
}

namespace {

void check_ascending(const Eigen::VectorXd& v) {
    for (int i = 1; i < v.size(); ++i)
        if (v(i) < v(i - 1))
            throw std::invalid_argument("gap statistic: input not ascending");
}

}  // namespace

std::vector<double> selected_gaps(const Eigen::VectorXd& v,
                                  const GapSelector& sel) {
    check_ascending(v);
    const int n = static_cast<int>(v.size());
    std::vector<double> gaps;
    if (sel.mode == GapSelector::Mode::index_set) {
        for (int j : sel.J) {
            if (j < 1 || j > n - 1)
                throw std::invalid_argument("gap statistic: index out of range");
            gaps.push_back(v(j) - v(j - 1));
        }
    } else {
        // index i = N never contributes: v_{N+1} is undefined
        for (int i = 0; i + 1 < n; ++i)
            if (v(i) >= sel.a && v(i) <= sel.b) gaps.push_back(v(i + 1) - v(i));
    }
    return gaps;
}

namespace {

double ell_th_largest(std::vector<double> gaps, int ell) {
    if (ell < 1) throw std::invalid_argument("gap statistic: ell < 1");
    if (static_cast<std::size_t>(ell) > gaps.size()) return 0.0;
    std::nth_element(gaps.begin(), gaps.begin() + (ell - 1), gaps.end(),
                     std::greater<double>());
    return gaps[ell - 1];
}

}  // namespace

double t_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell) {
    if (sel.mode != GapSelector::Mode::index_set)
        throw std::invalid_argument("t_ell: selector must be index_set");
    return ell_th_largest(selected_gaps(v, sel), ell);
}

double t_hat_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell) {
    if (sel.mode != GapSelector::Mode::energy_interval)
        throw std::invalid_argument("t_hat_ell: selector must be interval");
    return ell_th_largest(selected_gaps(v, sel), ell);
}

double nu(int n) {
    if (n < 2) throw std::invalid_argument("nu: n < 2");
    return n / std::sqrt(std::log(static_cast<double>(n)));
}

double m_of_interval(double a, double b) {
    if (a < -2.0 || b > 2.0 || a > b)
        throw std::invalid_argument("m_of_interval: interval not in (-2,2)");
    return std::min(std::sqrt(4.0 - a * a), std::sqrt(4.0 - b * b));
}

double tau_star(double gap, int n, double m) {
    if (n < 2 || m <= 0.0) throw std::invalid_argument("tau_star: bad params");
    const double l2 = 2.0 * std::log(static_cast<double>(n));
    return 0.25 * std::sqrt(l2) * (m * n * gap - std::sqrt(16.0 * l2)) +
           0.625 * std::log(l2);
}

double gumbel_k_cdf(double x, int k, double c2) {
    if (k < 1) throw std::invalid_argument("gumbel_k_cdf: k < 1");
    return boost::math::gamma_q(static_cast<double>(k), std::exp(c2 - x));
}

double gumbel_k_pdf(double x, int k, double c2) {
    if (k < 1) throw std::invalid_argument("gumbel_k_pdf: k < 1");
    double log_fact = 0.0;
    for (int j = 2; j < k; ++j) log_fact += std::log(static_cast<double>(j));
    return std::exp(k * (c2 - x) - std::exp(c2 - x) - log_fact);
}

}  // namespace wigner
