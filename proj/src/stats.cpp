#include "wigner/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wigner {

void RunningMoments::add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
}

void RunningMoments::merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
        *this = o;
        return;
    }
    const double d = o.mean - mean;
    const std::int64_t nc = count + o.count;
    m2 += o.m2 + d * d * (double(count) * o.count / nc);
    mean += d * o.count / nc;
    count = nc;
}

double RunningMoments::variance() const {
    return count > 1 ? m2 / (count - 1) : 0.0;
}

double RunningMoments::stderr_mean() const {
    return count > 1 ? std::sqrt(variance() / count) : 0.0;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    // advance past every copy of the current value on both sides before
    // comparing the empirical CDFs, so ties contribute no spurious distance
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == t) ++i;
        while (j < b.size() && b[j] == t) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

double ks_one_sample(std::vector<double> a,
                     const std::function<double(double)>& cdf) {
    if (a.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(a.begin(), a.end());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a[i]);
        d = std::max(d, std::abs(f - double(i) / a.size()));
        d = std::max(d, std::abs(double(i + 1) / a.size() - f));
    }
    return d;
}

double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1.0) {
        // Jacobi-theta dual series: fast and accurate for small x, where the
        // alternating series loses all precision to cancellation
        constexpr double pi = 3.14159265358979323846;
        double acc = 0.0;
        for (int j = 1; j <= 11; j += 2)
            acc += std::exp(-j * j * pi * pi / (8.0 * x * x));
        return std::sqrt(2.0 * pi) / x * acc;
    }
    double acc = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * x * x);
        acc += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::max(0.0, 1.0 - 2.0 * acc);
}

double ks_two_sample_pvalue(double d, std::size_t na, std::size_t nb) {
    const double ne = double(na) * nb / (double(na) + nb);
    return 1.0 - kolmogorov_cdf(std::sqrt(ne) * d);
}

double fit_gumbel_k_location(const std::vector<double>& x, int k) {
    if (x.empty() || k < 1)
        throw std::invalid_argument("fit_gumbel_k_location: bad input");
    // log-sum-exp of -x_i for stability
    double m = -x[0];
    for (double v : x) m = std::max(m, -v);
    double acc = 0.0;
    for (double v : x) acc += std::exp(-v - m);
    const double lse = m + std::log(acc);
    return std::log(double(x.size()) * k) - lse;
}

}  // namespace wigner
