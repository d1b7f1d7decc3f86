#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace wigner {

// Welford single-pass accumulator; merge() combines partial accumulators in
// a deterministic order so summaries are independent of worker count.
struct RunningMoments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningMoments& other);
    double variance() const;  // sample variance (n - 1)
    double stderr_mean() const;
};

// two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// one-sample KS distance of `a` against a CDF
double ks_one_sample(std::vector<double> a,
                     const std::function<double(double)>& cdf);

// asymptotic Kolmogorov distribution P(sqrt(n) D <= x)
double kolmogorov_cdf(double x);

// p-value of a two-sample KS distance with sample sizes na, nb
double ks_two_sample_pvalue(double d, std::size_t na, std::size_t nb);

// Maximum-likelihood location fit within the Gumbel-k family with density
// exp(k (c2 - x)) / (k-1)! * exp(-exp(c2 - x)): the MLE has a closed form,
// c2 = log( n k / sum_i exp(-x_i) ).
double fit_gumbel_k_location(const std::vector<double>& x, int k);

}  // namespace wigner
