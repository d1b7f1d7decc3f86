#pragma once

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace wigner {

// Selects which consecutive gaps v_{j+1} - v_j enter an extremal statistic:
// either an explicit (1-based) index set J, or all i with v_i in [a, b].
struct GapSelector {
    enum class Mode { index_set, energy_interval };

    Mode mode = Mode::index_set;
    std::vector<int> J;  // sorted, 1-based, each in [1, N-1]
    double a = 0.0, b = 0.0;
    double alpha = 0.0;  // bulk validation parameter for index_set mode
    double kappa = 0.0;  // edge margin for interval mode

    static GapSelector index_set(std::vector<int> j, double alpha = 0.0);
    static GapSelector interval(double a, double b, double kappa = 0.0);

    // throws std::invalid_argument on violated invariants; n may be 0 to
    // skip the dimension-dependent checks
    void validate(int n = 0) const;

    nlohmann::json to_json() const;
    static GapSelector from_json(const nlohmann::json& j);
};

// gaps selected by `sel` from the ascending vector v, in index order
std::vector<double> selected_gaps(const Eigen::VectorXd& v,
                                  const GapSelector& sel);

// ell-th largest selected gap; 0 if fewer than ell gaps qualify
double t_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell);
double t_hat_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell);

// nu = N / sqrt(log N), the scale of the largest bulk gap
double nu(int n);

// M(I) = inf over I of sqrt(4 - x^2) = min over the two endpoints
double m_of_interval(double a, double b);

// tau*_k = (1/4) sqrt(2 log N) (M N gap - sqrt(32 log N)) + (5/8) log(2 log N)
double tau_star(double gap, int n, double m);

// P(tau* <= x) for the k-th order Gumbel family: Q(k, exp(c2 - x)) with Q
// the regularized upper incomplete gamma function
double gumbel_k_cdf(double x, int k, double c2);
double gumbel_k_pdf(double x, int k, double c2);

}  // namespace wigner
