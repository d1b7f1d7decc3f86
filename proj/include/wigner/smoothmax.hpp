#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wigner/gaps.hpp"

namespace wigner {

// Parameters of the log-sum-exp free-energy regularization
//   G_l = (1/beta) log Z_l,  F_l = G_l - G_{l-1}.
struct RegularizationParams {
    double beta = 0.0;   // inverse temperature, typically N^gamma
    double gamma = 0.0;  // exponent (informational)
    double nu = 0.0;     // gap scale N / sqrt(log N)
    double frak_a = 0.0; // rank exponent bound, ell <= N^frak_a

    static RegularizationParams for_n(int n, double gamma,
                                      double frak_a = 0.0);
    void validate() const;  // beta > 0, nu > 0, gamma > frak_a >= 0
};

// log Z_{ell,beta,J}(v): Z_ell is the ell-th elementary symmetric polynomial
// of the per-gap weights w_j = exp(beta nu (v_{j+1} - v_j)), computed by the
// O(|J| ell) recurrence entirely in log domain.  log Z_0 = 0.
double z_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell,
             const RegularizationParams& p);

// log of the ell-th elementary symmetric polynomial of weights exp(lw_j)
double log_esp(const std::vector<double>& lw, int ell);

// F_{ell,beta,J}(v) = (log Z_ell - log Z_{ell-1}) / beta
double f_ell(const Eigen::VectorXd& v, const GapSelector& sel, int ell,
             const RegularizationParams& p);

// analytic gradient dF/dv_j (full-length vector, zero off the selected gaps)
Eigen::VectorXd grad_f(const Eigen::VectorXd& v, const GapSelector& sel,
                       int ell, const RegularizationParams& p);

// Smooth cutoff machinery for the interval variant F-hat.
struct CutoffSpec {
    double eps_w = 0.1;  // Wegner exponent: endpoint windows N^{-1-eps_w}
    double eps_r = 0.1;  // index-window exponent: J_r padding ceil(N^eps_r)
};

struct CutoffBundle {
    std::function<double(const Eigen::VectorXd&)> f1, f2;  // endpoint guards
    std::function<double(double)> g1, g2;  // smoothed indicators of [a, b]
    std::vector<int> J_r;                  // 1-based candidate gap indices
    double s_d1_max = 0.0, s_d2_max = 0.0, s_d3_max = 0.0;  // |s'|,|s''|,|s'''|
};

// builds f1, f2, g1, g2 and J_r for interval [a, b] at dimension n
CutoffBundle cutoff_functions(const CutoffSpec& cut, int n, double a,
                              double b);

// F-hat: f1 f2 (log Zhat_ell - log Zhat_{ell-1}) / beta with
// Zhat_ell = e_ell of u_i = g1(v_i) g2(v_i) exp(beta nu (v_{i+1} - v_i)),
// i ranging over J_r.  Returns 0 when Zhat_ell vanishes.
double f_hat(const Eigen::VectorXd& v, double a, double b, int ell,
             const RegularizationParams& p, const CutoffSpec& cut);

}  // namespace wigner
