#pragma once

#include <Eigen/Dense>

#include "wigner/ensembles.hpp"
#include "wigner/rng.hpp"

namespace wigner {

// Matrix Ornstein-Uhlenbeck flow with per-entry stationary variances taken
// from the originating ensemble's profile: each entry follows the linear SDE
//   dx = dB/sqrt(N) - x/(2 N s) dt,
// whose transition is exact (no discretization error):
//   x(t+dt) = exp(-dt/(2Ns)) x(t) + Normal(0, s (1 - exp(-dt/(Ns)))).
struct FlowState {
    MatrixSample h;
    double t = 0.0;
    Eigen::MatrixXd s_re;  // stationary variance of Re(entry)
    Eigen::MatrixXd s_im;  // stationary variance of Im(entry); zero if real

    int n() const { return h.n(); }
};

FlowState flow_start(const MatrixSample& m, const EnsembleSpec& spec);

// advance to t_target, drawing noise from rng; exact in distribution
void ou_evolve(FlowState& state, double t_target, Rng& rng);

// Two Dyson Brownian motion particle systems driven by identical Brownian
// increments:
//   dx_i = sqrt(2/(N beta)) dB_i + (1/N) sum_{j != i} dt / (x_i - x_j).
struct CoupledParticles {
    Eigen::VectorXd x, y;  // strictly ascending
    double beta_dyn = 1.0; // 1 (real symmetric) or 2 (complex Hermitian)
    double t = 0.0;

    int n() const { return static_cast<int>(x.size()); }
};

struct DBMOptions {
    int n_steps = 0;        // 0: default ceil(t * N^2 * 4)
    int max_halvings = 20;  // per-step bisection budget before aborting
    bool no_noise = false;  // drift-only test mode
};

// Euler-Maruyama with shared per-(i, step) Gaussian increments; steps that
// would disorder either system are retried at half step via Brownian-bridge
// refinement applied jointly to both systems.  Throws std::runtime_error if
// ordering cannot be maintained within the halving budget.
void dbm_coupled_evolve(CoupledParticles& p, double t_target, Rng& rng,
                        const DBMOptions& opt = {});

struct GapCouplingReport {
    double max_scaled_gap_diff = 0.0;  // max bulk N |dgap_i(x) - dgap_i(y)|
    Eigen::VectorXd profile;           // N |delta gap| for every i
};

GapCouplingReport gap_coupling_report(const CoupledParticles& p, double alpha);

}  // namespace wigner
