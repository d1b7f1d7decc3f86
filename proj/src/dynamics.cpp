#include "wigner/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wigner {

FlowState flow_start(const MatrixSample& m, const EnsembleSpec& spec) {
    const int n = m.n();
    if (spec.profile.n != n)
        throw std::invalid_argument("flow_start: profile dimension mismatch");
    FlowState st;
    st.h = m;
    st.s_re.resize(n, n);
    st.s_im.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double var = spec.profile.sigma2(i, j);
            if (m.is_complex() && i != j) {
                const double ratio = spec.offdiag_law.re_im_ratio;
                st.s_re(i, j) = var / (1.0 + ratio);
                st.s_im(i, j) = var * ratio / (1.0 + ratio);
            } else {
                st.s_re(i, j) = var;
                st.s_im(i, j) = 0.0;
            }
        }
    }
    return st;
}

namespace {

// exact scalar OU transition with stationary variance s
double ou_step(double x, double dt, double n, double s, Rng& rng) {
    if (s <= 0.0) return x;
    const double a = std::exp(-dt / (2.0 * n * s));
    return a * x + std::sqrt(s * (1.0 - a * a)) * rng.gaussian();
}

}  // namespace

void ou_evolve(FlowState& state, double t_target, Rng& rng) {
    if (t_target < state.t)
        throw std::invalid_argument("ou_evolve: t_target < current t");
    const double dt = t_target - state.t;
    state.t = t_target;
    if (dt == 0.0) return;
    const int n = state.n();
    const double nd = static_cast<double>(n);
    // deterministic draw order: upper triangle row-major, Re then Im
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (state.h.is_complex()) {
                const double re = ou_step(state.h.hc(i, j).real(), dt, nd,
                                          state.s_re(i, j), rng);
                const double im =
                    (i == j) ? 0.0
                             : ou_step(state.h.hc(i, j).imag(), dt, nd,
                                       state.s_im(i, j), rng);
                state.h.hc(i, j) = {re, im};
                state.h.hc(j, i) = {re, -im};
            } else {
                const double v =
                    ou_step(state.h.hr(i, j), dt, nd, state.s_re(i, j), rng);
                state.h.hr(i, j) = v;
                state.h.hr(j, i) = v;
            }
        }
    }
}

namespace {

bool ordered(const Eigen::VectorXd& v) {
    for (int i = 1; i < v.size(); ++i)
        if (!(v(i) > v(i - 1))) return false;
    return true;
}

Eigen::VectorXd dbm_drift(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = 1.0 / (x(i) - x(j));
            d(i) += r;
            d(j) -= r;
        }
    }
    return d / n;
}

struct Segment {
    double h;
    Eigen::VectorXd db;  // raw Brownian increments over the segment
    int depth;
};

}  // namespace

void dbm_coupled_evolve(CoupledParticles& p, double t_target, Rng& rng,
                        const DBMOptions& opt) {
    if (t_target < p.t)
        throw std::invalid_argument("dbm_coupled_evolve: t_target < current t");
    const int n = p.n();
    if (!ordered(p.x) || !ordered(p.y))
        throw std::invalid_argument("dbm_coupled_evolve: input not ordered");
    const double total = t_target - p.t;
    p.t = t_target;
    if (total == 0.0) return;

    const int n_steps =
        opt.n_steps > 0
            ? opt.n_steps
            : static_cast<int>(std::ceil(total * n * double(n) * 4.0));
    const double h0 = total / n_steps;
    const double noise_coef = std::sqrt(2.0 / (n * p.beta_dyn));

    for (int step = 0; step < n_steps; ++step) {
        Eigen::VectorXd db(n);
        if (opt.no_noise)
            db.setZero();
        else
            for (int i = 0; i < n; ++i) db(i) = std::sqrt(h0) * rng.gaussian();

        // LIFO of pending sub-segments; halving splits a segment into two
        // halves whose increments follow the Brownian bridge
        std::vector<Segment> stack;
        stack.push_back({h0, std::move(db), 0});
        while (!stack.empty()) {
            Segment seg = std::move(stack.back());
            stack.pop_back();
            const Eigen::VectorXd xn =
                p.x + dbm_drift(p.x) * seg.h + noise_coef * seg.db;
            const Eigen::VectorXd yn =
                p.y + dbm_drift(p.y) * seg.h + noise_coef * seg.db;
            if (ordered(xn) && ordered(yn)) {
                p.x = xn;
                p.y = yn;
                continue;
            }
            if (seg.depth >= opt.max_halvings)
                throw std::runtime_error(
                    "dbm_coupled_evolve: ordering lost after max halvings");
            Segment first{seg.h / 2.0, Eigen::VectorXd(n), seg.depth + 1};
            Segment second{seg.h / 2.0, Eigen::VectorXd(n), seg.depth + 1};
            for (int i = 0; i < n; ++i) {
                const double mid =
                    opt.no_noise
                        ? 0.0
                        : seg.db(i) / 2.0 +
                              std::sqrt(seg.h) / 2.0 * rng.gaussian();
                first.db(i) = mid;
                second.db(i) = seg.db(i) - mid;
            }
            // LIFO order: push the second half first so the first runs next
            stack.push_back(std::move(second));
            stack.push_back(std::move(first));
        }
    }
}

GapCouplingReport gap_coupling_report(const CoupledParticles& p, double alpha) {
    const int n = p.n();
    GapCouplingReport rep;
    rep.profile.resize(n - 1);
    const int lo = static_cast<int>(std::ceil(alpha * n));
    const int hi = static_cast<int>(std::floor((1.0 - alpha) * n)) - 1;
    for (int i = 0; i < n - 1; ++i) {
        const double dg =
            (p.x(i + 1) - p.x(i)) - (p.y(i + 1) - p.y(i));
        rep.profile(i) = n * std::abs(dg);
        const int idx1 = i + 1;  // 1-based gap index
        if (idx1 >= lo && idx1 <= hi)
            rep.max_scaled_gap_diff =
                std::max(rep.max_scaled_gap_diff, rep.profile(i));
    }
    return rep;
}

}  // namespace wigner
