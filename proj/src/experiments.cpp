#include "wigner/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "wigner/mollifier.hpp"
#include "wigner/spectral.hpp"

namespace wigner {

double TestFunctionSpec::operator()(double x) const {
    switch (kind) {
        case Kind::polynomial: {
            double v = 1.0;
            for (int d = 0; d < degree; ++d) v *= x;
            return v;
        }
        case Kind::smoothed_lp:
            return std::pow((x - center) * (x - center) + width * width,
                            p / 2.0);
        case Kind::smoothed_indicator:
            return mollifier::step_up(x, a - width, a) *
                   mollifier::step_down(x, b, b + width);
    }
    return 0.0;
}

std::vector<double> TestFunctionSpec::derivative_supnorms(double lo,
                                                          double hi) const {
    const int grid = 4000;
    const double h = (hi - lo) / grid;
    // derivatives 0..5 by repeated central differencing of dense samples
    std::vector<double> f(grid + 1);
    for (int i = 0; i <= grid; ++i) f[i] = (*this)(lo + i * h);
    std::vector<double> sup(6, 0.0);
    for (int d = 0; d <= 5; ++d) {
        for (double v : f) sup[d] = std::max(sup[d], std::abs(v));
        std::vector<double> g(f.size() > 1 ? f.size() - 1 : 0);
        for (std::size_t i = 0; i + 1 < f.size(); ++i)
            g[i] = (f[i + 1] - f[i]) / h;
        f = std::move(g);
    }
    return sup;
}

nlohmann::json TestFunctionSpec::to_json() const {
    const char* names[] = {"polynomial", "smoothed_lp", "smoothed_indicator"};
    return {{"kind", names[static_cast<int>(kind)]}, {"degree", degree},
            {"p", p},       {"center", center},
            {"a", a},       {"b", b},
            {"width", width}};
}

TestFunctionSpec TestFunctionSpec::from_json(const nlohmann::json& j) {
    TestFunctionSpec s;
    const std::string k = j.value("kind", "smoothed_lp");
    if (k == "polynomial")
        s.kind = Kind::polynomial;
    else if (k == "smoothed_lp")
        s.kind = Kind::smoothed_lp;
    else if (k == "smoothed_indicator")
        s.kind = Kind::smoothed_indicator;
    else
        throw ConfigError("unknown test function kind: " + k);
    s.degree = j.value("degree", 2);
    s.p = j.value("p", 2.0);
    s.center = j.value("center", 1.0);
    s.a = j.value("a", 0.0);
    s.b = j.value("b", 1.0);
    s.width = j.value("width", 0.1);
    return s;
}

nlohmann::json TrialRecord::to_json() const {
    nlohmann::json j{{"trial", trial}, {"seed", seed},   {"n", n},
                     {"ok", ok},       {"error", error}, {"wall_seconds", wall_seconds}};
    j["values"] = values;
    return j;
}

TrialRecord TrialRecord::from_json(const nlohmann::json& j) {
    TrialRecord r;
    r.trial = j.at("trial").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n = j.at("n").get<int>();
    r.ok = j.at("ok").get<bool>();
    r.error = j.value("error", "");
    r.wall_seconds = j.value("wall_seconds", 0.0);
    if (j.contains("values"))
        r.values = j.at("values").get<std::map<std::string, double>>();
    return r;
}

void ExperimentConfig::validate() const {
    if (n_trials < 1) throw ConfigError("config: n_trials must be >= 1");
    if (n_values.empty()) throw ConfigError("config: n_values empty");
    for (int n : n_values)
        if (n < 2) throw ConfigError("config: matrix dimension < 2");
    if (ell < 1 || k_rank < 1) throw ConfigError("config: rank must be >= 1");
    spec.validate();
    if (spec_b) spec_b->validate();
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["spec"] = spec.to_json();
    if (spec_b) j["spec_b"] = spec_b->to_json();
    j["selector"] = selector.to_json();
    j["ell"] = ell;
    j["k_rank"] = k_rank;
    j["gamma"] = gamma;
    j["hs"] = {{"delta", hs.delta}, {"eps", hs.eps}};
    j["n_trials"] = n_trials;
    j["n_values"] = n_values;
    j["base_seed"] = base_seed;
    j["test_function"] = test_function.to_json();
    j["t_flow"] = t_flow;
    j["gate_delta"] = gate_delta;
    j["override_gates"] = override_gates;
    j["bulk_alpha"] = bulk_alpha;
    j["eps_w"] = eps_w;
    j["energy"] = energy;
    j["out_dir"] = out_dir;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.kind = j.value("kind", "");
        if (j.contains("n_values"))
            c.n_values = j.at("n_values").get<std::vector<int>>();
        // accept "goe" / "gue" / "gue_matched_three_point" as shorthand for
        // the corresponding full ensemble spec at n = n_values.front()
        auto parse_spec = [&](const nlohmann::json& sj) {
            if (sj.is_string()) {
                const auto name = sj.get<std::string>();
                const int n = c.n_values.empty() ? 100 : c.n_values.front();
                if (name == "goe") return goe_spec(n);
                if (name == "gue") return gue_spec(n);
                if (name == "gue_matched_three_point")
                    return gue_matched_three_point_spec(n);
                throw ConfigError("unknown ensemble shorthand: " + name);
            }
            return EnsembleSpec::from_json(sj);
        };
        if (j.contains("spec")) c.spec = parse_spec(j.at("spec"));
        if (j.contains("spec_b")) c.spec_b = parse_spec(j.at("spec_b"));
        if (j.contains("selector"))
            c.selector = GapSelector::from_json(j.at("selector"));
        c.ell = j.value("ell", 1);
        c.k_rank = j.value("k_rank", 1);
        c.gamma = j.value("gamma", 0.5);
        if (j.contains("hs")) {
            c.hs.delta = j.at("hs").value("delta", 0.05);
            c.hs.eps = j.at("hs").value("eps", 0.1);
        }
        c.n_trials = j.value("n_trials", 1);
        c.base_seed = j.value("base_seed", std::uint64_t{1});
        if (j.contains("test_function"))
            c.test_function = TestFunctionSpec::from_json(j.at("test_function"));
        c.t_flow = j.value("t_flow", 0.0);
        c.gate_delta = j.value("gate_delta", 0.05);
        c.override_gates = j.value("override_gates", false);
        c.bulk_alpha = j.value("bulk_alpha", 0.1);
        c.eps_w = j.value("eps_w", 0.5);
        c.energy = j.value("energy", 0.0);
        c.out_dir = j.value("out_dir", "");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

std::vector<TrialRecord> mc_run(const TrialFn& fn, int n_trials,
                                std::uint64_t base_seed, int workers,
                                std::uint64_t arm_salt) {
    std::vector<TrialRecord> records(n_trials);
    const std::uint64_t arm_base =
        arm_salt == 0 ? base_seed : derive_seed(base_seed, arm_salt);
    auto run_one = [&](int trial) {
        const std::uint64_t seed = derive_seed(arm_base, trial);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            records[trial] = fn(trial, seed);
        } catch (const std::exception& e) {
            records[trial].ok = false;
            records[trial].error = e.what();
        }
        records[trial].trial = trial;
        records[trial].seed = seed;
        records[trial].wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
    };
    if (workers <= 1) {
        for (int t = 0; t < n_trials; ++t) run_one(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < n_trials;
                     t = next.fetch_add(1))
                    run_one(t);
            });
        for (auto& th : pool) th.join();
    }
    int failures = 0;
    for (const auto& r : records) failures += r.ok ? 0 : 1;
    if (failures * 100 > n_trials)
        throw NumericalError("mc_run: failure rate exceeds 1% (" +
                             std::to_string(failures) + "/" +
                             std::to_string(n_trials) + "), first error: " +
                             [&] {
                                 for (const auto& r : records)
                                     if (!r.ok) return r.error;
                                 return std::string();
                             }());
    return records;
}

namespace {

// nu T for the configured selector and rank
double gap_statistic(const Eigen::VectorXd& lambda, const ExperimentConfig& cfg,
                     int n) {
    const double stat =
        cfg.selector.mode == GapSelector::Mode::index_set
            ? t_ell(lambda, cfg.selector, cfg.ell)
            : t_hat_ell(lambda, cfg.selector, cfg.ell);
    return nu(n) * stat;
}

}  // namespace

CompareResult four_moment_compare(const EnsembleSpec& spec_a,
                                  const EnsembleSpec& spec_b,
                                  const ExperimentConfig& cfg, int workers) {
    const int n = cfg.n_values.front();
    const double mismatch = max_moment_mismatch(spec_a, spec_b);
    const double gate = std::pow(static_cast<double>(n), -2.25);
    if (mismatch > gate && !cfg.override_gates)
        throw PreconditionError(
            "four_moment_compare: entry moments up to order 4 differ by " +
            std::to_string(mismatch) + " > N^-2.25 = " + std::to_string(gate));

    auto arm = [&](const EnsembleSpec& spec, std::uint64_t salt) {
        return mc_run(
            [&](int, std::uint64_t seed) {
                Rng rng(seed);
                const MatrixSample m = sample_matrix(spec, rng, seed);
                const Eigen::VectorXd lambda = eigenvalues_only(m);
                TrialRecord r;
                r.n = n;
                const double stat = gap_statistic(lambda, cfg, n);
                r.values["nu_t"] = stat;
                r.values["s_of_nu_t"] = cfg.test_function(stat);
                return r;
            },
            cfg.n_trials, cfg.base_seed, workers, salt);
    };

    CompareResult out;
    auto rec_a = arm(spec_a, 0x0a);
    auto rec_b = arm(spec_b, 0x0b);
    RunningMoments ma, mb;
    std::vector<double> raw_a, raw_b;
    for (const auto& r : rec_a)
        if (r.ok) {
            ma.add(r.values.at("s_of_nu_t"));
            raw_a.push_back(r.values.at("nu_t"));
        }
    for (const auto& r : rec_b)
        if (r.ok) {
            mb.add(r.values.at("s_of_nu_t"));
            raw_b.push_back(r.values.at("nu_t"));
        }
    out.mean_a = ma.mean;
    out.mean_b = mb.mean;
    out.mean_diff = ma.mean - mb.mean;
    out.std_err = std::sqrt(ma.stderr_mean() * ma.stderr_mean() +
                            mb.stderr_mean() * mb.stderr_mean());
    out.ks_two_sample = ks_two_sample(raw_a, raw_b);
    out.records = std::move(rec_a);
    out.records.insert(out.records.end(), rec_b.begin(), rec_b.end());
    return out;
}

CompareResult flow_compare(const EnsembleSpec& spec, double t,
                           const ExperimentConfig& cfg, int workers) {
    const int n = cfg.n_values.front();
    const double nd = static_cast<double>(n);
    const double t_lo = std::pow(nd, -1.0 + cfg.gate_delta);
    const double t_hi = std::pow(nd, -0.5 - cfg.gate_delta);
    if (t != 0.0 && (t <= t_lo || t >= t_hi) && !cfg.override_gates)
        throw PreconditionError(
            "flow_compare: t outside (N^{-1+delta}, N^{-1/2-delta})");

    auto records = mc_run(
        [&](int, std::uint64_t seed) {
            Rng rng(seed);
            const MatrixSample m = sample_matrix(spec, rng, seed);
            const double s0 = gap_statistic(eigenvalues_only(m), cfg, n);
            FlowState st = flow_start(m, spec);
            ou_evolve(st, t, rng);
            const double st_t = gap_statistic(eigenvalues_only(st.h), cfg, n);
            TrialRecord r;
            r.n = n;
            r.values["nu_t_0"] = s0;
            r.values["nu_t_t"] = st_t;
            r.values["paired_diff"] =
                cfg.test_function(st_t) - cfg.test_function(s0);
            return r;
        },
        cfg.n_trials, cfg.base_seed, workers);

    CompareResult out;
    RunningMoments md;
    std::vector<double> raw_0, raw_t;
    for (const auto& r : records)
        if (r.ok) {
            md.add(r.values.at("paired_diff"));
            raw_0.push_back(r.values.at("nu_t_0"));
            raw_t.push_back(r.values.at("nu_t_t"));
        }
    out.mean_diff = md.mean;
    out.std_err = md.stderr_mean();
    out.ks_two_sample = ks_two_sample(raw_0, raw_t);
    out.records = std::move(records);
    return out;
}

WegnerResult wegner_probe(const EnsembleSpec& spec, double energy, double eps_w,
                          const ExperimentConfig& cfg, int workers) {
    const int n = cfg.n_values.front();
    const double width =
        2.0 * std::pow(static_cast<double>(n), -1.0 - eps_w);
    auto records = mc_run(
        [&](int, std::uint64_t seed) {
            Rng rng(seed);
            const MatrixSample m = sample_matrix(spec, rng, seed);
            const Eigen::VectorXd lambda = eigenvalues_only(m);
            bool hit = false;
            for (int i = 0; i < n; ++i)
                if (std::abs(lambda(i) - energy) <= width) hit = true;
            TrialRecord r;
            r.n = n;
            r.values["hit"] = hit ? 1.0 : 0.0;
            return r;
        },
        cfg.n_trials, cfg.base_seed, workers);

    WegnerResult out;
    RunningMoments m;
    for (const auto& r : records)
        if (r.ok) m.add(r.values.at("hit"));
    out.empirical_prob = m.mean;
    // first-order expected count: 2 * width * N * rho_sc(E)
    out.expected_count = 2.0 * width * n * rho_sc(energy);
    out.records = std::move(records);
    return out;
}

MaxGapResult universality_maxgap(const EnsembleSpec& spec, double a, double b,
                                 const ExperimentConfig& cfg, int workers) {
    MaxGapResult out;
    const double m_val = m_of_interval(a, b);
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
        const int n = cfg.n_values[ni];
        EnsembleSpec spec_n = spec;
        if (spec_n.profile.n != n) spec_n = resized_spec(spec, n);
        const GapSelector sel = GapSelector::interval(a, b);
        auto records = mc_run(
            [&](int, std::uint64_t seed) {
                Rng rng(seed);
                const MatrixSample m = sample_matrix(spec_n, rng, seed);
                const Eigen::VectorXd lambda = eigenvalues_only(m);
                const double gap = t_hat_ell(lambda, sel, cfg.ell);
                TrialRecord r;
                r.n = n;
                r.values["gap"] = gap;
                r.values["scaled"] =
                    m_val * n * gap / std::sqrt(32.0 * std::log(double(n)));
                return r;
            },
            cfg.n_trials, cfg.base_seed, workers, 0x100 + ni);
        RunningMoments mom;
        for (const auto& r : records)
            if (r.ok) mom.add(r.values.at("scaled"));
        out.per_n.push_back({n, mom.mean, std::sqrt(mom.variance()),
                             mom.stderr_mean()});
        out.records.insert(out.records.end(), records.begin(), records.end());
    }
    return out;
}

FluctuationResult universality_fluctuations(const EnsembleSpec& spec, double a,
                                            double b, int k,
                                            const ExperimentConfig& cfg,
                                            int workers) {
    const int n = cfg.n_values.front();
    const double m_val = m_of_interval(a, b);
    const GapSelector sel = GapSelector::interval(a, b);
    auto records = mc_run(
        [&](int, std::uint64_t seed) {
            Rng rng(seed);
            const MatrixSample m = sample_matrix(spec, rng, seed);
            const Eigen::VectorXd lambda = eigenvalues_only(m);
            const double gap = t_hat_ell(lambda, sel, k);
            TrialRecord r;
            r.n = n;
            r.values["tau_star"] = tau_star(gap, n, m_val);
            return r;
        },
        cfg.n_trials, cfg.base_seed, workers);

    FluctuationResult out;
    for (const auto& r : records)
        if (r.ok) out.tau_samples.push_back(r.values.at("tau_star"));
    out.fitted_c2 = fit_gumbel_k_location(out.tau_samples, k);
    out.ks_to_gumbel_k = ks_one_sample(
        out.tau_samples,
        [&](double x) { return gumbel_k_cdf(x, k, out.fitted_c2); });
    out.records = std::move(records);
    return out;
}

LindebergResult lindeberg_taylor_probe(const EnsembleSpec& spec_a,
                                       const EnsembleSpec& spec_b, int n_small,
                                       int a, int b,
                                       const ExperimentConfig& cfg,
                                       int n_inner, int workers) {
    if (n_small > 60)
        throw PreconditionError("lindeberg_taylor_probe: n_small > 60");
    EnsembleSpec sa = resized_spec(spec_a, n_small);
    EnsembleSpec sb = resized_spec(spec_b, n_small);
    const double sigma = std::sqrt(sa.profile.sigma2(a, b));

    auto functional = [&](MatrixSample m) {
        return cfg.test_function(
            gap_statistic(eigenvalues_only(m), cfg, n_small));
    };
    auto with_entry = [&](const MatrixSample& m, double v) {
        MatrixSample out = m;
        if (out.is_complex()) {
            out.hc(a, b) = v;
            out.hc(b, a) = v;
        } else {
            out.hr(a, b) = v;
            if (a != b) out.hr(b, a) = v;
        }
        return out;
    };

    // entry-moment differences of the two (real) laws, scaled by sigma
    std::vector<double> dmom(5, 0.0);
    for (int p = 1; p <= 4; ++p)
        dmom[p] = std::pow(sigma, p) * (sa.offdiag_law.moment(p) -
                                        sb.offdiag_law.moment(p));

    auto records = mc_run(
        [&](int, std::uint64_t seed) {
            Rng rng(seed);
            const MatrixSample base = sample_matrix(sa, rng, seed);
            const double va = sigma * sa.offdiag_law.sample(rng);
            const double vb = sigma * sb.offdiag_law.sample(rng);
            TrialRecord r;
            r.n = n_small;
            r.values["diff"] =
                functional(with_entry(base, va)) - functional(with_entry(base, vb));
            // derivatives of g(x) = functional(base with entry x) at 0 by
            // central 5-point stencils with step ~ sigma/2
            const double h = 0.5 * sigma;
            double g[5];
            for (int t = -2; t <= 2; ++t)
                g[t + 2] = functional(with_entry(base, t * h));
            const double d1 = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h);
            const double d2 =
                (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) /
                (12 * h * h);
            const double d3 = (-g[0] + 2 * g[1] - 2 * g[3] + g[4]) /
                              (2 * h * h * h);
            const double d4 = (g[0] - 4 * g[1] + 6 * g[2] - 4 * g[3] + g[4]) /
                              (h * h * h * h);
            r.values["taylor"] = dmom[1] * d1 + dmom[2] * d2 / 2.0 +
                                 dmom[3] * d3 / 6.0 + dmom[4] * d4 / 24.0;
            return r;
        },
        n_inner, cfg.base_seed, workers);

    LindebergResult out;
    RunningMoments lhs, rhs;
    for (const auto& r : records)
        if (r.ok) {
            lhs.add(r.values.at("diff"));
            rhs.add(r.values.at("taylor"));
        }
    out.lhs = lhs.mean;
    out.lhs_stderr = lhs.stderr_mean();
    out.taylor_rhs = rhs.mean;
    out.residual = out.lhs - out.taylor_rhs;
    out.noisy = std::abs(out.residual) > 5.0 * out.lhs_stderr;
    return out;
}

}  // namespace wigner
