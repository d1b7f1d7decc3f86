#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wigner/dynamics.hpp"
#include "wigner/ensembles.hpp"
#include "wigner/gaps.hpp"
#include "wigner/hsreg.hpp"
#include "wigner/smoothmax.hpp"
#include "wigner/stats.hpp"

namespace wigner {

// error taxonomy mirrored by the CLI exit codes (2 / 3 / 4)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smooth test function S with bounded derivatives applied to nu * T.
struct TestFunctionSpec {
    enum class Kind { polynomial, smoothed_lp, smoothed_indicator };
    Kind kind = Kind::smoothed_lp;
    int degree = 2;      // polynomial: S(x) = x^degree
    double p = 2.0;      // smoothed_lp: S(x) = ((x-center)^2 + width^2)^{p/2}
    double center = 1.0;
    double a = 0.0, b = 1.0;  // smoothed_indicator of [a, b]
    double width = 0.1;       // transition width (configs use N^{-eps})

    double operator()(double x) const;
    // dense-grid sup norms of derivatives 0..5 on [lo, hi]
    std::vector<double> derivative_supnorms(double lo, double hi) const;

    nlohmann::json to_json() const;
    static TestFunctionSpec from_json(const nlohmann::json& j);
};

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    int n = 0;
    bool ok = true;
    std::string error;
    double wall_seconds = 0.0;
    std::map<std::string, double> values;

    nlohmann::json to_json() const;
    static TrialRecord from_json(const nlohmann::json& j);
};

struct ExperimentConfig {
    std::string kind;  // spectrum|gaps|regularize|compare|flow|universality|...
    EnsembleSpec spec;
    std::optional<EnsembleSpec> spec_b;
    GapSelector selector = GapSelector::interval(-1.0, 1.0);
    int ell = 1;
    int k_rank = 1;
    double gamma = 0.5;           // beta = N^gamma
    HSParams hs;
    int n_trials = 1;
    std::vector<int> n_values = {100};
    std::uint64_t base_seed = 1;
    TestFunctionSpec test_function;
    double t_flow = 0.0;          // flow_compare time (0: paired identity)
    double gate_delta = 0.05;     // flow-time window exponent
    bool override_gates = false;
    double bulk_alpha = 0.1;
    double eps_w = 0.5;           // wegner window exponent
    double energy = 0.0;          // wegner probe energy
    std::string out_dir;

    void validate() const;
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

// Generic deterministic Monte Carlo driver: runs fn(trial, seed) for every
// trial with a counter-derived seed; results are identical for any worker
// count because records are keyed by trial index.  Per-trial exceptions are
// captured into failed records; a failure rate > 1% raises NumericalError.
using TrialFn = std::function<TrialRecord(int trial, std::uint64_t seed)>;
std::vector<TrialRecord> mc_run(const TrialFn& fn, int n_trials,
                                std::uint64_t base_seed, int workers = 1,
                                std::uint64_t arm_salt = 0);

struct CompareResult {
    double mean_a = 0.0, mean_b = 0.0;
    double mean_diff = 0.0, std_err = 0.0;
    double ks_two_sample = 0.0;
    std::vector<TrialRecord> records;
};

// Theorem-style endpoint comparison of E S(nu T) under two moment-matched
// ensembles; refuses (PreconditionError) when entry moments up to order 4
// differ by more than N^{-2.25}.
CompareResult four_moment_compare(const EnsembleSpec& spec_a,
                                  const EnsembleSpec& spec_b,
                                  const ExperimentConfig& cfg,
                                  int workers = 1);

// Paired comparison of nu T before/after the matrix OU flow run to time t;
// refuses t outside (N^{-1+delta}, N^{-1/2-delta}) unless override_gates.
CompareResult flow_compare(const EnsembleSpec& spec, double t,
                           const ExperimentConfig& cfg, int workers = 1);

struct WegnerResult {
    double empirical_prob = 0.0;
    double expected_count = 0.0;
    std::vector<TrialRecord> records;
};

WegnerResult wegner_probe(const EnsembleSpec& spec, double energy,
                          double eps_w, const ExperimentConfig& cfg,
                          int workers = 1);

struct MaxGapRow {
    int n = 0;
    double scaled_mean = 0.0, scaled_sd = 0.0, scaled_stderr = 0.0;
};

struct MaxGapResult {
    std::vector<MaxGapRow> per_n;
    std::vector<TrialRecord> records;
};

// scaled statistic M N T-hat_{ell,I} / sqrt(32 log N) per N in cfg.n_values
MaxGapResult universality_maxgap(const EnsembleSpec& spec, double a, double b,
                                 const ExperimentConfig& cfg, int workers = 1);

struct FluctuationResult {
    std::vector<double> tau_samples;
    double fitted_c2 = 0.0;
    double ks_to_gumbel_k = 0.0;
    std::vector<TrialRecord> records;
};

FluctuationResult universality_fluctuations(const EnsembleSpec& spec, double a,
                                            double b, int k,
                                            const ExperimentConfig& cfg,
                                            int workers = 1);

struct LindebergResult {
    double lhs = 0.0, lhs_stderr = 0.0;
    double taylor_rhs = 0.0;
    double residual = 0.0;
    bool noisy = false;
};

// Single-entry swap probe: Monte Carlo difference of E S(nu T) when entry
// (a, b) is drawn from law A vs law B with everything else shared, against
// the moment-weighted Taylor prediction through order 4 (derivatives of the
// functional in the entry estimated by finite differences).
LindebergResult lindeberg_taylor_probe(const EnsembleSpec& spec_a,
                                       const EnsembleSpec& spec_b, int n_small,
                                       int a, int b,
                                       const ExperimentConfig& cfg,
                                       int n_inner = 1000, int workers = 1);

}  // namespace wigner
