// wigner_gaps: command-line front door for the eigenvalue-gap laboratory.
//
// Subcommands: spectrum, gaps, regularize, compare, flow, universality.
// One JSON config fully determines a run; outputs are TrialRecord NDJSON,
// plot-ready summary CSV, and a RunManifest listing every file written.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "wigner/experiments.hpp"
#include "wigner/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wigner;

namespace {

constexpr const char* kVersion = "wigner-gaps 1.0.0";

// shortest round-trip decimal form, used for every float in the CSVs so that
// reruns are byte-identical
std::string fmt(double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, p);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string out_dir;
    bool override_gates = false;
};

struct RunContext {
    ExperimentConfig cfg;
    json cfg_json;
    fs::path out;
    int workers = 1;
    std::string start_time;
    std::vector<std::string> files;

    fs::path path(const std::string& name) {
        files.push_back(name);
        return out / name;
    }
};

// --out-dir flag > WIGNER_GAPS_OUT > config out_dir > current directory
fs::path resolve_out_dir(const CliOptions& opt, const ExperimentConfig& cfg) {
    if (!opt.out_dir.empty()) return opt.out_dir;
    if (const char* env = std::getenv("WIGNER_GAPS_OUT"); env && *env)
        return env;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    return ".";
}

RunContext load_context(const CliOptions& opt) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot open config file: " + opt.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // translate the byte offset into a line/column diagnostic
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("config JSON parse error at line " +
                          std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }

    RunContext ctx;
    ctx.cfg = ExperimentConfig::from_json(j);
    if (opt.seed) ctx.cfg.base_seed = *opt.seed;
    if (opt.override_gates) ctx.cfg.override_gates = true;
    ctx.cfg.validate();
    ctx.cfg_json = ctx.cfg.to_json();
    ctx.out = resolve_out_dir(opt, ctx.cfg);
    ctx.workers = opt.workers;
    ctx.start_time = iso_now();
    fs::create_directories(ctx.out);
    return ctx;
}

void write_ndjson(const fs::path& p, const std::vector<TrialRecord>& records) {
    std::ofstream out(p);
    for (const auto& r : records) {
        // wall time is machine noise; dropping it keeps reruns byte-identical
        TrialRecord clean = r;
        clean.wall_seconds = 0.0;
        out << clean.to_json().dump() << "\n";
    }
}

void write_csv(const fs::path& p, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(p);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

void write_manifest(RunContext& ctx, const std::string& subcommand) {
    json m;
    m["subcommand"] = subcommand;
    m["config_hash"] = fnv1a(ctx.cfg_json.dump());
    m["base_seed"] = ctx.cfg.base_seed;
    m["code_version"] = kVersion;
    m["workers"] = ctx.workers;
    m["start_time"] = ctx.start_time;
    m["end_time"] = iso_now();
    m["files"] = ctx.files;
    // atomic publication: write then rename
    const fs::path final = ctx.out / "manifest.json";
    const fs::path tmp = ctx.out / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        out << m.dump(2) << "\n";
    }
    fs::rename(tmp, final);
}

// summarize a value key over successful trials
std::vector<std::string> summary_row(const std::vector<TrialRecord>& records,
                                     const std::string& key) {
    RunningMoments m;
    for (const auto& r : records)
        if (r.ok && r.values.count(key)) m.add(r.values.at(key));
    return {key, std::to_string(m.count), fmt(m.mean),
            fmt(std::sqrt(m.variance())), fmt(m.stderr_mean())};
}

// ---------------------------------------------------------------- spectrum

int cmd_spectrum(RunContext& ctx) {
    const int n = ctx.cfg.n_values.front();
    std::vector<std::vector<std::string>> report_rows;
    auto records = mc_run(
        [&](int trial, std::uint64_t seed) {
            Rng rng(seed);
            const MatrixSample m = sample_matrix(ctx.cfg.spec, rng, seed);
            const Spectrum s = eigenvalues(m, true);
            TrialRecord r;
            r.n = n;
            r.values["lambda_min"] = s.lambda(0);
            r.values["lambda_max"] = s.lambda(n - 1);
            r.values["rigidity_max"] =
                rigidity_report(s, ctx.cfg.bulk_alpha).max_scaled_dev;
            r.values["deloc_max"] = delocalization_report(s);
            r.values["local_law_sup"] =
                local_law_report(s, 40, 20,
                                 std::pow(double(n), -0.9))
                    .sup_scaled_dev;
            return r;
        },
        ctx.cfg.n_trials, ctx.cfg.base_seed, ctx.workers);

    // per-trial eigenvalue CSVs (regenerated deterministically from seeds)
    for (const auto& rec : records) {
        if (!rec.ok) continue;
        Rng rng(rec.seed);
        const MatrixSample m = sample_matrix(ctx.cfg.spec, rng, rec.seed);
        const Spectrum s = eigenvalues(m);
        char name[64];
        std::snprintf(name, sizeof(name), "spectrum_trial%04d.csv", rec.trial);
        std::vector<std::vector<std::string>> rows;
        for (int i = 0; i < n; ++i)
            rows.push_back({std::to_string(i + 1), fmt(s.lambda(i))});
        write_csv(ctx.path(name), {"index", "lambda"}, rows);
    }

    write_ndjson(ctx.path("records.ndjson"), records);
    write_csv(ctx.path("summary.csv"),
              {"statistic", "count", "mean", "sd", "stderr"},
              {summary_row(records, "lambda_min"),
               summary_row(records, "lambda_max"),
               summary_row(records, "rigidity_max"),
               summary_row(records, "deloc_max"),
               summary_row(records, "local_law_sup")});
    return 0;
}

// -------------------------------------------------------------------- gaps

int cmd_gaps(RunContext& ctx) {
    const int n = ctx.cfg.n_values.front();
    ctx.cfg.selector.validate(n);
    auto records = mc_run(
        [&](int, std::uint64_t seed) {
            Rng rng(seed);
            const MatrixSample m = sample_matrix(ctx.cfg.spec, rng, seed);
            const Eigen::VectorXd lambda = eigenvalues_only(m);
            TrialRecord r;
            r.n = n;
            for (int l = 1; l <= ctx.cfg.ell; ++l) {
                const double t =
                    ctx.cfg.selector.mode == GapSelector::Mode::index_set
                        ? t_ell(lambda, ctx.cfg.selector, l)
                        : t_hat_ell(lambda, ctx.cfg.selector, l);
                r.values["t_" + std::to_string(l)] = t;
                r.values["nu_t_" + std::to_string(l)] = nu(n) * t;
            }
            return r;
        },
        ctx.cfg.n_trials, ctx.cfg.base_seed, ctx.workers);

    write_ndjson(ctx.path("records.ndjson"), records);
    std::vector<std::vector<std::string>> rows;
    for (int l = 1; l <= ctx.cfg.ell; ++l) {
        rows.push_back(summary_row(records, "t_" + std::to_string(l)));
        rows.push_back(summary_row(records, "nu_t_" + std::to_string(l)));
    }
    write_csv(ctx.path("summary.csv"),
              {"statistic", "count", "mean", "sd", "stderr"}, rows);
    return 0;
}

// -------------------------------------------------------------- regularize

int cmd_regularize(RunContext& ctx) {
    const int n = ctx.cfg.n_values.front();
    const RegularizationParams rp =
        RegularizationParams::for_n(n, ctx.cfg.gamma);
    const HSParams hs = ctx.cfg.hs;
    auto records = mc_run(
        [&](int, std::uint64_t seed) {
            Rng rng(seed);
            const MatrixSample m = sample_matrix(ctx.cfg.spec, rng, seed);
            const Eigen::VectorXd lambda = eigenvalues_only(m);
            TrialRecord r;
            r.n = n;
            const double t =
                ctx.cfg.selector.mode == GapSelector::Mode::index_set
                    ? t_ell(lambda, ctx.cfg.selector, ctx.cfg.ell)
                    : t_hat_ell(lambda, ctx.cfg.selector, ctx.cfg.ell);
            r.values["nu_t"] = rp.nu * t;
            if (ctx.cfg.selector.mode == GapSelector::Mode::index_set) {
                r.values["f_ell"] = f_ell(lambda, ctx.cfg.selector,
                                          ctx.cfg.ell, rp);
            } else {
                CutoffSpec cut;
                cut.eps_w = ctx.cfg.eps_w;
                r.values["f_ell"] = f_hat(lambda, ctx.cfg.selector.a,
                                          ctx.cfg.selector.b, ctx.cfg.ell, rp,
                                          cut);
            }
            r.values["entropy_gap"] =
                std::abs(r.values["nu_t"] - r.values["f_ell"]);
            // one regularized eigenvalue per trial: the lowest admissible
            // mid-bulk index
            Spectrum s;
            s.lambda = lambda;
            const int i = n / 2;
            const auto reg = tilde_lambda(s, i, hs);
            r.values["tilde_lambda_mid"] = reg.value;
            r.values["tilde_gap_mid"] = reg.exact_gap_to_lambda;
            return r;
        },
        ctx.cfg.n_trials, ctx.cfg.base_seed, ctx.workers);

    write_ndjson(ctx.path("records.ndjson"), records);
    write_csv(ctx.path("summary.csv"),
              {"statistic", "count", "mean", "sd", "stderr"},
              {summary_row(records, "nu_t"), summary_row(records, "f_ell"),
               summary_row(records, "entropy_gap"),
               summary_row(records, "tilde_gap_mid")});
    return 0;
}

// ----------------------------------------------------------------- compare

int cmd_compare(RunContext& ctx) {
    if (!ctx.cfg.spec_b)
        throw ConfigError("compare: config must provide spec_b");
    const auto res = four_moment_compare(ctx.cfg.spec, *ctx.cfg.spec_b,
                                         ctx.cfg, ctx.workers);
    write_ndjson(ctx.path("records.ndjson"), res.records);
    write_csv(ctx.path("summary.csv"),
              {"mean_a", "mean_b", "mean_diff", "stderr", "ks_two_sample"},
              {{fmt(res.mean_a), fmt(res.mean_b), fmt(res.mean_diff),
                fmt(res.std_err), fmt(res.ks_two_sample)}});
    return 0;
}

// -------------------------------------------------------------------- flow

int cmd_flow(RunContext& ctx) {
    const auto res =
        flow_compare(ctx.cfg.spec, ctx.cfg.t_flow, ctx.cfg, ctx.workers);
    write_ndjson(ctx.path("records.ndjson"), res.records);
    write_csv(ctx.path("summary.csv"),
              {"t_flow", "mean_diff", "stderr", "ks_two_sample"},
              {{fmt(ctx.cfg.t_flow), fmt(res.mean_diff), fmt(res.std_err),
                fmt(res.ks_two_sample)}});
    return 0;
}

// ------------------------------------------------------------ universality

int cmd_universality(RunContext& ctx) {
    if (ctx.cfg.selector.mode != GapSelector::Mode::energy_interval)
        throw ConfigError("universality: selector must be an energy interval");
    const double a = ctx.cfg.selector.a, b = ctx.cfg.selector.b;
    if (ctx.cfg.kind == "fluctuations" ||
        ctx.cfg.kind == "universality_fluctuations") {
        const auto res = universality_fluctuations(
            ctx.cfg.spec, a, b, ctx.cfg.k_rank, ctx.cfg, ctx.workers);
        write_ndjson(ctx.path("records.ndjson"), res.records);
        write_csv(ctx.path("summary.csv"),
                  {"k", "n", "trials", "fitted_c2", "ks_to_gumbel_k"},
                  {{std::to_string(ctx.cfg.k_rank),
                    std::to_string(ctx.cfg.n_values.front()),
                    std::to_string(res.tau_samples.size()),
                    fmt(res.fitted_c2), fmt(res.ks_to_gumbel_k)}});
        return 0;
    }
    const auto res =
        universality_maxgap(ctx.cfg.spec, a, b, ctx.cfg, ctx.workers);
    write_ndjson(ctx.path("records.ndjson"), res.records);
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : res.per_n)
        rows.push_back({std::to_string(row.n), fmt(row.scaled_mean),
                        fmt(row.scaled_sd), fmt(row.scaled_stderr)});
    write_csv(ctx.path("summary.csv"),
              {"n", "scaled_mean", "scaled_sd", "scaled_stderr"}, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for extremal eigenvalue-gap statistics"};
    app.require_subcommand(1);

    CliOptions opt;
    std::map<std::string, int (*)(RunContext&)> dispatch = {
        {"spectrum", cmd_spectrum},   {"gaps", cmd_gaps},
        {"regularize", cmd_regularize}, {"compare", cmd_compare},
        {"flow", cmd_flow},           {"universality", cmd_universality}};

    for (auto& [name, fn] : dispatch) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "JSON config path")
            ->required();
        std::uint64_t* seed_slot = new std::uint64_t(0);
        sub->add_option("--seed", *seed_slot, "override base_seed");
        sub->add_option("--workers", opt.workers, "worker thread count");
        sub->add_option("--out-dir", opt.out_dir, "output directory");
        sub->add_flag("--override-gates", opt.override_gates,
                      "bypass theorem-window precondition gates");
        sub->callback([&, name = name, fn = fn, sub, seed_slot] {
            if (sub->count("--seed")) opt.seed = *seed_slot;
            RunContext ctx = load_context(opt);
            fn(ctx);
            write_manifest(ctx, name);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
