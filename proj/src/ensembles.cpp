#include "wigner/ensembles.hpp"

#include <cmath>
#include <stdexcept>

namespace wigner {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

// moments of the unit-variance base laws, E[X^p] for p = 0..8
double unit_moment(LawKind kind, int p) {
    if (p < 0 || p > 8) throw std::invalid_argument("entry law moment order must be in [0, 8]");
    if (p == 0) return 1.0;
    switch (kind) {
        case LawKind::gaussian: {
            if (p % 2 == 1) return 0.0;
            // (p-1)!! for even p
            double m = 1.0;
            for (int k = p - 1; k > 1; k -= 2) m *= k;
            return m;
        }
        case LawKind::three_point: {
            // atoms {-sqrt3, 0, sqrt3} with probs {1/6, 2/3, 1/6}
            if (p % 2 == 1) return 0.0;
            return std::pow(3.0, p / 2) / 3.0;
        }
        case LawKind::two_point_rademacher:
            return (p % 2 == 1) ? 0.0 : 1.0;
        case LawKind::uniform: {
            // U[-sqrt3, sqrt3]: E[X^p] = 3^{p/2} / (p+1) for even p
            if (p % 2 == 1) return 0.0;
            return std::pow(3.0, p / 2) / (p + 1);
        }
    }
    throw std::logic_error("unreachable");
}

double unit_abs_moment(LawKind kind, int p) {
    if (p % 2 == 0) return unit_moment(kind, p);
    switch (kind) {
        case LawKind::gaussian: {
            // E|X|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
            return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1)) /
                   std::sqrt(M_PI);
        }
        case LawKind::three_point:
            return std::pow(kSqrt3, p) / 3.0;
        case LawKind::two_point_rademacher:
            return 1.0;
        case LawKind::uniform:
            return std::pow(kSqrt3, p) / (p + 1);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

double EntryLaw::moment(int p) const {
    return std::pow(scale, p) * unit_moment(kind, p);
}

double EntryLaw::abs_moment(int p) const {
    return std::pow(scale, p) * unit_abs_moment(kind, p);
}

double EntryLaw::sample(Rng& rng) const {
    switch (kind) {
        case LawKind::gaussian:
            return scale * rng.gaussian();
        case LawKind::three_point: {
            const double u = rng.uniform();
            if (u < 1.0 / 6.0) return -kSqrt3 * scale;
            if (u < 5.0 / 6.0) return 0.0;
            return kSqrt3 * scale;
        }
        case LawKind::two_point_rademacher:
            return rng.uniform() < 0.5 ? -scale : scale;
        case LawKind::uniform:
            return scale * kSqrt3 * (2.0 * rng.uniform() - 1.0);
    }
    throw std::logic_error("unreachable");
}

EntryLaw gaussian_law(double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    return EntryLaw{LawKind::gaussian, sigma, 1.0};
}
EntryLaw three_point_law(double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    return EntryLaw{LawKind::three_point, sigma, 1.0};
}
EntryLaw two_point_rademacher_law(double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    return EntryLaw{LawKind::two_point_rademacher, sigma, 1.0};
}
EntryLaw uniform_law(double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    return EntryLaw{LawKind::uniform, sigma, 1.0};
}

void VarianceProfile::validate() const {
    if (n < 2) throw std::invalid_argument("variance profile needs n >= 2");
    if (sigma2.rows() != n || sigma2.cols() != n)
        throw std::invalid_argument("sigma2 dimension mismatch");
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            if (sigma2(i, j) != sigma2(j, i))
                throw std::invalid_argument("sigma2 not symmetric");
            const double s = sigma2(i, j) * n;
            if (s < c_lo - 1e-12 || s > c_hi + 1e-12)
                throw std::invalid_argument("sigma2 entry outside [c_lo/N, c_hi/N]");
        }
        if (!reference) {
            const double colsum = sigma2.col(j).sum();
            if (std::abs(colsum - 1.0) > 1e-12)
                throw std::invalid_argument("column sum of sigma2 deviates from 1");
        }
    }
    if (c_lo <= 0.0) throw std::invalid_argument("variance lower bound must be positive");
}

VarianceProfile build_variance_profile(ProfileKind kind, int n, const json& params) {
    if (n < 2) throw std::invalid_argument("variance profile needs n >= 2");
    VarianceProfile p;
    p.kind = kind;
    p.n = n;
    p.params = params;
    const double N = n;
    switch (kind) {
        case ProfileKind::flat_gue:
            p.sigma2 = Eigen::MatrixXd::Constant(n, n, 1.0 / N);
            p.c_lo = p.c_hi = 1.0;
            break;
        case ProfileKind::flat_goe:
            p.sigma2 = Eigen::MatrixXd::Constant(n, n, 1.0 / N);
            p.sigma2.diagonal().setConstant(2.0 / N);
            p.c_lo = 1.0;
            p.c_hi = 2.0;
            p.reference = true;  // row sums are (N+1)/N
            break;
        case ProfileKind::banded: {
            const int width = params.value("width", n / 4);
            const double floor = params.value("floor", 0.2);
            if (width < 1 || floor <= 0.0 || floor >= 1.0)
                throw std::invalid_argument("banded profile needs width >= 1 and floor in (0,1)");
            // circulant band: every row has the same entry multiset, so row
            // sums are exactly equal and normalize to 1
            Eigen::MatrixXd k(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const int d = std::min(std::abs(i - j), n - std::abs(i - j));
                    k(i, j) = d <= width ? 1.0 : floor;
                }
            const double rowsum = k.row(0).sum();
            p.sigma2 = k / rowsum;
            p.c_lo = N * floor / rowsum;
            p.c_hi = N / rowsum;
            break;
        }
        case ProfileKind::doubly_stochastic_random: {
            const std::uint64_t seed = params.value("seed", 12345u);
            const double lo = params.value("lo", 0.5);
            const double hi = params.value("hi", 1.5);
            if (!(0.0 < lo && lo <= hi))
                throw std::invalid_argument("doubly_stochastic_random needs 0 < lo <= hi");
            Rng rng(derive_seed(seed, 0xD5));
            Eigen::MatrixXd a(n, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i <= j; ++i)
                    a(i, j) = a(j, i) = lo + (hi - lo) * rng.uniform();
            // symmetric Sinkhorn: a <- D a D until column sums are 1
            for (int it = 0; it < 500; ++it) {
                Eigen::VectorXd d = a.colwise().sum().cwiseInverse().cwiseSqrt();
                a = d.asDiagonal() * a * d.asDiagonal();
                if ((a.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14) break;
            }
            // symmetrize away roundoff drift and re-balance the last mile
            a = ((a + a.transpose()) / 2.0).eval();
            Eigen::VectorXd colsum = a.colwise().sum();
            if ((colsum.array() - 1.0).abs().maxCoeff() > 1e-12)
                throw std::runtime_error("sinkhorn normalization did not converge");
            p.sigma2 = a;
            p.c_lo = N * a.minCoeff();
            p.c_hi = N * a.maxCoeff();
            break;
        }
    }
    p.validate();
    return p;
}

void EnsembleSpec::validate() const {
    profile.validate();
    if (offdiag_law.scale != 1.0 || diag_law.scale != 1.0)
        throw std::invalid_argument(
            "ensemble entry laws must be unit variance; scaling comes from the profile");
    if (symmetry == Symmetry::complex_hermitian) {
        const double r = offdiag_law.re_im_ratio;
        if (r < profile.c_lo / profile.c_hi - 1e-12 || r > profile.c_hi / profile.c_lo + 1e-12)
            if (r <= 0.0) throw std::invalid_argument("re_im_ratio must be positive");
    }
}

EnsembleSpec goe_spec(int n) {
    EnsembleSpec s;
    s.symmetry = Symmetry::real_symmetric;
    s.profile = build_variance_profile(ProfileKind::flat_goe, n);
    s.offdiag_law = gaussian_law();
    s.diag_law = gaussian_law();
    s.id = "goe_" + std::to_string(n);
    return s;
}

EnsembleSpec gue_spec(int n) {
    EnsembleSpec s;
    s.symmetry = Symmetry::complex_hermitian;
    s.profile = build_variance_profile(ProfileKind::flat_gue, n);
    s.offdiag_law = gaussian_law();
    s.diag_law = gaussian_law();
    s.id = "gue_" + std::to_string(n);
    return s;
}

EnsembleSpec gue_matched_three_point_spec(int n) {
    EnsembleSpec s = gue_spec(n);
    s.offdiag_law = three_point_law();
    s.diag_law = three_point_law();
    s.id = "gue3pt_" + std::to_string(n);
    return s;
}

double MatrixSample::trace() const {
    return is_complex() ? hc.trace().real() : hr.trace();
}

double MatrixSample::frobenius_norm() const {
    return is_complex() ? hc.norm() : hr.norm();
}

MatrixSample sample_matrix(const EnsembleSpec& spec, Rng& rng, std::uint64_t seed_token) {
    spec.validate();
    const int n = spec.profile.n;
    MatrixSample m;
    m.symmetry = spec.symmetry;
    m.seed = seed_token;
    m.spec_id = spec.id;
    if (spec.symmetry == Symmetry::real_symmetric) {
        m.hr.setZero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const double sd = std::sqrt(spec.profile.sigma2(i, j));
                const EntryLaw& law = (i == j) ? spec.diag_law : spec.offdiag_law;
                const double v = sd * law.sample(rng);
                m.hr(i, j) = v;
                m.hr(j, i) = v;
            }
        }
    } else {
        m.hc.setZero(n, n);
        const double ratio = spec.offdiag_law.re_im_ratio;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const double var = spec.profile.sigma2(i, j);
                if (i == j) {
                    m.hc(i, i) = std::sqrt(var) * spec.diag_law.sample(rng);
                } else {
                    const double sd_re = std::sqrt(var / (1.0 + ratio));
                    const double sd_im = std::sqrt(var * ratio / (1.0 + ratio));
                    const double re = sd_re * spec.offdiag_law.sample(rng);
                    const double im = sd_im * spec.offdiag_law.sample(rng);
                    m.hc(i, j) = {re, im};
                    m.hc(j, i) = {re, -im};
                }
            }
        }
    }
    return m;
}

std::complex<double> entry_moment(const EnsembleSpec& spec, int i, int j, int a, int b) {
    if (a < 0 || b < 0 || a + b > 4)
        throw std::invalid_argument("entry_moment requires a, b >= 0 and a + b <= 4");
    const double var = spec.profile.sigma2(i, j);
    const EntryLaw& law = (i == j) ? spec.diag_law : spec.offdiag_law;
    if (spec.symmetry == Symmetry::real_symmetric || i == j) {
        // real entry: E[v^{a+b}]
        return std::pow(std::sqrt(var), a + b) * law.moment(a + b);
    }
    // v = x + i y, x and y independent, Var x = var/(1+r), Var y = r var/(1+r)
    const double r = law.re_im_ratio;
    const double sx = std::sqrt(var / (1.0 + r));
    const double sy = std::sqrt(var * r / (1.0 + r));
    auto binom = [](int n, int k) {
        double c = 1.0;
        for (int t = 0; t < k; ++t) c = c * (n - t) / (t + 1);
        return c;
    };
    const std::complex<double> I(0.0, 1.0);
    std::complex<double> total = 0.0;
    for (int p = 0; p <= a; ++p) {
        for (int q = 0; q <= b; ++q) {
            // x^{p+q} * (iy)^{a-p} * (-iy)^{b-q}
            const int yord = (a - p) + (b - q);
            const std::complex<double> phase =
                std::pow(I, a - p) * std::pow(-I, b - q);
            total += binom(a, p) * binom(b, q) * phase *
                     (std::pow(sx, p + q) * law.moment(p + q)) *
                     (std::pow(sy, yord) * law.moment(yord));
        }
    }
    return total;
}

double max_moment_mismatch(const EnsembleSpec& sa, const EnsembleSpec& sb) {
    if (sa.profile.n != sb.profile.n || sa.symmetry != sb.symmetry)
        throw std::invalid_argument("ensembles must share dimension and symmetry class");
    const int n = sa.profile.n;
    double worst = 0.0;
    // the profiles are translation-structured in all supported kinds, but we
    // check every entry anyway; n <= a few thousand keeps this cheap
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int a = 0; a <= 4; ++a)
                for (int b = 0; a + b <= 4; ++b)
                    worst = std::max(worst, std::abs(entry_moment(sa, i, j, a, b) -
                                                     entry_moment(sb, i, j, a, b)));
    return worst;
}

std::string to_string(Symmetry s) {
    return s == Symmetry::real_symmetric ? "real_symmetric" : "complex_hermitian";
}
std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::flat_gue: return "flat_gue";
        case ProfileKind::flat_goe: return "flat_goe";
        case ProfileKind::banded: return "banded";
        case ProfileKind::doubly_stochastic_random: return "doubly_stochastic_random";
    }
    throw std::logic_error("unreachable");
}
std::string to_string(LawKind k) {
    switch (k) {
        case LawKind::gaussian: return "gaussian";
        case LawKind::three_point: return "three_point";
        case LawKind::two_point_rademacher: return "two_point_rademacher";
        case LawKind::uniform: return "uniform";
    }
    throw std::logic_error("unreachable");
}
Symmetry symmetry_from_string(const std::string& s) {
    if (s == "real_symmetric") return Symmetry::real_symmetric;
    if (s == "complex_hermitian") return Symmetry::complex_hermitian;
    throw std::invalid_argument("unknown symmetry: " + s);
}
ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "flat_gue") return ProfileKind::flat_gue;
    if (s == "flat_goe") return ProfileKind::flat_goe;
    if (s == "banded") return ProfileKind::banded;
    if (s == "doubly_stochastic_random") return ProfileKind::doubly_stochastic_random;
    throw std::invalid_argument("unknown profile kind: " + s);
}
LawKind law_kind_from_string(const std::string& s) {
    if (s == "gaussian") return LawKind::gaussian;
    if (s == "three_point") return LawKind::three_point;
    if (s == "two_point_rademacher") return LawKind::two_point_rademacher;
    if (s == "uniform") return LawKind::uniform;
    throw std::invalid_argument("unknown entry law: " + s);
}

json EnsembleSpec::to_json() const {
    json law_a = {{"kind", to_string(offdiag_law.kind)},
                  {"re_im_ratio", offdiag_law.re_im_ratio}};
    json law_d = {{"kind", to_string(diag_law.kind)},
                  {"re_im_ratio", diag_law.re_im_ratio}};
    return json{{"symmetry", to_string(symmetry)},
                {"profile",
                 {{"kind", to_string(profile.kind)},
                  {"n", profile.n},
                  {"params", profile.params}}},
                {"offdiag_law", law_a},
                {"diag_law", law_d},
                {"id", id}};
}

EnsembleSpec EnsembleSpec::from_json(const json& j) {
    EnsembleSpec s;
    s.symmetry = symmetry_from_string(j.at("symmetry").get<std::string>());
    const auto& pj = j.at("profile");
    s.profile = build_variance_profile(
        profile_kind_from_string(pj.at("kind").get<std::string>()),
        pj.at("n").get<int>(), pj.value("params", json::object()));
    auto parse_law = [](const json& lj) {
        EntryLaw law;
        law.kind = law_kind_from_string(lj.at("kind").get<std::string>());
        law.re_im_ratio = lj.value("re_im_ratio", 1.0);
        return law;
    };
    s.offdiag_law = parse_law(j.at("offdiag_law"));
    s.diag_law = parse_law(j.at("diag_law"));
    s.id = j.value("id", "");
    s.validate();
    return s;
}

EnsembleSpec resized_spec(const EnsembleSpec& spec, int n) {
    EnsembleSpec out = spec;
    out.profile =
        build_variance_profile(spec.profile.kind, n, spec.profile.params);
    return out;
}

}  // namespace wigner
