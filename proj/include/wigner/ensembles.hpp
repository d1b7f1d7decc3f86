#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "wigner/rng.hpp"

namespace wigner {

using json = nlohmann::json;

enum class Symmetry { real_symmetric, complex_hermitian };
enum class ProfileKind { flat_gue, flat_goe, banded, doubly_stochastic_random };
enum class LawKind { gaussian, three_point, two_point_rademacher, uniform };

// Entry variance profile sigma_ij^2.  Column sums are exactly 1 unless the
// profile is flagged `reference` (GOE-style, row sums (N+1)/N).
struct VarianceProfile {
    ProfileKind kind = ProfileKind::flat_gue;
    int n = 0;
    Eigen::MatrixXd sigma2;   // symmetric, entries in [c_lo/N, c_hi/N]
    double c_lo = 0.0;        // N * min entry
    double c_hi = 0.0;        // N * max entry
    bool reference = false;   // row-sum constraint relaxed (GOE)
    json params;

    void validate() const;  // throws std::invalid_argument on violation
};

// Centered unit-variance scalar law, scaled by `scale`.  Moments are
// analytic (atom lists for the discrete laws, closed forms otherwise);
// nothing here is estimated by sampling.
struct EntryLaw {
    LawKind kind = LawKind::gaussian;
    double scale = 1.0;        // standard deviation
    double re_im_ratio = 1.0;  // Var(Im)/Var(Re) for complex entries

    double moment(int p) const;      // E[X^p], p <= 8
    double abs_moment(int p) const;  // E[|X|^p], p <= 8
    double sample(Rng& rng) const;
};

EntryLaw gaussian_law(double sigma = 1.0);
// {-sqrt(3) s, 0, +sqrt(3) s} with probabilities {1/6, 2/3, 1/6}; matches a
// centered Gaussian of the same variance through the fourth moment.
EntryLaw three_point_law(double sigma = 1.0);
EntryLaw two_point_rademacher_law(double sigma = 1.0);
EntryLaw uniform_law(double sigma = 1.0);

struct EnsembleSpec {
    Symmetry symmetry = Symmetry::real_symmetric;
    VarianceProfile profile;
    EntryLaw offdiag_law;
    EntryLaw diag_law;
    std::string id;

    void validate() const;

    json to_json() const;
    static EnsembleSpec from_json(const json& j);
};

// Convenience constructors for the two Gaussian reference ensembles.
EnsembleSpec goe_spec(int n);
EnsembleSpec gue_spec(int n);
// GUE-profile ensemble with three-point entries matching GUE to 4 moments.
EnsembleSpec gue_matched_three_point_spec(int n);

// One sampled matrix.  Exactly self-adjoint: the upper triangle is drawn and
// mirrored, so h(i,j) == conj(h(j,i)) holds bitwise.
struct MatrixSample {
    Symmetry symmetry = Symmetry::real_symmetric;
    Eigen::MatrixXd hr;   // real symmetric storage
    Eigen::MatrixXcd hc;  // complex Hermitian storage
    std::uint64_t seed = 0;
    std::string spec_id;

    int n() const {
        return symmetry == Symmetry::real_symmetric
                   ? static_cast<int>(hr.rows())
                   : static_cast<int>(hc.rows());
    }
    bool is_complex() const { return symmetry == Symmetry::complex_hermitian; }
    double trace() const;
    double frobenius_norm() const;
};

VarianceProfile build_variance_profile(ProfileKind kind, int n,
                                       const json& params = json::object());

MatrixSample sample_matrix(const EnsembleSpec& spec, Rng& rng,
                           std::uint64_t seed_token = 0);

// E[v^a conj(v)^b] for the (i,j) entry under `spec`, a + b <= 4, computed
// analytically from the law's moment table.
std::complex<double> entry_moment(const EnsembleSpec& spec, int i, int j,
                                  int a, int b);

// max over entries and a+b <= 4 of |E v^a vbar^b - E w^a wbar^b|; the
// four-moment matching gate of the comparison experiments.
double max_moment_mismatch(const EnsembleSpec& a, const EnsembleSpec& b);

// same laws and profile kind, rebuilt at dimension n
EnsembleSpec resized_spec(const EnsembleSpec& spec, int n);

std::string to_string(Symmetry s);
std::string to_string(ProfileKind k);
std::string to_string(LawKind k);
Symmetry symmetry_from_string(const std::string& s);
ProfileKind profile_kind_from_string(const std::string& s);
LawKind law_kind_from_string(const std::string& s);

}  // namespace wigner
