// wignergaps._core: Python bindings for the gap-statistics laboratory.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wigner/dynamics.hpp"
#include "wigner/ensembles.hpp"
#include "wigner/experiments.hpp"
#include "wigner/gaps.hpp"
#include "wigner/hsreg.hpp"
#include "wigner/smoothmax.hpp"
#include "wigner/spectral.hpp"
#include "wigner/stats.hpp"

namespace py = pybind11;
using namespace wigner;

namespace {

EnsembleSpec spec_by_name(const std::string& name, int n) {
    if (name == "goe") return goe_spec(n);
    if (name == "gue") return gue_spec(n);
    if (name == "gue_matched_three_point")
        return gue_matched_three_point_spec(n);
    throw std::invalid_argument("unknown ensemble: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "extremal eigenvalue-gap statistics for generalized Wigner "
              "matrices";

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("values", &Spectrum::lambda)
        .def_property_readonly("evec_supnorms",
                               [](const Spectrum& s) { return s.evec_supnorms; })
        .def("__len__", &Spectrum::n);

    py::class_<GapSelector>(m, "GapSelector")
        .def_static("index_set", &GapSelector::index_set, py::arg("j"),
                    py::arg("alpha") = 0.0)
        .def_static("interval", &GapSelector::interval, py::arg("a"),
                    py::arg("b"), py::arg("kappa") = 0.0);

    py::class_<RegularizationParams>(m, "RegularizationParams")
        .def_static("for_n", &RegularizationParams::for_n, py::arg("n"),
                    py::arg("gamma"), py::arg("frak_a") = 0.0)
        .def_readonly("beta", &RegularizationParams::beta)
        .def_readonly("nu", &RegularizationParams::nu);

    py::class_<HSParams>(m, "HSParams")
        .def(py::init<>())
        .def_readwrite("delta", &HSParams::delta)
        .def_readwrite("eps", &HSParams::eps);

    py::class_<RegularizedEigenvalue>(m, "RegularizedEigenvalue")
        .def_readonly("i", &RegularizedEigenvalue::i)
        .def_readonly("value", &RegularizedEigenvalue::value)
        .def_readonly("exact_gap_to_lambda",
                      &RegularizedEigenvalue::exact_gap_to_lambda);

    // sampling and spectra
    m.def(
        "sample_eigenvalues",
        [](const std::string& ensemble, int n, std::uint64_t seed,
           bool vectors) {
            Rng rng(seed);
            const MatrixSample ms =
                sample_matrix(spec_by_name(ensemble, n), rng, seed);
            return eigenvalues(ms, vectors);
        },
        py::arg("ensemble"), py::arg("n"), py::arg("seed"),
        py::arg("vectors") = false,
        "Sample one matrix from a named ensemble and return its spectrum.");

    // semicircle quantities
    m.def("rho_sc", &rho_sc, py::arg("x"));
    m.def("semicircle_cdf", &semicircle_cdf, py::arg("x"));
    m.def("classical_location", &classical_location, py::arg("q"));

    // gap statistics
    m.def("nu", &nu, py::arg("n"), "gap scale N / sqrt(log N)");
    m.def("m_of_interval", &m_of_interval, py::arg("a"), py::arg("b"));
    m.def("t_ell", &t_ell, py::arg("v"), py::arg("selector"), py::arg("ell"));
    m.def("t_hat_ell", &t_hat_ell, py::arg("v"), py::arg("selector"),
          py::arg("ell"));
    m.def("tau_star", &tau_star, py::arg("gap"), py::arg("n"), py::arg("m"));
    m.def("gumbel_k_cdf", &gumbel_k_cdf, py::arg("x"), py::arg("k"),
          py::arg("c2"));

    // smooth-max regularization
    m.def("z_ell", &z_ell, py::arg("v"), py::arg("selector"), py::arg("ell"),
          py::arg("params"));
    m.def("f_ell", &f_ell, py::arg("v"), py::arg("selector"), py::arg("ell"),
          py::arg("params"));
    m.def("grad_f", &grad_f, py::arg("v"), py::arg("selector"), py::arg("ell"),
          py::arg("params"));

    // regularized eigenvalues
    m.def(
        "tilde_lambda",
        [](const Spectrum& s, int i, const HSParams& p) {
            return tilde_lambda(s, i, p);
        },
        py::arg("spectrum"), py::arg("i"), py::arg("params"));

    // statistics helpers
    m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"));
    m.def("kolmogorov_cdf", &kolmogorov_cdf, py::arg("x"));
    m.def("fit_gumbel_k_location", &fit_gumbel_k_location, py::arg("x"),
          py::arg("k"));
}
