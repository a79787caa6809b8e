#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "dkm/baselines.hpp"
#include "dkm/dataset.hpp"
#include "dkm/diffusion.hpp"
#include "dkm/errors.hpp"
#include "dkm/kernel.hpp"
#include "dkm/pipeline.hpp"
#include "dkm/rounding.hpp"
#include "dkm/sdp.hpp"
#include "dkm/selection.hpp"

namespace py = pybind11;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

dkm::AffinityMatrix wrap(const MatrixXd& a) { return {a, 0, 1.0}; }

dkm::SolverOptions solver_options(double tol, int max_iters) {
  dkm::SolverOptions o;
  o.tol_primal = o.tol_dual = tol;
  o.max_iters = max_iters;
  return o;
}

py::dict solution_dict(const dkm::SdpSolution& s) {
  py::dict d;
  d["z"] = s.z;
  d["objective"] = s.objective;
  d["trace"] = s.trace;
  d["iterations"] = s.iterations;
  d["primal_residual"] = s.primal_residual;
  d["dual_residual"] = s.dual_residual;
  d["converged"] = s.converged;
  return d;
}

dkm::Partition partition_of(const std::vector<int>& labels) {
  return dkm::Partition::from_any_labels(labels);
}

dkm::KernelGraph graph_of(const MatrixXd& points, std::optional<double> h,
                          std::optional<int> k0) {
  if (h.has_value() == k0.has_value()) {
    throw dkm::ValidationError("give exactly one of h and k0");
  }
  if (h) return dkm::gaussian_kernel(points, *h);
  return dkm::local_scaling_kernel(points, dkm::local_bandwidths(points, *k0));
}

dkm::SpectralVariant parse_variant(const std::string& name) {
  if (name == "UN") return dkm::SpectralVariant::Unnormalized;
  if (name == "RWN") return dkm::SpectralVariant::RandomWalk;
  if (name == "NJW") return dkm::SpectralVariant::Symmetric;
  throw dkm::ValidationError("variant must be UN, RWN or NJW");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Diffusion K-means clustering by SDP relaxation";

  py::register_exception<dkm::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<dkm::ValidationError>(m, "ValidationError",
                                               PyExc_ValueError);
  py::register_exception<dkm::SelectionError>(m, "SelectionError",
                                              PyExc_RuntimeError);
  py::register_exception<dkm::NumericalError>(m, "NumericalError",
                                              PyExc_ArithmeticError);

  m.def(
      "generate",
      [](const std::string& dgp, std::size_t n, std::uint64_t seed,
         double noise_sd) {
        const auto spec =
            dkm::DgpSpec::from_kind(dkm::parse_dgp_kind(dgp), noise_sd);
        auto data = dkm::generate(spec, n, seed);
        return py::make_tuple(data.points, *data.labels);
      },
      py::arg("dgp"), py::arg("n"), py::arg("seed"), py::arg("noise_sd") = 0.0,
      "Synthetic dataset: (points, 0-based labels).");

  m.def("gaussian_kernel",
        [](const MatrixXd& x, double h) { return dkm::gaussian_kernel(x, h).weights; },
        py::arg("points"), py::arg("h"));
  m.def("local_bandwidths", &dkm::local_bandwidths, py::arg("points"),
        py::arg("k0"));
  m.def(
      "local_scaling_kernel",
      [](const MatrixXd& x, const VectorXd& h) {
        return dkm::local_scaling_kernel(x, h).weights;
      },
      py::arg("points"), py::arg("h"));

  m.def(
      "diffusion_affinity",
      [](const MatrixXd& points, long long t, std::optional<double> h,
         std::optional<int> k0) {
        return dkm::affinity(dkm::spectrum(graph_of(points, h, k0)), t).values;
      },
      py::arg("points"), py::arg("t"), py::kw_only(), py::arg("h") = py::none(),
      py::arg("k0") = py::none(),
      "A = P^{2t} D^{-1} for the Gaussian (h) or local-scaling (k0) kernel.");
  m.def(
      "transition_eigenvalues",
      [](const MatrixXd& points, std::optional<double> h, std::optional<int> k0) {
        return dkm::spectrum(graph_of(points, h, k0)).eigenvalues;
      },
      py::arg("points"), py::kw_only(), py::arg("h") = py::none(),
      py::arg("k0") = py::none(), "Eigenvalues of P, descending.");
  m.def("diffusion_steps", &dkm::diffusion_steps, py::arg("n"),
        py::arg("exponent"));

  m.def(
      "solve_trace",
      [](const MatrixXd& a, int k, double tol, int max_iters) {
        return solution_dict(dkm::solve(
            dkm::SdpProblem::trace_constrained(wrap(a), k),
            solver_options(tol, max_iters)));
      },
      py::arg("affinity"), py::arg("k"), py::arg("tol") = 1e-7,
      py::arg("max_iters") = 20000);
  m.def(
      "solve_regularized",
      [](const MatrixXd& a, double rho, double tol, int max_iters) {
        return solution_dict(
            dkm::solve(dkm::SdpProblem::regularized(wrap(a), rho),
                       solver_options(tol, max_iters)));
      },
      py::arg("affinity"), py::arg("rho"), py::arg("tol") = 1e-7,
      py::arg("max_iters") = 20000);
  m.def("project_psd", &dkm::project_psd, py::arg("m"));
  m.def("project_affine", &dkm::project_affine, py::arg("m"),
        py::arg("trace") = py::none());
  m.def("threshold_estimator",
        [](const MatrixXd& a, double gamma) {
          return dkm::threshold_estimator(a, gamma).labels();
        },
        py::arg("affinity"), py::arg("gamma"));

  m.def(
      "rho_grid",
      [](const MatrixXd& a, int grid_size) {
        return dkm::rho_grid(wrap(a), grid_size).rhos;
      },
      py::arg("affinity"), py::arg("grid_size") = 40);
  m.def(
      "tuning_path",
      [](const MatrixXd& a, const std::vector<double>& rhos, double tol) {
        dkm::PathOptions po;
        po.solver = solver_options(tol, 20000);
        dkm::TuningPath p;
        {
          py::gil_scoped_release release;
          p = dkm::tuning_path(wrap(a), rhos, po);
        }
        py::dict d;
        d["rhos"] = p.rhos;
        d["traces"] = p.traces;
        d["converged"] = std::vector<bool>(p.converged.begin(), p.converged.end());
        d["iterations"] = p.iterations;
        return d;
      },
      py::arg("affinity"), py::arg("rhos"), py::arg("tol") = 1e-7);
  m.def(
      "select",
      [](const std::vector<double>& rhos, const std::vector<double>& traces,
         int k_max, double eps) {
        dkm::TuningPath p;
        p.rhos = rhos;
        p.traces = traces;
        p.converged.assign(rhos.size(), true);
        p.iterations.assign(rhos.size(), 0);
        const auto s = dkm::select(p, k_max, eps);
        py::dict d;
        d["k_hat"] = s.k_hat;
        d["rho_hat"] = s.rho_hat;
        d["rho_hat_index"] = s.rho_hat_index;
        d["interval_lengths"] = s.interval_lengths;
        return d;
      },
      py::arg("rhos"), py::arg("traces"), py::arg("k_max") = 10,
      py::arg("eps") = 0.3);

  m.def(
      "round_solution",
      [](const MatrixXd& z, int k, std::uint64_t seed) {
        return dkm::round_solution(z, k, seed).labels();
      },
      py::arg("z"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "membership_matrix",
      [](const std::vector<int>& labels) {
        return dkm::membership_matrix(partition_of(labels));
      },
      py::arg("labels"));
  m.def("l1_error", &dkm::l1_error, py::arg("z_hat"), py::arg("z_star"));
  m.def(
      "classification_error",
      [](const std::vector<int>& estimate, const std::vector<int>& truth) {
        return dkm::classification_error(partition_of(estimate),
                                         partition_of(truth));
      },
      py::arg("estimate"), py::arg("truth"));

  m.def(
      "spectral_cluster",
      [](const MatrixXd& points, int k, const std::string& variant,
         std::optional<double> h, std::optional<int> k0, std::uint64_t seed) {
        return dkm::spectral_cluster(graph_of(points, h, k0), k,
                                     parse_variant(variant), seed)
            .labels();
      },
      py::arg("points"), py::arg("k"), py::arg("variant") = "NJW",
      py::kw_only(), py::arg("h") = py::none(), py::arg("k0") = py::none(),
      py::arg("seed") = 0);

  m.def(
      "run_cluster",
      [](const std::string& config_json, const std::string& method,
         const MatrixXd& points, std::optional<std::vector<int>> labels,
         std::uint64_t seed) {
        const auto config = dkm::config_from_json(config_json);
        dkm::LabeledDataset data{points, std::move(labels), std::nullopt};
        dkm::ClusterResult r;
        {
          py::gil_scoped_release release;
          r = dkm::run_cluster(config, dkm::parse_method(method), data, seed);
        }
        py::dict d;
        d["labels"] = r.partition.labels();
        d["k"] = r.k;
        d["l1_error"] = r.l1_error;
        d["classification_error"] = r.classification_error;
        d["trace"] = r.trace;
        d["rho"] = r.rho;
        d["k_hat"] = r.k_hat;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("config_json"), py::arg("method"), py::arg("points"),
      py::arg("labels") = py::none(), py::arg("seed") = 0,
      "Full pipeline for one method; config_json uses the CLI config schema.");
}
