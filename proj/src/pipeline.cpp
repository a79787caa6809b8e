#include "dkm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include "dkm/baselines.hpp"
#include "dkm/errors.hpp"
#include "dkm/parallel.hpp"
#include "dkm/rounding.hpp"
#include "json.hpp"

namespace dkm {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs one pipeline stage, prefixing any library error with the stage name
// while keeping its type (the CLI maps types to exit codes).
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  const auto tag = [name](const std::exception& e) {
    return std::string(name) + ": " + e.what();
  };
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(tag(e));
  } catch (const ParseError& e) {
    throw ParseError(tag(e), 0);
  } catch (const NumericalError& e) {
    throw NumericalError(tag(e));
  } catch (const SelectionError& e) {
    throw SelectionError(tag(e));
  } catch (const SizeError& e) {
    throw SizeError(tag(e));
  } catch (const IoError& e) {
    throw IoError(tag(e));
  } catch (const Error& e) {
    throw Error(tag(e));
  }
}

void emit(const DiagnosticSink& sink, const json& j) {
  if (sink) sink(j.dump());
}

SpectralVariant variant_of(Method m) {
  switch (m) {
    case Method::SC_UN:
    case Method::LSC_UN: return SpectralVariant::Unnormalized;
    case Method::SC_RWN:
    case Method::LSC_RWN: return SpectralVariant::RandomWalk;
    default: return SpectralVariant::Symmetric;
  }
}

json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

SolverOptions with_logging(const SolverOptions& base, const DiagnosticSink& sink,
                           const char* what) {
  SolverOptions o = base;
  if (sink && o.log_interval > 0) {
    const std::string label = what;
    o.on_iteration = [sink, label](const IterationLog& log) {
      json j;
      j["event"] = "iteration";
      j["solve"] = label;
      j["iteration"] = log.iteration;
      j["primal_residual"] = log.primal_residual;
      j["dual_residual"] = log.dual_residual;
      j["objective"] = log.objective;
      j["penalty"] = log.penalty;
      sink(j.dump());
    };
  }
  return o;
}

AffinityMatrix build_affinity(const ExperimentConfig& config, Method method,
                              const LabeledDataset& data,
                              const DiagnosticSink& sink) {
  const auto start = Clock::now();
  const KernelGraph graph =
      stage("kernel", [&] { return build_graph(config, method, data.points); });
  emit(sink, {{"event", "stage"}, {"stage", "kernel"},
              {"seconds", seconds_since(start)}});
  const auto t = diffusion_steps(data.size(), config.t_exponent);
  auto a = stage("diffusion", [&] { return affinity(spectrum(graph), t); });
  emit(sink, {{"event", "stage"}, {"stage", "diffusion"}, {"t", t},
              {"seconds", seconds_since(start)}});
  return a;
}

int resolve_k(const ExperimentConfig& config, const LabeledDataset& data) {
  if (config.k) return *config.k;
  if (data.labels) return data.num_clusters();
  return config.dgp.num_clusters();
}

std::optional<Partition> truth_of(const LabeledDataset& data) {
  if (!data.labels) return std::nullopt;
  return Partition(*data.labels, data.num_clusters());
}

struct PathRun {
  PathResult result;
  std::vector<SdpSolution> solutions;
};

PathRun path_on(const ExperimentConfig& config, const AffinityMatrix& a,
                bool keep_solutions, const DiagnosticSink& sink) {
  PathRun run;
  PathResult& r = run.result;
  r.t = a.t;
  r.grid = stage("path", [&] { return rho_grid(a, config.selection.grid_size); });
  if (r.grid.floor_applied) {
    emit(sink, {{"event", "warning"},
                {"message", "affinity is rank-deficient to machine zero; "
                            "rho grid floor applied"}});
  }
  PathOptions po;
  po.solver = with_logging(config.solver, sink, "path");
  po.keep_solutions = keep_solutions;
  r.path = stage("path", [&] { return tuning_path(a, r.grid.rhos, po); });
  try {
    r.selection = select(r.path, config.selection.k_max, config.selection.eps);
  } catch (const SelectionError& e) {
    r.selection_error = e.what();
  }
  if (keep_solutions) run.solutions = std::move(r.path.solutions);
  r.path.solutions.clear();
  return run;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::DKM: return "DKM";
    case Method::RDKM: return "RDKM";
    case Method::LDKM: return "LDKM";
    case Method::LRDKM: return "LRDKM";
    case Method::SC_UN: return "SC_UN";
    case Method::SC_RWN: return "SC_RWN";
    case Method::SC_NJW: return "SC_NJW";
    case Method::LSC_UN: return "LSC_UN";
    case Method::LSC_RWN: return "LSC_RWN";
    case Method::LSC_NJW: return "LSC_NJW";
    case Method::THRESH: return "THRESH";
  }
  return "DKM";
}

Method parse_method(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  std::replace(s.begin(), s.end(), '-', '_');
  for (Method m : {Method::DKM, Method::RDKM, Method::LDKM, Method::LRDKM,
                   Method::SC_UN, Method::SC_RWN, Method::SC_NJW,
                   Method::LSC_UN, Method::LSC_RWN, Method::LSC_NJW,
                   Method::THRESH}) {
    if (s == to_string(m)) return m;
  }
  throw ValidationError("unknown method '" + name + "'");
}

bool is_localized(Method m) {
  return m == Method::LDKM || m == Method::LRDKM || m == Method::LSC_UN ||
         m == Method::LSC_RWN || m == Method::LSC_NJW;
}

bool is_regularized(Method m) {
  return m == Method::RDKM || m == Method::LRDKM;
}

bool is_spectral(Method m) {
  return m == Method::SC_UN || m == Method::SC_RWN || m == Method::SC_NJW ||
         m == Method::LSC_UN || m == Method::LSC_RWN || m == Method::LSC_NJW;
}

int ExperimentConfig::effective_k0(std::size_t n_points) const {
  if (k0) return *k0;
  const double c = dgp.kind == DgpKind::Dgp2 ? 0.5 : 1.0;
  const double logn = std::log(static_cast<double>(n_points));
  return std::max(1, static_cast<int>(std::floor(c * logn)));
}

void ExperimentConfig::validate(bool check_methods) const {
  dgp.validate();
  if (n < 2) throw ValidationError("config: n must be at least 2");
  if (replications < 1) {
    throw ValidationError("config: replications must be at least 1");
  }
  if (methods.empty()) throw ValidationError("config: no method given");
  for (Method m : methods) {
    if (check_methods && !is_localized(m) && !h) {
      throw ValidationError("config: method " + to_string(m) +
                            " needs a global bandwidth h");
    }
  }
  if (h && !(*h > 0.0)) throw ValidationError("config: h must be positive");
  if (k0 && *k0 < 1) throw ValidationError("config: k0 must be at least 1");
  if (!(t_exponent >= 0.0) || !std::isfinite(t_exponent)) {
    throw ValidationError("config: t_exponent must be a nonnegative number");
  }
  if (k && *k < 1) throw ValidationError("config: k must be at least 1");
  if (gamma && !(*gamma > 0.0)) {
    throw ValidationError("config: gamma must be positive");
  }
  solver.validate();
  if (selection.grid_size < 2) {
    throw ValidationError("config: selection.J must be at least 2");
  }
  if (selection.k_max < 2) {
    throw ValidationError("config: selection.K_max must be at least 2");
  }
  if (!(selection.eps > 0.0 && selection.eps < 0.5)) {
    throw ValidationError("config: selection.eps must lie in (0, 0.5)");
  }
  if (jobs < 1) throw ValidationError("config: jobs must be at least 1");
}

namespace {

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <typename T>
void read_into(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return key == k; })) {
      throw ValidationError("config: unknown key '" + where + key + "'");
    }
  }
}

DgpSpec dgp_from_json(const json& j) {
  reject_unknown(j, {"kind", "noise_sd", "weights", "centers", "sds"}, "dgp.");
  const DgpKind kind = parse_dgp_kind(j.value("kind", std::string("dgp1")));
  const double noise = j.value("noise_sd", 0.0);
  if (kind != DgpKind::Custom) {
    if (j.contains("weights") || j.contains("centers") || j.contains("sds")) {
      throw ValidationError(
          "config: dgp weights/centers/sds apply to kind 'custom' only");
    }
    DgpSpec spec = DgpSpec::from_kind(kind, noise);
    return spec;
  }
  std::vector<Eigen::VectorXd> centers;
  for (const auto& c : j.at("centers")) {
    const auto v = c.get<std::vector<double>>();
    centers.emplace_back(Eigen::Map<const Eigen::VectorXd>(
        v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return DgpSpec::gaussian_mixture(j.at("weights").get<std::vector<double>>(),
                                   std::move(centers),
                                   j.at("sds").get<std::vector<double>>());
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"dgp", "n", "replications", "method", "methods", "h", "k0",
                    "t_exponent", "k", "gamma", "solver", "selection", "seed",
                    "output_dir", "jobs"},
                   "");
    if (j.contains("dgp")) c.dgp = dgp_from_json(j.at("dgp"));
    read_into(j, "n", c.n);
    read_into(j, "replications", c.replications);
    if (j.contains("method") && j.contains("methods")) {
      throw ValidationError("config: give either 'method' or 'methods'");
    }
    if (j.contains("method")) {
      c.methods = {parse_method(j.at("method").get<std::string>())};
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) {
        c.methods.push_back(parse_method(m.get<std::string>()));
      }
    }
    read_into(j, "h", c.h);
    read_into(j, "k0", c.k0);
    read_into(j, "t_exponent", c.t_exponent);
    read_into(j, "k", c.k);
    read_into(j, "gamma", c.gamma);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      reject_unknown(s,
                     {"penalty", "max_iters", "tol_primal", "tol_dual",
                      "rescale", "adapt_penalty", "adapt_interval",
                      "adapt_ratio", "adapt_factor", "log_interval"},
                     "solver.");
      read_into(s, "penalty", c.solver.penalty);
      read_into(s, "max_iters", c.solver.max_iters);
      read_into(s, "tol_primal", c.solver.tol_primal);
      read_into(s, "tol_dual", c.solver.tol_dual);
      read_into(s, "rescale", c.solver.rescale);
      read_into(s, "adapt_penalty", c.solver.adapt_penalty);
      read_into(s, "adapt_interval", c.solver.adapt_interval);
      read_into(s, "adapt_ratio", c.solver.adapt_ratio);
      read_into(s, "adapt_factor", c.solver.adapt_factor);
      read_into(s, "log_interval", c.solver.log_interval);
    }
    if (j.contains("selection")) {
      const auto& s = j.at("selection");
      reject_unknown(s, {"J", "K_max", "eps"}, "selection.");
      read_into(s, "J", c.selection.grid_size);
      read_into(s, "K_max", c.selection.k_max);
      read_into(s, "eps", c.selection.eps);
    }
    read_into(j, "seed", c.seed);
    if (j.contains("output_dir")) {
      c.output_dir = j.at("output_dir").get<std::string>();
    }
    read_into(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  json dgp;
  dgp["kind"] = to_string(c.dgp.kind);
  dgp["noise_sd"] = c.dgp.noise_sd;
  if (c.dgp.kind == DgpKind::Custom) {
    dgp["weights"] = c.dgp.weights;
    auto centers = json::array();
    for (const auto& v : c.dgp.centers) {
      centers.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    }
    dgp["centers"] = centers;
    dgp["sds"] = c.dgp.sds;
  }
  j["dgp"] = dgp;
  j["n"] = c.n;
  j["replications"] = c.replications;
  auto methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["h"] = optional_number(c.h);
  j["k0"] = c.k0 ? json(*c.k0) : json(nullptr);
  j["t_exponent"] = c.t_exponent;
  j["k"] = c.k ? json(*c.k) : json(nullptr);
  j["gamma"] = optional_number(c.gamma);
  j["solver"] = {{"penalty", c.solver.penalty},
                 {"max_iters", c.solver.max_iters},
                 {"tol_primal", c.solver.tol_primal},
                 {"tol_dual", c.solver.tol_dual},
                 {"rescale", c.solver.rescale},
                 {"adapt_penalty", c.solver.adapt_penalty},
                 {"adapt_interval", c.solver.adapt_interval},
                 {"adapt_ratio", c.solver.adapt_ratio},
                 {"adapt_factor", c.solver.adapt_factor},
                 {"log_interval", c.solver.log_interval}};
  j["selection"] = {{"J", c.selection.grid_size},
                    {"K_max", c.selection.k_max},
                    {"eps", c.selection.eps}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  j["jobs"] = c.jobs;
  return j.dump(2);
}

long long diffusion_steps(std::size_t n, double exponent) {
  const double v = std::ceil(std::pow(static_cast<double>(n), exponent) - 1e-9);
  if (!(v >= 0.0) || v > 9.0e18) {
    throw ValidationError("diffusion steps out of range");
  }
  return std::max(1LL, static_cast<long long>(v));
}

std::uint64_t replication_seed(std::uint64_t base, int replication) {
  // splitmix64 finaliser over base + golden-ratio stride
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL *
                               (static_cast<std::uint64_t>(replication) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

KernelGraph build_graph(const ExperimentConfig& config, Method method,
                        const Eigen::MatrixXd& points) {
  if (is_localized(method)) {
    const int k0 = config.effective_k0(static_cast<std::size_t>(points.rows()));
    if (k0 >= points.rows()) {
      throw ValidationError("k0 must be smaller than the number of points");
    }
    return local_scaling_kernel(points, local_bandwidths(points, k0));
  }
  if (!config.h) {
    throw ValidationError("method " + to_string(method) +
                          " needs a global bandwidth h");
  }
  return gaussian_kernel(points, *config.h);
}

std::pair<double, double> threshold_interval(const Eigen::MatrixXd& a,
                                             const Partition& truth) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || static_cast<std::size_t>(n) != truth.size()) {
    throw ValidationError("threshold_interval: size mismatch");
  }
  double between = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (truth[static_cast<std::size_t>(i)] !=
          truth[static_cast<std::size_t>(j)]) {
        between = std::max(between, a(i, j));
      }
    }
  }
  // Prim on each cluster for the maximum spanning tree; its weakest edge is
  // the largest level at which the cluster stays connected.
  double within = std::numeric_limits<double>::infinity();
  for (int k = 0; k < truth.k(); ++k) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (truth[static_cast<std::size_t>(i)] == k) members.push_back(i);
    }
    const std::size_t m = members.size();
    if (m < 2) continue;
    std::vector<double> best(m, -std::numeric_limits<double>::infinity());
    std::vector<bool> in_tree(m, false);
    best[0] = std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step < m; ++step) {
      std::size_t u = m;
      for (std::size_t v = 0; v < m; ++v) {
        if (!in_tree[v] && (u == m || best[v] > best[u])) u = v;
      }
      in_tree[u] = true;
      within = std::min(within, best[u]);
      for (std::size_t v = 0; v < m; ++v) {
        if (!in_tree[v]) best[v] = std::max(best[v], a(members[u], members[v]));
      }
    }
  }
  return {between, within};
}

ClusterResult run_cluster(const ExperimentConfig& config, Method method,
                          const LabeledDataset& data, std::uint64_t seed,
                          const DiagnosticSink& sink) {
  const auto start = Clock::now();
  ClusterResult r;
  r.method = method;
  const auto truth = truth_of(data);
  const int k = resolve_k(config, data);
  if (k < 1 || static_cast<std::size_t>(k) > data.size()) {
    throw ValidationError("cluster count must lie in [1, n]");
  }

  if (is_spectral(method)) {
    const KernelGraph graph = stage(
        "kernel", [&] { return build_graph(config, method, data.points); });
    r.partition = stage("spectral", [&] {
      return spectral_cluster(graph, k, variant_of(method), seed);
    });
  } else {
    const AffinityMatrix a = build_affinity(config, method, data, sink);
    if (method == Method::THRESH) {
      double gamma = 0.0;
      if (config.gamma) {
        gamma = *config.gamma;
      } else if (truth) {
        const auto [lo, hi] = threshold_interval(a.values, *truth);
        gamma = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo;
        if (!(gamma > 0.0)) gamma = std::numeric_limits<double>::min();
      } else {
        throw ValidationError("THRESH needs gamma when the data are unlabeled");
      }
      r.gamma = gamma;
      r.partition =
          stage("threshold", [&] { return threshold_estimator(a.values, gamma); });
    } else {
      SdpSolution sol;
      int k_used = k;
      if (is_regularized(method)) {
        PathRun run = path_on(config, a, true, sink);
        if (!run.result.selection) {
          throw SelectionError("path: " + run.result.selection_error);
        }
        const auto& sel = *run.result.selection;
        k_used = sel.k_hat;
        r.k_hat = sel.k_hat;
        r.rho = sel.rho_hat;
        sol = std::move(run.solutions[sel.rho_hat_index]);
        for (int it : run.result.path.iterations) r.iterations += it;
      } else {
        sol = stage("solve", [&] {
          return solve(SdpProblem::trace_constrained(a, k),
                       with_logging(config.solver, sink, "solve"));
        });
        r.iterations = sol.iterations;
      }
      r.converged = sol.converged;
      r.trace = sol.trace;
      r.partition =
          stage("round", [&] { return round_solution(sol.z, k_used, seed); });
      if (truth) r.l1_error = l1_error(sol.z, membership_matrix(*truth));
    }
  }
  r.k = r.partition.k();
  if (truth) r.classification_error = classification_error(r.partition, *truth);
  r.wall_time = seconds_since(start);
  emit(sink, {{"event", "done"}, {"method", to_string(method)},
              {"seconds", r.wall_time}});
  return r;
}

PathResult run_path(const ExperimentConfig& config, Method method,
                    const LabeledDataset& data, const DiagnosticSink& sink) {
  if (is_spectral(method) || method == Method::THRESH) {
    throw ValidationError("path: method " + to_string(method) +
                          " has no regularization path");
  }
  const auto start = Clock::now();
  const AffinityMatrix a = build_affinity(config, method, data, sink);
  PathResult r = path_on(config, a, false, sink).result;
  r.wall_time = seconds_since(start);
  return r;
}

std::string cluster_result_json(const ClusterResult& r, bool with_timing) {
  json j;
  j["method"] = to_string(r.method);
  j["k"] = r.k;
  j["l1_error"] = optional_number(r.l1_error);
  j["classification_error"] = optional_number(r.classification_error);
  j["trace"] = optional_number(r.trace);
  j["rho"] = optional_number(r.rho);
  j["k_hat"] = r.k_hat ? json(*r.k_hat) : json(nullptr);
  j["gamma"] = optional_number(r.gamma);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  if (with_timing) j["wall_time"] = r.wall_time;
  return j.dump(2);
}

std::string path_result_json(const PathResult& r, bool with_timing) {
  json j;
  j["t"] = r.t;
  j["grid_size"] = r.path.size();
  j["lambda_min"] = r.grid.lambda_min;
  j["lambda_max"] = r.grid.lambda_max;
  j["floor_applied"] = r.grid.floor_applied;
  if (r.selection) {
    const auto& s = *r.selection;
    j["k_hat"] = s.k_hat;
    j["rho_hat"] = s.rho_hat;
    j["rho_hat_index"] = s.rho_hat_index;
    json lengths = json::object();
    for (const auto& [k, len] : s.interval_lengths) {
      lengths[std::to_string(k)] = optional_number(len);
    }
    j["interval_lengths"] = lengths;
    j["unconverged_in_path"] = s.unconverged_in_path;
    j["selection_error"] = nullptr;
  } else {
    j["k_hat"] = nullptr;
    j["rho_hat"] = nullptr;
    j["selection_error"] = r.selection_error;
  }
  if (with_timing) j["wall_time"] = r.wall_time;
  return j.dump(2);
}

BenchmarkResult run_benchmark(const ExperimentConfig& config,
                              const DiagnosticSink& sink) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t m = config.methods.size();
  BenchmarkResult out;
  out.records.resize(reps * m);
  const int true_k = config.dgp.num_clusters();

  parallel_for(reps, config.jobs, [&](std::size_t rep) {
    const auto seed = replication_seed(config.seed, static_cast<int>(rep));
    const LabeledDataset data = generate(config.dgp, config.n, seed);
    for (std::size_t mi = 0; mi < m; ++mi) {
      ReplicationRecord& rec = out.records[rep * m + mi];
      rec.method = config.methods[mi];
      rec.replication = static_cast<int>(rep);
      rec.seed = seed;
      try {
        rec.result = run_cluster(config, rec.method, data, seed, sink);
      } catch (const Error& e) {
        rec.error = e.what();
        emit(sink, {{"event", "failure"},
                    {"method", to_string(rec.method)},
                    {"replication", rec.replication},
                    {"message", rec.error}});
      }
    }
  });

  for (std::size_t mi = 0; mi < m; ++mi) {
    BenchmarkRow row;
    row.method = config.methods[mi];
    row.replications = config.replications;
    double cls = 0.0, l1 = 0.0, time = 0.0;
    int ok = 0, l1_count = 0, exact = 0, k_ok = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto& rec = out.records[rep * m + mi];
      if (!rec.result) {
        ++row.failures;
        continue;
      }
      const auto& res = *rec.result;
      ++ok;
      if (!res.converged) ++row.unconverged;
      cls += res.classification_error.value_or(0.0);
      if (res.classification_error && *res.classification_error == 0.0) ++exact;
      if (res.l1_error) {
        l1 += *res.l1_error;
        ++l1_count;
      }
      if (res.k_hat == true_k) ++k_ok;
      time += res.wall_time;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double total = static_cast<double>(row.replications);
    row.mean_classification_error = ok ? cls / ok : nan;
    row.mean_l1_error = l1_count ? l1 / l1_count : nan;
    row.exact_recovery_rate = exact / total;
    row.k_hat_success_rate = is_regularized(row.method) ? k_ok / total : nan;
    row.mean_wall_time = ok ? time / ok : nan;
    out.rows.push_back(row);
  }
  return out;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

// Error text may contain commas or quotes.
std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_benchmark_csv(const BenchmarkResult& result, std::ostream& out,
                         bool with_timing) {
  out << "method,replications,failures,unconverged,mean_classification_error,"
         "mean_l1_error,exact_recovery_rate,k_hat_success_rate";
  if (with_timing) out << ",mean_wall_time";
  out << '\n';
  for (const auto& r : result.rows) {
    out << to_string(r.method) << ',' << r.replications << ',' << r.failures
        << ',' << r.unconverged << ',' << fmt(r.mean_classification_error)
        << ',' << fmt(r.mean_l1_error) << ',' << fmt(r.exact_recovery_rate)
        << ',' << fmt(r.k_hat_success_rate);
    if (with_timing) out << ',' << fmt(r.mean_wall_time);
    out << '\n';
  }
}

void write_replications_csv(const BenchmarkResult& result, std::ostream& out,
                            bool with_timing) {
  out << "method,replication,seed,k,k_hat,classification_error,l1_error,"
         "trace,rho,iterations,converged,error";
  if (with_timing) out << ",wall_time";
  out << '\n';
  for (const auto& rec : result.records) {
    out << to_string(rec.method) << ',' << rec.replication << ',' << rec.seed
        << ',';
    if (rec.result) {
      const auto& r = *rec.result;
      out << r.k << ',' << (r.k_hat ? std::to_string(*r.k_hat) : "") << ','
          << fmt(r.classification_error) << ','
          << fmt(r.l1_error) << ',' << fmt(r.trace) << ',' << fmt(r.rho) << ','
          << r.iterations << ',' << (r.converged ? 1 : 0) << ',';
    } else {
      out << ",,,,,,,," << quote(rec.error);
    }
    if (with_timing) {
      out << ',' << (rec.result ? fmt(rec.result->wall_time) : "");
    }
    out << '\n';
  }
}

}  // namespace dkm
