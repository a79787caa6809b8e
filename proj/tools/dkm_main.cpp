#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>

#include "dkm/errors.hpp"
#include "dkm/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode {
  kOk = 0,
  kCrash = 1,
  kSelectionFailure = 2,
  kNotConverged = 3,
  kIo = 4,
  kValidation = 5,
};

// Flag values; each one, when given, overrides the config file.
struct Overrides {
  std::string config_path;
  std::string dgp;
  std::optional<double> noise_sd;
  std::optional<std::size_t> n;
  std::optional<int> replications;
  std::vector<std::string> methods;
  std::optional<double> h;
  std::optional<int> k0;
  std::optional<double> t_exponent;
  std::optional<int> k;
  std::optional<double> gamma;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<int> grid_size;
  std::optional<int> k_max;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::optional<int> jobs;
  bool verbose = false;
  bool omit_timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file");
  cmd->add_option("--dgp", o.dgp, "dgp1, dgp2, dgp3 or dgp3prime");
  cmd->add_option("--noise-sd", o.noise_sd, "radial jitter for dgp1");
  cmd->add_option("-n,--points", o.n, "points per dataset");
  cmd->add_option("-r,--replications", o.replications);
  cmd->add_option("-m,--method", o.methods,
                  "DKM RDKM LDKM LRDKM SC_UN SC_RWN SC_NJW LSC_UN LSC_RWN "
                  "LSC_NJW THRESH");
  cmd->add_option("--bandwidth", o.h, "global Gaussian bandwidth h");
  cmd->add_option("--k0", o.k0, "neighbour rank for local scaling");
  cmd->add_option("--t-exponent", o.t_exponent, "t = ceil(n^e)");
  cmd->add_option("-k,--clusters", o.k, "number of clusters");
  cmd->add_option("--gamma", o.gamma, "threshold level for THRESH");
  cmd->add_option("--tol", o.tol, "primal and dual solver tolerance");
  cmd->add_option("--max-iters", o.max_iters, "solver iteration cap");
  cmd->add_option("--grid-size", o.grid_size, "rho grid points J");
  cmd->add_option("--k-max", o.k_max, "largest K considered by selection");
  cmd->add_option("--eps", o.eps, "trace slack for selection");
  cmd->add_option("-s,--seed", o.seed);
  cmd->add_option("-o,--output-dir", o.output_dir);
  cmd->add_option("-j,--jobs", o.jobs, "worker threads for replications");
  cmd->add_flag("-v,--verbose", o.verbose,
                "stream JSON-lines diagnostics to stderr");
  cmd->add_flag("--omit-timing", o.omit_timing,
                "leave wall times out of outputs (byte-identical reruns)");
}

dkm::ExperimentConfig resolve(const Overrides& o, bool check_methods = true) {
  dkm::ExperimentConfig c;
  if (!o.config_path.empty()) c = dkm::load_config(o.config_path);
  if (!o.dgp.empty()) {
    c.dgp = dkm::DgpSpec::from_kind(dkm::parse_dgp_kind(o.dgp),
                                    o.noise_sd.value_or(c.dgp.noise_sd));
  } else if (o.noise_sd) {
    c.dgp.noise_sd = *o.noise_sd;
  }
  if (o.n) c.n = *o.n;
  if (o.replications) c.replications = *o.replications;
  if (!o.methods.empty()) {
    c.methods.clear();
    for (const auto& m : o.methods) c.methods.push_back(dkm::parse_method(m));
  }
  if (o.h) c.h = o.h;
  if (o.k0) c.k0 = o.k0;
  if (o.t_exponent) c.t_exponent = *o.t_exponent;
  if (o.k) c.k = o.k;
  if (o.gamma) c.gamma = o.gamma;
  if (o.tol) c.solver.tol_primal = c.solver.tol_dual = *o.tol;
  if (o.max_iters) c.solver.max_iters = *o.max_iters;
  if (o.grid_size) c.selection.grid_size = *o.grid_size;
  if (o.k_max) c.selection.k_max = *o.k_max;
  if (o.eps) c.selection.eps = *o.eps;
  if (o.seed) c.seed = *o.seed;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.verbose && c.solver.log_interval == 0) c.solver.log_interval = 50;
  c.validate(check_methods);
  return c;
}

// Warnings always reach stderr; the rest only with --verbose.
dkm::DiagnosticSink make_sink(bool verbose) {
  auto mutex = std::make_shared<std::mutex>();
  return [verbose, mutex](const std::string& line) {
    if (!verbose && line.find("\"event\":\"warning\"") == std::string::npos) {
      return;
    }
    std::lock_guard lock(*mutex);
    std::cerr << line << '\n';
  };
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dkm::IoError("cannot write " + path.string());
  return out;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw dkm::IoError("cannot create output directory " + dir.string() +
                       ": " + ec.message());
  }
}

std::string padded(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", i);
  return buf;
}

int cmd_generate(const Overrides& o) {
  const auto c = resolve(o, false);
  prepare_dir(c.output_dir);
  for (int r = 0; r < c.replications; ++r) {
    const auto seed = dkm::replication_seed(c.seed, r);
    const auto data = dkm::generate(c.dgp, c.n, seed);
    dkm::save_csv(data, c.output_dir / ("dataset_" + padded(r) + ".csv"));
    open_output(c.output_dir / ("dataset_" + padded(r) + ".json"))
        << dkm::manifest_json(c.dgp, c.n, seed) << '\n';
  }
  std::cout << "wrote " << c.replications << " dataset(s) to "
            << c.output_dir.string() << '\n';
  return kOk;
}

int cmd_cluster(const Overrides& o, const std::string& data_path) {
  const auto c = resolve(o);
  if (c.methods.size() != 1) {
    throw dkm::ValidationError("cluster takes exactly one method");
  }
  const auto data = dkm::load_csv(data_path);
  prepare_dir(c.output_dir);
  const auto sink = make_sink(o.verbose);
  const auto result = dkm::run_cluster(c, c.methods.front(), data, c.seed, sink);
  open_output(c.output_dir / "cluster.json")
      << dkm::cluster_result_json(result, !o.omit_timing) << '\n';
  {
    auto out = open_output(c.output_dir / "labels.csv");
    out << "label\n";
    for (int l : result.partition.labels()) out << l + 1 << '\n';
  }
  std::cout << dkm::cluster_result_json(result, !o.omit_timing) << '\n';
  return result.converged ? kOk : kNotConverged;
}

int cmd_path(const Overrides& o, const std::string& data_path) {
  const auto c = resolve(o);
  if (c.methods.size() != 1) {
    throw dkm::ValidationError("path takes exactly one method");
  }
  const auto data = dkm::load_csv(data_path);
  prepare_dir(c.output_dir);
  const auto sink = make_sink(o.verbose);
  const auto result = dkm::run_path(c, c.methods.front(), data, sink);
  {
    auto out = open_output(c.output_dir / "path.csv");
    dkm::write_path_csv(result.path, out);
  }
  const auto text = dkm::path_result_json(result, !o.omit_timing);
  open_output(c.output_dir / "selection.json") << text << '\n';
  std::cout << text << '\n';
  if (!result.selection) {
    std::cerr << "selection failed: " << result.selection_error << '\n';
    return kSelectionFailure;
  }
  return kOk;
}

int cmd_benchmark(const Overrides& o) {
  const auto c = resolve(o);
  prepare_dir(c.output_dir);
  const auto sink = make_sink(o.verbose);
  const auto result = dkm::run_benchmark(c, sink);
  open_output(c.output_dir / "config.json") << dkm::config_to_json(c) << '\n';
  {
    auto out = open_output(c.output_dir / "benchmark.csv");
    dkm::write_benchmark_csv(result, out, !o.omit_timing);
  }
  {
    auto out = open_output(c.output_dir / "replications.csv");
    dkm::write_replications_csv(result, out, !o.omit_timing);
  }
  dkm::write_benchmark_csv(result, std::cout, !o.omit_timing);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion K-means clustering by SDP relaxation"};
  app.require_subcommand(1);
  Overrides o;
  std::string data_path;

  auto* gen = app.add_subcommand("generate", "draw synthetic datasets");
  add_common(gen, o);
  auto* cluster = app.add_subcommand("cluster", "cluster one dataset");
  add_common(cluster, o);
  cluster->add_option("-d,--data", data_path, "input CSV")
      ->required();
  auto* path = app.add_subcommand("path", "trace path and K selection");
  add_common(path, o);
  path->add_option("-d,--data", data_path, "input CSV")
      ->required();
  auto* bench = app.add_subcommand("benchmark", "replicated experiment");
  add_common(bench, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (gen->parsed()) return cmd_generate(o);
    if (cluster->parsed()) return cmd_cluster(o, data_path);
    if (path->parsed()) return cmd_path(o, data_path);
    return cmd_benchmark(o);
  } catch (const dkm::SelectionError& e) {
    std::cerr << "selection failed: " << e.what() << '\n';
    return kSelectionFailure;
  } catch (const dkm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const dkm::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const dkm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCrash;
  }
}
