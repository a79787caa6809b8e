#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dkm {

// n points in R^p. Labels are 0-based cluster indices in memory and 1-based
// in CSV files.
struct LabeledDataset {
  Eigen::MatrixXd points;                  // n x p
  std::optional<std::vector<int>> labels;  // length n, values in [0, K)
  std::optional<std::uint64_t> seed;       // set by generate()

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
  int num_clusters() const;  // 0 when unlabeled
};

enum class DgpKind { Dgp1, Dgp2, Dgp3, Dgp3Prime, Custom };

std::string to_string(DgpKind kind);
DgpKind parse_dgp_kind(const std::string& name);

struct Rectangle {
  double x_min, x_max, y_min, y_max;
  double area() const { return (x_max - x_min) * (y_max - y_min); }
};

// Sampling parameters for the synthetic designs. Which fields are read
// depends on `kind`:
//   Dgp1            radii (disk radius, then annulus radii), weights as exact
//                   cluster fractions, noise_sd as radial jitter on annuli;
//   Dgp2            rectangles, weights (area fractions) as mixture weights;
//   Dgp3, Dgp3Prime, Custom
//                   Gaussian mixture with weights, centers and isotropic sds.
struct DgpSpec {
  DgpKind kind = DgpKind::Custom;
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> centers;
  std::vector<double> sds;
  std::vector<double> radii;
  std::vector<Rectangle> rectangles;
  double noise_sd = 0.0;

  static DgpSpec dgp1(double noise_sd = 0.0);
  static DgpSpec dgp2();
  static DgpSpec dgp3();
  static DgpSpec dgp3_prime();
  static DgpSpec gaussian_mixture(std::vector<double> weights,
                                  std::vector<Eigen::VectorXd> centers,
                                  std::vector<double> sds);
  static DgpSpec from_kind(DgpKind kind, double noise_sd = 0.0);

  int num_clusters() const;
  std::size_t dim() const;

  // Throws ValidationError on negative sds, weights not summing to one,
  // mismatched parameter counts.
  void validate() const;
};

// Draws n labeled points. Deterministic in (spec, n, seed). Every cluster is
// nonempty: for the random-label mixtures a label vector leaving a cluster
// empty is redrawn.
LabeledDataset generate(const DgpSpec& spec, std::size_t n, std::uint64_t seed);

// Comma-separated with a header row "x1,...,xp[,label]"; labels 1-based.
LabeledDataset load_csv(const std::filesystem::path& path);
void save_csv(const LabeledDataset& data, const std::filesystem::path& path);

// {kind, n, seed, params} manifest describing how a dataset was drawn.
std::string manifest_json(const DgpSpec& spec, std::size_t n,
                          std::uint64_t seed);

}  // namespace dkm
