#include "dkm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "dkm/errors.hpp"
#include "json.hpp"

namespace dkm {
namespace {

constexpr double kWeightTol = 1e-12;

// Exact cluster sizes for fractions w: floor(w_k n), remainder by largest
// fractional part, then every empty cluster borrows one from the largest.
std::vector<std::size_t> allocate_sizes(const std::vector<double>& w,
                                        std::size_t n) {
  const std::size_t k = w.size();
  std::vector<std::size_t> sizes(k);
  std::vector<std::pair<double, std::size_t>> frac(k);
  std::size_t used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = w[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    frac[i] = {exact - static_cast<double>(sizes[i]), i};
    used += sizes[i];
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](auto a, auto b) { return a.first > b.first; });
  for (std::size_t r = 0; used < n; ++r, ++used) ++sizes[frac[r % k].second];
  for (std::size_t i = 0; i < k; ++i) {
    if (sizes[i] == 0) {
      auto big = std::max_element(sizes.begin(), sizes.end());
      --*big;
      sizes[i] = 1;
    }
  }
  return sizes;
}

std::vector<int> draw_mixture_labels(const std::vector<double>& w,
                                     std::size_t n, std::mt19937_64& rng) {
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::vector<int> labels(n);
  std::vector<std::size_t> counts(w.size());
  while (true) {
    std::fill(counts.begin(), counts.end(), 0);
    for (auto& l : labels) {
      l = pick(rng);
      ++counts[static_cast<std::size_t>(l)];
    }
    if (std::find(counts.begin(), counts.end(), 0) == counts.end()) break;
  }
  return labels;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto ws = " \t\r";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

double parse_double(const std::string& raw, std::size_t line) {
  const std::string s = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("invalid number '" + s + "'", line);
  }
  return v;
}

}  // namespace

int LabeledDataset::num_clusters() const {
  if (!labels || labels->empty()) return 0;
  return *std::max_element(labels->begin(), labels->end()) + 1;
}

std::string to_string(DgpKind kind) {
  switch (kind) {
    case DgpKind::Dgp1: return "dgp1";
    case DgpKind::Dgp2: return "dgp2";
    case DgpKind::Dgp3: return "dgp3";
    case DgpKind::Dgp3Prime: return "dgp3prime";
    case DgpKind::Custom: return "custom";
  }
  return "custom";
}

DgpKind parse_dgp_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::erase(s, '_');
  std::erase(s, '\'');
  if (s == "1" || s == "dgp1") return DgpKind::Dgp1;
  if (s == "2" || s == "dgp2") return DgpKind::Dgp2;
  if (s == "3" || s == "dgp3") return DgpKind::Dgp3;
  if (s == "3prime" || s == "dgp3prime" || s == "dgp3p") {
    return DgpKind::Dgp3Prime;
  }
  if (s == "custom") return DgpKind::Custom;
  throw ValidationError("unknown DGP kind '" + name + "'");
}

DgpSpec DgpSpec::dgp1(double noise_sd) {
  DgpSpec s;
  s.kind = DgpKind::Dgp1;
  s.radii = {1.0, 2.5, 4.0};
  s.weights = {0.25, 0.25, 0.5};
  s.noise_sd = noise_sd;
  return s;
}

DgpSpec DgpSpec::dgp2() {
  DgpSpec s;
  s.kind = DgpKind::Dgp2;
  s.rectangles = {{-15.0, -8.0, -8.0, 8.0},
                  {10.0, 15.0, 3.0, 8.0},
                  {10.0, 15.0, -8.0, -3.0}};
  double total = 0.0;
  for (const auto& r : s.rectangles) total += r.area();
  for (const auto& r : s.rectangles) s.weights.push_back(r.area() / total);
  return s;
}

DgpSpec DgpSpec::dgp3() {
  DgpSpec s = gaussian_mixture({1.0 / 3, 1.0 / 3, 1.0 / 3},
                               {Eigen::Vector2d(-6.0, 0.0),
                                Eigen::Vector2d(0.0, 0.0),
                                Eigen::Vector2d(2.5, 0.0)},
                               {2.0, 0.5, 0.5});
  s.kind = DgpKind::Dgp3;
  return s;
}

DgpSpec DgpSpec::dgp3_prime() {
  DgpSpec s = gaussian_mixture({0.25, 0.25, 0.5},
                               {Eigen::Vector2d(-6.0, 0.0),
                                Eigen::Vector2d(0.0, 0.0),
                                Eigen::Vector2d(1.45, 0.0)},
                               {2.0, 0.5, 0.5});
  s.kind = DgpKind::Dgp3Prime;
  return s;
}

DgpSpec DgpSpec::gaussian_mixture(std::vector<double> weights,
                                  std::vector<Eigen::VectorXd> centers,
                                  std::vector<double> sds) {
  DgpSpec s;
  s.kind = DgpKind::Custom;
  s.weights = std::move(weights);
  s.centers = std::move(centers);
  s.sds = std::move(sds);
  return s;
}

DgpSpec DgpSpec::from_kind(DgpKind kind, double noise_sd) {
  switch (kind) {
    case DgpKind::Dgp1: return dgp1(noise_sd);
    case DgpKind::Dgp2: return dgp2();
    case DgpKind::Dgp3: return dgp3();
    case DgpKind::Dgp3Prime: return dgp3_prime();
    case DgpKind::Custom: break;
  }
  throw ValidationError("custom DGP needs explicit parameters");
}

int DgpSpec::num_clusters() const { return static_cast<int>(weights.size()); }

std::size_t DgpSpec::dim() const {
  if (kind == DgpKind::Dgp1 || kind == DgpKind::Dgp2) return 2;
  return centers.empty() ? 0 : static_cast<std::size_t>(centers[0].size());
}

void DgpSpec::validate() const {
  if (weights.empty()) throw ValidationError("DGP spec has no clusters");
  for (double w : weights) {
    if (!(w > 0.0)) throw ValidationError("mixture weights must be positive");
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > kWeightTol) {
    throw ValidationError("mixture weights must sum to 1");
  }
  if (!(noise_sd >= 0.0)) throw ValidationError("noise_sd must be >= 0");
  const std::size_t k = weights.size();
  switch (kind) {
    case DgpKind::Dgp1:
      if (radii.size() != k) {
        throw ValidationError("dgp1 needs one radius per cluster");
      }
      for (double r : radii) {
        if (!(r > 0.0)) throw ValidationError("radii must be positive");
      }
      break;
    case DgpKind::Dgp2:
      if (rectangles.size() != k) {
        throw ValidationError("dgp2 needs one rectangle per cluster");
      }
      for (const auto& r : rectangles) {
        if (!(r.x_max > r.x_min && r.y_max > r.y_min)) {
          throw ValidationError("degenerate rectangle");
        }
      }
      break;
    default:
      if (centers.size() != k || sds.size() != k) {
        throw ValidationError("gaussian mixture needs a center and sd per "
                              "cluster");
      }
      for (double sd : sds) {
        if (!(sd >= 0.0)) throw ValidationError("standard deviations must be "
                                                ">= 0");
      }
      for (const auto& c : centers) {
        if (c.size() == 0 || c.size() != centers[0].size()) {
          throw ValidationError("centers must share a positive dimension");
        }
      }
  }
}

LabeledDataset generate(const DgpSpec& spec, std::size_t n,
                        std::uint64_t seed) {
  spec.validate();
  const auto k = static_cast<std::size_t>(spec.num_clusters());
  if (n < k) {
    throw ValidationError("generate: n must be at least the cluster count");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  LabeledDataset out;
  out.seed = seed;
  out.points.resize(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(spec.dim()));
  std::vector<int> labels;

  if (spec.kind == DgpKind::Dgp1) {
    const auto sizes = allocate_sizes(spec.weights, n);
    for (std::size_t c = 0; c < k; ++c) {
      labels.insert(labels.end(), sizes[c], static_cast<int>(c));
    }
  } else {
    labels = draw_mixture_labels(spec.weights, n, rng);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto c = static_cast<std::size_t>(labels[i]);
    switch (spec.kind) {
      case DgpKind::Dgp1: {
        const double theta = 2.0 * std::numbers::pi * unif(rng);
        double r = 0.0;
        if (c == 0) {
          r = spec.radii[0] * std::sqrt(unif(rng));  // uniform by area
        } else {
          r = spec.radii[c];
          if (spec.noise_sd > 0.0) r += spec.noise_sd * normal(rng);
        }
        out.points(row, 0) = r * std::cos(theta);
        out.points(row, 1) = r * std::sin(theta);
        break;
      }
      case DgpKind::Dgp2: {
        const auto& rect = spec.rectangles[c];
        out.points(row, 0) = rect.x_min + (rect.x_max - rect.x_min) * unif(rng);
        out.points(row, 1) = rect.y_min + (rect.y_max - rect.y_min) * unif(rng);
        break;
      }
      default: {
        const auto& mu = spec.centers[c];
        for (Eigen::Index d = 0; d < mu.size(); ++d) {
          out.points(row, d) = mu(d) + spec.sds[c] * normal(rng);
        }
      }
    }
  }
  out.labels = std::move(labels);
  return out;
}

LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  std::size_t lineno = 0;
  std::size_t header_cols = 0;
  bool has_label = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError("empty dataset: no header", 0);
  {
    auto cells = split_csv_line(line);
    header_cols = cells.size();
    has_label = trim(cells.back()) == "label";
  }
  const std::size_t p = has_label ? header_cols - 1 : header_cols;
  if (p == 0) throw ParseError("header names no coordinate columns", lineno);

  std::vector<double> coords;
  std::vector<int> labels;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header_cols) {
      throw ParseError("expected " + std::to_string(header_cols) +
                           " fields, found " + std::to_string(cells.size()),
                       lineno);
    }
    for (std::size_t j = 0; j < p; ++j) {
      const double v = parse_double(cells[j], lineno);
      if (!std::isfinite(v)) throw ParseError("non-finite coordinate", lineno);
      coords.push_back(v);
    }
    if (has_label) {
      const std::string s = trim(cells[p]);
      int lab = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), lab);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
          lab < 1) {
        throw ParseError("label must be a positive integer, got '" + s + "'",
                         lineno);
      }
      labels.push_back(lab - 1);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("empty dataset: header only", 0);

  LabeledDataset out;
  out.points.resize(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      out.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          coords[i * p + j];
    }
  }
  if (has_label) {
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<bool> seen(static_cast<std::size_t>(k));
    for (int l : labels) seen[static_cast<std::size_t>(l)] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw ParseError("labels must cover 1..K without gaps", 0);
    }
    out.labels = std::move(labels);
  }
  return out;
}

void save_csv(const LabeledDataset& data, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const auto p = data.points.cols();
  for (Eigen::Index j = 0; j < p; ++j) {
    out << (j ? "," : "") << 'x' << (j + 1);
  }
  if (data.labels) out << ",label";
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < data.points.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, data.points(i, j));
      if (j) out << ',';
      out.write(buf, end - buf);
    }
    if (data.labels) out << ',' << (*data.labels)[static_cast<std::size_t>(i)] + 1;
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::string manifest_json(const DgpSpec& spec, std::size_t n,
                          std::uint64_t seed) {
  nlohmann::ordered_json params;
  params["weights"] = spec.weights;
  params["noise_sd"] = spec.noise_sd;
  if (!spec.radii.empty()) params["radii"] = spec.radii;
  if (!spec.rectangles.empty()) {
    auto rects = nlohmann::ordered_json::array();
    for (const auto& r : spec.rectangles) {
      rects.push_back({r.x_min, r.x_max, r.y_min, r.y_max});
    }
    params["rectangles"] = rects;
  }
  if (!spec.centers.empty()) {
    auto cs = nlohmann::ordered_json::array();
    for (const auto& c : spec.centers) {
      cs.push_back(std::vector<double>(c.data(), c.data() + c.size()));
    }
    params["centers"] = cs;
    params["sds"] = spec.sds;
  }
  nlohmann::ordered_json j;
  j["kind"] = to_string(spec.kind);
  j["n"] = n;
  j["seed"] = seed;
  j["params"] = params;
  return j.dump(2);
}

}  // namespace dkm
