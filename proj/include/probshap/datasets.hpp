#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "probshap/game.hpp"
#include "probshap/rng.hpp"
#include "probshap/utilities.hpp"

namespace probshap {

// Composite ground-truth curve and the Gaussian players sampling it.
struct SyntheticSpec {
  std::array<double, 3> poly_coeffs{0.0, 0.3, -0.02};
  double amplitude = 2.0;
  double frequency = 0.5;
  double phase = std::numbers::pi / 4.0;
  double offset = 3.0;
  int n_players = 10;
  std::pair<double, double> mu_range{-7.0, 7.0};
  std::pair<double, double> sigma_range{0.5, 2.5};
  std::pair<double, double> clip{-10.0, 10.0};
  std::uint64_t master_seed = 0;

  void validate() const;
};

// f(x) = c0 + c1 x + c2 x^2 + A sin(2 pi nu x + phase) + b
double truth_function(const SyntheticSpec& spec, double x);

// Rows of a table together with their labels.
struct LabeledTable {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
  std::vector<std::string> feature_names;
  std::string label_name;

  Eigen::Index rows() const { return labels.size(); }
};

// Player drawing x ~ N(mu, sigma^2), hard-clipped to [lo, hi], y = truth(x).
struct GaussianCurveSource {
  double mu = 0.0;
  double sigma = 1.0;
  std::pair<double, double> clip{-10.0, 10.0};
  std::function<double(double)> truth;
};

// Player owning a fixed set of rows of a shared table; draws are without
// replacement.
struct PartitionSource {
  std::shared_ptr<const LabeledTable> table;
  std::vector<Eigen::Index> rows;
};

class PlayerDistribution {
 public:
  enum class Kind { gaussian_curve, partition };

  static PlayerDistribution gaussian_curve(GaussianCurveSource source);
  static PlayerDistribution partition(PartitionSource source);

  Kind kind() const;
  // Draws `count` samples. A partition returns all of its rows when `count`
  // reaches its size.
  PlayerSamples draw(Eigen::Index count, Stream& rng) const;
  // Number of rows a partition holds; empty for unbounded sources.
  std::optional<Eigen::Index> population() const;
  Eigen::Index dim() const;

  const GaussianCurveSource* as_gaussian() const { return std::get_if<GaussianCurveSource>(&source_); }
  const PartitionSource* as_partition() const { return std::get_if<PartitionSource>(&source_); }

 private:
  explicit PlayerDistribution(std::variant<GaussianCurveSource, PartitionSource> s)
      : source_(std::move(s)) {}

  std::variant<GaussianCurveSource, PartitionSource> source_;
};

// Players with mu linearly spaced over mu_range (endpoints included; the
// midpoint for a single player) and sigma ~ U(sigma_range).
std::vector<PlayerDistribution> make_synthetic_players(const SyntheticSpec& spec);

// `count` evenly spaced points over the clip interval, labelled by the truth
// function.
ValidationSet validation_grid(const SyntheticSpec& spec, int count = 1000);

// --- Wine Quality (white) ----------------------------------------------------

inline constexpr std::array<const char*, 11> kWineFeatureNames = {
    "fixed acidity",      "volatile acidity",     "citric acid", "residual sugar",
    "chlorides",          "free sulfur dioxide",  "total sulfur dioxide",
    "density",            "pH",                   "sulphates",   "alcohol"};
inline constexpr const char* kWineLabelName = "quality";
inline constexpr Eigen::Index kAlcoholColumn = 10;
inline constexpr Eigen::Index kCanonicalWineRows = 4898;

using WineTable = LabeledTable;

// Reads the semicolon-delimited UCI file. Throws IoError when the file
// cannot be read, SchemaError on a wrong header and ParseError naming the
// row and column of a bad cell.
WineTable load_wine(const std::filesystem::path& path);

struct WineSplit {
  std::shared_ptr<const WineTable> table;
  std::vector<Eigen::Index> train_rows;
  ValidationSet validation;
  std::array<double, 11> deciles{};
  std::vector<PlayerDistribution> players;
};

// Number of training rows: round-half-up of train_frac * rows.
Eigen::Index train_size(Eigen::Index rows, double train_frac);

// Empirical quantile with linear interpolation between order statistics of
// an ascending sequence.
double quantile_sorted(const std::vector<double>& sorted, double q);

// Seeded shuffle, train/validation split, and ten alcohol-decile players
// over the training rows (bins [q_{i-1}, q_i), the last closed).
WineSplit split_and_partition(const WineTable& table, std::uint64_t seed = 42,
                              double train_frac = 0.7);

}  // namespace probshap
