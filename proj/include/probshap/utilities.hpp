#pragma once

#include <Eigen/Dense>
#include <span>

#include "probshap/game.hpp"

namespace probshap {

// Held-out points every coalition model is scored on.
using ValidationSet = PlayerSamples;

// Mean squared error between two equally sized, nonempty sequences.
template <typename Pred, typename Truth>
double mse(const Eigen::DenseBase<Pred>& predictions, const Eigen::DenseBase<Truth>& truths) {
  if (predictions.size() != truths.size()) throw ConfigError("mse: length mismatch");
  if (predictions.size() == 0) throw ConfigError("mse: empty input");
  return (predictions.derived() - truths.derived()).matrix().squaredNorm() /
         static_cast<double>(predictions.size());
}

double mse(std::span<const double> predictions, std::span<const double> truths);

// v = 1 / (1 + MSE).
inline double inverse_mse(double mse_value) { return 1.0 / (1.0 + mse_value); }

// Relative pivot threshold of the rank-revealing least-squares solve.
inline constexpr double kOlsRankTolerance = 1e-10;

// 1-nearest-neighbour regression on one-dimensional features. Ties in
// distance go to the smaller x, then to the earlier sample. Empty data
// scores 0.
double nn_utility(const PlayerSamples& coalition_data, const ValidationSet& val);

// Least-squares linear regression with an intercept column; minimum-norm
// solution when rank deficient. Fewer than two samples score 0.
double ols_utility(const PlayerSamples& coalition_data, const ValidationSet& val);

// Minimum-norm least-squares coefficients [intercept, slopes...].
Eigen::VectorXd ols_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels);

// Coalition utility backed by nn_utility, with an incremental walk that
// keeps each validation point's current nearest neighbour.
class NearestNeighborUtility final : public Utility {
 public:
  explicit NearestNeighborUtility(ValidationSet val);

  double evaluate(const Coalition& coalition, const GameData& data) const override;
  std::unique_ptr<PrefixWalk> walk(const GameData& data) const override;

  const ValidationSet& validation() const { return val_; }

 private:
  ValidationSet val_;
};

// Coalition utility backed by ols_utility, with an incremental walk that
// merges per-player triangular factors instead of refitting from raw rows.
class OlsUtility final : public Utility {
 public:
  explicit OlsUtility(ValidationSet val);

  double evaluate(const Coalition& coalition, const GameData& data) const override;
  std::unique_ptr<PrefixWalk> walk(const GameData& data) const override;

  const ValidationSet& validation() const { return val_; }

 private:
  ValidationSet val_;
  Eigen::MatrixXd val_factor_;  // T with [1 X | y]^T [1 X | y] = T^T T
};

// Upper-triangular T (cols x cols) with A^T A = T^T T.
Eigen::MatrixXd triangular_factor(const Eigen::MatrixXd& a);

}  // namespace probshap
