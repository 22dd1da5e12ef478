#pragma once

// Closed-form expectation and variance of probabilistic Shapley values for
// the additive Gaussian game and the per-player Gaussian mixture game, and
// the sampling-distribution identities of the game-level estimators.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "probshap/datasets.hpp"
#include "probshap/game.hpp"
#include "probshap/rng.hpp"

namespace probshap::analytic {

struct GaussianPlayer {
  double mu = 0.0;
  double sigma = 0.0;
};

// Player i holds X_i ~ N(mu_i, sigma_i^2); u(S) = sum_{i in S} X_i.
struct AdditiveGaussianGameSpec {
  std::vector<GaussianPlayer> players;

  int player_count() const { return static_cast<int>(players.size()); }
  void validate() const;
};

struct MixtureComponent {
  double w = 1.0;
  double mu = 0.0;
  double sigma = 0.0;
};

// Component k belongs to player k; u(S) = sum_{k in S} w_k Y_k with
// Y_k ~ N(mu_k, sigma_k^2).
struct MixtureGameSpec {
  std::vector<MixtureComponent> components;

  int player_count() const { return static_cast<int>(components.size()); }
  void validate() const;
};

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  double mu4 = 0.0;  // fourth central moment
  int m = 2;         // number of games
};

Eigen::VectorXd expected_shapley_additive(const AdditiveGaussianGameSpec& spec);
Eigen::VectorXd variance_shapley_additive(const AdditiveGaussianGameSpec& spec);
Eigen::VectorXd expected_shapley_mixture(const MixtureGameSpec& spec);
Eigen::VectorXd variance_shapley_mixture(const MixtureGameSpec& spec);

// Var of the m-game sample mean: var_phi / m.
double estimator_mean_variance(double var_phi, int m);

// Var of the m-game sample variance: (mu4 - (m-3)/(m-1) sigma^4) / m.
double variance_of_sample_variance(const MomentSummary& ms);

// Fourth central moment of a Gaussian with the given variance.
inline double gaussian_fourth_moment(double variance) { return 3.0 * variance * variance; }

// Summary for a Gaussian Shapley value with the given variance.
inline MomentSummary gaussian_moments(double variance, int m) {
  return {0.0, variance, gaussian_fourth_moment(variance), m};
}

// Expected Shapley value of player i from expected marginal gains
// E[u(S ∪ {i}) - u(S)], S given as a bitmask over N \ {i}. n <= 12.
using MarginalMean = std::function<double(std::uint64_t coalition)>;
double expected_shapley_general(int n, PlayerId i, const MarginalMean& expected_gain);

// Variance of the Shapley value of player i from the covariance of the
// marginal gains at coalitions S and T (bitmasks over N \ {i}); the diagonal
// S == T must return the variance. n <= 12.
using MarginalCovariance = std::function<double(std::uint64_t s, std::uint64_t t)>;
double variance_shapley_general(int n, PlayerId i, const MarginalCovariance& cov);

// One stochastic realization of a closed-form game, usable with the exact
// and Monte Carlo Shapley routines.
struct GameRealization {
  AdditiveUtility utility;
  GameData data;
  Eigen::VectorXd values;  // per-player contribution drawn for this realization
};

GameRealization sample_additive_game_realization(const AdditiveGaussianGameSpec& spec,
                                                 Stream& rng);
GameRealization sample_mixture_game_realization(const MixtureGameSpec& spec,
                                                Stream& rng);

// Players whose every draw is X_i ~ N(mu_i, sigma_i^2) carried as the label
// (feature = label). With one draw per game and AdditiveUtility this is the
// additive Gaussian game played through the estimators.
std::vector<PlayerDistribution> additive_game_players(const AdditiveGaussianGameSpec& spec);

}  // namespace probshap::analytic
