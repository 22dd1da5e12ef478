#include "probshap/analytic.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace probshap::analytic {

namespace {

void check_sigma(double sigma, const char* what) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw ConfigError(std::string(what) + ": sigma must be finite and >= 0");
  }
}

void check_general(int n, PlayerId i) {
  if (n < 1 || n > kDefaultExactCap) {
    throw ConfigError("closed-form evaluator supports 1 <= n <= 12");
  }
  if (i < 0 || i >= n) throw ConfigError("player index out of range");
}

// Expands a bitmask over the n-1 players other than i into a mask over N.
std::uint64_t expand_without(std::uint64_t compact, PlayerId i) {
  const std::uint64_t low = compact & ((std::uint64_t{1} << i) - 1);
  const std::uint64_t high = (compact >> i) << (i + 1);
  return low | high;
}

}  // namespace

void AdditiveGaussianGameSpec::validate() const {
  if (players.empty()) throw ConfigError("additive game needs at least one player");
  for (const auto& p : players) {
    if (!std::isfinite(p.mu)) throw ConfigError("additive game: mu must be finite");
    check_sigma(p.sigma, "additive game");
  }
}

void MixtureGameSpec::validate() const {
  if (components.empty()) throw ConfigError("mixture game needs at least one component");
  for (const auto& c : components) {
    if (!std::isfinite(c.w) || !std::isfinite(c.mu)) {
      throw ConfigError("mixture game: w and mu must be finite");
    }
    check_sigma(c.sigma, "mixture game");
  }
}

Eigen::VectorXd expected_shapley_additive(const AdditiveGaussianGameSpec& spec) {
  spec.validate();
  Eigen::VectorXd out(spec.player_count());
  for (int i = 0; i < spec.player_count(); ++i) out[i] = spec.players[i].mu;
  return out;
}

Eigen::VectorXd variance_shapley_additive(const AdditiveGaussianGameSpec& spec) {
  spec.validate();
  Eigen::VectorXd out(spec.player_count());
  for (int i = 0; i < spec.player_count(); ++i) {
    out[i] = spec.players[i].sigma * spec.players[i].sigma;
  }
  return out;
}

Eigen::VectorXd expected_shapley_mixture(const MixtureGameSpec& spec) {
  spec.validate();
  Eigen::VectorXd out(spec.player_count());
  for (int k = 0; k < spec.player_count(); ++k) {
    out[k] = spec.components[k].w * spec.components[k].mu;
  }
  return out;
}

Eigen::VectorXd variance_shapley_mixture(const MixtureGameSpec& spec) {
  spec.validate();
  Eigen::VectorXd out(spec.player_count());
  for (int k = 0; k < spec.player_count(); ++k) {
    const auto& c = spec.components[k];
    // Every marginal gain equals w_k Y_k, so all variances and covariances
    // in the double sum are w_k^2 sigma_k^2 and the weights sum to one.
    out[k] = c.w * c.w * c.sigma * c.sigma;
  }
  return out;
}

double estimator_mean_variance(double var_phi, int m) {
  if (m < 1) throw ConfigError("estimator_mean_variance: m must be >= 1");
  if (!(var_phi >= 0.0)) throw ConfigError("estimator_mean_variance: variance must be >= 0");
  return var_phi / m;
}

double variance_of_sample_variance(const MomentSummary& ms) {
  if (ms.m < 2) throw ConfigError("variance_of_sample_variance: m must be >= 2");
  if (!(ms.variance >= 0.0) || !(ms.mu4 >= 0.0)) {
    throw ConfigError("variance_of_sample_variance: moments must be >= 0");
  }
  const double m = ms.m;
  const double sigma4 = ms.variance * ms.variance;
  return (ms.mu4 - (m - 3.0) / (m - 1.0) * sigma4) / m;
}

double expected_shapley_general(int n, PlayerId i, const MarginalMean& expected_gain) {
  check_general(n, i);
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  double acc = 0.0;
  for (std::uint64_t c = 0; c < count; ++c) {
    const std::uint64_t s = expand_without(c, i);
    acc += shapley_weight(n, std::popcount(c)) * expected_gain(s);
  }
  return acc;
}

double variance_shapley_general(int n, PlayerId i, const MarginalCovariance& cov) {
  check_general(n, i);
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::vector<double> weight(count);
  std::vector<std::uint64_t> full(count);
  for (std::uint64_t c = 0; c < count; ++c) {
    weight[c] = shapley_weight(n, std::popcount(c));
    full[c] = expand_without(c, i);
  }
  double acc = 0.0;
  for (std::uint64_t a = 0; a < count; ++a) {
    for (std::uint64_t b = 0; b < count; ++b) {
      acc += weight[a] * weight[b] * cov(full[a], full[b]);
    }
  }
  return acc;
}

GameRealization sample_additive_game_realization(const AdditiveGaussianGameSpec& spec,
                                                 Stream& rng) {
  spec.validate();
  const int n = spec.player_count();
  std::vector<PlayerSamples> players(static_cast<std::size_t>(n));
  Eigen::VectorXd values(n);
  for (int i = 0; i < n; ++i) {
    const auto& p = spec.players[static_cast<std::size_t>(i)];
    values[i] = p.sigma > 0.0 ? rng.normal(p.mu, p.sigma) : p.mu;
    players[static_cast<std::size_t>(i)].features.resize(1, 0);
    players[static_cast<std::size_t>(i)].labels = Eigen::VectorXd::Constant(1, values[i]);
  }
  return {AdditiveUtility{}, GameData(std::move(players)), std::move(values)};
}

GameRealization sample_mixture_game_realization(const MixtureGameSpec& spec,
                                                Stream& rng) {
  spec.validate();
  const int n = spec.player_count();
  std::vector<PlayerSamples> players(static_cast<std::size_t>(n));
  Eigen::VectorXd values(n);
  for (int k = 0; k < n; ++k) {
    const auto& c = spec.components[static_cast<std::size_t>(k)];
    const double y = c.sigma > 0.0 ? rng.normal(c.mu, c.sigma) : c.mu;
    values[k] = c.w * y;
    players[static_cast<std::size_t>(k)].features.resize(1, 0);
    players[static_cast<std::size_t>(k)].labels = Eigen::VectorXd::Constant(1, values[k]);
  }
  return {AdditiveUtility{}, GameData(std::move(players)), std::move(values)};
}

std::vector<PlayerDistribution> additive_game_players(const AdditiveGaussianGameSpec& spec) {
  spec.validate();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<PlayerDistribution> out;
  for (const auto& p : spec.players) {
    out.push_back(PlayerDistribution::gaussian_curve({p.mu, p.sigma, {-inf, inf}, {}}));
  }
  return out;
}

}  // namespace probshap::analytic
