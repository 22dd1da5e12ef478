#pragma once

// Monte Carlo estimators of the expectation and variance of Shapley values
// when every player's data is a random draw:
//
//   baseline    fresh draws from each player's distribution in every game
//   pooled      one pool per player, per-game bootstraps from the pool
//   stratified  pooled, with bootstrap sizes scaled by pool variability
//
// Every game freezes its data, averages marginal contributions over n_iter
// sampled permutations, and contributes one row of per-game means. Randomness
// comes from streams keyed by (seed, purpose, game, player), so results do
// not depend on the number of worker threads.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "probshap/datasets.hpp"
#include "probshap/game.hpp"

namespace probshap {

struct BaselineConfig {
  int n_sample = 1000;
  int n_games = 10;
  int n_iter = 100;
  std::uint64_t master_seed = 0;
  int threads = 1;

  void validate() const;
};

struct PooledConfig {
  int n_pool = 5000;
  int n_boot = 1000;
  int n_games = 10;
  int n_iter = 100;
  std::uint64_t master_seed = 0;
  int threads = 1;

  void validate() const;
};

struct StratifiedConfig : PooledConfig {
  double alpha = 0.5;

  void validate() const;
};

enum class Method { baseline, pooled, stratified };

const char* method_name(Method m);

// A player's frozen sample cache.
struct Pool {
  PlayerSamples samples;
  std::int64_t draws = 0;  // distribution accesses spent building it

  Eigen::Index size() const { return samples.size(); }
};

struct RunResult {
  Method method = Method::baseline;
  std::variant<BaselineConfig, PooledConfig, StratifiedConfig> config;
  std::uint64_t seed = 0;

  Eigen::MatrixXd per_game_means;        // n_games x n_players
  Eigen::VectorXd overall_mean;          // mean over games
  Eigen::VectorXd across_game_variance;  // sample variance over games
  std::int64_t draw_count = 0;

  std::vector<Eigen::Index> pool_sizes;  // pooled and stratified
  Eigen::VectorXd variance_scores;       // stratified
  std::vector<int> allocation;           // stratified bootstrap sizes
  std::vector<std::string> warnings;

  int n_games() const { return static_cast<int>(per_game_means.rows()); }
  int n_players() const { return static_cast<int>(per_game_means.cols()); }
};

RunResult run_baseline(const BaselineConfig& cfg, const std::vector<PlayerDistribution>& players,
                       const Utility& utility);

// One pool of up to n_pool draws per player; partitions smaller than n_pool
// contribute all of their rows.
std::vector<Pool> build_pools(const std::vector<PlayerDistribution>& players, int n_pool,
                              std::uint64_t seed);

RunResult run_pooled(const PooledConfig& cfg, const std::vector<Pool>& pools,
                     const Utility& utility);

RunResult run_stratified(const StratifiedConfig& cfg, const std::vector<Pool>& pools,
                         const Utility& utility);

// Sum over features of the within-pool variance of each feature after
// standardizing with the mean and standard deviation of all pools combined.
Eigen::VectorXd variance_scores(const std::vector<Pool>& pools);

// Min-max scaling to [0, 1]; all 0.5 when every score is equal.
Eigen::VectorXd normalize_scores(const Eigen::VectorXd& scores);

struct AllocationBounds {
  int n_min = 1;
  int n_max = 1;
};

AllocationBounds allocation_bounds(int n_boot, int n_pool, double alpha);

// floor(n_min + s_i (n_max - n_min)) per player.
std::vector<int> allocate_bootstrap_sizes(const Eigen::VectorXd& normalized, int n_boot,
                                          int n_pool, double alpha);

// Distribution accesses recorded by a run.
inline std::int64_t sampling_cost(const RunResult& result) { return result.draw_count; }

// Closed-form draw counts of the two sampling schemes.
inline std::int64_t baseline_draws(int n_players, int n_sample, int n_games) {
  return std::int64_t{n_players} * n_sample * n_games;
}
inline std::int64_t pooled_draws(int n_players, int n_pool) {
  return std::int64_t{n_players} * n_pool;
}

// Mean and unbiased variance of each column.
void column_mean_variance(const Eigen::MatrixXd& rows, Eigen::VectorXd& mean,
                          Eigen::VectorXd& variance);

}  // namespace probshap
