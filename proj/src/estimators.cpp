#include "probshap/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "probshap/parallel.hpp"

namespace probshap {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

void validate_common(int n_games, int n_iter) {
  require(n_games >= 2, "n_games must be >= 2");
  require(n_iter >= 1, "n_iter must be >= 1");
}

void require_players(int n) { require(n >= 1, "at least one player is required"); }

// Runs every game: builds its frozen data, walks n_iter sampled permutations
// and stores the per-game mean marginal contributions.
Eigen::MatrixXd play_games(int n_players, int n_games, int n_iter, std::uint64_t seed,
                           int threads, const Utility& utility,
                           const std::function<GameData(int game)>& make_game) {
  Eigen::MatrixXd means(n_games, n_players);
  parallel_for(static_cast<std::size_t>(n_games), threads, [&](std::size_t g) {
    const int game = static_cast<int>(g);
    const GameData data = make_game(game);
    auto walk = utility.walk(data);
    Stream perms = derive_stream(seed, Purpose::permutation, static_cast<std::uint32_t>(game));
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n_players);
    for (int t = 0; t < n_iter; ++t) {
      const auto order = sample_permutation(perms, n_players);
      try {
        sum += marginal_contributions_along(order, *walk);
      } catch (const UtilityError& e) {
        throw e.with_context("game " + std::to_string(game) + ", iteration " +
                             std::to_string(t));
      }
    }
    means.row(game) = (sum / static_cast<double>(n_iter)).transpose();
  });
  return means;
}

void finish(RunResult& r) {
  column_mean_variance(r.per_game_means, r.overall_mean, r.across_game_variance);
}

PlayerSamples bootstrap(const Pool& pool, int count, Stream& rng) {
  PlayerSamples out;
  const Eigen::Index size = pool.size();
  if (size == 0 || count <= 0) {
    out.features.resize(0, pool.samples.dim());
    out.labels.resize(0);
    return out;
  }
  out.features.resize(count, pool.samples.dim());
  out.labels.resize(count);
  for (int k = 0; k < count; ++k) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(size)));
    out.features.row(k) = pool.samples.features.row(j);
    out.labels[k] = pool.samples.labels[j];
  }
  return out;
}

RunResult run_bootstrapped(Method method, const PooledConfig& cfg,
                           const std::vector<Pool>& pools, const std::vector<int>& sizes,
                           const Utility& utility) {
  const int n = static_cast<int>(pools.size());
  RunResult r;
  r.method = method;
  r.seed = cfg.master_seed;
  for (const auto& p : pools) {
    r.pool_sizes.push_back(p.size());
    r.draw_count += p.draws;
  }
  if (cfg.n_pool < 5 * cfg.n_boot) {
    r.warnings.push_back("n_pool < 5 * n_boot; pooled estimates may be unstable");
  }
  r.per_game_means = play_games(n, cfg.n_games, cfg.n_iter, cfg.master_seed, cfg.threads,
                                utility, [&](int game) {
                                  std::vector<PlayerSamples> data;
                                  data.reserve(pools.size());
                                  for (int i = 0; i < n; ++i) {
                                    Stream rng = derive_stream(
                                        cfg.master_seed, Purpose::game_draw,
                                        static_cast<std::uint32_t>(game),
                                        static_cast<std::uint32_t>(i));
                                    data.push_back(bootstrap(pools[static_cast<std::size_t>(i)],
                                                             sizes[static_cast<std::size_t>(i)],
                                                             rng));
                                  }
                                  return GameData(std::move(data));
                                });
  finish(r);
  return r;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::pooled: return "pooled";
    case Method::stratified: return "stratified";
  }
  return "unknown";
}

void BaselineConfig::validate() const {
  require(n_sample >= 1, "n_sample must be >= 1");
  validate_common(n_games, n_iter);
}

void PooledConfig::validate() const {
  require(n_pool >= 1, "n_pool must be >= 1");
  require(n_boot >= 1, "n_boot must be >= 1");
  validate_common(n_games, n_iter);
}

void StratifiedConfig::validate() const {
  PooledConfig::validate();
  require(alpha >= 0.5 && alpha <= 1.0, "alpha must lie in [0.5, 1.0]");
}

void column_mean_variance(const Eigen::MatrixXd& rows, Eigen::VectorXd& mean,
                          Eigen::VectorXd& variance) {
  const Eigen::Index g = rows.rows();
  if (g < 2) throw ConfigError("at least two rows are needed for a sample variance");
  mean = rows.colwise().mean().transpose();
  variance = (rows.rowwise() - mean.transpose()).colwise().squaredNorm().transpose() /
             static_cast<double>(g - 1);
}

RunResult run_baseline(const BaselineConfig& cfg, const std::vector<PlayerDistribution>& players,
                       const Utility& utility) {
  cfg.validate();
  const int n = static_cast<int>(players.size());
  require_players(n);

  RunResult r;
  r.method = Method::baseline;
  r.config = cfg;
  r.seed = cfg.master_seed;
  std::int64_t per_game = 0;
  for (const auto& p : players) {
    const auto pop = p.population();
    per_game += pop ? std::min<std::int64_t>(*pop, cfg.n_sample) : cfg.n_sample;
  }
  r.draw_count = per_game * cfg.n_games;

  r.per_game_means = play_games(n, cfg.n_games, cfg.n_iter, cfg.master_seed, cfg.threads,
                                utility, [&](int game) {
                                  std::vector<PlayerSamples> data;
                                  data.reserve(players.size());
                                  for (int i = 0; i < n; ++i) {
                                    Stream rng = derive_stream(
                                        cfg.master_seed, Purpose::game_draw,
                                        static_cast<std::uint32_t>(game),
                                        static_cast<std::uint32_t>(i));
                                    data.push_back(players[static_cast<std::size_t>(i)].draw(
                                        cfg.n_sample, rng));
                                  }
                                  return GameData(std::move(data));
                                });
  finish(r);
  return r;
}

std::vector<Pool> build_pools(const std::vector<PlayerDistribution>& players, int n_pool,
                              std::uint64_t seed) {
  require(n_pool >= 1, "n_pool must be >= 1");
  std::vector<Pool> pools;
  pools.reserve(players.size());
  for (std::size_t i = 0; i < players.size(); ++i) {
    Stream rng = derive_stream(seed, Purpose::pool_build, 0, static_cast<std::uint32_t>(i));
    Pool pool;
    pool.samples = players[i].draw(n_pool, rng);
    pool.draws = pool.samples.size();
    pools.push_back(std::move(pool));
  }
  return pools;
}

RunResult run_pooled(const PooledConfig& cfg, const std::vector<Pool>& pools,
                     const Utility& utility) {
  cfg.validate();
  require_players(static_cast<int>(pools.size()));
  const std::vector<int> sizes(pools.size(), cfg.n_boot);
  RunResult r = run_bootstrapped(Method::pooled, cfg, pools, sizes, utility);
  r.config = cfg;
  return r;
}

RunResult run_stratified(const StratifiedConfig& cfg, const std::vector<Pool>& pools,
                         const Utility& utility) {
  cfg.validate();
  require_players(static_cast<int>(pools.size()));
  const Eigen::VectorXd scores = variance_scores(pools);
  const std::vector<int> sizes =
      allocate_bootstrap_sizes(normalize_scores(scores), cfg.n_boot, cfg.n_pool, cfg.alpha);
  RunResult r = run_bootstrapped(Method::stratified, cfg, pools, sizes, utility);
  r.config = cfg;
  r.variance_scores = scores;
  r.allocation = sizes;
  return r;
}

Eigen::VectorXd variance_scores(const std::vector<Pool>& pools) {
  require(!pools.empty(), "variance_scores: no pools");
  Eigen::Index dim = -1;
  Eigen::Index total = 0;
  for (const auto& p : pools) {
    if (p.size() == 0) continue;
    if (dim >= 0 && p.samples.dim() != dim) {
      throw ConfigError("variance_scores: pools have different feature dimensions");
    }
    dim = p.samples.dim();
    total += p.size();
  }
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pools.size()));
  if (total == 0 || dim <= 0) return scores;

  // Population statistics of the union of all pools.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& p : pools) {
    if (p.size() > 0) mean += p.samples.features.colwise().sum().transpose();
  }
  mean /= static_cast<double>(total);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
  for (const auto& p : pools) {
    if (p.size() > 0) {
      sq += (p.samples.features.rowwise() - mean.transpose()).colwise().squaredNorm().transpose();
    }
  }
  const Eigen::VectorXd sd = (sq / static_cast<double>(total)).cwiseSqrt();

  for (std::size_t i = 0; i < pools.size(); ++i) {
    const auto& f = pools[i].samples.features;
    if (f.rows() == 0) continue;
    double score = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (!(sd[k] > 0.0)) continue;
      const Eigen::ArrayXd z = (f.col(k).array() - mean[k]) / sd[k];
      score += (z - z.mean()).square().mean();
    }
    scores[static_cast<Eigen::Index>(i)] = score;
  }
  return scores;
}

Eigen::VectorXd normalize_scores(const Eigen::VectorXd& scores) {
  require(scores.size() > 0, "normalize_scores: empty input");
  const double lo = scores.minCoeff();
  const double hi = scores.maxCoeff();
  if (!(hi > lo)) return Eigen::VectorXd::Constant(scores.size(), 0.5);
  return (scores.array() - lo) / (hi - lo);
}

AllocationBounds allocation_bounds(int n_boot, int n_pool, double alpha) {
  require(alpha >= 0.5 && alpha <= 1.0, "alpha must lie in [0.5, 1.0]");
  AllocationBounds b;
  b.n_min = std::max(1, n_boot / 2);
  b.n_max = std::max(b.n_min, static_cast<int>(std::floor(alpha * n_pool)));
  return b;
}

std::vector<int> allocate_bootstrap_sizes(const Eigen::VectorXd& normalized, int n_boot,
                                          int n_pool, double alpha) {
  const AllocationBounds b = allocation_bounds(n_boot, n_pool, alpha);
  std::vector<int> sizes(static_cast<std::size_t>(normalized.size()));
  for (Eigen::Index i = 0; i < normalized.size(); ++i) {
    const double s = std::clamp(normalized[i], 0.0, 1.0);
    sizes[static_cast<std::size_t>(i)] =
        static_cast<int>(std::floor(b.n_min + s * (b.n_max - b.n_min)));
  }
  return sizes;
}

}  // namespace probshap
