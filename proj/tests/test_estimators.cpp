#include <cmath>

#include "doctest.h"
#include "probshap/analytic.hpp"
#include "probshap/estimators.hpp"
#include "probshap/experiment.hpp"
#include "probshap/metrics.hpp"
#include "probshap/utilities.hpp"
#include "support.hpp"

using namespace probshap;

namespace {

const analytic::AdditiveGaussianGameSpec kSpec{{{-2.0, 0.5}, {0.0, 1.0}, {1.5, 2.0}}};

Pool pool_of(std::vector<double> xs, int repeat) {
  Pool p;
  p.samples.features.resize(static_cast<Eigen::Index>(xs.size()) * repeat, 1);
  p.samples.labels.resize(p.samples.features.rows());
  Eigen::Index k = 0;
  for (int r = 0; r < repeat; ++r) {
    for (double x : xs) {
      p.samples.features(k, 0) = x;
      p.samples.labels[k++] = x;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("normalization") {
  CHECK(normalize_scores(Eigen::Vector3d(1, 3, 5)) == Eigen::Vector3d(0, 0.5, 1));
  CHECK(normalize_scores(Eigen::Vector3d(2, 2, 2)) == Eigen::Vector3d::Constant(0.5));
  const Eigen::VectorXd n = normalize_scores(Eigen::Vector4d(7, -1, 3, 10));
  CHECK(n[1] == 0.0);
  CHECK(n[3] == 1.0);
  CHECK_THROWS_AS(normalize_scores(Eigen::VectorXd()), ConfigError);
}

TEST_CASE("allocation formula") {
  const auto b = allocation_bounds(60, 250, 0.5);
  CHECK(b.n_min == 30);
  CHECK(b.n_max == 125);
  CHECK(allocate_bootstrap_sizes(Eigen::Vector3d(0, 1, 0.5), 60, 250, 0.5) ==
        std::vector<int>{30, 125, 77});
  CHECK(allocate_bootstrap_sizes(Eigen::Vector2d(0, 1), 60, 40, 0.5) == std::vector<int>{30, 30});
  CHECK(allocation_bounds(1, 1, 1.0).n_min == 1);
  CHECK_THROWS_AS(allocation_bounds(60, 250, 0.4), ConfigError);
  CHECK_THROWS_AS(allocation_bounds(60, 250, 1.01), ConfigError);

  Stream rng(1, Purpose::generic);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_boot = 1 + static_cast<int>(rng.below(200));
    const int n_pool = 1 + static_cast<int>(rng.below(1000));
    const double alpha = rng.uniform(0.5, 1.0);
    Eigen::VectorXd s(8);
    for (auto& x : s) x = rng.uniform();
    const auto sizes = allocate_bootstrap_sizes(s, n_boot, n_pool, alpha);
    const auto bounds = allocation_bounds(n_boot, n_pool, alpha);
    for (int i = 0; i < 8; ++i) {
      CHECK(sizes[i] >= bounds.n_min);
      CHECK(sizes[i] <= bounds.n_max);
      for (int j = 0; j < 8; ++j) {
        if (s[i] <= s[j]) CHECK(sizes[i] <= sizes[j]);
      }
    }
  }
}

TEST_CASE("variance scores") {
  const std::vector<Pool> ab{pool_of({-1, 1}, 50), pool_of({-3, 3}, 50)};
  const Eigen::VectorXd s = variance_scores(ab);
  CHECK(s[1] == doctest::Approx(9.0 * s[0]));
  // Union variance is (1 + 9) / 2 = 5, so the scores are 1/5 and 9/5.
  CHECK(s[0] == doctest::Approx(0.2));

  const std::vector<Pool> same{pool_of({1, 2, 4}, 3), pool_of({1, 2, 4}, 3)};
  const Eigen::VectorXd e = variance_scores(same);
  CHECK(e[0] == doctest::Approx(e[1]));
  CHECK(variance_scores({pool_of({2}, 1), pool_of({5}, 1)}).isZero());
  CHECK(variance_scores({pool_of({2}, 4), pool_of({2}, 3)}).isZero());
}

TEST_CASE("draw accounting") {
  CHECK(baseline_draws(10, 1000, 200) == 2000000);
  CHECK(pooled_draws(10, 5000) == 50000);
  CHECK(1.0 - double(pooled_draws(10, 5000)) / double(baseline_draws(10, 1000, 200)) ==
        doctest::Approx(0.975));

  const auto players = analytic::additive_game_players(kSpec);
  AdditiveUtility u;
  const RunResult base = run_baseline({7, 3, 1, 0, 1}, players, u);
  CHECK(base.draw_count == baseline_draws(3, 7, 3));
  const auto pools = build_pools(players, 7, 0);
  const RunResult pooled = run_pooled({7, 7, 3, 1, 0, 1}, pools, u);
  CHECK(pooled.draw_count == pooled_draws(3, 7));
  CHECK(sampling_cost(pooled) == base.draw_count / 3);
  StratifiedConfig sc;
  static_cast<PooledConfig&>(sc) = {7, 7, 3, 1, 0, 1};
  CHECK(run_stratified(sc, pools, u).draw_count == pooled.draw_count);

  // Partitions smaller than the request cost only their rows.
  auto table = std::make_shared<LabeledTable>();
  table->features = Eigen::VectorXd::LinSpaced(10, 0, 9);
  table->labels = table->features.col(0);
  const std::vector<PlayerDistribution> parts{
      PlayerDistribution::partition({table, {0, 1, 2}}),
      PlayerDistribution::partition({table, {3, 4, 5, 6, 7, 8, 9}})};
  CHECK(run_baseline({5, 2, 1, 0, 1}, parts, u).draw_count == (3 + 5) * 2);
  const auto small = build_pools(parts, 5, 0);
  CHECK(small[0].size() == 3);
  CHECK(small[1].size() == 5);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(BaselineConfig({0, 10, 1, 0, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(BaselineConfig({1, 1, 1, 0, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(PooledConfig({10, 10, 10, 0, 0, 1}).validate(), ConfigError);
  StratifiedConfig s;
  s.alpha = 0.2;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  AdditiveUtility u;
  CHECK_THROWS_AS(run_baseline({}, {}, u), ConfigError);

  const auto pools = build_pools(analytic::additive_game_players(kSpec), 10, 0);
  CHECK(run_pooled({10, 5, 2, 1, 0, 1}, pools, u).warnings.size() == 1);
  CHECK(run_pooled({50, 5, 2, 1, 0, 1}, pools, u).warnings.empty());
}

TEST_CASE("results do not depend on the thread count") {
  SyntheticSpec spec;
  const auto players = make_synthetic_players(spec);
  const NearestNeighborUtility u(validation_grid(spec, 200));
  const RunResult one = run_baseline({50, 6, 4, 9, 1}, players, u);
  const RunResult four = run_baseline({50, 6, 4, 9, 4}, players, u);
  CHECK(one.per_game_means == four.per_game_means);
  CHECK(run_baseline({50, 6, 4, 9, 1}, players, u).per_game_means == one.per_game_means);
  CHECK(run_baseline({50, 6, 4, 10, 1}, players, u).per_game_means != one.per_game_means);

  const auto pools = build_pools(players, 300, 9);
  CHECK(run_pooled({300, 40, 5, 3, 9, 1}, pools, u).per_game_means ==
        run_pooled({300, 40, 5, 3, 9, 3}, pools, u).per_game_means);
  StratifiedConfig s1, s3;
  static_cast<PooledConfig&>(s1) = {300, 40, 5, 3, 9, 1};
  static_cast<PooledConfig&>(s3) = {300, 40, 5, 3, 9, 3};
  CHECK(run_stratified(s1, pools, u).per_game_means == run_stratified(s3, pools, u).per_game_means);
}

TEST_CASE("per-game efficiency") {
  SyntheticSpec spec;
  const auto players = make_synthetic_players(spec);
  const NearestNeighborUtility u(validation_grid(spec, 300));
  const RunResult r = run_baseline({40, 4, 7, 2, 1}, players, u);
  for (int g = 0; g < r.n_games(); ++g) {
    // Every permutation telescopes to v(N) - v(∅) for the game's data.
    std::vector<PlayerSamples> data;
    for (int i = 0; i < 10; ++i) {
      Stream rng(2, Purpose::game_draw, static_cast<std::uint32_t>(g), static_cast<std::uint32_t>(i));
      data.push_back(players[i].draw(40, rng));
    }
    const GameData gd(std::move(data));
    const double total = u.evaluate(Coalition::grand(10), gd) - u.evaluate(Coalition(10), gd);
    CHECK(std::abs(r.per_game_means.row(g).sum() - total) < 1e-9);
  }
}

TEST_CASE("estimators are unbiased on the additive Gaussian game") {
  const auto players = analytic::additive_game_players(kSpec);
  const Eigen::VectorXd mu = analytic::expected_shapley_additive(kSpec);
  const Eigen::VectorXd var = analytic::variance_shapley_additive(kSpec);
  AdditiveUtility sum_u;
  testing::MeanLabelUtility mean_u;

  const RunResult base = run_baseline({1, 500, 1, 1, 1}, players, sum_u);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(base.overall_mean[i] - mu[i]) < 4.0 * std::sqrt(var[i] / 500));
    CHECK(std::abs(base.across_game_variance[i] / var[i] - 1.0) < 0.2);
  }

  // Pools large enough that the bootstrap bias is negligible.
  const auto pools = build_pools(players, 10000, 3);
  const RunResult pooled = run_pooled({10000, 1, 500, 1, 3, 1}, pools, sum_u);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(pooled.overall_mean[i] - mu[i]) < 4.0 * std::sqrt(var[i] / 500));
  }
  StratifiedConfig sc;
  static_cast<PooledConfig&>(sc) = {10000, 4, 500, 1, 3, 1};
  const RunResult strat = run_stratified(sc, pools, mean_u);
  for (int i = 0; i < 3; ++i) {
    // The pool itself is one draw: its error adds sigma^2 / n_pool.
    const double se = std::sqrt(var[i] / 10000 + strat.across_game_variance[i] / 500);
    CHECK(std::abs(strat.overall_mean[i] - mu[i]) < 4.0 * se);
  }
  CHECK(strat.allocation.size() == 3);
  CHECK(strat.allocation.front() < strat.allocation.back());
}

TEST_CASE("variance of the game mean scales as 1/m") {
  const auto players = analytic::additive_game_players(kSpec);
  AdditiveUtility u;
  auto var_of_mean = [&](int m) {
    std::vector<RunResult> runs;
    for (int r = 0; r < 300; ++r) {
      runs.push_back(run_baseline({1, m, 1, replication_seed(1000, r), 1}, players, u));
    }
    return cross_replication_report(runs).avg_var_of_mean;
  };
  const double ratio = var_of_mean(10) / var_of_mean(40);
  CHECK(std::abs(ratio / 4.0 - 1.0) < 0.3);
}

TEST_CASE("utility failure reports where it happened") {
  const auto players = analytic::additive_game_players(kSpec);
  FunctionUtility bad([](const Coalition& s) -> double {
    if (s.size() == 3) throw NumericError("singular");
    return 0.0;
  });
  try {
    run_baseline({1, 2, 1, 0, 1}, players, bad);
    FAIL("expected UtilityError");
  } catch (const UtilityError& e) {
    CHECK(std::string(e.what()).find("game 0, iteration 0") != std::string::npos);
    CHECK(e.coalition().size() == 3);
  }
}

TEST_CASE("replications share pools unless asked to rebuild them") {
  ExperimentConfig cfg;
  cfg.method = Method::pooled;
  cfg.n_pool = 100;
  cfg.n_boot = 20;
  cfg.n_games = 3;
  cfg.n_iter = 2;
  cfg.validation_points = 50;
  const ExperimentSetup shared = prepare_experiment(cfg);
  REQUIRE(shared.pools.size() == 10);
  CHECK(shared.pools[4].samples.labels ==
        build_pools(shared.players, 100, cfg.seed)[4].samples.labels);
  const RunResult r0 = run_replication(cfg, shared, 0);
  const RunResult r1 = run_replication(cfg, shared, 1);
  CHECK(r0.per_game_means != r1.per_game_means);

  cfg.fresh_pools = true;
  const ExperimentSetup fresh = prepare_experiment(cfg);
  CHECK(fresh.pools.empty());
  // Replication 0 draws its pools from the master seed either way.
  CHECK(run_replication(cfg, fresh, 0).per_game_means == r0.per_game_means);
  CHECK(run_replication(cfg, fresh, 1).per_game_means != r1.per_game_means);
}
