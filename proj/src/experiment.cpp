#include "probshap/experiment.hpp"

namespace probshap {

const char* dataset_name(DatasetKind d) {
  return d == DatasetKind::synthetic ? "synthetic" : "wine";
}

DatasetKind parse_dataset(const std::string& name) {
  if (name == "synthetic") return DatasetKind::synthetic;
  if (name == "wine") return DatasetKind::wine;
  throw ConfigError("unknown dataset '" + name + "' (expected synthetic or wine)");
}

Method parse_method(const std::string& name) {
  if (name == "baseline") return Method::baseline;
  if (name == "pooled") return Method::pooled;
  if (name == "stratified") return Method::stratified;
  throw ConfigError("unknown method '" + name + "' (expected baseline, pooled or stratified)");
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  const bool synth = dataset == DatasetKind::synthetic;
  if (c.n_sample == 0) c.n_sample = synth ? 1000 : 60;
  if (c.n_pool == 0) c.n_pool = synth ? 5000 : 250;
  if (c.n_boot == 0) c.n_boot = synth ? 1000 : 60;
  return c;
}

void ExperimentConfig::validate() const {
  const ExperimentConfig c = resolved();
  if (c.replications < 1) throw ConfigError("replications must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.dataset == DatasetKind::wine && c.wine_csv.empty()) {
    throw ConfigError("the wine dataset needs a CSV path");
  }
  if (c.validation_points < 2) throw ConfigError("validation_points must be >= 2");
  switch (c.method) {
    case Method::baseline:
      BaselineConfig{c.n_sample, c.n_games, c.n_iter, c.seed, c.threads}.validate();
      break;
    case Method::pooled:
      PooledConfig{c.n_pool, c.n_boot, c.n_games, c.n_iter, c.seed, c.threads}.validate();
      break;
    case Method::stratified: {
      StratifiedConfig s;
      static_cast<PooledConfig&>(s) = {c.n_pool, c.n_boot, c.n_games, c.n_iter, c.seed, c.threads};
      s.alpha = c.alpha;
      s.validate();
      break;
    }
  }
}

ExperimentSetup prepare_experiment(const ExperimentConfig& config) {
  const ExperimentConfig cfg = config.resolved();
  cfg.validate();
  ExperimentSetup setup;
  if (cfg.dataset == DatasetKind::synthetic) {
    SyntheticSpec spec;
    spec.master_seed = cfg.seed;
    setup.players = make_synthetic_players(spec);
    setup.validation = validation_grid(spec, cfg.validation_points);
    setup.utility = std::make_unique<NearestNeighborUtility>(setup.validation);
  } else {
    const WineTable table = load_wine(cfg.wine_csv);
    WineSplit split = split_and_partition(table, cfg.split_seed);
    setup.players = std::move(split.players);
    setup.validation = std::move(split.validation);
    for (const auto& p : setup.players) setup.partition_sizes.push_back(*p.population());
    setup.utility = std::make_unique<OlsUtility>(setup.validation);
  }
  if (cfg.method != Method::baseline && !cfg.fresh_pools) {
    setup.pools = build_pools(setup.players, cfg.n_pool, cfg.seed);
  }
  return setup;
}

RunResult run_replication(const ExperimentConfig& config, const ExperimentSetup& setup, int r) {
  const ExperimentConfig cfg = config.resolved();
  const std::uint64_t seed = replication_seed(cfg.seed, r);
  std::vector<Pool> own;
  auto pools_for = [&]() -> const std::vector<Pool>& {
    if (!cfg.fresh_pools && !setup.pools.empty()) return setup.pools;
    // A setup prepared for another method carries no pools; build the same
    // shared set it would have held.
    own = build_pools(setup.players, cfg.n_pool, cfg.fresh_pools ? seed : cfg.seed);
    return own;
  };
  switch (cfg.method) {
    case Method::baseline:
      return run_baseline({cfg.n_sample, cfg.n_games, cfg.n_iter, seed, cfg.threads},
                          setup.players, *setup.utility);
    case Method::pooled: {
      const auto& pools = pools_for();
      return run_pooled({cfg.n_pool, cfg.n_boot, cfg.n_games, cfg.n_iter, seed, cfg.threads},
                        pools, *setup.utility);
    }
    case Method::stratified: {
      const auto& pools = pools_for();
      StratifiedConfig s;
      static_cast<PooledConfig&>(s) = {cfg.n_pool, cfg.n_boot, cfg.n_games, cfg.n_iter, seed,
                                       cfg.threads};
      s.alpha = cfg.alpha;
      return run_stratified(s, pools, *setup.utility);
    }
  }
  throw ConfigError("unknown method");
}

std::vector<RunResult> run_replications(const ExperimentConfig& cfg, const ExperimentSetup& setup) {
  std::vector<RunResult> runs;
  runs.reserve(static_cast<std::size_t>(cfg.replications));
  for (int r = 0; r < cfg.replications; ++r) runs.push_back(run_replication(cfg, setup, r));
  return runs;
}

}  // namespace probshap
