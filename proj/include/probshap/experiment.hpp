#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "probshap/datasets.hpp"
#include "probshap/estimators.hpp"
#include "probshap/metrics.hpp"
#include "probshap/utilities.hpp"

namespace probshap {

enum class DatasetKind { synthetic, wine };

const char* dataset_name(DatasetKind d);
DatasetKind parse_dataset(const std::string& name);
Method parse_method(const std::string& name);

// Everything needed to reproduce one experiment. Zero-valued size fields take
// the dataset defaults (synthetic: n_sample 1000, n_pool 5000, n_boot 1000;
// wine: n_sample 60, n_pool 250, n_boot 60).
struct ExperimentConfig {
  DatasetKind dataset = DatasetKind::synthetic;
  Method method = Method::baseline;
  int n_sample = 0;
  int n_pool = 0;
  int n_boot = 0;
  double alpha = 0.5;
  int n_games = 10;
  int n_iter = 100;
  int replications = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string wine_csv;
  std::uint64_t split_seed = 42;
  int validation_points = 1000;
  // Pools are built once from `seed` and shared by every replication unless
  // this is set, in which case replication r rebuilds them from its own seed.
  bool fresh_pools = false;

  // Copy with dataset defaults filled in.
  ExperimentConfig resolved() const;
  void validate() const;
};

// Players and utility shared by every replication of an experiment.
struct ExperimentSetup {
  std::vector<PlayerDistribution> players;
  std::unique_ptr<Utility> utility;
  ValidationSet validation;
  std::vector<Eigen::Index> partition_sizes;  // wine only
  std::vector<Pool> pools;                    // pooled and stratified, shared
};

ExperimentSetup prepare_experiment(const ExperimentConfig& cfg);

// Runs replication r with master seed replication_seed(cfg.seed, r).
RunResult run_replication(const ExperimentConfig& cfg, const ExperimentSetup& setup, int r);
std::vector<RunResult> run_replications(const ExperimentConfig& cfg, const ExperimentSetup& setup);

}  // namespace probshap
