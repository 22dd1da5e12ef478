#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "probshap/estimators.hpp"

namespace probshap {

// Within-replication estimates: mean and unbiased variance over games.
struct ReplicationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

ReplicationStats per_replication_stats(const RunResult& run);

// Cross-replication reliability of the two estimates.
struct MetricsReport {
  Eigen::VectorXd var_of_mean;  // per player, Var(E^[phi_i])
  Eigen::VectorXd var_of_var;   // per player, Var(Var^(phi_i))
  double avg_var_of_mean = 0.0;
  double avg_var_of_var = 0.0;
  int replications = 0;
  std::vector<std::uint64_t> seeds;
};

MetricsReport cross_replication_report(std::span<const ReplicationStats> reps);
MetricsReport cross_replication_report(std::span<const RunResult> runs);

// Master seed of replication r.
inline std::uint64_t replication_seed(std::uint64_t master_seed, int r) {
  return master_seed + static_cast<std::uint64_t>(r);
}

}  // namespace probshap
