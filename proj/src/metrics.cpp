#include "probshap/metrics.hpp"

namespace probshap {

ReplicationStats per_replication_stats(const RunResult& run) {
  if (run.n_games() < 2) throw ConfigError("per_replication_stats: need at least two games");
  ReplicationStats s;
  column_mean_variance(run.per_game_means, s.mean, s.variance);
  return s;
}

MetricsReport cross_replication_report(std::span<const ReplicationStats> reps) {
  const auto r = static_cast<Eigen::Index>(reps.size());
  if (r < 2) throw ConfigError("cross_replication_report: need at least two replications");
  const Eigen::Index n = reps.front().mean.size();
  Eigen::MatrixXd means(r, n), vars(r, n);
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto& s = reps[static_cast<std::size_t>(k)];
    if (s.mean.size() != n || s.variance.size() != n) {
      throw ConfigError("cross_replication_report: replications differ in player count");
    }
    means.row(k) = s.mean.transpose();
    vars.row(k) = s.variance.transpose();
  }
  MetricsReport report;
  Eigen::VectorXd unused;
  column_mean_variance(means, unused, report.var_of_mean);
  column_mean_variance(vars, unused, report.var_of_var);
  report.avg_var_of_mean = report.var_of_mean.mean();
  report.avg_var_of_var = report.var_of_var.mean();
  report.replications = static_cast<int>(r);
  return report;
}

MetricsReport cross_replication_report(std::span<const RunResult> runs) {
  std::vector<ReplicationStats> stats;
  stats.reserve(runs.size());
  for (const auto& run : runs) {
    if (!stats.empty() && run.n_games() != runs.front().n_games()) {
      throw ConfigError("cross_replication_report: replications differ in n_games");
    }
    stats.push_back(per_replication_stats(run));
  }
  MetricsReport report = cross_replication_report(stats);
  for (const auto& run : runs) report.seeds.push_back(run.seed);
  return report;
}

}  // namespace probshap
