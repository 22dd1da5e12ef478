#include "doctest.h"
#include "probshap/metrics.hpp"

using namespace probshap;

namespace {

RunResult run_with(const Eigen::MatrixXd& per_game, std::uint64_t seed = 0) {
  RunResult r;
  r.seed = seed;
  r.per_game_means = per_game;
  column_mean_variance(per_game, r.overall_mean, r.across_game_variance);
  return r;
}

}  // namespace

TEST_CASE("per replication statistics") {
  const auto s = per_replication_stats(run_with(Eigen::MatrixXd::Constant(4, 3, 2.5)));
  CHECK(s.mean == Eigen::Vector3d::Constant(2.5));
  CHECK(s.variance.isZero());

  Eigen::MatrixXd two(2, 1);
  two << 0, 2;
  const auto t = per_replication_stats(run_with(two));
  CHECK(t.mean[0] == 1.0);
  CHECK(t.variance[0] == 2.0);

  Eigen::MatrixXd one(1, 2);
  one << 1, 2;
  RunResult r;
  r.per_game_means = one;
  CHECK_THROWS_AS(per_replication_stats(r), ConfigError);
}

TEST_CASE("cross replication report") {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 0, 0, 0, 0;
  b << 2, 2, 2, 2;
  const std::vector<RunResult> runs{run_with(a, 5), run_with(b, 6)};
  const MetricsReport m = cross_replication_report(runs);
  CHECK(m.var_of_mean == Eigen::Vector2d(2, 2));
  CHECK(m.var_of_var.isZero());
  CHECK(m.avg_var_of_mean == 2.0);
  CHECK(m.replications == 2);
  CHECK(m.seeds == std::vector<std::uint64_t>{5, 6});

  const std::vector<RunResult> same{run_with(b), run_with(b), run_with(b)};
  CHECK(cross_replication_report(same).avg_var_of_mean == 0.0);
  CHECK(cross_replication_report(same).avg_var_of_var == 0.0);
  CHECK_THROWS_AS(cross_replication_report(std::vector<RunResult>{run_with(a)}), ConfigError);
  CHECK(replication_seed(10, 3) == 13);
}

TEST_CASE("metrics scale as c^2 and c^4") {
  Stream rng(1, Purpose::generic);
  std::vector<RunResult> base, scaled;
  for (int r = 0; r < 6; ++r) {
    Eigen::MatrixXd g(5, 3);
    for (Eigen::Index k = 0; k < g.size(); ++k) g.data()[k] = rng.normal();
    base.push_back(run_with(g));
    scaled.push_back(run_with(3.0 * g));
  }
  const auto m1 = cross_replication_report(base);
  const auto m3 = cross_replication_report(scaled);
  CHECK(m3.avg_var_of_mean == doctest::Approx(9.0 * m1.avg_var_of_mean));
  CHECK(m3.avg_var_of_var == doctest::Approx(81.0 * m1.avg_var_of_var));
  CHECK(m1.avg_var_of_mean > 0.0);
}
