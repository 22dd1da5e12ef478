#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "doctest.h"
#include "probshap/datasets.hpp"
#include "support.hpp"

using namespace probshap;

TEST_CASE("truth function") {
  SyntheticSpec spec;
  CHECK(truth_function(spec, 0.0) == doctest::Approx(4.414214).epsilon(1e-7));
  CHECK(truth_function(spec, 1.0) == doctest::Approx(1.865786).epsilon(1e-6));
  CHECK(truth_function(spec, 0.0) == doctest::Approx(3.0 + std::sqrt(2.0)).epsilon(1e-14));
  spec.amplitude = 0.0;
  spec.offset = 0.0;
  CHECK(truth_function(spec, 0.0) == 0.0);
}

TEST_CASE("synthetic players") {
  SyntheticSpec spec;
  const auto players = make_synthetic_players(spec);
  REQUIRE(players.size() == 10);
  for (int i = 0; i < 10; ++i) {
    const auto* g = players[i].as_gaussian();
    REQUIRE(g != nullptr);
    CHECK(g->mu == doctest::Approx(-7.0 + i * 14.0 / 9.0));
    CHECK(g->sigma >= 0.5);
    CHECK(g->sigma <= 2.5);
  }
  CHECK(players.front().as_gaussian()->mu == -7.0);
  CHECK(players.back().as_gaussian()->mu == 7.0);

  // Same seed reproduces sigma; another seed changes it.
  const auto again = make_synthetic_players(spec);
  spec.master_seed = 1;
  const auto other = make_synthetic_players(spec);
  CHECK(again[3].as_gaussian()->sigma == players[3].as_gaussian()->sigma);
  CHECK(other[3].as_gaussian()->sigma != players[3].as_gaussian()->sigma);

  spec.sigma_range = {1.0, 1.0};
  for (const auto& p : make_synthetic_players(spec)) CHECK(p.as_gaussian()->sigma == 1.0);
  spec.n_players = 1;
  CHECK(make_synthetic_players(spec)[0].as_gaussian()->mu == 0.0);
  spec.n_players = 0;
  CHECK_THROWS_AS(make_synthetic_players(spec), ConfigError);
}

TEST_CASE("synthetic draws are clipped and labelled by the truth") {
  SyntheticSpec spec;
  spec.sigma_range = {2.5, 2.5};
  const auto players = make_synthetic_players(spec);
  Stream rng(3, Purpose::game_draw);
  int clipped = 0;
  for (const auto& p : {players.front(), players.back()}) {
    const PlayerSamples s = p.draw(5000, rng);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double x = s.features(k, 0);
      REQUIRE(x >= -10.0);
      REQUIRE(x <= 10.0);
      clipped += std::abs(x) == 10.0;
      CHECK(s.labels[k] == truth_function(spec, x));
    }
  }
  CHECK(clipped > 0);
}

TEST_CASE("validation grid") {
  SyntheticSpec spec;
  const auto two = validation_grid(spec, 2);
  CHECK(two.features(0, 0) == -10.0);
  CHECK(two.features(1, 0) == 10.0);
  const auto grid = validation_grid(spec);
  REQUIRE(grid.size() == 1000);
  CHECK(grid.features(1, 0) - grid.features(0, 0) == doctest::Approx(20.0 / 999.0));
  CHECK(grid.features(999, 0) == 10.0);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    CHECK(grid.labels[k] == truth_function(spec, grid.features(k, 0)));
  }
  CHECK_THROWS_AS(validation_grid(spec, 1), ConfigError);
}

TEST_CASE("quantiles and split sizes") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 0.5) == 2.5);
  CHECK(quantile_sorted(v, 0.1) == doctest::Approx(1.3));
  CHECK(quantile_sorted(v, 1.0) == 4.0);
  CHECK(train_size(kCanonicalWineRows, 0.7) == 3429);
  CHECK(kCanonicalWineRows - train_size(kCanonicalWineRows, 0.7) == 1469);
  CHECK(train_size(10, 0.7) == 7);
  CHECK_THROWS_AS(train_size(10, 1.0), ConfigError);
}

TEST_CASE("wine loader error paths") {
  const auto dir = testing::scratch_dir("wine_errors");
  CHECK_THROWS_AS(load_wine(dir / "missing.csv"), IoError);

  const auto fixture = dir / "ok.csv";
  testing::write_wine_fixture(fixture, 50, 1);
  const WineTable t = load_wine(fixture);
  CHECK(t.rows() == 50);
  CHECK(t.features.cols() == 11);
  CHECK(t.feature_names[10] == "alcohol");

  std::ifstream in(fixture);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);

  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  };
  CHECK_THROWS_AS(load_wine(write("schema.csv", "a;b;c\n1;2;3\n")), SchemaError);
  CHECK_THROWS_AS(load_wine(write("empty.csv", "")), SchemaError);
  std::string bad = first;
  bad.replace(0, bad.find(';'), "abc");
  try {
    load_wine(write("cell.csv", header + "\n" + first + "\n" + bad + "\n"));
    FAIL("expected ParseError");
  } catch (const SchemaError&) {
    FAIL("wrong error type");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 1") != std::string::npos);
    CHECK(msg.find("fixed acidity") != std::string::npos);
  }
  CHECK_THROWS_AS(load_wine(write("short.csv", header + "\n1;2;3\n")), ParseError);
  CHECK_THROWS_AS(load_wine(write("nodata.csv", header + "\n")), ParseError);
}

TEST_CASE("split and decile partition on a fixture") {
  const auto dir = testing::scratch_dir("wine_split");
  testing::write_wine_fixture(dir / "w.csv", 700, 2);
  const WineTable t = load_wine(dir / "w.csv");
  const WineSplit a = split_and_partition(t, 42);
  const WineSplit b = split_and_partition(t, 42);

  CHECK(a.train_rows.size() == 490);
  CHECK(a.validation.size() == 210);
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.players.size() == 10);
  CHECK(std::is_sorted(a.deciles.begin(), a.deciles.end()));

  std::vector<double> alcohol;
  for (auto r : a.train_rows) alcohol.push_back(t.features(r, kAlcoholColumn));
  CHECK(a.deciles.front() == *std::min_element(alcohol.begin(), alcohol.end()));
  CHECK(a.deciles.back() == *std::max_element(alcohol.begin(), alcohol.end()));

  std::multiset<Eigen::Index> seen;
  for (std::size_t i = 0; i < a.players.size(); ++i) {
    const auto& rows = a.players[i].as_partition()->rows;
    CHECK(rows == b.players[i].as_partition()->rows);
    for (auto r : rows) {
      seen.insert(r);
      const double x = t.features(r, kAlcoholColumn);
      CHECK(x >= a.deciles[i]);
      if (i < 9) CHECK(x < a.deciles[i + 1]);
    }
  }
  const std::set<Eigen::Index> train(a.train_rows.begin(), a.train_rows.end());
  CHECK(seen.size() == a.train_rows.size());
  CHECK(std::set<Eigen::Index>(seen.begin(), seen.end()) == train);

  // Validation rows are exactly the rows left out of training.
  CHECK(train.size() + a.validation.size() == static_cast<std::size_t>(t.rows()));

  CHECK(split_and_partition(t, 43).train_rows != a.train_rows);
}

TEST_CASE("partition draws are without replacement") {
  auto table = std::make_shared<LabeledTable>();
  table->features = Eigen::VectorXd::LinSpaced(20, 0, 19);
  table->labels = table->features.col(0);
  std::vector<Eigen::Index> rows{1, 3, 5, 7, 9, 11};
  const auto p = PlayerDistribution::partition({table, rows});
  CHECK(p.population() == 6);
  Stream rng(1, Purpose::pool_build);
  const PlayerSamples four = p.draw(4, rng);
  std::set<double> values(four.labels.begin(), four.labels.end());
  CHECK(values.size() == 4);
  for (double v : values) CHECK(std::find(rows.begin(), rows.end(), Eigen::Index(v)) != rows.end());
  CHECK(p.draw(100, rng).size() == 6);
  CHECK_THROWS_AS(PlayerDistribution::partition({table, {25}}), ConfigError);
}
