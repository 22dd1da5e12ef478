#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "probshap/datasets.hpp"
#include "probshap/game.hpp"
#include "probshap/rng.hpp"

namespace probshap::testing {

// v(S) = sum over members of the mean of their labels. Keeps E[phi_i] = mu_i
// whatever the per-player sample size.
class MeanLabelUtility final : public Utility {
 public:
  double evaluate(const Coalition& s, const GameData& data) const override {
    double v = 0.0;
    for (PlayerId i : s.members()) {
      if (!data[i].empty()) v += data[i].labels.mean();
    }
    return v;
  }
};

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("probshap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// UCI-formatted white-wine lookalike with `rows` random rows. Alcohol is
// rounded to one decimal so decile ties occur, as in the real file.
inline void write_wine_fixture(const std::filesystem::path& path, int rows, std::uint64_t seed) {
  std::ofstream out(path);
  out << "\"fixed acidity\";\"volatile acidity\";\"citric acid\";\"residual sugar\";"
         "\"chlorides\";\"free sulfur dioxide\";\"total sulfur dioxide\";\"density\";"
         "\"pH\";\"sulphates\";\"alcohol\";\"quality\"\n";
  Stream rng(seed, Purpose::generic);
  for (int r = 0; r < rows; ++r) {
    const double alcohol = std::round(rng.uniform(8.0, 14.2) * 10.0) / 10.0;
    out << rng.uniform(4, 10) << ';' << rng.uniform(0.1, 1.0) << ';' << rng.uniform(0, 1) << ';'
        << rng.uniform(0.6, 20) << ';' << rng.uniform(0.01, 0.3) << ';' << rng.uniform(2, 100)
        << ';' << rng.uniform(9, 300) << ';' << rng.uniform(0.987, 1.01) << ';'
        << rng.uniform(2.7, 3.8) << ';' << rng.uniform(0.2, 1.1) << ';' << alcohol << ';'
        << 3 + static_cast<int>(rng.below(7)) << '\n';
  }
}

}  // namespace probshap::testing
