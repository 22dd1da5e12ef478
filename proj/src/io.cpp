#include "probshap/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace probshap {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

nlohmann::ordered_json vector_json(const Eigen::VectorXd& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  const ExperimentConfig c = config.resolved();
  nlohmann::ordered_json j;
  j["dataset"] = dataset_name(c.dataset);
  j["method"] = method_name(c.method);
  if (c.method == Method::baseline) {
    j["n_sample"] = c.n_sample;
  } else {
    j["n_pool"] = c.n_pool;
    j["n_boot"] = c.n_boot;
    j["fresh_pools"] = c.fresh_pools;
  }
  if (c.method == Method::stratified) j["alpha"] = c.alpha;
  j["n_games"] = c.n_games;
  j["n_iter"] = c.n_iter;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  if (c.dataset == DatasetKind::wine) {
    j["wine_csv"] = c.wine_csv;
    j["split_seed"] = c.split_seed;
  } else {
    j["validation_points"] = c.validation_points;
  }
  return j;
}

nlohmann::ordered_json run_to_json(const RunResult& run) {
  nlohmann::ordered_json j;
  j["method"] = method_name(run.method);
  j["seed"] = run.seed;
  j["n_games"] = run.n_games();
  j["n_players"] = run.n_players();
  j["draw_count"] = run.draw_count;
  j["overall_mean"] = vector_json(run.overall_mean);
  j["across_game_variance"] = vector_json(run.across_game_variance);
  if (!run.pool_sizes.empty()) j["pool_sizes"] = run.pool_sizes;
  if (run.method == Method::stratified) {
    j["variance_scores"] = vector_json(run.variance_scores);
    j["allocation"] = run.allocation;
    long long total = 0;
    for (int a : run.allocation) total += a;
    j["allocation_total"] = total;
  }
  if (!run.warnings.empty()) j["warnings"] = run.warnings;
  return j;
}

nlohmann::ordered_json metrics_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["replications"] = report.replications;
  j["seeds"] = report.seeds;
  j["var_of_mean"] = vector_json(report.var_of_mean);
  j["var_of_var"] = vector_json(report.var_of_var);
  j["avg_var_of_mean"] = report.avg_var_of_mean;
  j["avg_var_of_var"] = report.avg_var_of_var;
  return j;
}

nlohmann::ordered_json provenance(const nlohmann::ordered_json& config, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config"] = config;
  j["master_seed"] = seed;
  return j;
}

void write_per_game_csv(std::ostream& out, const RunResult& run,
                        const nlohmann::ordered_json& prov) {
  out << "# " << prov.dump() << '\n';
  out << "game";
  for (int i = 0; i < run.n_players(); ++i) out << ",player_" << i;
  out << '\n';
  for (int g = 0; g < run.n_games(); ++g) {
    out << g;
    for (int i = 0; i < run.n_players(); ++i) out << ',' << format_double(run.per_game_means(g, i));
    out << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace probshap
