#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "probshap/analytic.hpp"
#include "probshap/datasets.hpp"
#include "probshap/estimators.hpp"
#include "probshap/experiment.hpp"
#include "probshap/io.hpp"
#include "probshap/metrics.hpp"

namespace probshap::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string normalize_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  return key;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_reals(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "': cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

// Moves values from a --config file in front of the user's own flags so the
// flags win (options take the last value given).
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  std::vector<std::string> out{args[0], args[1]};
  for (const auto& [key, value] : parse_key_values(read_file(path))) {
    out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

void add_experiment_options(CLI::App* sub, ExperimentConfig& cfg, std::string& dataset,
                            std::string& method) {
  sub->add_option("--dataset", dataset, "synthetic or wine")->capture_default_str();
  sub->add_option("--method", method, "baseline, pooled or stratified")->capture_default_str();
  sub->add_option("--n-sample", cfg.n_sample, "baseline draws per player per game (0: default)");
  sub->add_option("--n-pool", cfg.n_pool, "pool size per player (0: default)");
  sub->add_option("--n-boot", cfg.n_boot, "bootstrap size per game (0: default)");
  sub->add_option("--alpha", cfg.alpha, "stratified allocation upper fraction")->capture_default_str();
  sub->add_option("--replications", cfg.replications, "independent replications R")
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  sub->add_option("--csv", cfg.wine_csv, "winequality-white.csv path");
  sub->add_flag("--fresh-pools{true}", cfg.fresh_pools,
                "rebuild pools in every replication instead of sharing one set");
  sub->add_option("--split-seed", cfg.split_seed, "wine shuffle seed")->capture_default_str();
  sub->add_option("--validation-points", cfg.validation_points, "synthetic validation grid size")
      ->capture_default_str();
}

void finalize(ExperimentConfig& cfg, const std::string& dataset, const std::string& method) {
  cfg.dataset = parse_dataset(dataset);
  cfg.method = parse_method(method);
  cfg = cfg.resolved();
  cfg.validate();
}

// --- gen ------------------------------------------------------------------------

void cmd_gen(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  json manifest = provenance(config_to_json(cfg), cfg.seed);
  if (cfg.dataset == DatasetKind::synthetic) {
    SyntheticSpec spec;
    spec.master_seed = cfg.seed;
    const auto players = make_synthetic_players(spec);
    const auto val = validation_grid(spec, cfg.validation_points);
    const auto pools = build_pools(players, cfg.n_pool, cfg.seed);

    std::ostringstream pcsv, vcsv, poolcsv;
    const std::string head = "# " + manifest.dump() + "\n";
    pcsv << head << "player_id,mu,sigma\n";
    json plist = json::array();
    for (std::size_t i = 0; i < players.size(); ++i) {
      const auto* g = players[i].as_gaussian();
      pcsv << i << ',' << format_double(g->mu) << ',' << format_double(g->sigma) << '\n';
      plist.push_back({{"id", i}, {"mu", g->mu}, {"sigma", g->sigma}});
    }
    vcsv << head << "x,y\n";
    for (Eigen::Index k = 0; k < val.size(); ++k) {
      vcsv << format_double(val.features(k, 0)) << ',' << format_double(val.labels[k]) << '\n';
    }
    poolcsv << head << "player_id,x,y\n";
    for (std::size_t i = 0; i < pools.size(); ++i) {
      const auto& s = pools[i].samples;
      for (Eigen::Index k = 0; k < s.size(); ++k) {
        poolcsv << i << ',' << format_double(s.features(k, 0)) << ','
                << format_double(s.labels[k]) << '\n';
      }
    }
    manifest["players"] = plist;
    manifest["files"] = {"players.csv", "validation.csv", "pools.csv"};
    write_file(dir / "players.csv", pcsv.str());
    write_file(dir / "validation.csv", vcsv.str());
    write_file(dir / "pools.csv", poolcsv.str());
  } else {
    const WineTable table = load_wine(cfg.wine_csv);
    const WineSplit split = split_and_partition(table, cfg.split_seed);
    std::ostringstream parts;
    parts << "# " << manifest.dump() << "\n" << "player_id,row\n";
    json plist = json::array();
    for (std::size_t i = 0; i < split.players.size(); ++i) {
      const auto& rows = split.players[i].as_partition()->rows;
      for (Eigen::Index r : rows) parts << i << ',' << r << '\n';
      plist.push_back({{"id", i}, {"size", rows.size()}});
    }
    manifest["rows"] = table.rows();
    manifest["train_size"] = split.train_rows.size();
    manifest["validation_size"] = split.validation.size();
    manifest["alcohol_deciles"] = split.deciles;
    manifest["players"] = plist;
    manifest["files"] = {"partitions.csv"};
    write_file(dir / "partitions.csv", parts.str());
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << (dir / "manifest.json").string() << '\n';
}

// --- run --------------------------------------------------------------------------

void cmd_run(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out,
             std::ostream& err) {
  const json cfg_json = config_to_json(cfg);
  const ExperimentSetup setup = prepare_experiment(cfg);
  json summary = provenance(cfg_json, cfg.seed);
  if (!setup.partition_sizes.empty()) summary["partition_sizes"] = setup.partition_sizes;
  json reps = json::array();
  std::vector<RunResult> runs;
  for (int r = 0; r < cfg.replications; ++r) {
    RunResult run = run_replication(cfg, setup, r);
    for (const auto& w : run.warnings) err << "warning: " << w << '\n';
    std::ostringstream csv;
    write_per_game_csv(csv, run, provenance(cfg_json, run.seed));
    const std::string name = "run_r" + std::to_string(r) + ".csv";
    write_file(dir / name, csv.str());
    json rj = run_to_json(run);
    rj["replication"] = r;
    rj["file"] = name;
    reps.push_back(rj);
    runs.push_back(std::move(run));
  }
  summary["draw_count"] = runs.front().draw_count;
  summary["replications"] = reps;
  if (runs.size() >= 2) summary["metrics"] = metrics_to_json(cross_replication_report(runs));
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  out << "wrote " << runs.size() << " replication(s) to " << dir.string() << '\n';
}

// --- sweep ------------------------------------------------------------------------

void cmd_sweep(ExperimentConfig cfg, const std::vector<int>& games, const std::vector<int>& iters,
               const fs::path& dir, std::ostream& out, std::ostream& err) {
  if (games.empty() || iters.empty()) {
    throw ConfigError("sweep needs a nonempty --games and --iters grid");
  }
  if (cfg.replications < 2) throw ConfigError("sweep needs --replications >= 2");
  const ExperimentSetup setup = prepare_experiment(cfg);
  json base = config_to_json(cfg);
  base["games"] = games;
  base["iters"] = iters;
  const json prov = provenance(base, cfg.seed);
  const std::string head = "# " + prov.dump() + "\n";

  struct Cell {
    bool ok = false;
    MetricsReport report;
    std::string error;
  };
  std::map<std::pair<int, int>, Cell> cells;
  for (int g : games) {
    for (int t : iters) {
      Cell cell;
      try {
        ExperimentConfig c = cfg;
        c.n_games = g;
        c.n_iter = t;
        c.validate();
        cell.report = cross_replication_report(run_replications(c, setup));
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
        err << "sweep cell n_games=" << g << " n_iter=" << t << " failed: " << e.what() << '\n';
      }
      cells[{g, t}] = std::move(cell);
    }
  }

  auto table = [&](bool of_mean) {
    std::ostringstream s;
    s << head << "n_games";
    for (int t : iters) s << ",n_iter=" << t;
    s << '\n';
    for (int g : games) {
      s << g;
      for (int t : iters) {
        const Cell& c = cells.at({g, t});
        s << ',';
        if (!c.ok) {
          s << "NA";
        } else {
          s << format_double(of_mean ? c.report.avg_var_of_mean : c.report.avg_var_of_var);
        }
      }
      s << '\n';
    }
    return s.str();
  };

  std::ostringstream lng;
  lng << head << "n_games,n_iter,status,avg_var_of_mean,avg_var_of_var\n";
  json jcells = json::array();
  for (int g : games) {
    for (int t : iters) {
      const Cell& c = cells.at({g, t});
      lng << g << ',' << t << ',' << (c.ok ? "ok" : "error") << ','
          << (c.ok ? format_double(c.report.avg_var_of_mean) : "NA") << ','
          << (c.ok ? format_double(c.report.avg_var_of_var) : "NA") << '\n';
      json jc = {{"n_games", g}, {"n_iter", t}, {"status", c.ok ? "ok" : "error"}};
      if (c.ok) {
        jc["metrics"] = metrics_to_json(c.report);
      } else {
        jc["error"] = c.error;
      }
      jcells.push_back(jc);
    }
  }
  json summary = prov;
  summary["cells"] = jcells;
  write_file(dir / "sweep_var_of_mean.csv", table(true));
  write_file(dir / "sweep_var_of_var.csv", table(false));
  write_file(dir / "sweep_long.csv", lng.str());
  write_file(dir / "sweep.json", summary.dump(2) + "\n");
  out << "wrote sweep of " << games.size() * iters.size() << " cell(s) to " << dir.string()
      << '\n';
}

// --- oracle -----------------------------------------------------------------------

json cmd_oracle(const fs::path& spec_path, int m_override) {
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : parse_key_values(read_file(spec_path))) kv[k] = v;
  auto get = [&](const std::string& key) -> std::string {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("oracle spec: missing key '" + key + "'");
    return it->second;
  };
  const std::string game = kv.count("game") ? kv["game"] : "additive";
  int m = 100;
  if (kv.count("m")) {
    try {
      m = std::stoi(kv["m"]);
    } catch (const std::exception&) {
      throw ConfigError("oracle spec: 'm' must be an integer");
    }
  }
  if (m_override > 0) m = m_override;
  if (m < 2) throw ConfigError("oracle spec: m must be >= 2");

  const auto mu = parse_reals("mu", get("mu"));
  const auto sigma = parse_reals("sigma", get("sigma"));
  if (mu.size() != sigma.size()) throw ConfigError("oracle spec: mu and sigma differ in length");

  Eigen::VectorXd expected, variance;
  if (game == "additive") {
    analytic::AdditiveGaussianGameSpec spec;
    for (std::size_t k = 0; k < mu.size(); ++k) spec.players.push_back({mu[k], sigma[k]});
    expected = analytic::expected_shapley_additive(spec);
    variance = analytic::variance_shapley_additive(spec);
  } else if (game == "mixture") {
    const auto w = parse_reals("w", get("w"));
    if (w.size() != mu.size()) throw ConfigError("oracle spec: w and mu differ in length");
    analytic::MixtureGameSpec spec;
    for (std::size_t k = 0; k < mu.size(); ++k) spec.components.push_back({w[k], mu[k], sigma[k]});
    expected = analytic::expected_shapley_mixture(spec);
    variance = analytic::variance_shapley_mixture(spec);
  } else {
    throw ConfigError("oracle spec: game must be 'additive' or 'mixture'");
  }

  json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["game"] = game;
  j["m"] = m;
  json e = json::array(), v = json::array(), vm = json::array(), vv = json::array();
  for (Eigen::Index i = 0; i < expected.size(); ++i) {
    e.push_back(expected[i]);
    v.push_back(variance[i]);
    vm.push_back(analytic::estimator_mean_variance(variance[i], m));
    vv.push_back(analytic::variance_of_sample_variance(analytic::gaussian_moments(variance[i], m)));
  }
  j["expected"] = e;
  j["variance"] = v;
  j["estimator_mean_variance"] = vm;
  j["variance_of_sample_variance"] = vv;
  return j;
}

// --- report -----------------------------------------------------------------------

void cmd_report(const fs::path& input, const std::string& plot_path, std::ostream& out) {
  std::istringstream in(read_file(input));
  std::string line;
  bool header_seen = false;
  struct Row {
    int g, t;
    std::string status, mean, var;
  };
  std::vector<Row> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (strip(line) != "n_games,n_iter,status,avg_var_of_mean,avg_var_of_var") {
        throw ParseError("report: '" + input.string() + "' is not a sweep_long.csv file");
      }
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(strip(cell));
    if (f.size() != 5) throw ParseError("report: line " + std::to_string(line_no) + " malformed");
    try {
      rows.push_back({std::stoi(f[0]), std::stoi(f[1]), f[2], f[3], f[4]});
    } catch (const std::exception&) {
      throw ParseError("report: line " + std::to_string(line_no) + " malformed");
    }
  }
  if (!header_seen) throw ParseError("report: missing header in '" + input.string() + "'");

  std::vector<int> games, iters;
  for (const auto& r : rows) {
    if (std::find(games.begin(), games.end(), r.g) == games.end()) games.push_back(r.g);
    if (std::find(iters.begin(), iters.end(), r.t) == iters.end()) iters.push_back(r.t);
  }
  auto lookup = [&](int g, int t, bool mean) -> std::string {
    for (const auto& r : rows) {
      if (r.g == g && r.t == t) {
        if (r.status != "ok") return "NA";
        std::ostringstream s;
        s << std::scientific << std::setprecision(2) << std::stod(mean ? r.mean : r.var);
        return s.str();
      }
    }
    return "-";
  };
  for (bool mean : {true, false}) {
    out << (mean ? "Average variance of the mean estimate"
                 : "Average variance of the variance estimate")
        << '\n';
    out << std::setw(8) << "n_games";
    for (int t : iters) out << std::setw(14) << ("n_iter=" + std::to_string(t));
    out << '\n';
    for (int g : games) {
      out << std::setw(8) << g;
      for (int t : iters) out << std::setw(14) << lookup(g, t, mean);
      out << '\n';
    }
    out << '\n';
  }
  if (!plot_path.empty()) {
    std::ostringstream p;
    p << "# n_games n_iter avg_var_of_mean avg_var_of_var\n";
    for (const auto& r : rows) {
      if (r.status != "ok") continue;
      p << r.g << ' ' << r.t << ' ' << r.mean << ' ' << r.var << '\n';
    }
    write_file(plot_path, p.str());
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    out.emplace_back(normalize_key(key), value);
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expectation and variance of Shapley values under random player data",
               "probshap"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  ExperimentConfig cfg;
  std::string dataset = "synthetic", method = "baseline", out_dir = "out", config_path;
  std::vector<int> games, iters;
  std::string spec_path, oracle_out, report_in, plot_path;
  int oracle_m = 0;

  auto* gen = app.add_subcommand("gen", "Generate player data and manifests");
  auto* run_cmd = app.add_subcommand("run", "Run one estimator for R replications");
  auto* sweep = app.add_subcommand("sweep", "Run a grid of (n_games, n_iter) cells");
  auto* oracle = app.add_subcommand("oracle", "Closed-form oracle values for Gaussian games");
  auto* report = app.add_subcommand("report", "Render a sweep as a readable table");

  for (auto* sub : {gen, run_cmd, sweep}) {
    add_experiment_options(sub, cfg, dataset, method);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--config", config_path, "key = value config file; flags override it");
  }
  for (auto* sub : {run_cmd}) {
    sub->add_option("--games", cfg.n_games, "games per replication")->capture_default_str();
    sub->add_option("--iters", cfg.n_iter, "permutations per game")->capture_default_str();
  }
  sweep->add_option("--games", games, "comma-separated n_games values")->delimiter(',');
  sweep->add_option("--iters", iters, "comma-separated n_iter values")->delimiter(',');
  gen->add_option("--games", cfg.n_games, "unused by gen");
  gen->add_option("--iters", cfg.n_iter, "unused by gen");

  oracle->add_option("--spec", spec_path, "oracle spec file")->required();
  oracle->add_option("--m", oracle_m, "number of games m (overrides the file)");
  oracle->add_option("--out", oracle_out, "also write the JSON report here");
  oracle->add_option("--config", config_path, "ignored");

  report->add_option("--input", report_in, "sweep_long.csv produced by sweep")->required();
  report->add_option("--plot-data", plot_path, "write whitespace-separated plot data here");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);

    if (gen->parsed()) {
      finalize(cfg, dataset, method);
      cmd_gen(cfg, out_dir, out);
    } else if (run_cmd->parsed()) {
      finalize(cfg, dataset, method);
      cmd_run(cfg, out_dir, out, err);
    } else if (sweep->parsed()) {
      if (games.empty() || iters.empty()) {
        throw ConfigError("sweep needs a nonempty --games and --iters grid");
      }
      cfg.n_games = *std::min_element(games.begin(), games.end());
      cfg.n_iter = *std::min_element(iters.begin(), iters.end());
      finalize(cfg, dataset, method);
      cmd_sweep(cfg, games, iters, out_dir, out, err);
    } else if (oracle->parsed()) {
      const json j = cmd_oracle(spec_path, oracle_m);
      out << j.dump(2) << '\n';
      if (!oracle_out.empty()) write_file(oracle_out, j.dump(2) + "\n");
    } else if (report->parsed()) {
      cmd_report(report_in, plot_path, out);
    }
    return kOk;
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace probshap::cli
