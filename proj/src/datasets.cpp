#include "probshap/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace probshap {

void SyntheticSpec::validate() const {
  if (n_players < 1) throw ConfigError("synthetic spec: n_players must be >= 1");
  if (!(sigma_range.first >= 0.0) || sigma_range.second < sigma_range.first) {
    throw ConfigError("synthetic spec: invalid sigma range");
  }
  if (mu_range.second < mu_range.first) throw ConfigError("synthetic spec: invalid mu range");
  if (!(clip.first < clip.second)) throw ConfigError("synthetic spec: invalid clip range");
}

double truth_function(const SyntheticSpec& spec, double x) {
  const auto& c = spec.poly_coeffs;
  const double poly = c[0] + c[1] * x + c[2] * x * x;
  return poly +
         spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency * x + spec.phase) +
         spec.offset;
}

PlayerDistribution PlayerDistribution::gaussian_curve(GaussianCurveSource source) {
  if (!(source.sigma >= 0.0)) throw ConfigError("gaussian player: sigma must be >= 0");
  if (!(source.clip.first <= source.clip.second)) throw ConfigError("gaussian player: bad clip");
  if (!source.truth) source.truth = [](double x) { return x; };
  return PlayerDistribution(std::move(source));
}

PlayerDistribution PlayerDistribution::partition(PartitionSource source) {
  if (!source.table) throw ConfigError("partition player: missing table");
  for (Eigen::Index r : source.rows) {
    if (r < 0 || r >= source.table->rows()) throw ConfigError("partition player: row out of range");
  }
  return PlayerDistribution(std::move(source));
}

PlayerDistribution::Kind PlayerDistribution::kind() const {
  return std::holds_alternative<GaussianCurveSource>(source_) ? Kind::gaussian_curve
                                                               : Kind::partition;
}

std::optional<Eigen::Index> PlayerDistribution::population() const {
  if (const auto* p = as_partition()) return static_cast<Eigen::Index>(p->rows.size());
  return std::nullopt;
}

Eigen::Index PlayerDistribution::dim() const {
  if (const auto* p = as_partition()) return p->table->features.cols();
  return 1;
}

PlayerSamples PlayerDistribution::draw(Eigen::Index count, Stream& rng) const {
  if (count < 0) throw ConfigError("draw: negative count");
  PlayerSamples out;
  if (const auto* g = as_gaussian()) {
    out.features.resize(count, 1);
    out.labels.resize(count);
    for (Eigen::Index k = 0; k < count; ++k) {
      const double x = std::clamp(rng.normal(g->mu, g->sigma), g->clip.first, g->clip.second);
      out.features(k, 0) = x;
      out.labels[k] = g->truth(x);
    }
    return out;
  }
  const auto& p = *as_partition();
  const auto size = static_cast<Eigen::Index>(p.rows.size());
  std::vector<Eigen::Index> chosen = p.rows;
  if (count < size) {
    // Partial Fisher-Yates: the first `count` slots become a uniform draw
    // without replacement.
    for (Eigen::Index k = 0; k < count; ++k) {
      const auto j = k + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(size - k)));
      std::swap(chosen[static_cast<std::size_t>(k)], chosen[static_cast<std::size_t>(j)]);
    }
    chosen.resize(static_cast<std::size_t>(count));
  }
  const auto m = static_cast<Eigen::Index>(chosen.size());
  out.features.resize(m, p.table->features.cols());
  out.labels.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index r = chosen[static_cast<std::size_t>(k)];
    out.features.row(k) = p.table->features.row(r);
    out.labels[k] = p.table->labels[r];
  }
  return out;
}

std::vector<PlayerDistribution> make_synthetic_players(const SyntheticSpec& spec) {
  spec.validate();
  const int n = spec.n_players;
  const auto [lo, hi] = spec.mu_range;
  Stream rng = derive_stream(spec.master_seed, Purpose::player_setup);
  auto truth = [spec](double x) { return truth_function(spec, x); };

  std::vector<PlayerDistribution> players;
  players.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double mu = n == 1 ? 0.5 * (lo + hi) : lo + i * (hi - lo) / (n - 1);
    const double sigma = rng.uniform(spec.sigma_range.first, spec.sigma_range.second);
    players.push_back(PlayerDistribution::gaussian_curve({mu, sigma, spec.clip, truth}));
  }
  return players;
}

ValidationSet validation_grid(const SyntheticSpec& spec, int count) {
  if (count < 2) throw ConfigError("validation_grid: count must be >= 2");
  const auto [lo, hi] = spec.clip;
  ValidationSet val;
  val.features.resize(count, 1);
  val.labels.resize(count);
  for (int k = 0; k < count; ++k) {
    const double x = k == count - 1 ? hi : lo + k * (hi - lo) / (count - 1);
    val.features(k, 0) = x;
    val.labels[k] = truth_function(spec, x);
  }
  return val;
}

// --- wine ---------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string_view rest(line);
  while (true) {
    const auto pos = rest.find(sep);
    out.push_back(trim(rest.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError("wine csv: row " + std::to_string(row) + ", column " +
                     std::to_string(col + 1) + " (" + column + "): cannot parse '" + cell +
                     "' as a number");
  }
  return value;
}

}  // namespace

WineTable load_wine(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("wine csv: cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw SchemaError("wine csv: missing header row");
  const auto header = split_fields(line, ';');
  const std::size_t expected = kWineFeatureNames.size() + 1;
  bool ok = header.size() == expected;
  for (std::size_t c = 0; ok && c < kWineFeatureNames.size(); ++c) {
    ok = header[c] == kWineFeatureNames[c];
  }
  ok = ok && header.back() == kWineLabelName;
  if (!ok) {
    throw SchemaError("wine csv: header does not match the UCI white-wine schema "
                      "(11 semicolon-separated features followed by quality)");
  }

  std::vector<std::array<double, 12>> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, ';');
    if (fields.size() != expected) {
      throw ParseError("wine csv: row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(expected));
    }
    std::array<double, 12> values{};
    for (std::size_t c = 0; c < expected; ++c) values[c] = parse_cell(fields[c], row, c, header[c]);
    if (values[11] < 0.0 || values[11] > 10.0) {
      throw ParseError("wine csv: row " + std::to_string(row) + ": quality " +
                       fields[11] + " outside the 0-10 scale");
    }
    rows.push_back(values);
  }
  if (in.bad()) throw IoError("wine csv: read failure on '" + path.string() + "'");
  if (rows.empty()) throw ParseError("wine csv: no data rows");

  WineTable table;
  const auto n = static_cast<Eigen::Index>(rows.size());
  table.features.resize(n, 11);
  table.labels.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& v = rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < 11; ++c) table.features(r, c) = v[static_cast<std::size_t>(c)];
    table.labels[r] = v[11];
  }
  table.feature_names.assign(kWineFeatureNames.begin(), kWineFeatureNames.end());
  table.label_name = kWineLabelName;
  return table;
}

Eigen::Index train_size(Eigen::Index rows, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  return static_cast<Eigen::Index>(std::floor(train_frac * static_cast<double>(rows) + 0.5));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

WineSplit split_and_partition(const WineTable& table, std::uint64_t seed, double train_frac) {
  if (table.features.cols() <= kAlcoholColumn) {
    throw ConfigError("split_and_partition: table has no alcohol column");
  }
  const Eigen::Index n = table.rows();
  const Eigen::Index n_train = train_size(n, train_frac);
  if (n_train < 1 || n_train >= n) throw ConfigError("split_and_partition: table too small");

  WineSplit split;
  split.table = std::make_shared<const WineTable>(table);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Stream rng = derive_stream(seed, Purpose::shuffle);
  shuffle(std::span<Eigen::Index>(order), rng);

  split.train_rows.assign(order.begin(), order.begin() + n_train);
  const Eigen::Index n_val = n - n_train;
  split.validation.features.resize(n_val, table.features.cols());
  split.validation.labels.resize(n_val);
  for (Eigen::Index k = 0; k < n_val; ++k) {
    const Eigen::Index r = order[static_cast<std::size_t>(n_train + k)];
    split.validation.features.row(k) = table.features.row(r);
    split.validation.labels[k] = table.labels[r];
  }

  std::vector<double> alcohol;
  alcohol.reserve(split.train_rows.size());
  for (Eigen::Index r : split.train_rows) alcohol.push_back(table.features(r, kAlcoholColumn));
  std::sort(alcohol.begin(), alcohol.end());
  for (std::size_t k = 0; k < split.deciles.size(); ++k) {
    split.deciles[k] = quantile_sorted(alcohol, static_cast<double>(k) / 10.0);
  }

  // Bin i is [q_i, q_{i+1}); the last bin also takes q_10. A value equal to
  // a repeated boundary lands in the highest bin whose lower edge it reaches.
  std::array<std::vector<Eigen::Index>, 10> bins;
  for (Eigen::Index r : split.train_rows) {
    const double a = table.features(r, kAlcoholColumn);
    const auto upper = std::upper_bound(split.deciles.begin() + 1, split.deciles.begin() + 10, a);
    const auto bin = static_cast<std::size_t>(upper - (split.deciles.begin() + 1));
    bins[bin].push_back(r);
  }
  for (auto& rows : bins) {
    split.players.push_back(PlayerDistribution::partition({split.table, std::move(rows)}));
  }
  return split;
}

}  // namespace probshap
