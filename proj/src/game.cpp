#include "probshap/game.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace probshap {

Coalition Coalition::from_mask(int player_count, std::uint64_t mask) {
  if (player_count > 64) throw ConfigError("Coalition::from_mask supports at most 64 players");
  Coalition c(player_count);
  for (int i = 0; i < player_count; ++i) {
    if (mask >> i & 1U) c.insert(i);
  }
  return c;
}

Coalition Coalition::grand(int player_count) {
  Coalition c(player_count);
  for (int i = 0; i < player_count; ++i) c.insert(i);
  return c;
}

void Coalition::insert(PlayerId i) {
  auto ref = members_.at(static_cast<std::size_t>(i));
  if (!ref) {
    ref = true;
    ++size_;
  }
}

void Coalition::erase(PlayerId i) {
  auto ref = members_.at(static_cast<std::size_t>(i));
  if (ref) {
    ref = false;
    --size_;
  }
}

std::vector<PlayerId> Coalition::members() const {
  std::vector<PlayerId> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (int i = 0; i < player_count(); ++i) {
    if (members_[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

std::string Coalition::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (PlayerId i : members()) {
    if (!first) os << ',';
    os << i;
    first = false;
  }
  os << '}';
  return os.str();
}

PlayerSamples concat(std::span<const PlayerSamples* const> parts) {
  Eigen::Index rows = 0;
  Eigen::Index dim = -1;
  for (const auto* p : parts) {
    if (p->empty()) continue;
    if (dim >= 0 && p->dim() != dim) {
      throw ConfigError("concat: inconsistent feature dimension across players");
    }
    dim = p->dim();
    rows += p->size();
  }
  PlayerSamples out;
  out.features.resize(rows, std::max<Eigen::Index>(dim, 0));
  out.labels.resize(rows);
  Eigen::Index at = 0;
  for (const auto* p : parts) {
    if (p->empty()) continue;
    out.features.middleRows(at, p->size()) = p->features;
    out.labels.segment(at, p->size()) = p->labels;
    at += p->size();
  }
  return out;
}

PlayerSamples GameData::gather(const Coalition& coalition) const {
  std::vector<const PlayerSamples*> parts;
  for (PlayerId i : coalition.members()) parts.push_back(&(*this)[i]);
  return concat(parts);
}

namespace {

class GenericWalk final : public PrefixWalk {
 public:
  GenericWalk(const Utility& utility, const GameData& data)
      : utility_(utility), data_(data), current_(data.player_count()) {}

  double reset() override {
    current_ = Coalition(data_.player_count());
    return utility_.evaluate(current_, data_);
  }

  double add(PlayerId i) override {
    current_.insert(i);
    return utility_.evaluate(current_, data_);
  }

  const Coalition& coalition() const override { return current_; }

 private:
  const Utility& utility_;
  const GameData& data_;
  Coalition current_;
};

class AdditiveWalk final : public PrefixWalk {
 public:
  explicit AdditiveWalk(const GameData& data)
      : data_(data), current_(data.player_count()) {}

  double reset() override {
    current_ = Coalition(data_.player_count());
    total_ = 0.0;
    return total_;
  }

  double add(PlayerId i) override {
    if (!current_.contains(i)) total_ += data_[i].labels.sum();
    current_.insert(i);
    return total_;
  }

  const Coalition& coalition() const override { return current_; }

 private:
  const GameData& data_;
  Coalition current_;
  double total_ = 0.0;
};

}  // namespace

std::unique_ptr<PrefixWalk> Utility::walk(const GameData& data) const {
  return std::make_unique<GenericWalk>(*this, data);
}

double AdditiveUtility::evaluate(const Coalition& coalition, const GameData& data) const {
  double total = 0.0;
  for (PlayerId i : coalition.members()) total += data[i].labels.sum();
  return total;
}

std::unique_ptr<PrefixWalk> AdditiveUtility::walk(const GameData& data) const {
  return std::make_unique<AdditiveWalk>(data);
}

Eigen::VectorXd marginal_contributions_along(std::span<const PlayerId> order,
                                             PrefixWalk& walk) {
  const auto n = static_cast<Eigen::Index>(order.size());
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  double prev = 0.0;
  try {
    prev = walk.reset();
    for (PlayerId i : order) {
      const double curr = walk.add(i);
      delta[i] = curr - prev;
      prev = curr;
    }
  } catch (const UtilityError&) {
    throw;
  } catch (const std::exception& e) {
    throw UtilityError(e.what(), walk.coalition());
  }
  return delta;
}

Eigen::VectorXd marginal_contributions_along(std::span<const PlayerId> order,
                                             const Utility& utility,
                                             const GameData& data) {
  if (static_cast<int>(order.size()) != data.player_count()) {
    throw ConfigError("permutation length does not match the number of players");
  }
  auto walk = utility.walk(data);
  return marginal_contributions_along(order, *walk);
}

double shapley_weight(int n, int s) {
  // s!(n-s-1)!/n! = 1 / (n * C(n-1, s)), built up by incremental products.
  double w = 1.0 / n;
  for (int k = 1; k <= s; ++k) {
    w *= static_cast<double>(k) / static_cast<double>(n - k);
  }
  return w;
}

namespace {

ShapleyVector exact_by_subsets(const Utility& utility, const GameData& data) {
  const int n = data.player_count();
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> value(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const Coalition c = Coalition::from_mask(n, mask);
    try {
      value[mask] = utility.evaluate(c, data);
    } catch (const UtilityError&) {
      throw;
    } catch (const std::exception& e) {
      throw UtilityError(e.what(), c);
    }
  }
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) weight[static_cast<std::size_t>(s)] = shapley_weight(n, s);

  ShapleyVector phi = ShapleyVector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      const int s = std::popcount(mask);
      acc += weight[static_cast<std::size_t>(s)] * (value[mask | bit] - value[mask]);
    }
    phi[i] = acc;
  }
  return phi;
}

ShapleyVector exact_by_permutations(const Utility& utility, const GameData& data) {
  const int n = data.player_count();
  std::vector<PlayerId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto walk = utility.walk(data);
  ShapleyVector sum = ShapleyVector::Zero(n);
  std::uint64_t perms = 0;
  do {
    sum += marginal_contributions_along(order, *walk);
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  return sum / static_cast<double>(perms);
}

}  // namespace

ShapleyVector exact_shapley(const Utility& utility, const GameData& data,
                            ExactMethod method, int max_players) {
  const int n = data.player_count();
  if (n < 1) throw ConfigError("exact_shapley: game has no players");
  if (n > max_players || n > 62) {
    throw ConfigError("exact_shapley: " + std::to_string(n) +
                      " players exceeds the enumeration cap of " +
                      std::to_string(max_players));
  }
  return method == ExactMethod::subset ? exact_by_subsets(utility, data)
                                       : exact_by_permutations(utility, data);
}

ShapleyVector mc_shapley(const Utility& utility, const GameData& data, int k,
                         Stream& rng) {
  if (k < 1) throw ConfigError("mc_shapley: k must be >= 1");
  const int n = data.player_count();
  auto walk = utility.walk(data);
  ShapleyVector sum = ShapleyVector::Zero(n);
  for (int t = 0; t < k; ++t) {
    const auto order = sample_permutation(rng, n);
    sum += marginal_contributions_along(order, *walk);
  }
  return sum / static_cast<double>(k);
}

GameData empty_game(int player_count) {
  std::vector<PlayerSamples> players(static_cast<std::size_t>(player_count));
  return GameData(std::move(players));
}

}  // namespace probshap
