#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "probshap/error.hpp"
#include "probshap/rng.hpp"

namespace probshap {

// Index of a player in [0, n).
using PlayerId = int;

// Shapley values, one entry per player.
using ShapleyVector = Eigen::VectorXd;

// A subset of the n players of a game.
class Coalition {
 public:
  explicit Coalition(int player_count = 0)
      : members_(static_cast<std::size_t>(player_count), false) {}

  static Coalition from_mask(int player_count, std::uint64_t mask);
  static Coalition grand(int player_count);

  int player_count() const { return static_cast<int>(members_.size()); }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(PlayerId i) const { return members_.at(static_cast<std::size_t>(i)); }

  void insert(PlayerId i);
  void erase(PlayerId i);

  // Members in ascending order.
  std::vector<PlayerId> members() const;
  std::string to_string() const;

  bool operator==(const Coalition&) const = default;

 private:
  std::vector<bool> members_;
  int size_ = 0;
};

// Samples owned by one player: one row of `features` per sample.
struct PlayerSamples {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;

  Eigen::Index size() const { return labels.size(); }
  Eigen::Index dim() const { return features.cols(); }
  bool empty() const { return labels.size() == 0; }
};

// Concatenation of sample sets in the given order.
PlayerSamples concat(std::span<const PlayerSamples* const> parts);

// The frozen per-player samples of one game.
class GameData {
 public:
  GameData() = default;
  explicit GameData(std::vector<PlayerSamples> per_player)
      : per_player_(std::move(per_player)) {}

  int player_count() const { return static_cast<int>(per_player_.size()); }
  const PlayerSamples& operator[](PlayerId i) const {
    return per_player_.at(static_cast<std::size_t>(i));
  }
  const std::vector<PlayerSamples>& players() const { return per_player_; }

  // Union of the members' samples, ordered by ascending player id and then
  // by sample index within each player.
  PlayerSamples gather(const Coalition& coalition) const;

 private:
  std::vector<PlayerSamples> per_player_;
};

// Failure while evaluating a coalition utility.
class UtilityError : public NumericError {
 public:
  UtilityError(const std::string& what, Coalition coalition)
      : NumericError(what + " [coalition " + coalition.to_string() + "]"),
        detail_(what),
        coalition_(std::move(coalition)) {}

  const Coalition& coalition() const { return coalition_; }
  const std::string& detail() const { return detail_; }

  // Same failure with a location prefix such as "game 3, iteration 7".
  UtilityError with_context(const std::string& where) const {
    return UtilityError(where + ": " + detail_, coalition_);
  }

 private:
  std::string detail_;
  Coalition coalition_;
};

// Incremental evaluator of a utility along a growing coalition. Bound to one
// GameData, which must outlive it.
class PrefixWalk {
 public:
  virtual ~PrefixWalk() = default;

  // Resets to the empty coalition and returns v(∅).
  virtual double reset() = 0;
  // Adds player i to the current coalition and returns its utility.
  virtual double add(PlayerId i) = 0;
  // The current coalition.
  virtual const Coalition& coalition() const = 0;
};

// Coalition utility v(S | D_S). Implementations must be deterministic and
// thread-safe for concurrent const calls.
class Utility {
 public:
  virtual ~Utility() = default;

  virtual double evaluate(const Coalition& coalition, const GameData& data) const = 0;

  // Default walk re-evaluates each prefix from scratch.
  virtual std::unique_ptr<PrefixWalk> walk(const GameData& data) const;
};

// Utility given by a callable on coalitions; the game data is ignored.
class FunctionUtility final : public Utility {
 public:
  using Fn = std::function<double(const Coalition&)>;
  explicit FunctionUtility(Fn fn) : fn_(std::move(fn)) {}

  double evaluate(const Coalition& coalition, const GameData&) const override {
    return fn_(coalition);
  }

 private:
  Fn fn_;
};

// u(S) = sum of every label held by the members of S.
class AdditiveUtility final : public Utility {
 public:
  double evaluate(const Coalition& coalition, const GameData& data) const override;
  std::unique_ptr<PrefixWalk> walk(const GameData& data) const override;
};

// Marginal contributions along one permutation, using n + 1 evaluations
// (v(∅) followed by every prefix). Result is indexed by player id.
Eigen::VectorXd marginal_contributions_along(std::span<const PlayerId> order,
                                             PrefixWalk& walk);
Eigen::VectorXd marginal_contributions_along(std::span<const PlayerId> order,
                                             const Utility& utility,
                                             const GameData& data);

inline constexpr int kDefaultExactCap = 12;

enum class ExactMethod {
  subset,       // weighted sum over coalitions
  permutation,  // average over all n! orderings
};

// Exact Shapley values; throws ConfigError when n exceeds `max_players`.
ShapleyVector exact_shapley(const Utility& utility, const GameData& data,
                            ExactMethod method = ExactMethod::subset,
                            int max_players = kDefaultExactCap);

// Weight |S|!(n-|S|-1)!/n! of a coalition of size s in an n-player game.
double shapley_weight(int n, int s);

// Monte Carlo Shapley values from k sampled permutations.
ShapleyVector mc_shapley(const Utility& utility, const GameData& data, int k,
                         Stream& rng);

// A game with no data: n players each holding an empty sample set.
GameData empty_game(int player_count);

}  // namespace probshap
