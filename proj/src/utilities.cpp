#include "probshap/utilities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace probshap {

double mse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw ConfigError("mse: length mismatch");
  if (predictions.empty()) throw ConfigError("mse: empty input");
  double sum = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const double e = predictions[k] - truths[k];
    sum += e * e;
  }
  return sum / static_cast<double>(predictions.size());
}

namespace {

void check_validation(const ValidationSet& val) {
  if (val.empty()) throw ConfigError("validation set must be nonempty");
}

void check_one_dimensional(const PlayerSamples& samples, const char* what) {
  if (!samples.empty() && samples.dim() != 1) {
    throw ConfigError(std::string(what) + ": nearest-neighbour utility needs 1-D features");
  }
}

// Candidate neighbour of a validation point, ordered by the tie rule.
struct Neighbor {
  double distance = std::numeric_limits<double>::infinity();
  double x = 0.0;
  int player = std::numeric_limits<int>::max();
  Eigen::Index index = 0;
  double label = 0.0;

  bool better_than(const Neighbor& o) const {
    if (distance != o.distance) return distance < o.distance;
    if (x != o.x) return x < o.x;
    if (player != o.player) return player < o.player;
    return index < o.index;
  }
};

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& features) {
  Eigen::MatrixXd design(features.rows(), features.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(features.cols()) = features;
  return design;
}

}  // namespace

double nn_utility(const PlayerSamples& coalition_data, const ValidationSet& val) {
  check_validation(val);
  if (val.dim() != 1) throw ConfigError("nn_utility: validation features must be 1-D");
  if (coalition_data.empty()) return 0.0;
  check_one_dimensional(coalition_data, "nn_utility");

  double sse = 0.0;
  for (Eigen::Index v = 0; v < val.size(); ++v) {
    const double xv = val.features(v, 0);
    Neighbor best;
    for (Eigen::Index j = 0; j < coalition_data.size(); ++j) {
      const double x = coalition_data.features(j, 0);
      const Neighbor cand{std::abs(x - xv), x, 0, j, coalition_data.labels[j]};
      if (cand.better_than(best)) best = cand;
    }
    const double e = best.label - val.labels[v];
    sse += e * e;
  }
  return inverse_mse(sse / static_cast<double>(val.size()));
}

Eigen::VectorXd ols_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kOlsRankTolerance);
  cod.compute(with_intercept(features));
  return cod.solve(labels);
}

double ols_utility(const PlayerSamples& coalition_data, const ValidationSet& val) {
  check_validation(val);
  if (coalition_data.size() < 2) return 0.0;
  if (coalition_data.dim() != val.dim()) {
    throw ConfigError("ols_utility: coalition and validation feature dimensions differ");
  }
  const Eigen::VectorXd beta = ols_fit(coalition_data.features, coalition_data.labels);
  const Eigen::VectorXd pred = with_intercept(val.features) * beta;
  const double err = mse(pred, val.labels);
  if (!std::isfinite(err)) throw NumericError("ols_utility: non-finite validation error");
  return inverse_mse(err);
}

Eigen::MatrixXd triangular_factor(const Eigen::MatrixXd& a) {
  const Eigen::Index cols = a.cols();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(cols, cols);
  if (a.rows() == 0) return t;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index rows = std::min(a.rows(), cols);
  t.topRows(rows) = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
  return t;
}

// --- nearest neighbour -----------------------------------------------------

NearestNeighborUtility::NearestNeighborUtility(ValidationSet val) : val_(std::move(val)) {
  check_validation(val_);
  if (val_.dim() != 1) throw ConfigError("nearest-neighbour validation features must be 1-D");
}

double NearestNeighborUtility::evaluate(const Coalition& coalition,
                                        const GameData& data) const {
  return nn_utility(data.gather(coalition), val_);
}

namespace {

class NearestNeighborWalk final : public PrefixWalk {
 public:
  NearestNeighborWalk(const ValidationSet& val, const GameData& data)
      : val_(val), current_(data.player_count()) {
    const auto nv = static_cast<std::size_t>(val.size());
    candidates_.resize(static_cast<std::size_t>(data.player_count()));
    for (int p = 0; p < data.player_count(); ++p) {
      const PlayerSamples& s = data[p];
      check_one_dimensional(s, "nearest-neighbour walk");
      auto& cand = candidates_[static_cast<std::size_t>(p)];
      if (s.empty()) continue;
      cand.resize(nv);

      // Sort by (x, index) so the first entry of a run of equal x values is
      // the earliest sample.
      std::vector<Eigen::Index> order(static_cast<std::size_t>(s.size()));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double xa = s.features(a, 0), xb = s.features(b, 0);
        return xa != xb ? xa < xb : a < b;
      });
      std::vector<double> xs(order.size());
      for (std::size_t k = 0; k < order.size(); ++k) xs[k] = s.features(order[k], 0);

      for (Eigen::Index v = 0; v < val.size(); ++v) {
        const double xv = val.features(v, 0);
        // First element with x >= xv, and the first element of the run of
        // the largest x < xv.
        const auto right = std::lower_bound(xs.begin(), xs.end(), xv) - xs.begin();
        Neighbor best;
        auto consider = [&](std::ptrdiff_t k) {
          const Eigen::Index j = order[static_cast<std::size_t>(k)];
          const double x = xs[static_cast<std::size_t>(k)];
          const Neighbor c{std::abs(x - xv), x, p, j, s.labels[j]};
          if (c.better_than(best)) best = c;
        };
        if (right < static_cast<std::ptrdiff_t>(xs.size())) consider(right);
        if (right > 0) {
          const double xl = xs[static_cast<std::size_t>(right - 1)];
          const auto first = std::lower_bound(xs.begin(), xs.begin() + right, xl) - xs.begin();
          consider(first);
        }
        cand[static_cast<std::size_t>(v)] = best;
      }
    }
    best_.resize(nv);
  }

  double reset() override {
    current_ = Coalition(current_.player_count());
    std::fill(best_.begin(), best_.end(), Neighbor{});
    return 0.0;
  }

  double add(PlayerId i) override {
    if (current_.contains(i)) return value_;
    current_.insert(i);
    const auto& cand = candidates_.at(static_cast<std::size_t>(i));
    if (!cand.empty()) {
      for (std::size_t v = 0; v < best_.size(); ++v) {
        if (cand[v].better_than(best_[v])) best_[v] = cand[v];
      }
    }
    if (!has_any()) {
      value_ = 0.0;
      return value_;
    }
    double sse = 0.0;
    for (std::size_t v = 0; v < best_.size(); ++v) {
      const double e = best_[v].label - val_.labels[static_cast<Eigen::Index>(v)];
      sse += e * e;
    }
    value_ = inverse_mse(sse / static_cast<double>(val_.size()));
    return value_;
  }

  const Coalition& coalition() const override { return current_; }

 private:
  bool has_any() const {
    return best_.front().distance != std::numeric_limits<double>::infinity();
  }

  const ValidationSet& val_;
  Coalition current_;
  std::vector<std::vector<Neighbor>> candidates_;
  std::vector<Neighbor> best_;
  double value_ = 0.0;
};

}  // namespace

std::unique_ptr<PrefixWalk> NearestNeighborUtility::walk(const GameData& data) const {
  return std::make_unique<NearestNeighborWalk>(val_, data);
}

// --- least squares ----------------------------------------------------------

OlsUtility::OlsUtility(ValidationSet val) : val_(std::move(val)) {
  check_validation(val_);
  Eigen::MatrixXd augmented(val_.size(), val_.dim() + 2);
  augmented.leftCols(val_.dim() + 1) = with_intercept(val_.features);
  augmented.col(val_.dim() + 1) = val_.labels;
  val_factor_ = triangular_factor(augmented);
}

double OlsUtility::evaluate(const Coalition& coalition, const GameData& data) const {
  return ols_utility(data.gather(coalition), val_);
}

namespace {

// Keeps T_S with [1 X_S | y_S]^T [1 X_S | y_S] = T_S^T T_S for the current
// prefix; adding a player stacks its own factor under T_S and re-triangulates.
class OlsWalk final : public PrefixWalk {
 public:
  OlsWalk(const Eigen::MatrixXd& val_factor, Eigen::Index val_rows, const GameData& data)
      : val_factor_(val_factor),
        val_rows_(static_cast<double>(val_rows)),
        width_(val_factor.cols()),
        current_(data.player_count()),
        factor_(Eigen::MatrixXd::Zero(width_, width_)),
        stacked_(2 * width_, width_),
        qr_(2 * width_, width_) {
    const Eigen::Index dim = width_ - 2;
    factors_.resize(static_cast<std::size_t>(data.player_count()));
    rows_.resize(static_cast<std::size_t>(data.player_count()), 0);
    for (int p = 0; p < data.player_count(); ++p) {
      const PlayerSamples& s = data[p];
      rows_[static_cast<std::size_t>(p)] = s.size();
      if (s.empty()) continue;
      if (s.dim() != dim) {
        throw ConfigError("ols walk: player feature dimension differs from validation set");
      }
      Eigen::MatrixXd augmented(s.size(), width_);
      augmented.col(0).setOnes();
      augmented.middleCols(1, dim) = s.features;
      augmented.col(width_ - 1) = s.labels;
      factors_[static_cast<std::size_t>(p)] = triangular_factor(augmented);
    }
    cod_.setThreshold(kOlsRankTolerance);
  }

  double reset() override {
    current_ = Coalition(current_.player_count());
    factor_.setZero();
    total_rows_ = 0;
    return 0.0;
  }

  double add(PlayerId i) override {
    if (current_.contains(i)) return value_;
    current_.insert(i);
    const auto k = static_cast<std::size_t>(i);
    if (rows_.at(k) > 0) {
      if (total_rows_ == 0) {
        factor_ = factors_[k];
      } else {
        stacked_.topRows(width_) = factor_;
        stacked_.bottomRows(width_) = factors_[k];
        qr_.compute(stacked_);
        factor_ = qr_.matrixQR().topRows(width_).triangularView<Eigen::Upper>();
      }
      total_rows_ += rows_[k];
    }
    value_ = total_rows_ < 2 ? 0.0 : score();
    return value_;
  }

  const Coalition& coalition() const override { return current_; }

 private:
  double score() {
    const Eigen::Index p = width_ - 1;
    cod_.compute(factor_.topLeftCorner(p, p));
    const Eigen::VectorXd beta = cod_.solve(factor_.col(p).head(p));
    // ||X_v b - y_v||^2 = ||R_v b - c_v||^2 + rho_v^2
    const Eigen::VectorXd r =
        val_factor_.topLeftCorner(p, p).triangularView<Eigen::Upper>() * beta -
        val_factor_.col(p).head(p);
    const double rho = val_factor_(p, p);
    const double err = (r.squaredNorm() + rho * rho) / val_rows_;
    if (!std::isfinite(err)) {
      throw NumericError("ols walk: non-finite validation error");
    }
    return inverse_mse(err);
  }

  const Eigen::MatrixXd& val_factor_;
  double val_rows_;
  Eigen::Index width_;
  Coalition current_;
  std::vector<Eigen::MatrixXd> factors_;
  std::vector<Eigen::Index> rows_;
  Eigen::MatrixXd factor_;
  Eigen::MatrixXd stacked_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
  Eigen::Index total_rows_ = 0;
  double value_ = 0.0;
};

}  // namespace

std::unique_ptr<PrefixWalk> OlsUtility::walk(const GameData& data) const {
  return std::make_unique<OlsWalk>(val_factor_, val_.size(), data);
}

}  // namespace probshap
