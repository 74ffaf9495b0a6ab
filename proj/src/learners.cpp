// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "fairhpo/error.hpp"

namespace fairhpo {

FeatureIndex::FeatureIndex(const Matrix& x) : rows_(x.rows()), uniq_(x.cols()), rank_(x.rows() * x.cols()) {
  std::vector<double> col(rows_);
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t r = 0; r < rows_; ++r) col[r] = x(r, c);
    auto& u = uniq_[c];
    u = col;
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    for (std::size_t r = 0; r < rows_; ++r) {
      rank_[c * rows_ + r] =
          static_cast<std::uint32_t>(std::lower_bound(u.begin(), u.end(), col[r]) - u.begin());
    }
  }
}

double DecisionTree::predict_row(std::span<const double> x) const {
  std::int32_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].value;
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[i].feature >= 0) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return best;
}

namespace {

// Sufficient statistics for gini splitting: weighted class counts.
struct GiniStats {
  double w0 = 0.0, w1 = 0.0;
  GiniStats& operator+=(const GiniStats& o) {
    w0 += o.w0;
    w1 += o.w1;
    return *this;
  }
  GiniStats operator-(const GiniStats& o) const { return {w0 - o.w0, w1 - o.w1}; }
};

struct GiniCriterion {
  std::span<const std::uint8_t> y;
  std::span<const std::uint32_t> weights;
  const CartParams* params;

  GiniStats stats(std::uint32_t row) const {
    const double w = weights[row];
    return y[row] ? GiniStats{0.0, w} : GiniStats{w, 0.0};
  }
  // Negative weighted gini impurity up to a constant; larger is better.
  static double score(const GiniStats& s) {
    const double n = s.w0 + s.w1;
    return n > 0.0 ? (s.w0 * s.w0 + s.w1 * s.w1) / n : 0.0;
  }
  bool can_split(const GiniStats& s) const {
    return s.w0 > 0.0 && s.w1 > 0.0 && s.w0 + s.w1 >= params->min_samples_split;
  }
  bool child_ok(const GiniStats& s) const { return s.w0 + s.w1 >= params->min_samples_leaf; }
  static double leaf_value(const GiniStats& s) { return s.w1 / (s.w0 + s.w1); }
};

// Gradient/hessian sums for second-order boosting.
struct GradStats {
  double g = 0.0, h = 0.0;
  GradStats& operator+=(const GradStats& o) {
    g += o.g;
    h += o.h;
    return *this;
  }
  GradStats operator-(const GradStats& o) const { return {g - o.g, h - o.h}; }
};

struct GradCriterion {
  std::span<const double> grad;
  std::span<const double> hess;
  double lambda;
  double min_child_weight;
  double eta;

  GradStats stats(std::uint32_t row) const { return {grad[row], hess[row]}; }
  double score(const GradStats& s) const { return s.g * s.g / (s.h + lambda); }
  bool can_split(const GradStats& s) const { return s.h >= 2.0 * min_child_weight; }
  bool child_ok(const GradStats& s) const { return s.h >= min_child_weight; }
  double leaf_value(const GradStats& s) const { return -eta * s.g / (s.h + lambda); }
};

template <typename Criterion, typename Stats>
class TreeBuilder {
 public:
  TreeBuilder(const FeatureIndex& index, const Criterion& crit, int max_depth)
      : index_(index), crit_(crit), max_depth_(max_depth) {
    std::size_t max_u = 0;
    for (std::size_t c = 0; c < index.cols(); ++c) max_u = std::max(max_u, index.distinct(c).size());
    buckets_.resize(max_u);
    touched_.resize(max_u);
  }

  // `features_for_node` returns the ascending candidate feature list.
  template <typename FeaturePicker>
  DecisionTree build(std::vector<std::uint32_t> rows, FeaturePicker&& features_for_node) {
    nodes_.clear();
    rows_ = std::move(rows);
    grow(0, rows_.size(), 0, features_for_node);
    return DecisionTree(std::move(nodes_));
  }

 private:
  struct Split {
    double gain = 0.0;
    std::int32_t feature = -1;
    std::uint32_t rank = 0;  // rows with rank <= this go left
    double threshold = 0.0;
  };

  template <typename FeaturePicker>
  std::int32_t grow(std::size_t begin, std::size_t end, int depth, FeaturePicker& pick) {
    Stats total;
    for (std::size_t i = begin; i < end; ++i) total += crit_.stats(rows_[i]);
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, crit_.leaf_value(total)});

    if ((max_depth_ > 0 && depth >= max_depth_) || !crit_.can_split(total)) return id;

    Split best;
    const double parent = crit_.score(total);
    for (auto f : pick()) search_feature(f, begin, end, total, parent, best);
    if (best.feature < 0) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    auto mid = std::stable_partition(rows_.begin() + begin, rows_.begin() + end,
                                     [&](std::uint32_t r) { return index_.rank(r, f) <= best.rank; });
    const auto split_at = static_cast<std::size_t>(mid - rows_.begin());
    const auto left = grow(begin, split_at, depth + 1, pick);
    const auto right = grow(split_at, end, depth + 1, pick);
    auto& node = nodes_[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  void consider(std::size_t f, const Stats& left, const Stats& total, double parent, std::uint32_t lo_rank,
                std::uint32_t hi_rank, Split& best) {
    const Stats right = total - left;
    if (!crit_.child_ok(left) || !crit_.child_ok(right)) return;
    const double gain = crit_.score(left) + crit_.score(right) - parent;
    // Strict improvement keeps the earliest (lowest feature, lowest
    // threshold) candidate among ties.
    if (gain > best.gain + 1e-12 * std::max(1.0, std::abs(parent))) {
      const auto u = index_.distinct(f);
      double thr = 0.5 * (u[lo_rank] + u[hi_rank]);
      if (!(thr < u[hi_rank])) thr = u[lo_rank];
      best = Split{gain, static_cast<std::int32_t>(f), lo_rank, thr};
    }
  }

  void search_feature(std::size_t f, std::size_t begin, std::size_t end, const Stats& total, double parent,
                      Split& best) {
    const std::size_t u = index_.distinct(f).size();
    if (u < 2) return;
    const std::size_t n = end - begin;
    if (n * 4 >= u) {
      // Bucket by rank.
      std::fill(buckets_.begin(), buckets_.begin() + u, Stats{});
      std::fill(touched_.begin(), touched_.begin() + u, 0);
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = index_.rank(rows_[i], f);
        buckets_[r] += crit_.stats(rows_[i]);
        touched_[r] = 1;
      }
      Stats left;
      std::int64_t prev = -1;
      for (std::uint32_t r = 0; r < u; ++r) {
        if (!touched_[r]) continue;
        if (prev >= 0) consider(f, left, total, parent, static_cast<std::uint32_t>(prev), r, best);
        left += buckets_[r];
        prev = r;
      }
    } else {
      sorted_.clear();
      for (std::size_t i = begin; i < end; ++i) sorted_.emplace_back(index_.rank(rows_[i], f), rows_[i]);
      std::sort(sorted_.begin(), sorted_.end());
      Stats left;
      for (std::size_t i = 0; i < sorted_.size();) {
        const auto r = sorted_[i].first;
        if (i > 0) consider(f, left, total, parent, sorted_[i - 1].first, r, best);
        for (; i < sorted_.size() && sorted_[i].first == r; ++i) left += crit_.stats(sorted_[i].second);
      }
    }
  }

  const FeatureIndex& index_;
  Criterion crit_;
  int max_depth_;
  std::vector<std::uint32_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<Stats> buckets_;
  std::vector<std::uint8_t> touched_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted_;
};

// k distinct features out of n, ascending.
std::vector<std::size_t> draw_features(std::size_t n, std::size_t k, Rng& rng, std::vector<std::size_t>& pool) {
  pool.resize(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
  std::vector<std::size_t> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t features_per_split(double fraction, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-12));
  return std::clamp<std::size_t>(k, 1, n);
}

void check_xy(const Matrix& x, std::span<const std::uint8_t> y) {
  if (x.rows() != y.size()) {
    throw InvalidArgument(fmt::format("feature rows ({}) != label count ({})", x.rows(), y.size()));
  }
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

DecisionTree fit_gini_tree(const FeatureIndex& index, const Matrix& x, std::span<const std::uint8_t> y,
                           std::span<const std::uint32_t> weights, const CartParams& params, Rng& rng) {
  (void)x;
  GiniCriterion crit{y, weights, &params};
  TreeBuilder<GiniCriterion, GiniStats> builder(index, crit, params.max_depth);
  std::vector<std::uint32_t> rows;
  for (std::uint32_t r = 0; r < weights.size(); ++r) {
    if (weights[r] > 0) rows.push_back(r);
  }
  const std::size_t k = features_per_split(params.max_features, index.cols());
  std::vector<std::size_t> pool;
  auto picker = [&] { return draw_features(index.cols(), k, rng, pool); };
  if (rows.empty()) return DecisionTree({TreeNode{}});
  return builder.build(std::move(rows), picker);
}

RandomForest fit_random_forest(const Matrix& x, std::span<const std::uint8_t> y,
                               const RandomForestParams& params, std::uint64_t seed) {
  check_xy(x, y);
  const FeatureIndex index(x);
  RandomForest forest;
  const std::size_t m = x.rows();
  std::vector<std::uint32_t> weights(m);
  for (int t = 0; t < params.n_estimators; ++t) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    if (params.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0u);
      for (std::size_t i = 0; i < m; ++i) ++weights[uniform_index(rng, m)];
    } else {
      std::fill(weights.begin(), weights.end(), 1u);
    }
    forest.trees.push_back(fit_gini_tree(index, x, y, weights, params.tree, rng));
  }
  return forest;
}

GradBoostedTrees fit_grad_boost(const Matrix& x, std::span<const std::uint8_t> y, const GradBoostParams& params,
                                std::uint64_t seed) {
  check_xy(x, y);
  const FeatureIndex index(x);
  const std::size_t m = x.rows();
  GradBoostedTrees model;
  std::vector<double> margin(m, model.base_margin), grad(m), hess(m);
  std::vector<std::uint32_t> all(m);
  std::iota(all.begin(), all.end(), 0u);
  std::vector<std::size_t> pool;
  const std::size_t k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(params.colsample_bytree * static_cast<double>(index.cols()) + 1e-12)),
      1, index.cols());
  for (int t = 0; t < params.n_estimators; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - y[i];
      hess[i] = std::max(p * (1.0 - p), 1e-16);
    }
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    const auto cols = draw_features(index.cols(), k, rng, pool);
    GradCriterion crit{grad, hess, params.reg_lambda, params.min_child_weight, params.eta};
    TreeBuilder<GradCriterion, GradStats> builder(index, crit, params.max_depth);
    auto tree = builder.build(all, [&] { return cols; });
    for (std::size_t i = 0; i < m; ++i) margin[i] += tree.predict_row(x.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

Eigen::VectorXd MlpNetwork::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::MatrixXd z = (a * weights[l].transpose()).rowwise() + biases[l].transpose();
    if (l + 1 < weights.size()) {
      a = z.cwiseMax(0.0);
    } else {
      a = z.unaryExpr([](double v) { return sigmoid(v); });
    }
  }
  return a.col(0);
}

double MlpNetwork::loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                                     std::vector<Eigen::MatrixXd>& grad_w,
                                     std::vector<Eigen::VectorXd>& grad_b) const {
  const auto n = static_cast<double>(x.rows());
  const std::size_t layers = weights.size();
  std::vector<Eigen::MatrixXd> acts(layers + 1);
  acts[0] = x;
  Eigen::VectorXd logits;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = (acts[l] * weights[l].transpose()).rowwise() + biases[l].transpose();
    if (l + 1 < layers) {
      acts[l + 1] = z.cwiseMax(0.0);
    } else {
      logits = z.col(0);
    }
  }
  // Stable BCE from logits: softplus(z) - y*z.
  double loss = 0.0;
  Eigen::MatrixXd delta(x.rows(), 1);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - y[i] * z;
    delta(i, 0) = (sigmoid(z) - y[i]) / n;
  }
  loss /= n;
  double sq = 0.0;
  for (const auto& w : weights) sq += w.squaredNorm();
  loss += alpha / (2.0 * n) * sq;

  grad_w.resize(layers);
  grad_b.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    grad_w[l] = delta.transpose() * acts[l] + (alpha / n) * weights[l];
    grad_b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * weights[l];
      delta = back.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

MlpNetwork init_mlp(std::span<const int> layer_sizes, Rng& rng) {
  MlpNetwork net;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l], fan_out = layer_sizes[l + 1];
    const double factor = l + 2 == layer_sizes.size() ? 2.0 : 6.0;
    const double bound = std::sqrt(factor / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    Eigen::VectorXd b(fan_out);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

namespace {

Eigen::MatrixXd scaled_inputs(const Matrix& x, const MlpModel& m) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          (x(r, c) - m.feature_min[c]) / m.feature_scale[c];
    }
  }
  return out;
}

}  // namespace

MlpModel fit_mlp(const Matrix& x, std::span<const std::uint8_t> y, const MlpParams& params, std::uint64_t seed) {
  check_xy(x, y);
  MlpModel model;
  const std::size_t n = x.rows(), d = x.cols();
  model.feature_min.assign(d, 0.0);
  model.feature_scale.assign(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    double lo = x(0, c), hi = x(0, c);
    for (std::size_t r = 1; r < n; ++r) {
      lo = std::min(lo, x(r, c));
      hi = std::max(hi, x(r, c));
    }
    model.feature_min[c] = lo;
    model.feature_scale[c] = hi > lo ? hi - lo : 1.0;
  }
  const Eigen::MatrixXd xs = scaled_inputs(x, model);
  Eigen::VectorXd ys(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) ys[static_cast<Eigen::Index>(i)] = y[i];

  Rng rng(seed);
  std::vector<int> sizes{static_cast<int>(d)};
  for (int l = 0; l < params.depth; ++l) sizes.push_back(params.width);
  sizes.push_back(1);
  model.net = init_mlp(sizes, rng);

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  auto& net = model.net;
  std::vector<Eigen::MatrixXd> mw, vw, gw;
  std::vector<Eigen::VectorXd> mb, vb, gb;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    mw.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    vw.push_back(mw.back());
    mb.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    vb.push_back(mb.back());
  }
  const std::size_t batch = std::clamp<std::size_t>(static_cast<std::size_t>(params.batch_size), 1, n);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  double best_loss = std::numeric_limits<double>::infinity();
  int no_improvement = 0;
  long step = 0;
  MlpNetwork last_finite = net;
  for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const auto rows = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd xb(rows, xs.cols());
      Eigen::VectorXd yb(rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        xb.row(i) = xs.row(order[start + static_cast<std::size_t>(i)]);
        yb[i] = ys[order[start + static_cast<std::size_t>(i)]];
      }
      epoch_loss += net.loss_and_gradient(xb, yb, params.alpha, gw, gb) * static_cast<double>(rows);
      ++step;
      const double lr = params.learning_rate_init * std::sqrt(1.0 - std::pow(beta2, step)) /
                        (1.0 - std::pow(beta1, step));
      for (std::size_t l = 0; l < net.weights.size(); ++l) {
        mw[l] = beta1 * mw[l] + (1.0 - beta1) * gw[l];
        vw[l] = beta2 * vw[l] + (1.0 - beta2) * gw[l].cwiseProduct(gw[l]);
        net.weights[l].array() -= lr * mw[l].array() / (vw[l].array().sqrt() + eps);
        mb[l] = beta1 * mb[l] + (1.0 - beta1) * gb[l];
        vb[l] = beta2 * vb[l] + (1.0 - beta2) * gb[l].cwiseProduct(gb[l]);
        net.biases[l].array() -= lr * mb[l].array() / (vb[l].array().sqrt() + eps);
      }
    }
    epoch_loss /= static_cast<double>(n);
    model.epochs_run = epoch + 1;
    if (!std::isfinite(epoch_loss)) {
      net = last_finite;
      break;
    }
    last_finite = net;
    if (epoch_loss > best_loss - params.tol) {
      if (++no_improvement >= params.n_iter_no_change) break;
    } else {
      no_improvement = 0;
    }
    best_loss = std::min(best_loss, epoch_loss);
  }
  return model;
}

RandomForestParams rf_params(const SearchSpace& space, const Configuration& cfg) {
  RandomForestParams p;
  p.tree.max_depth = static_cast<int>(cfg.as_int(space, "max_depth"));
  p.tree.min_samples_split = static_cast<int>(cfg.as_int(space, "min_samples_split"));
  p.tree.min_samples_leaf = static_cast<int>(cfg.as_int(space, "min_samples_leaf"));
  p.tree.max_features = cfg.as_double(space, "max_features");
  p.n_estimators = static_cast<int>(cfg.as_int(space, "n_estimators"));
  return p;
}

GradBoostParams gb_params(const SearchSpace& space, const Configuration& cfg) {
  GradBoostParams p;
  p.eta = cfg.as_double(space, "eta");
  p.max_depth = static_cast<int>(cfg.as_int(space, "max_depth"));
  p.colsample_bytree = cfg.as_double(space, "colsample_bytree");
  p.reg_lambda = cfg.as_double(space, "reg_lambda");
  p.n_estimators = static_cast<int>(cfg.as_int(space, "n_estimators"));
  return p;
}

MlpParams mlp_params(const SearchSpace& space, const Configuration& cfg) {
  MlpParams p;
  p.depth = static_cast<int>(cfg.as_int(space, "depth"));
  p.width = static_cast<int>(cfg.as_int(space, "width"));
  p.batch_size = static_cast<int>(cfg.as_int(space, "batch_size"));
  p.alpha = cfg.as_double(space, "alpha");
  p.learning_rate_init = cfg.as_double(space, "learning_rate_init");
  p.n_iter_no_change = static_cast<int>(cfg.as_int(space, "n_iter_no_change"));
  return p;
}

TrainedModel train(LearnerId learner, const Configuration& cfg, const Matrix& x, std::span<const std::uint8_t> y,
                   std::uint64_t seed) {
  check_xy(x, y);
  if (x.rows() == 0) throw InvalidArgument("train: empty training set");
  const SearchSpace space = builtin_space(learner);
  if (cfg.values.size() != space.dim()) {
    throw InvalidArgument(fmt::format("configuration has {} values, {} space has {}", cfg.values.size(),
                                      learner_name(learner), space.dim()));
  }
  TrainedModel model;
  model.learner = learner;
  model.seed = seed;
  model.n_features = x.cols();
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
  if (positives == 0 || positives == y.size()) {
    model.degenerate = true;
    model.state = ConstantModel{static_cast<std::uint8_t>(positives > 0)};
    return model;
  }
  switch (learner) {
    case LearnerId::kRandomForest: model.state = fit_random_forest(x, y, rf_params(space, cfg), seed); break;
    case LearnerId::kGradBoost: model.state = fit_grad_boost(x, y, gb_params(space, cfg), seed); break;
    case LearnerId::kMlp: model.state = fit_mlp(x, y, mlp_params(space, cfg), seed); break;
  }
  return model;
}

std::vector<double> predict_scores(const TrainedModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.n_features) {
    throw InvalidArgument(fmt::format("predict: {} columns, model trained on {}", x.cols(), model.n_features));
  }
  std::vector<double> out(x.rows(), 0.0);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantModel>) {
          std::fill(out.begin(), out.end(), static_cast<double>(m.label));
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          for (std::size_t r = 0; r < x.rows(); ++r) {
            double s = 0.0;
            for (const auto& t : m.trees) s += t.predict_row(x.row(r));
            out[r] = m.trees.empty() ? 0.0 : s / static_cast<double>(m.trees.size());
          }
        } else if constexpr (std::is_same_v<T, GradBoostedTrees>) {
          for (std::size_t r = 0; r < x.rows(); ++r) {
            double margin = m.base_margin;
            for (const auto& t : m.trees) margin += t.predict_row(x.row(r));
            out[r] = sigmoid(margin);
          }
        } else {
          if (x.rows() == 0) return;
          const Eigen::VectorXd p = m.net.forward(scaled_inputs(x, m));
          for (std::size_t r = 0; r < x.rows(); ++r) {
            const double v = p[static_cast<Eigen::Index>(r)];
            out[r] = std::isfinite(v) ? v : 0.0;
          }
        }
      },
      model.state);
  return out;
}

BinaryVector predict(const TrainedModel& model, const Matrix& x) {
  const auto scores = predict_scores(model, x);
  BinaryVector out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > 0.5 ? 1 : 0;
  return out;
}

}  // namespace fairhpo
