// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fairhpo/data.hpp"
#include "fairhpo/space.hpp"

namespace fairhpo {

// Per-feature distinct values and each row's rank among them. Split
// search enumerates every boundary between consecutive distinct values,
// so it is exact greedy CART, just indexed by rank instead of re-sorting.
class FeatureIndex {
 public:
  explicit FeatureIndex(const Matrix& x);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return uniq_.size(); }
  std::uint32_t rank(std::size_t row, std::size_t col) const { return rank_[col * rows_ + row]; }
  std::span<const double> distinct(std::size_t col) const { return uniq_[col]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<double>> uniq_;
  // Column-major ranks.
  std::vector<std::uint32_t> rank_;
};

struct TreeNode {
  // -1 for leaves.
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
};

// Binary decision tree over dense features; `x <= threshold` goes left.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict_row(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

struct CartParams {
  // 0 means unbounded.
  int max_depth = 0;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  // Fraction of features drawn (without replacement) at each split; at
  // least one feature is always drawn.
  double max_features = 1.0;
};

// Gini CART on rows with integer multiplicities (bootstrap counts). Leaves
// hold the weighted positive fraction. Ties between equal-gain splits go
// to the lowest feature index, then the lowest threshold.
DecisionTree fit_gini_tree(const FeatureIndex& index, const Matrix& x, std::span<const std::uint8_t> y,
                           std::span<const std::uint32_t> weights, const CartParams& params, Rng& rng);

struct RandomForestParams {
  CartParams tree;
  int n_estimators = 100;
  bool bootstrap = true;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
};

RandomForest fit_random_forest(const Matrix& x, std::span<const std::uint8_t> y,
                               const RandomForestParams& params, std::uint64_t seed);

struct GradBoostParams {
  double eta = 0.3;
  int max_depth = 6;
  double colsample_bytree = 1.0;
  double reg_lambda = 1.0;
  int n_estimators = 100;
  double min_child_weight = 1.0;
};

struct GradBoostedTrees {
  double base_margin = 0.0;
  std::vector<DecisionTree> trees;
};

// Second-order boosting with logistic loss; leaf weight -G/(H+lambda)
// scaled by eta.
GradBoostedTrees fit_grad_boost(const Matrix& x, std::span<const std::uint8_t> y,
                                const GradBoostParams& params, std::uint64_t seed);

struct MlpParams {
  int depth = 1;
  int width = 100;
  int batch_size = 200;
  double alpha = 1e-4;
  double learning_rate_init = 1e-3;
  int n_iter_no_change = 10;
  int max_epochs = 200;
  double tol = 1e-4;
};

// Fully connected ReLU network with a single logistic output unit.
struct MlpNetwork {
  std::vector<Eigen::MatrixXd> weights;  // layer l: out x in
  std::vector<Eigen::VectorXd> biases;

  // Row-wise sigmoid outputs for inputs given as rows of `x`.
  Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;

  // Mean binary cross-entropy plus (alpha / (2 * rows)) * sum of squared
  // weights, and its gradient (same layout as weights/biases).
  double loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                           std::vector<Eigen::MatrixXd>& grad_w, std::vector<Eigen::VectorXd>& grad_b) const;
};

// Glorot-uniform initialized network with the given layer widths
// (input, hidden..., 1).
MlpNetwork init_mlp(std::span<const int> layer_sizes, Rng& rng);

struct MlpModel {
  std::vector<double> feature_min;
  std::vector<double> feature_scale;
  MlpNetwork net;
  int epochs_run = 0;
};

MlpModel fit_mlp(const Matrix& x, std::span<const std::uint8_t> y, const MlpParams& params, std::uint64_t seed);

struct ConstantModel {
  std::uint8_t label = 0;
};

struct TrainedModel {
  LearnerId learner = LearnerId::kRandomForest;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  // Set when training fell back to a constant predictor.
  bool degenerate = false;
  std::variant<ConstantModel, RandomForest, GradBoostedTrees, MlpModel> state;
};

RandomForestParams rf_params(const SearchSpace& space, const Configuration& cfg);
GradBoostParams gb_params(const SearchSpace& space, const Configuration& cfg);
MlpParams mlp_params(const SearchSpace& space, const Configuration& cfg);

// `cfg` must come from builtin_space(learner). A single-class `y` yields a
// degenerate constant model. Throws InvalidArgument on dimension mismatch
// or non-finite features.
TrainedModel train(LearnerId learner, const Configuration& cfg, const Matrix& x,
                   std::span<const std::uint8_t> y, std::uint64_t seed);

// Positive-class scores in [0,1].
std::vector<double> predict_scores(const TrainedModel& model, const Matrix& x);
// Hard labels: score > 0.5.
BinaryVector predict(const TrainedModel& model, const Matrix& x);

}  // namespace fairhpo
