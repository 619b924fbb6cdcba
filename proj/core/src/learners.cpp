#include "tablegan/learners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tablegan {

namespace {

// Sum of squared deviations (regression) or Gini impurity times count
// (classification), given target sum / squared sum over `count` samples.
double node_cost(double sum, double sq_sum, double count, bool regression) {
  if (count <= 0.0) return 0.0;
  if (regression) return sq_sum - sum * sum / count;
  double p = sum / count;
  return count * 2.0 * p * (1.0 - p);
}

}  // namespace

int DecisionTree::build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        std::vector<int>& indices, int depth) {
  Node node;
  double sum = 0.0, sq = 0.0;
  for (int i : indices) {
    sum += y(i);
    sq += y(i) * y(i);
  }
  double count = static_cast<double>(indices.size());
  node.value = sum / count;

  bool stop = depth >= max_depth_ || indices.size() < 2;
  double parent_cost = node_cost(sum, sq, count, regression_);
  int best_feature = -1;
  double best_threshold = 0.0;
  double best_cost = parent_cost - 1e-12;

  if (!stop && parent_cost > 1e-12) {
    std::vector<int> sorted = indices;
    for (int f = 0; f < x.cols(); ++f) {
      std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        if (x(a, f) != x(b, f)) return x(a, f) < x(b, f);
        return a < b;
      });
      double left_sum = 0.0, left_sq = 0.0;
      for (size_t i = 0; i + 1 < sorted.size(); ++i) {
        double yi = y(sorted[i]);
        left_sum += yi;
        left_sq += yi * yi;
        if (x(sorted[i], f) == x(sorted[i + 1], f)) continue;
        double lc = static_cast<double>(i + 1);
        double cost = node_cost(left_sum, left_sq, lc, regression_) +
                      node_cost(sum - left_sum, sq - left_sq, count - lc, regression_);
        if (cost < best_cost) {
          best_cost = cost;
          best_feature = f;
          best_threshold = 0.5 * (x(sorted[i], f) + x(sorted[i + 1], f));
        }
      }
    }
  }

  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (best_feature < 0) return id;

  std::vector<int> left, right;
  for (int i : indices) {
    if (x(i, best_feature) <= best_threshold)
      left.push_back(i);
    else
      right.push_back(i);
  }
  if (left.empty() || right.empty()) return id;

  nodes_[id].feature = best_feature;
  nodes_[id].threshold = best_threshold;
  int l = build(x, y, left, depth + 1);
  int r = build(x, y, right, depth + 1);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

void DecisionTree::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw std::invalid_argument("decision tree: empty training set");
  if (x.rows() != y.size()) throw std::invalid_argument("decision tree: size mismatch");
  nodes_.clear();
  std::vector<int> indices(static_cast<size_t>(x.rows()));
  std::iota(indices.begin(), indices.end(), 0);
  build(x, y, indices, 0);
}

double DecisionTree::predict(const Eigen::RowVectorXd& x) const {
  int id = 0;
  while (!nodes_[id].leaf())
    id = x(nodes_[id].feature) <= nodes_[id].threshold ? nodes_[id].left
                                                       : nodes_[id].right;
  return nodes_[id].value;
}

Eigen::VectorXd DecisionTree::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i) = predict(Eigen::RowVectorXd(x.row(i)));
  return out;
}

void RidgeModel::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw std::invalid_argument("ridge: empty training set");
  Eigen::MatrixXd xa(x.rows(), x.cols() + 1);
  xa.col(0).setOnes();
  xa.rightCols(x.cols()) = x;
  Eigen::MatrixXd gram = xa.transpose() * xa;
  for (Eigen::Index j = 1; j < gram.rows(); ++j) gram(j, j) += lambda_;
  beta_ = gram.ldlt().solve(xa.transpose() * y);
}

double RidgeModel::predict(const Eigen::RowVectorXd& x) const {
  return beta_(0) + x.dot(beta_.tail(beta_.size() - 1));
}

Eigen::VectorXd RidgeModel::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i) = predict(Eigen::RowVectorXd(x.row(i)));
  return out;
}

double f1_score(const Eigen::VectorXd& truth01, const Eigen::VectorXd& scores) {
  if (truth01.size() != scores.size())
    throw std::invalid_argument("f1_score: size mismatch");
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (Eigen::Index i = 0; i < truth01.size(); ++i) {
    bool predicted = scores(i) >= 0.5;
    bool actual = truth01(i) >= 0.5;
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && actual) ++fn;
  }
  double denom = 2.0 * tp + fp + fn;
  return denom > 0.0 ? 2.0 * tp / denom : 0.0;
}

double mean_relative_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("mean_relative_error: size mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i)
    sum += std::abs(predicted(i) - truth(i)) / std::max(std::abs(truth(i)), 1e-8);
  return sum / static_cast<double>(truth.size());
}

double auc_score(const std::vector<double>& positive_scores,
                 const std::vector<double>& negative_scores) {
  if (positive_scores.empty() || negative_scores.empty())
    throw std::invalid_argument("auc_score: both score sets must be non-empty");
  double wins = 0.0;
  for (double p : positive_scores)
    for (double q : negative_scores) {
      if (p > q)
        wins += 1.0;
      else if (p == q)
        wins += 0.5;
    }
  return wins / (static_cast<double>(positive_scores.size()) *
                 static_cast<double>(negative_scores.size()));
}

}  // namespace tablegan
