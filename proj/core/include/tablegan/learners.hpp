#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

namespace tablegan {

/// Deterministic CART tree, depth-bounded, no randomness: splits are chosen
/// by impurity decrease with ties broken by lowest feature index then lowest
/// threshold. Classification leaves store the positive-class fraction,
/// regression leaves the mean target.
class DecisionTree {
 public:
  DecisionTree(int max_depth, bool regression)
      : max_depth_(max_depth), regression_(regression) {}

  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
  /// Positive-class probability (classification) or predicted value.
  double predict(const Eigen::RowVectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;  // leaf payload
    int left = -1, right = -1;
    bool leaf() const { return feature < 0; }
  };
  int build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
            std::vector<int>& indices, int depth);

  int max_depth_;
  bool regression_;
  std::vector<Node> nodes_;
};

/// Ridge regression via the closed-form normal equations (intercept
/// unpenalized). For classification it regresses onto {0,1} targets and
/// thresholds at 0.5; fully deterministic.
class RidgeModel {
 public:
  explicit RidgeModel(double lambda) : lambda_(lambda) {}

  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
  double predict(const Eigen::RowVectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

 private:
  double lambda_;
  Eigen::VectorXd beta_;  // [intercept, coefficients...]
};

/// F-1 of the positive class; predictions thresholded at 0.5 (>= is positive).
double f1_score(const Eigen::VectorXd& truth01, const Eigen::VectorXd& scores);

/// Mean relative error with |y| floored at 1e-8.
double mean_relative_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

/// Mann-Whitney AUC of scores for positives vs negatives; ties count half.
double auc_score(const std::vector<double>& positive_scores,
                 const std::vector<double>& negative_scores);

}  // namespace tablegan
