#pragma once

#include <Eigen/Core>
#include <string>

namespace tablegan {

/// Hinge thresholds for the information loss; the privacy knob.
struct PrivacyConfig {
  double delta_mean = 0.0;
  double delta_sd = 0.0;

  static PrivacyConfig low() { return {0.0, 0.0}; }
  static PrivacyConfig mid() { return {0.1, 0.1}; }
  static PrivacyConfig high() { return {0.2, 0.2}; }
  static PrivacyConfig from_preset(const std::string& name);

  /// "low"/"mid"/"high" when the thresholds match a preset, else "custom".
  std::string preset_name() const;
};

/// Component-wise mean and population standard deviation of a feature batch.
struct BatchFeatureStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

/// Loss components of one training step (or one epoch average).
struct LossValues {
  double d_orig = 0.0;
  double g_orig = 0.0;
  double l_mean = 0.0;
  double l_sd = 0.0;
  double g_info = 0.0;
  double c_class = 0.0;
  double g_class = 0.0;
};

enum class GeneratorLossMode { literal, nonsaturating };

inline constexpr double kLogEpsilon = 1e-8;

/// Discriminator objective, negated so the trainer minimizes it:
/// -(mean log(p_real+eps) + mean log(1-p_fake+eps)).
double orig_loss_d(const Eigen::VectorXd& p_real, const Eigen::VectorXd& p_fake);

/// Generator adversarial loss. Literal mode minimizes mean log(1-p_fake+eps);
/// the nonsaturating default minimizes -mean log(p_fake+eps). Both share the
/// optimum p_fake -> 1.
double orig_loss_g(const Eigen::VectorXd& p_fake,
                   GeneratorLossMode mode = GeneratorLossMode::nonsaturating);

/// Mean and population standard deviation over the rows of an n x dim batch.
BatchFeatureStats feature_stats(const Eigen::MatrixXd& features);

struct InfoLossResult {
  double l_mean = 0.0;
  double l_sd = 0.0;
  double g_info = 0.0;
};

/// Hinge arithmetic: max(0, l_mean - delta_mean) + max(0, l_sd - delta_sd).
double hinge_info(double l_mean, double l_sd, const PrivacyConfig& cfg);

/// L2 discrepancies between feature statistics plus the hinged sum.
InfoLossResult info_loss(const BatchFeatureStats& stats_real,
                         const BatchFeatureStats& stats_fake, const PrivacyConfig& cfg);

/// Mean absolute difference between labels and classifier predictions.
double class_loss(const Eigen::VectorXd& true_labels, const Eigen::VectorXd& predicted);

/// Non-default alternative to the absolute-difference classification loss.
double class_loss_cross_entropy(const Eigen::VectorXd& true_labels,
                                const Eigen::VectorXd& predicted);

}  // namespace tablegan
