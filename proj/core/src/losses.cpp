#include "tablegan/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "tablegan/schema.hpp"

namespace tablegan {

PrivacyConfig PrivacyConfig::from_preset(const std::string& name) {
  if (name == "low") return low();
  if (name == "mid") return mid();
  if (name == "high") return high();
  throw InputError("unknown privacy preset '" + name + "' (expected low|mid|high)");
}

std::string PrivacyConfig::preset_name() const {
  if (delta_mean == 0.0 && delta_sd == 0.0) return "low";
  if (delta_mean == 0.1 && delta_sd == 0.1) return "mid";
  if (delta_mean == 0.2 && delta_sd == 0.2) return "high";
  return "custom";
}

double orig_loss_d(const Eigen::VectorXd& p_real, const Eigen::VectorXd& p_fake) {
  if (p_real.size() == 0 || p_fake.size() == 0)
    throw InputError("orig_loss_d: empty batch");
  double real_term = (p_real.array() + kLogEpsilon).log().mean();
  double fake_term = (1.0 - p_fake.array() + kLogEpsilon).log().mean();
  return -(real_term + fake_term);
}

double orig_loss_g(const Eigen::VectorXd& p_fake, GeneratorLossMode mode) {
  if (p_fake.size() == 0) throw InputError("orig_loss_g: empty batch");
  if (mode == GeneratorLossMode::literal)
    return (1.0 - p_fake.array() + kLogEpsilon).log().mean();
  return -(p_fake.array() + kLogEpsilon).log().mean();
}

BatchFeatureStats feature_stats(const Eigen::MatrixXd& features) {
  if (features.rows() == 0) throw InputError("feature_stats: empty batch");
  BatchFeatureStats stats;
  stats.mean = features.colwise().mean();
  Eigen::MatrixXd centered = features.rowwise() - stats.mean.transpose();
  Eigen::VectorXd var =
      centered.array().square().colwise().mean().transpose();
  stats.sd = var.array().sqrt();
  return stats;
}

double hinge_info(double l_mean, double l_sd, const PrivacyConfig& cfg) {
  return std::max(0.0, l_mean - cfg.delta_mean) + std::max(0.0, l_sd - cfg.delta_sd);
}

InfoLossResult info_loss(const BatchFeatureStats& stats_real,
                         const BatchFeatureStats& stats_fake, const PrivacyConfig& cfg) {
  if (stats_real.mean.size() != stats_fake.mean.size() ||
      stats_real.sd.size() != stats_fake.sd.size())
    throw InputError("info_loss: feature dimension mismatch");
  InfoLossResult out;
  out.l_mean = (stats_real.mean - stats_fake.mean).norm();
  out.l_sd = (stats_real.sd - stats_fake.sd).norm();
  out.g_info = hinge_info(out.l_mean, out.l_sd, cfg);
  return out;
}

double class_loss(const Eigen::VectorXd& true_labels, const Eigen::VectorXd& predicted) {
  if (true_labels.size() != predicted.size())
    throw InputError("class_loss: length mismatch");
  if (true_labels.size() == 0) throw InputError("class_loss: empty batch");
  return (true_labels - predicted).array().abs().mean();
}

double class_loss_cross_entropy(const Eigen::VectorXd& true_labels,
                                const Eigen::VectorXd& predicted) {
  if (true_labels.size() != predicted.size())
    throw InputError("class_loss: length mismatch");
  if (true_labels.size() == 0) throw InputError("class_loss: empty batch");
  auto l = true_labels.array();
  auto c = predicted.array();
  return (-(l * (c + kLogEpsilon).log() + (1.0 - l) * (1.0 - c + kLogEpsilon).log()))
      .mean();
}

}  // namespace tablegan
