#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "tablegan/losses.hpp"

using namespace tablegan;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("privacy presets") {
  CHECK(PrivacyConfig::low().delta_mean == 0.0);
  CHECK(PrivacyConfig::mid().delta_mean == 0.1);
  CHECK(PrivacyConfig::high().delta_sd == 0.2);
  CHECK(PrivacyConfig::from_preset("high").delta_mean == 0.2);
  CHECK(PrivacyConfig{0.05, 0.3}.preset_name() == "custom");
  CHECK_THROWS_AS(PrivacyConfig::from_preset("ultra"), InputError);
}

TEST_CASE("orig_loss_d examples") {
  // perfect discriminator: loss ~ 0
  CHECK(orig_loss_d(vec({1}), vec({0})) == doctest::Approx(0.0).epsilon(1e-6));
  // undecided discriminator: -(ln 0.5 + ln 0.5)
  CHECK(orig_loss_d(vec({0.5}), vec({0.5})) == doctest::Approx(1.3862943611).epsilon(1e-6));
  // brute-force scalar oracle
  CHECK(orig_loss_d(vec({0.9, 0.9}), vec({0.1})) ==
        doctest::Approx(oracles::loss_d({0.9, 0.9}, {0.1})));
  CHECK_THROWS_AS(orig_loss_d(Eigen::VectorXd(), vec({0.5})), InputError);
}

TEST_CASE("orig_loss_g examples") {
  CHECK(orig_loss_g(vec({1}), GeneratorLossMode::literal) ==
        doctest::Approx(std::log(1e-8)));
  CHECK(orig_loss_g(vec({0.5}), GeneratorLossMode::nonsaturating) ==
        doctest::Approx(0.6931471806).epsilon(1e-6));
  // both modes improve monotonically toward p_fake -> 1
  double lit_lo = orig_loss_g(vec({0.2}), GeneratorLossMode::literal);
  double lit_hi = orig_loss_g(vec({0.9}), GeneratorLossMode::literal);
  double non_lo = orig_loss_g(vec({0.2}), GeneratorLossMode::nonsaturating);
  double non_hi = orig_loss_g(vec({0.9}), GeneratorLossMode::nonsaturating);
  CHECK(lit_hi < lit_lo);
  CHECK(non_hi < non_lo);
}

TEST_CASE("feature_stats uses population standard deviation") {
  Eigen::MatrixXd f(2, 2);
  f << 1, 0, 0, 1;
  BatchFeatureStats stats = feature_stats(f);
  CHECK(stats.mean(0) == doctest::Approx(0.5));
  CHECK(stats.mean(1) == doctest::Approx(0.5));
  CHECK(stats.sd(0) == doctest::Approx(0.5));
  CHECK(stats.sd(1) == doctest::Approx(0.5));

  Eigen::MatrixXd single(1, 3);
  single << 4, 5, 6;
  BatchFeatureStats s1 = feature_stats(single);
  CHECK(s1.sd.norm() == doctest::Approx(0.0));

  Eigen::MatrixXd dup(2, 3);
  dup << 4, 5, 6, 4, 5, 6;
  BatchFeatureStats s2 = feature_stats(dup);
  CHECK(s2.mean(2) == doctest::Approx(6.0));
  CHECK(s2.sd.norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(feature_stats(Eigen::MatrixXd(0, 3)), InputError);
}

TEST_CASE("info_loss examples") {
  BatchFeatureStats real{vec({0.5, 0.5}), vec({0.1, 0.1})};
  BatchFeatureStats fake{vec({0.0, 0.0}), vec({0.1, 0.1})};
  InfoLossResult r = info_loss(real, fake, PrivacyConfig::low());
  CHECK(r.l_mean == doctest::Approx(0.7071067812).epsilon(1e-6));
  CHECK(r.l_sd == doctest::Approx(0.0));
  CHECK(r.g_info == doctest::Approx(0.7071067812).epsilon(1e-6));

  CHECK(hinge_info(0.5, 0.1, PrivacyConfig{0.2, 0.2}) == doctest::Approx(0.3));
  CHECK(hinge_info(0.1, 0.15, PrivacyConfig{0.2, 0.2}) == 0.0);

  BatchFeatureStats bad{vec({1.0}), vec({1.0})};
  CHECK_THROWS_AS(info_loss(real, bad, PrivacyConfig::low()), InputError);
}

TEST_CASE("class_loss examples") {
  CHECK(class_loss(vec({1}), vec({0.8})) == doctest::Approx(0.2));
  CHECK(class_loss(vec({0.3, 0.7}), vec({0.3, 0.7})) == doctest::Approx(0.0));
  CHECK(class_loss(vec({1, 0}), vec({0.6, 0.3})) == doctest::Approx(0.35));
  CHECK_THROWS_AS(class_loss(vec({1}), vec({0.5, 0.5})), InputError);
}

TEST_CASE("losses match the scalar brute-force oracle on random batches") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> feat(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> size_dist(1, 5);
    int n = size_dist(rng);
    int m = size_dist(rng);

    std::vector<double> pr(n), pf(m);
    for (auto& p : pr) p = unit(rng);
    for (auto& p : pf) p = unit(rng);
    Eigen::VectorXd epr = Eigen::Map<Eigen::VectorXd>(pr.data(), n);
    Eigen::VectorXd epf = Eigen::Map<Eigen::VectorXd>(pf.data(), m);
    CHECK(orig_loss_d(epr, epf) == doctest::Approx(oracles::loss_d(pr, pf)).epsilon(1e-6));
    CHECK(orig_loss_g(epf, GeneratorLossMode::literal) ==
          doctest::Approx(oracles::loss_g_literal(pf)).epsilon(1e-6));
    CHECK(orig_loss_g(epf, GeneratorLossMode::nonsaturating) ==
          doctest::Approx(oracles::loss_g_nonsaturating(pf)).epsilon(1e-6));

    // 8-dimensional feature batches of size <= 5
    std::vector<std::vector<double>> rows_a(static_cast<size_t>(n)),
        rows_b(static_cast<size_t>(m));
    Eigen::MatrixXd fa(n, 8), fb(m, 8);
    for (int i = 0; i < n; ++i) {
      rows_a[static_cast<size_t>(i)].resize(8);
      for (int j = 0; j < 8; ++j) {
        double v = feat(rng);
        rows_a[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
        fa(i, j) = v;
      }
    }
    for (int i = 0; i < m; ++i) {
      rows_b[static_cast<size_t>(i)].resize(8);
      for (int j = 0; j < 8; ++j) {
        double v = feat(rng);
        rows_b[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
        fb(i, j) = v;
      }
    }
    BatchFeatureStats sa = feature_stats(fa);
    BatchFeatureStats sb = feature_stats(fb);
    oracles::Stats oa = oracles::stats(rows_a);
    oracles::Stats ob = oracles::stats(rows_b);
    for (int j = 0; j < 8; ++j) {
      CHECK(sa.mean(j) == doctest::Approx(oa.mean[static_cast<size_t>(j)]).epsilon(1e-9));
      CHECK(sa.sd(j) == doctest::Approx(oa.sd[static_cast<size_t>(j)]).epsilon(1e-9));
    }
    PrivacyConfig cfg{unit(rng) * 0.3, unit(rng) * 0.3};
    InfoLossResult info = info_loss(sa, sb, cfg);
    CHECK(info.l_mean == doctest::Approx(oracles::l2(oa.mean, ob.mean)).epsilon(1e-6));
    CHECK(info.l_sd == doctest::Approx(oracles::l2(oa.sd, ob.sd)).epsilon(1e-6));
    CHECK(info.g_info ==
          doctest::Approx(oracles::hinge(info.l_mean, info.l_sd, cfg.delta_mean,
                                         cfg.delta_sd))
              .epsilon(1e-6));

    std::vector<double> labels(static_cast<size_t>(n)), preds(static_cast<size_t>(n));
    for (auto& v : labels) v = unit(rng);
    for (auto& v : preds) v = unit(rng);
    CHECK(class_loss(Eigen::Map<Eigen::VectorXd>(labels.data(), n),
                     Eigen::Map<Eigen::VectorXd>(preds.data(), n)) ==
          doctest::Approx(oracles::class_loss(labels, preds)).epsilon(1e-6));
  }
}

TEST_CASE("hinge dead zone and monotonicity properties") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    double lm = dist(rng), ls = dist(rng), dm = dist(rng) * 0.5, ds = dist(rng) * 0.5;
    double g = hinge_info(lm, ls, PrivacyConfig{dm, ds});
    CHECK(g == std::max(0.0, lm - dm) + std::max(0.0, ls - ds));
    CHECK((g == 0.0) == (lm <= dm && ls <= ds));
    // non-increasing in the thresholds
    CHECK(hinge_info(lm, ls, PrivacyConfig{dm + 0.1, ds}) <= g);
    CHECK(hinge_info(lm, ls, PrivacyConfig{dm, ds + 0.1}) <= g);
    CHECK(g >= 0.0);
  }
}

TEST_CASE("l_mean and l_sd are symmetric in argument order") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> feat(-1.0, 1.0);
  Eigen::MatrixXd fa(3, 4), fb(4, 4);
  for (int i = 0; i < fa.size(); ++i) fa.data()[i] = feat(rng);
  for (int i = 0; i < fb.size(); ++i) fb.data()[i] = feat(rng);
  auto sa = feature_stats(fa), sb = feature_stats(fb);
  auto ab = info_loss(sa, sb, PrivacyConfig::mid());
  auto ba = info_loss(sb, sa, PrivacyConfig::mid());
  CHECK(ab.l_mean == doctest::Approx(ba.l_mean));
  CHECK(ab.l_sd == doctest::Approx(ba.l_sd));
  CHECK(ab.l_mean >= 0.0);
  CHECK(ab.l_sd >= 0.0);
}
