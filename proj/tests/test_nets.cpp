#include <doctest.h>

#include <random>

#include "tablegan/nets.hpp"
#include "tablegan/toy.hpp"

using namespace tablegan;

namespace {

// Weighted-sum probe loss over a layer output, used for finite-difference
// checks of both input and parameter gradients.
double probe_loss(Layer& layer, const Tensor& x, const Tensor& wout, NetMode mode) {
  Tensor y = layer.forward(x, mode);
  REQUIRE(y.size() == wout.size());
  double s = 0.0;
  for (size_t i = 0; i < y.v.size(); ++i) s += y.v[i] * wout.v[i];
  return s;
}

void fill_random(std::vector<double>& v, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  for (auto& x : v) x = dist(rng);
}

void check_layer_gradients(Layer& layer, Tensor x, NetMode mode, double tol = 1e-6) {
  std::mt19937_64 rng(4242);
  Tensor y = layer.forward(x, mode);
  Tensor wout(y.n, y.c, y.h, y.w);
  fill_random(wout.v, rng, 1.0);

  for (auto& p : layer.params()) std::fill(p.grad->begin(), p.grad->end(), 0.0);
  layer.forward(x, mode);
  Tensor dx = layer.backward(wout);

  const double h = 1e-5;
  // input gradient, every coordinate
  for (size_t i = 0; i < x.v.size(); ++i) {
    double keep = x.v[i];
    x.v[i] = keep + h;
    double up = probe_loss(layer, x, wout, mode);
    x.v[i] = keep - h;
    double down = probe_loss(layer, x, wout, mode);
    x.v[i] = keep;
    double fd = (up - down) / (2 * h);
    CHECK(dx.v[i] == doctest::Approx(fd).epsilon(tol).scale(1.0));
  }
  // parameter gradients, every coordinate
  layer.forward(x, mode);
  for (auto& p : layer.params()) std::fill(p.grad->begin(), p.grad->end(), 0.0);
  layer.forward(x, mode);
  layer.backward(wout);
  for (auto& p : layer.params()) {
    for (size_t i = 0; i < p.value->size(); ++i) {
      double keep = (*p.value)[i];
      (*p.value)[i] = keep + h;
      double up = probe_loss(layer, x, wout, mode);
      (*p.value)[i] = keep - h;
      double down = probe_loss(layer, x, wout, mode);
      (*p.value)[i] = keep;
      double fd = (up - down) / (2 * h);
      CHECK((*p.grad)[i] == doctest::Approx(fd).epsilon(tol).scale(1.0));
    }
  }
}

Tensor random_tensor(int n, int c, int h, int w, uint64_t seed, double scale = 1.0) {
  Tensor t(n, c, h, w);
  std::mt19937_64 rng(seed);
  fill_random(t.v, rng, scale);
  return t;
}

}  // namespace

TEST_CASE("gradients: linear") {
  std::mt19937_64 rng(1);
  Linear layer(5, 4, rng);
  check_layer_gradients(layer, random_tensor(3, 5, 1, 1, 10), NetMode::train);
}

TEST_CASE("gradients: conv stride 2") {
  std::mt19937_64 rng(2);
  Conv2d layer(2, 3, 4, 2, 1, rng);
  check_layer_gradients(layer, random_tensor(2, 2, 4, 4, 11), NetMode::train);
}

TEST_CASE("gradients: conv stride 1") {
  std::mt19937_64 rng(3);
  Conv2d layer(3, 1, 3, 1, 1, rng);
  check_layer_gradients(layer, random_tensor(2, 3, 4, 4, 12), NetMode::train);
}

TEST_CASE("gradients: deconv stride 2") {
  std::mt19937_64 rng(4);
  ConvTranspose2d layer(3, 2, 4, 2, 1, rng);
  check_layer_gradients(layer, random_tensor(2, 3, 2, 2, 13), NetMode::train);
}

TEST_CASE("deconv doubles the side, conv halves it") {
  std::mt19937_64 rng(5);
  ConvTranspose2d up(4, 2, 4, 2, 1, rng);
  Tensor y = up.forward(random_tensor(1, 4, 4, 4, 14), NetMode::train);
  CHECK(y.h == 8);
  CHECK(y.w == 8);
  Conv2d down(2, 4, 4, 2, 1, rng);
  Tensor z = down.forward(y, NetMode::train);
  CHECK(z.h == 4);
  CHECK(z.w == 4);
}

TEST_CASE("gradients: batch norm (train mode)") {
  std::mt19937_64 rng(6);
  BatchNorm2d layer(3, rng);
  check_layer_gradients(layer, random_tensor(3, 3, 2, 2, 15), NetMode::train, 1e-5);
}

TEST_CASE("gradients: activations") {
  ReLU relu;
  check_layer_gradients(relu, random_tensor(2, 3, 2, 2, 16), NetMode::train);
  LeakyReLU lrelu(0.2);
  check_layer_gradients(lrelu, random_tensor(2, 3, 2, 2, 17), NetMode::train);
  Tanh tanh_layer;
  check_layer_gradients(tanh_layer, random_tensor(2, 3, 2, 2, 18), NetMode::train);
  Sigmoid sigmoid_layer;
  check_layer_gradients(sigmoid_layer, random_tensor(2, 3, 2, 2, 19), NetMode::train);
}

TEST_CASE("batch norm statistics: train vs inference") {
  std::mt19937_64 rng(7);
  BatchNorm2d layer(2, rng);
  Tensor x = random_tensor(8, 2, 2, 2, 20, 2.0);
  Tensor y = layer.forward(x, NetMode::train);
  // normalized channels have ~zero mean under gamma~1, beta=0
  double mean = 0.0;
  for (double v : y.v) mean += v;
  mean /= static_cast<double>(y.v.size());
  CHECK(std::abs(mean) < 0.2);

  // inference is a pure function of (parameters, input)
  Tensor a = layer.forward(x, NetMode::infer);
  Tensor b = layer.forward(x, NetMode::infer);
  CHECK(a.v == b.v);

  Tensor one_sample = random_tensor(1, 2, 2, 2, 21);
  CHECK_NOTHROW(layer.forward(one_sample, NetMode::infer));
  CHECK_THROWS(layer.forward(one_sample, NetMode::train));
}

TEST_CASE("build_networks: stride-2 stack structure") {
  Networks n16 = build_networks(make_layout(196), 100, 8, 1);  // side 16
  std::string g16 = n16.generator.signature();
  CHECK(g16.find("deconv") != std::string::npos);
  size_t count = 0;
  for (size_t pos = g16.find("deconv"); pos != std::string::npos;
       pos = g16.find("deconv", pos + 1))
    ++count;
  CHECK(count == 2);  // 4 -> 8 -> 16

  Networks n4 = build_networks(make_layout(16), 100, 8, 1);  // side 4
  CHECK(n4.generator.signature().find("deconv") == std::string::npos);

  // classifier and discriminator share the architecture exactly
  CHECK(n4.discriminator.signature() == n4.classifier.signature());
  CHECK(n16.discriminator.signature() == n16.classifier.signature());

  MatrixLayout big;
  big.side = 64;
  big.attribute_count = 4096;
  big.pad_count = 0;
  CHECK_THROWS_AS(build_networks(big, 100, 8, 1), InputError);
  CHECK_THROWS_AS(build_networks(make_layout(16), 0, 8, 1), InputError);
}

TEST_CASE("sample_latent: support, determinism, law of large numbers") {
  LatentBatch empty = sample_latent(0, 5, 1);
  CHECK(empty.count() == 0);

  LatentBatch z = sample_latent(1000, 7, 42);
  CHECK(z.vectors.minCoeff() >= -1.0);
  CHECK(z.vectors.maxCoeff() <= 1.0);

  LatentBatch z2 = sample_latent(1000, 7, 42);
  CHECK(z.vectors == z2.vectors);

  LatentBatch big = sample_latent(1000000, 3, 7);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(big.vectors.col(j).mean()) <= 0.01);
}

TEST_CASE("generate: shape, boundedness, inference determinism") {
  Networks nets = build_networks(make_layout(16), 20, 8, 3);
  LatentBatch z1 = sample_latent(1, 20, 5);
  MatrixBatch one = generate(nets.generator, z1);
  CHECK(one.count == 1);
  CHECK(one.layout.side == 4);

  LatentBatch z = sample_latent(1000, 20, 6);
  MatrixBatch out = generate(nets.generator, z);
  CHECK(out.count == 1000);
  for (double v : out.values) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  MatrixBatch again = generate(nets.generator, z);
  CHECK(again.values == out.values);

  LatentBatch wrong = sample_latent(4, 7, 1);
  CHECK_THROWS_AS(generate(nets.generator, wrong), InputError);
}

TEST_CASE("discriminate: ranges, determinism, constant feature dimension") {
  Networks nets = build_networks(make_layout(16), 20, 8, 4);
  LatentBatch z = sample_latent(32, 20, 9);
  MatrixBatch batch = generate(nets.generator, z);

  DiscriminateResult r1 = discriminate(nets.discriminator, batch);
  CHECK(r1.probabilities.size() == 32);
  CHECK(r1.probabilities.minCoeff() >= 0.0);
  CHECK(r1.probabilities.maxCoeff() <= 1.0);
  CHECK(r1.features.cols() == nets.discriminator.feature_dim);

  DiscriminateResult r2 = discriminate(nets.discriminator, batch);
  CHECK(r1.probabilities == r2.probabilities);
  CHECK(r1.features == r2.features);

  MatrixBatch small = generate(nets.generator, sample_latent(3, 20, 10));
  DiscriminateResult r3 = discriminate(nets.discriminator, small);
  CHECK(r3.features.cols() == r1.features.cols());
}

TEST_CASE("mask_label and label_of") {
  RawTable table = make_toy_table(8, 55);
  MatrixLayout layout = make_layout(table.schema.attribute_count());
  MatrixBatch batch = encode_table(table, layout);
  int label = table.schema.label_index();

  MatrixBatch masked = mask_label(batch, table.schema, layout);
  size_t cells = static_cast<size_t>(layout.side) * layout.side;
  for (size_t i = 0; i < masked.count; ++i) {
    CHECK(masked.values[i * cells + static_cast<size_t>(label)] == 0.0);
    for (size_t j = 0; j < cells; ++j) {
      if (static_cast<int>(j) == label) continue;
      CHECK(masked.values[i * cells + j] == batch.values[i * cells + j]);
    }
  }
  MatrixBatch twice = mask_label(masked, table.schema, layout);
  CHECK(twice.values == masked.values);

  // decode of a masked matrix differs only in the label attribute
  RawTable decoded = decode_batch(masked, table.schema);
  for (size_t r = 0; r < decoded.rows.size(); ++r)
    for (int c = 0; c < table.schema.attribute_count(); ++c) {
      if (c == label) continue;
      CHECK(decoded.rows[r][c] == doctest::Approx(table.rows[r][c]).epsilon(1e-12));
    }

  Eigen::VectorXd labels = label_of(batch, table.schema, layout);
  for (size_t i = 0; i < batch.count; ++i)
    CHECK(labels(static_cast<Eigen::Index>(i)) == doctest::Approx(table.rows[i][label]));

  // affine map of the raw cell
  MatrixBatch custom = batch;
  custom.values[static_cast<size_t>(label)] = 0.2;
  CHECK(label_of(custom, table.schema, layout)(0) == doctest::Approx(0.6));
}
