#include "tablegan/nets.hpp"

#include <cmath>

namespace tablegan {

namespace {

int int_log2(int v) {
  int l = 0;
  while ((1 << l) < v) ++l;
  return l;
}

Generator build_generator(const MatrixLayout& layout, int latent_dim,
                          int base_filters, std::mt19937_64& rng) {
  Generator g;
  g.latent_dim = latent_dim;
  g.layout = layout;
  g.base_filters = base_filters;
  int side = layout.side;
  int doublings = int_log2(side / 4);
  int c0 = base_filters << doublings;
  g.net.add<Linear>(latent_dim, 16 * c0, rng);
  g.net.add<Reshape>(c0, 4, 4);
  g.net.add<BatchNorm2d>(c0, rng);
  g.net.add<ReLU>();
  int ch = c0;
  for (int i = 0; i < doublings; ++i) {
    g.net.add<ConvTranspose2d>(ch, ch / 2, 4, 2, 1, rng);
    g.net.add<BatchNorm2d>(ch / 2, rng);
    g.net.add<ReLU>();
    ch /= 2;
  }
  g.net.add<Conv2d>(ch, 1, 3, 1, 1, rng);
  g.net.add<Tanh>();
  return g;
}

Discriminator build_discriminator(int side, int base_filters, std::mt19937_64& rng) {
  Discriminator d;
  d.side = side;
  d.base_filters = base_filters;
  int halvings = int_log2(side);  // side -> 1
  d.body.add<Conv2d>(1, base_filters, 4, 2, 1, rng);
  d.body.add<LeakyReLU>(0.2);
  int ch = base_filters;
  for (int i = 1; i < halvings; ++i) {
    d.body.add<Conv2d>(ch, ch * 2, 4, 2, 1, rng);
    d.body.add<BatchNorm2d>(ch * 2, rng);
    d.body.add<LeakyReLU>(0.2);
    ch *= 2;
  }
  d.feature_dim = ch;
  d.head = &d.net_head.add<Linear>(ch, 1, rng);
  d.net_head.add<Sigmoid>();
  return d;
}

}  // namespace

std::pair<Tensor, Tensor> Discriminator::forward(const Tensor& x, NetMode mode) {
  Tensor features = body.forward(x, mode);
  Tensor probs = net_head.forward(features, mode);
  return {std::move(probs), std::move(features)};
}

Tensor Discriminator::backward(const Tensor& grad_prob, const Tensor& grad_features) {
  Tensor dfeat = net_head.backward(grad_prob);
  if (grad_features.size() != 0) {
    if (!dfeat.same_shape(grad_features))
      throw std::runtime_error("discriminator: feature gradient shape mismatch");
    for (size_t i = 0; i < dfeat.v.size(); ++i) dfeat.v[i] += grad_features.v[i];
  }
  return body.backward(dfeat);
}

Tensor Discriminator::backward_prob_only(const Tensor& grad_prob) {
  return backward(grad_prob, Tensor());
}

std::vector<ParamRef> Discriminator::params() {
  std::vector<ParamRef> out = body.params();
  for (auto& p : net_head.params()) out.push_back(p);
  return out;
}

void Discriminator::zero_grad() {
  body.zero_grad();
  net_head.zero_grad();
}

std::string Discriminator::signature() const {
  return body.signature() + "|" + net_head.signature();
}

Networks build_networks(const MatrixLayout& layout, int latent_dim, int base_filters,
                        uint64_t seed) {
  int side = layout.side;
  if (side != 4 && side != 8 && side != 16 && side != 32)
    throw InputError("unsupported matrix side " + std::to_string(side) +
                     " (networks support 4, 8, 16, 32)");
  if (latent_dim < 1) throw InputError("latent dimension must be >= 1");
  if (base_filters < 1) throw InputError("base filter count must be >= 1");
  Networks nets;
  std::mt19937_64 rng_g(seed * 3 + 1), rng_d(seed * 3 + 2), rng_c(seed * 3 + 3);
  nets.generator = build_generator(layout, latent_dim, base_filters, rng_g);
  nets.discriminator = build_discriminator(side, base_filters, rng_d);
  nets.classifier = build_discriminator(side, base_filters, rng_c);
  return nets;
}

LatentBatch sample_latent(Eigen::Index n, int k, uint64_t seed) {
  if (n < 0) throw InputError("latent batch size must be >= 0");
  LatentBatch z;
  z.k = k;
  z.vectors.resize(n, k);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) z.vectors(i, j) = unit(rng);
  return z;
}

Tensor batch_to_tensor(const MatrixBatch& batch) {
  Tensor t(static_cast<int>(batch.count), 1, batch.layout.side, batch.layout.side);
  t.v = batch.values;
  return t;
}

MatrixBatch tensor_to_batch(const Tensor& t, const MatrixLayout& layout) {
  if (t.c != 1 || t.h != layout.side || t.w != layout.side)
    throw std::runtime_error("tensor does not match layout side");
  MatrixBatch batch(layout, static_cast<size_t>(t.n));
  batch.values = t.v;
  return batch;
}

Tensor latent_to_tensor(const LatentBatch& z) {
  Tensor t(static_cast<int>(z.count()), z.k, 1, 1);
  for (Eigen::Index i = 0; i < z.count(); ++i)
    for (int j = 0; j < z.k; ++j) t.v[static_cast<size_t>(i) * z.k + j] = z.vectors(i, j);
  return t;
}

MatrixBatch generate(Generator& g, const LatentBatch& z) {
  if (z.k != g.latent_dim)
    throw InputError("latent dimension " + std::to_string(z.k) +
                     " does not match generator (" + std::to_string(g.latent_dim) + ")");
  ++g.external_queries;
  if (z.count() == 0) return MatrixBatch(g.layout, 0);
  Tensor out = g.forward(latent_to_tensor(z), NetMode::infer);
  return tensor_to_batch(out, g.layout);
}

DiscriminateResult discriminate(Discriminator& d, const MatrixBatch& x) {
  if (x.layout.side != d.side)
    throw InputError("matrix side " + std::to_string(x.layout.side) +
                     " does not match discriminator (" + std::to_string(d.side) + ")");
  ++d.external_queries;
  DiscriminateResult out;
  out.probabilities.resize(static_cast<Eigen::Index>(x.count));
  out.features.resize(static_cast<Eigen::Index>(x.count), d.feature_dim);
  if (x.count == 0) return out;
  auto [probs, feats] = d.forward(batch_to_tensor(x), NetMode::infer);
  for (size_t i = 0; i < x.count; ++i) {
    out.probabilities(static_cast<Eigen::Index>(i)) = probs.v[i];
    for (int j = 0; j < d.feature_dim; ++j)
      out.features(static_cast<Eigen::Index>(i), j) =
          feats.v[i * static_cast<size_t>(d.feature_dim) + j];
  }
  return out;
}

Eigen::VectorXd classify(Classifier& c, const MatrixBatch& x_masked) {
  if (x_masked.layout.side != c.side)
    throw InputError("matrix side does not match classifier");
  ++c.external_queries;
  Eigen::VectorXd out(static_cast<Eigen::Index>(x_masked.count));
  if (x_masked.count == 0) return out;
  auto [probs, feats] = c.forward(batch_to_tensor(x_masked), NetMode::infer);
  for (size_t i = 0; i < x_masked.count; ++i)
    out(static_cast<Eigen::Index>(i)) = probs.v[i];
  return out;
}

MatrixBatch mask_label(const MatrixBatch& x, const TableSchema& schema,
                       const MatrixLayout& layout) {
  int label = schema.label_index();
  if (label < 0) throw InputError("schema has no label column");
  MatrixBatch masked = x;
  size_t cells = static_cast<size_t>(layout.side) * layout.side;
  for (size_t i = 0; i < masked.count; ++i)
    masked.values[i * cells + static_cast<size_t>(label)] = 0.0;
  return masked;
}

Eigen::VectorXd label_of(const MatrixBatch& x, const TableSchema& schema,
                         const MatrixLayout& layout) {
  int label = schema.label_index();
  if (label < 0) throw InputError("schema has no label column");
  size_t cells = static_cast<size_t>(layout.side) * layout.side;
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.count));
  for (size_t i = 0; i < x.count; ++i)
    out(static_cast<Eigen::Index>(i)) =
        (x.values[i * cells + static_cast<size_t>(label)] + 1.0) / 2.0;
  return out;
}

}  // namespace tablegan
