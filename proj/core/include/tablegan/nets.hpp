#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>

#include "tablegan/codec.hpp"
#include "tablegan/layers.hpp"
#include "tablegan/schema.hpp"

namespace tablegan {

/// Batch of latent vectors, each component uniform on [-1,1].
struct LatentBatch {
  int k = 0;
  Eigen::MatrixXd vectors;  // n x k
  Eigen::Index count() const { return vectors.rows(); }
};

/// DCGAN-style generator: latent projection to a 4x4 map, stride-2
/// deconvolutions doubling the side to d, and a stride-1 output convolution
/// bounded onto [-1,1] by tanh.
struct Generator {
  Network net;
  MatrixLayout layout;
  int latent_dim = 0;
  int base_filters = 0;
  mutable uint64_t external_queries = 0;

  int side() const { return layout.side; }

  Tensor forward(const Tensor& z, NetMode mode) { return net.forward(z, mode); }
  Tensor backward(const Tensor& grad) { return net.backward(grad); }
  std::string signature() const { return net.signature(); }
};

/// DCGAN-style discriminator: stride-2 convolutions halving the side to 1,
/// then a linear head and sigmoid. The flattened convolution output (the
/// pre-sigmoid features) is exposed alongside the probability.
struct Discriminator {
  Network body;
  Linear* head = nullptr;     // owned by `net_head`
  Network net_head;           // linear + sigmoid
  int side = 0;
  int base_filters = 0;
  int feature_dim = 0;
  mutable uint64_t external_queries = 0;

  /// Returns {probabilities (n,1,1,1), features (n,feature_dim,1,1)}.
  std::pair<Tensor, Tensor> forward(const Tensor& x, NetMode mode);

  /// Backward from gradients on both outputs; either may be empty (all-zero
  /// shape mismatch is rejected). Returns gradient w.r.t. the input batch.
  Tensor backward(const Tensor& grad_prob, const Tensor& grad_features);
  Tensor backward_prob_only(const Tensor& grad_prob);

  std::vector<ParamRef> params();
  void zero_grad();
  std::string signature() const;
};

/// The classifier shares the discriminator architecture; its probability
/// output predicts the (masked-out) label attribute.
using Classifier = Discriminator;

struct Networks {
  Generator generator;
  Discriminator discriminator;
  Classifier classifier;
};

/// Builds the three networks for a layout side in {4,8,16,32}. All three are
/// seeded deterministically from `seed`.
Networks build_networks(const MatrixLayout& layout, int latent_dim, int base_filters,
                        uint64_t seed = 0);

LatentBatch sample_latent(Eigen::Index n, int k, uint64_t seed);

/// Inference-mode generation; counts as an external generator query.
MatrixBatch generate(Generator& g, const LatentBatch& z);

struct DiscriminateResult {
  Eigen::VectorXd probabilities;  // n, in [0,1]
  Eigen::MatrixXd features;       // n x feature_dim
};

/// Inference-mode discrimination; counts as an external discriminator query.
DiscriminateResult discriminate(Discriminator& d, const MatrixBatch& x);

/// Inference-mode classification; counts as an external classifier query.
Eigen::VectorXd classify(Classifier& c, const MatrixBatch& x_masked);

/// Returns a copy of the batch with the label cell zeroed in every matrix.
MatrixBatch mask_label(const MatrixBatch& x, const TableSchema& schema,
                       const MatrixLayout& layout);

/// Reads the label cell of every matrix, mapped from [-1,1] to [0,1].
Eigen::VectorXd label_of(const MatrixBatch& x, const TableSchema& schema,
                         const MatrixLayout& layout);

// Conversions between the public matrix batch and the network tensor format.
Tensor batch_to_tensor(const MatrixBatch& batch);
MatrixBatch tensor_to_batch(const Tensor& t, const MatrixLayout& layout);
Tensor latent_to_tensor(const LatentBatch& z);

}  // namespace tablegan
