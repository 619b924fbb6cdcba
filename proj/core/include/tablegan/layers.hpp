#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace tablegan {

/// Dense NCHW tensor of doubles.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        v(static_cast<size_t>(n_) * c_ * h_ * w_, 0.0) {}

  size_t size() const { return v.size(); }
  double& at(int i, int ch, int y, int x) {
    return v[((static_cast<size_t>(i) * c + ch) * h + y) * w + x];
  }
  double at(int i, int ch, int y, int x) const {
    return v[((static_cast<size_t>(i) * c + ch) * h + y) * w + x];
  }
  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
};

enum class NetMode { train, infer };

/// View of one learnable parameter block and its gradient accumulator.
struct ParamRef {
  std::vector<double>* value = nullptr;
  std::vector<double>* grad = nullptr;
  const char* name = "";
};

struct Layer {
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, NetMode mode) = 0;
  /// Propagates gradients using the cache of the last forward pass; parameter
  /// gradients accumulate until zero_grad.
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual std::vector<ParamRef> params() { return {}; }
  /// Everything a checkpoint must carry: parameter values plus non-learnable
  /// state such as batch-normalization running statistics.
  virtual std::vector<std::vector<double>*> persistent_state();
  virtual std::string signature() const = 0;
};

struct Linear final : Layer {
  int in_features, out_features;
  std::vector<double> weight, bias;        // weight: out x in, row-major
  std::vector<double> grad_weight, grad_bias;
  Tensor cache_x;

  Linear(int in, int out, std::mt19937_64& rng);
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<ParamRef> params() override;
  std::string signature() const override;
};

/// Reinterprets (n, c*h*w, 1, 1) as (n, c, h, w); pure reshape.
struct Reshape final : Layer {
  int out_c, out_h, out_w;
  int in_c = 0, in_h = 0, in_w = 0;

  Reshape(int c, int h, int w) : out_c(c), out_h(h), out_w(w) {}
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string signature() const override;
};

struct Conv2d final : Layer {
  int in_channels, out_channels, kernel, stride, pad;
  std::vector<double> weight, bias;  // weight: out_ch x (in_ch*k*k)
  std::vector<double> grad_weight, grad_bias;
  Tensor cache_x;

  Conv2d(int cin, int cout, int k, int s, int p, std::mt19937_64& rng);
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<ParamRef> params() override;
  std::string signature() const override;
};

/// Fractionally-strided convolution; output side = (in-1)*stride - 2*pad + k.
struct ConvTranspose2d final : Layer {
  int in_channels, out_channels, kernel, stride, pad;
  std::vector<double> weight, bias;  // weight: in_ch x (out_ch*k*k)
  std::vector<double> grad_weight, grad_bias;
  Tensor cache_x;

  ConvTranspose2d(int cin, int cout, int k, int s, int p, std::mt19937_64& rng);
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<ParamRef> params() override;
  std::string signature() const override;
};

struct BatchNorm2d final : Layer {
  int channels;
  double eps = 1e-5;
  double running_decay = 0.9;
  std::vector<double> gamma, beta;
  std::vector<double> grad_gamma, grad_beta;
  std::vector<double> running_mean, running_var;
  // training-pass cache
  Tensor cache_xhat;
  std::vector<double> cache_inv_std;
  std::vector<double> cache_mean;

  BatchNorm2d(int ch, std::mt19937_64& rng);
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<ParamRef> params() override;
  std::vector<std::vector<double>*> persistent_state() override;
  std::string signature() const override;
};

struct ReLU final : Layer {
  Tensor cache_x;
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string signature() const override { return "relu"; }
};

struct LeakyReLU final : Layer {
  double slope;
  Tensor cache_x;
  explicit LeakyReLU(double s = 0.2) : slope(s) {}
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string signature() const override;
};

struct Tanh final : Layer {
  Tensor cache_y;
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string signature() const override { return "tanh"; }
};

struct Sigmoid final : Layer {
  Tensor cache_y;
  Tensor forward(const Tensor& x, NetMode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string signature() const override { return "sigmoid"; }
};

/// A plain layer stack.
struct Network {
  std::vector<std::unique_ptr<Layer>> layers;

  Tensor forward(Tensor x, NetMode mode);
  Tensor backward(Tensor grad);
  std::vector<ParamRef> params();
  std::vector<std::vector<double>*> persistent_state();
  void zero_grad();
  std::string signature() const;

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    layers.push_back(std::make_unique<L>(std::forward<Args>(args)...));
    return static_cast<L&>(*layers.back());
  }
};

/// Adam with bias correction; one slot per parameter block.
struct Adam {
  double lr, beta1, beta2, eps = 1e-8;
  long t = 0;
  struct Slot {
    std::vector<double> m, v;
  };
  std::vector<Slot> slots;

  Adam(double lr_, double b1, double b2) : lr(lr_), beta1(b1), beta2(b2) {}

  /// Applies one update to all blocks. `grad_clip` > 0 rescales the global
  /// gradient norm across the blocks before the update.
  void step(const std::vector<ParamRef>& params, double grad_clip = 0.0);
};

/// Flattened copies of all parameter values, and the inverse (for
/// serialization and finite-difference probing).
std::vector<double> flatten_params(const std::vector<ParamRef>& params);
void unflatten_params(const std::vector<ParamRef>& params, const std::vector<double>& flat);
std::vector<double> flatten_grads(const std::vector<ParamRef>& params);

}  // namespace tablegan
