#include "tablegan/layers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tablegan {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

void init_normal(std::vector<double>& values, std::mt19937_64& rng, double mean,
                 double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  for (auto& v : values) v = dist(rng);
}

int conv_out_side(int in, int k, int s, int p) { return (in + 2 * p - k) / s + 1; }

// Scatters x (c,h,w) into columns of `col` ((c*k*k) x (oh*ow)).
void im2col(const double* x, int c, int h, int w, int k, int s, int p, int oh, int ow,
            double* col) {
  for (int ci = 0; ci < c; ++ci) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        double* row = col + (((static_cast<size_t>(ci) * k + ky) * k + kx) *
                             static_cast<size_t>(oh) * ow);
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * s + ky - p;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * s + kx - p;
            row[oy * ow + ox] = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                                    ? x[(static_cast<size_t>(ci) * h + iy) * w + ix]
                                    : 0.0;
          }
        }
      }
    }
  }
}

// Inverse of im2col with accumulation.
void col2im_add(const double* col, int c, int h, int w, int k, int s, int p, int oh,
                int ow, double* x) {
  for (int ci = 0; ci < c; ++ci) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const double* row = col + (((static_cast<size_t>(ci) * k + ky) * k + kx) *
                                   static_cast<size_t>(oh) * ow);
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * s + ky - p;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * s + kx - p;
            if (ix < 0 || ix >= w) continue;
            x[(static_cast<size_t>(ci) * h + iy) * w + ix] += row[oy * ow + ox];
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<std::vector<double>*> Layer::persistent_state() {
  std::vector<std::vector<double>*> out;
  for (auto& p : params()) out.push_back(p.value);
  return out;
}

// ---------------------------------------------------------------------------
// Linear

Linear::Linear(int in, int out, std::mt19937_64& rng)
    : in_features(in), out_features(out),
      weight(static_cast<size_t>(out) * in), bias(static_cast<size_t>(out), 0.0),
      grad_weight(weight.size(), 0.0), grad_bias(bias.size(), 0.0) {
  init_normal(weight, rng, 0.0, 0.02);
}

Tensor Linear::forward(const Tensor& x, NetMode) {
  int flat = x.c * x.h * x.w;
  if (flat != in_features)
    throw std::runtime_error("linear: expected " + std::to_string(in_features) +
                             " inputs, got " + std::to_string(flat));
  cache_x = x;
  Tensor y(x.n, out_features, 1, 1);
  ConstMapMat X(x.v.data(), x.n, in_features);
  ConstMapMat W(weight.data(), out_features, in_features);
  MapMat Y(y.v.data(), x.n, out_features);
  Y.noalias() = X * W.transpose();
  Eigen::Map<const Eigen::VectorXd> b(bias.data(), out_features);
  Y.rowwise() += b.transpose();
  return y;
}

Tensor Linear::backward(const Tensor& grad_out) {
  ConstMapMat G(grad_out.v.data(), grad_out.n, out_features);
  ConstMapMat X(cache_x.v.data(), cache_x.n, in_features);
  ConstMapMat W(weight.data(), out_features, in_features);
  MapMat dW(grad_weight.data(), out_features, in_features);
  dW.noalias() += G.transpose() * X;
  Eigen::Map<Eigen::VectorXd> db(grad_bias.data(), out_features);
  db.noalias() += G.colwise().sum().transpose();
  Tensor dx(cache_x.n, cache_x.c, cache_x.h, cache_x.w);
  MapMat dX(dx.v.data(), cache_x.n, in_features);
  dX.noalias() = G * W;
  return dx;
}

std::vector<ParamRef> Linear::params() {
  return {{&weight, &grad_weight, "weight"}, {&bias, &grad_bias, "bias"}};
}

std::string Linear::signature() const {
  std::ostringstream s;
  s << "linear(" << in_features << "->" << out_features << ")";
  return s.str();
}

// ---------------------------------------------------------------------------
// Reshape

Tensor Reshape::forward(const Tensor& x, NetMode) {
  if (x.c * x.h * x.w != out_c * out_h * out_w)
    throw std::runtime_error("reshape: element count mismatch");
  in_c = x.c;
  in_h = x.h;
  in_w = x.w;
  Tensor y(x.n, out_c, out_h, out_w);
  y.v = x.v;
  return y;
}

Tensor Reshape::backward(const Tensor& grad_out) {
  Tensor dx(grad_out.n, in_c, in_h, in_w);
  dx.v = grad_out.v;
  return dx;
}

std::string Reshape::signature() const {
  std::ostringstream s;
  s << "reshape(" << out_c << "x" << out_h << "x" << out_w << ")";
  return s.str();
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(int cin, int cout, int k, int s, int p, std::mt19937_64& rng)
    : in_channels(cin), out_channels(cout), kernel(k), stride(s), pad(p),
      weight(static_cast<size_t>(cout) * cin * k * k),
      bias(static_cast<size_t>(cout), 0.0),
      grad_weight(weight.size(), 0.0), grad_bias(bias.size(), 0.0) {
  init_normal(weight, rng, 0.0, 0.02);
}

Tensor Conv2d::forward(const Tensor& x, NetMode) {
  if (x.c != in_channels) throw std::runtime_error("conv: channel mismatch");
  cache_x = x;
  int oh = conv_out_side(x.h, kernel, stride, pad);
  int ow = conv_out_side(x.w, kernel, stride, pad);
  Tensor y(x.n, out_channels, oh, ow);
  int patch = in_channels * kernel * kernel;
  RowMat col(patch, oh * ow);
  ConstMapMat W(weight.data(), out_channels, patch);
  Eigen::Map<const Eigen::VectorXd> b(bias.data(), out_channels);
  size_t in_stride = static_cast<size_t>(x.c) * x.h * x.w;
  size_t out_stride = static_cast<size_t>(out_channels) * oh * ow;
  for (int i = 0; i < x.n; ++i) {
    im2col(x.v.data() + i * in_stride, x.c, x.h, x.w, kernel, stride, pad, oh, ow,
           col.data());
    MapMat Y(y.v.data() + i * out_stride, out_channels, oh * ow);
    Y.noalias() = W * col;
    Y.colwise() += b;
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& grad_out) {
  const Tensor& x = cache_x;
  int oh = grad_out.h, ow = grad_out.w;
  int patch = in_channels * kernel * kernel;
  RowMat col(patch, oh * ow);
  RowMat dcol(patch, oh * ow);
  ConstMapMat W(weight.data(), out_channels, patch);
  MapMat dW(grad_weight.data(), out_channels, patch);
  Eigen::Map<Eigen::VectorXd> db(grad_bias.data(), out_channels);
  Tensor dx(x.n, x.c, x.h, x.w);
  size_t in_stride = static_cast<size_t>(x.c) * x.h * x.w;
  size_t out_stride = static_cast<size_t>(out_channels) * oh * ow;
  for (int i = 0; i < x.n; ++i) {
    ConstMapMat G(grad_out.v.data() + i * out_stride, out_channels, oh * ow);
    im2col(x.v.data() + i * in_stride, x.c, x.h, x.w, kernel, stride, pad, oh, ow,
           col.data());
    dW.noalias() += G * col.transpose();
    db.noalias() += G.rowwise().sum();
    dcol.noalias() = W.transpose() * G;
    col2im_add(dcol.data(), x.c, x.h, x.w, kernel, stride, pad, oh, ow,
               dx.v.data() + i * in_stride);
  }
  return dx;
}

std::vector<ParamRef> Conv2d::params() {
  return {{&weight, &grad_weight, "weight"}, {&bias, &grad_bias, "bias"}};
}

std::string Conv2d::signature() const {
  std::ostringstream s;
  s << "conv(" << in_channels << "->" << out_channels << ",k" << kernel << ",s"
    << stride << ",p" << pad << ")";
  return s.str();
}

// ---------------------------------------------------------------------------
// ConvTranspose2d

ConvTranspose2d::ConvTranspose2d(int cin, int cout, int k, int s, int p,
                                 std::mt19937_64& rng)
    : in_channels(cin), out_channels(cout), kernel(k), stride(s), pad(p),
      weight(static_cast<size_t>(cin) * cout * k * k),
      bias(static_cast<size_t>(cout), 0.0),
      grad_weight(weight.size(), 0.0), grad_bias(bias.size(), 0.0) {
  init_normal(weight, rng, 0.0, 0.02);
}

Tensor ConvTranspose2d::forward(const Tensor& x, NetMode) {
  if (x.c != in_channels) throw std::runtime_error("deconv: channel mismatch");
  cache_x = x;
  int oh = (x.h - 1) * stride - 2 * pad + kernel;
  int ow = (x.w - 1) * stride - 2 * pad + kernel;
  Tensor y(x.n, out_channels, oh, ow);
  int patch = out_channels * kernel * kernel;
  ConstMapMat W(weight.data(), in_channels, patch);
  RowMat tmp(patch, x.h * x.w);
  size_t in_stride = static_cast<size_t>(x.c) * x.h * x.w;
  size_t out_stride = static_cast<size_t>(out_channels) * oh * ow;
  for (int i = 0; i < x.n; ++i) {
    ConstMapMat X(x.v.data() + i * in_stride, in_channels, x.h * x.w);
    tmp.noalias() = W.transpose() * X;
    // tmp rows correspond to (co,ky,kx) patches over the *output* grid
    col2im_add(tmp.data(), out_channels, oh, ow, kernel, stride, pad, x.h, x.w,
               y.v.data() + i * out_stride);
    MapMat Y(y.v.data() + i * out_stride, out_channels, oh * ow);
    Eigen::Map<const Eigen::VectorXd> b(bias.data(), out_channels);
    Y.colwise() += b;
  }
  return y;
}

Tensor ConvTranspose2d::backward(const Tensor& grad_out) {
  const Tensor& x = cache_x;
  int oh = grad_out.h, ow = grad_out.w;
  int patch = out_channels * kernel * kernel;
  ConstMapMat W(weight.data(), in_channels, patch);
  MapMat dW(grad_weight.data(), in_channels, patch);
  Eigen::Map<Eigen::VectorXd> db(grad_bias.data(), out_channels);
  RowMat col_g(patch, x.h * x.w);
  Tensor dx(x.n, x.c, x.h, x.w);
  size_t in_stride = static_cast<size_t>(x.c) * x.h * x.w;
  size_t out_stride = static_cast<size_t>(out_channels) * oh * ow;
  for (int i = 0; i < x.n; ++i) {
    // im2col over the output gradient recovers the conv dual of the forward.
    im2col(grad_out.v.data() + i * out_stride, out_channels, oh, ow, kernel, stride,
           pad, x.h, x.w, col_g.data());
    ConstMapMat X(x.v.data() + i * in_stride, in_channels, x.h * x.w);
    dW.noalias() += X * col_g.transpose();
    ConstMapMat G(grad_out.v.data() + i * out_stride, out_channels, oh * ow);
    db.noalias() += G.rowwise().sum();
    MapMat dX(dx.v.data() + i * in_stride, in_channels, x.h * x.w);
    dX.noalias() = W * col_g;
  }
  return dx;
}

std::vector<ParamRef> ConvTranspose2d::params() {
  return {{&weight, &grad_weight, "weight"}, {&bias, &grad_bias, "bias"}};
}

std::string ConvTranspose2d::signature() const {
  std::ostringstream s;
  s << "deconv(" << in_channels << "->" << out_channels << ",k" << kernel << ",s"
    << stride << ",p" << pad << ")";
  return s.str();
}

// ---------------------------------------------------------------------------
// BatchNorm2d

BatchNorm2d::BatchNorm2d(int ch, std::mt19937_64& rng)
    : channels(ch), gamma(static_cast<size_t>(ch)), beta(static_cast<size_t>(ch), 0.0),
      grad_gamma(static_cast<size_t>(ch), 0.0), grad_beta(static_cast<size_t>(ch), 0.0),
      running_mean(static_cast<size_t>(ch), 0.0),
      running_var(static_cast<size_t>(ch), 1.0) {
  init_normal(gamma, rng, 1.0, 0.02);
}

Tensor BatchNorm2d::forward(const Tensor& x, NetMode mode) {
  if (x.c != channels) throw std::runtime_error("batchnorm: channel mismatch");
  Tensor y(x.n, x.c, x.h, x.w);
  int plane = x.h * x.w;
  double m = static_cast<double>(x.n) * plane;
  if (mode == NetMode::train) {
    if (x.n < 2)
      throw std::runtime_error("batchnorm: training batch must have >= 2 samples");
    cache_xhat = Tensor(x.n, x.c, x.h, x.w);
    cache_inv_std.assign(channels, 0.0);
    cache_mean.assign(channels, 0.0);
    for (int ch = 0; ch < channels; ++ch) {
      double sum = 0.0, sq = 0.0;
      for (int i = 0; i < x.n; ++i)
        for (int yx = 0; yx < plane; ++yx) {
          double v = x.v[(static_cast<size_t>(i) * x.c + ch) * plane + yx];
          sum += v;
          sq += v * v;
        }
      double mean = sum / m;
      double var = std::max(0.0, sq / m - mean * mean);
      double inv_std = 1.0 / std::sqrt(var + eps);
      cache_mean[ch] = mean;
      cache_inv_std[ch] = inv_std;
      running_mean[ch] = running_decay * running_mean[ch] + (1 - running_decay) * mean;
      running_var[ch] = running_decay * running_var[ch] + (1 - running_decay) * var;
      for (int i = 0; i < x.n; ++i)
        for (int yx = 0; yx < plane; ++yx) {
          size_t idx = (static_cast<size_t>(i) * x.c + ch) * plane + yx;
          double xhat = (x.v[idx] - mean) * inv_std;
          cache_xhat.v[idx] = xhat;
          y.v[idx] = gamma[ch] * xhat + beta[ch];
        }
    }
  } else {
    for (int ch = 0; ch < channels; ++ch) {
      double inv_std = 1.0 / std::sqrt(running_var[ch] + eps);
      for (int i = 0; i < x.n; ++i)
        for (int yx = 0; yx < plane; ++yx) {
          size_t idx = (static_cast<size_t>(i) * x.c + ch) * plane + yx;
          y.v[idx] = gamma[ch] * (x.v[idx] - running_mean[ch]) * inv_std + beta[ch];
        }
    }
  }
  return y;
}

Tensor BatchNorm2d::backward(const Tensor& grad_out) {
  const Tensor& xhat = cache_xhat;
  Tensor dx(grad_out.n, grad_out.c, grad_out.h, grad_out.w);
  int plane = grad_out.h * grad_out.w;
  double m = static_cast<double>(grad_out.n) * plane;
  for (int ch = 0; ch < channels; ++ch) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (int i = 0; i < grad_out.n; ++i)
      for (int yx = 0; yx < plane; ++yx) {
        size_t idx = (static_cast<size_t>(i) * grad_out.c + ch) * plane + yx;
        sum_g += grad_out.v[idx];
        sum_gx += grad_out.v[idx] * xhat.v[idx];
      }
    grad_beta[ch] += sum_g;
    grad_gamma[ch] += sum_gx;
    double scale = gamma[ch] * cache_inv_std[ch] / m;
    for (int i = 0; i < grad_out.n; ++i)
      for (int yx = 0; yx < plane; ++yx) {
        size_t idx = (static_cast<size_t>(i) * grad_out.c + ch) * plane + yx;
        dx.v[idx] = scale * (m * grad_out.v[idx] - sum_g - xhat.v[idx] * sum_gx);
      }
  }
  return dx;
}

std::vector<ParamRef> BatchNorm2d::params() {
  return {{&gamma, &grad_gamma, "gamma"}, {&beta, &grad_beta, "beta"}};
}

std::vector<std::vector<double>*> BatchNorm2d::persistent_state() {
  return {&gamma, &beta, &running_mean, &running_var};
}

std::string BatchNorm2d::signature() const {
  return "bn(" + std::to_string(channels) + ")";
}

// ---------------------------------------------------------------------------
// Activations

Tensor ReLU::forward(const Tensor& x, NetMode) {
  cache_x = x;
  Tensor y = x;
  for (auto& v : y.v) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor ReLU::backward(const Tensor& grad_out) {
  Tensor dx = grad_out;
  for (size_t i = 0; i < dx.v.size(); ++i)
    if (cache_x.v[i] <= 0.0) dx.v[i] = 0.0;
  return dx;
}

Tensor LeakyReLU::forward(const Tensor& x, NetMode) {
  cache_x = x;
  Tensor y = x;
  for (auto& v : y.v) v = v > 0.0 ? v : slope * v;
  return y;
}

Tensor LeakyReLU::backward(const Tensor& grad_out) {
  Tensor dx = grad_out;
  for (size_t i = 0; i < dx.v.size(); ++i)
    if (cache_x.v[i] <= 0.0) dx.v[i] *= slope;
  return dx;
}

std::string LeakyReLU::signature() const {
  std::ostringstream s;
  s << "lrelu(" << slope << ")";
  return s.str();
}

Tensor Tanh::forward(const Tensor& x, NetMode) {
  Tensor y = x;
  for (auto& v : y.v) v = std::tanh(v);
  cache_y = y;
  return y;
}

Tensor Tanh::backward(const Tensor& grad_out) {
  Tensor dx = grad_out;
  for (size_t i = 0; i < dx.v.size(); ++i)
    dx.v[i] *= 1.0 - cache_y.v[i] * cache_y.v[i];
  return dx;
}

Tensor Sigmoid::forward(const Tensor& x, NetMode) {
  Tensor y = x;
  for (auto& v : y.v) v = 1.0 / (1.0 + std::exp(-v));
  cache_y = y;
  return y;
}

Tensor Sigmoid::backward(const Tensor& grad_out) {
  Tensor dx = grad_out;
  for (size_t i = 0; i < dx.v.size(); ++i)
    dx.v[i] *= cache_y.v[i] * (1.0 - cache_y.v[i]);
  return dx;
}

// ---------------------------------------------------------------------------
// Network

Tensor Network::forward(Tensor x, NetMode mode) {
  for (auto& layer : layers) x = layer->forward(x, mode);
  return x;
}

Tensor Network::backward(Tensor grad) {
  for (auto it = layers.rbegin(); it != layers.rend(); ++it)
    grad = (*it)->backward(grad);
  return grad;
}

std::vector<ParamRef> Network::params() {
  std::vector<ParamRef> out;
  for (auto& layer : layers)
    for (auto& p : layer->params()) out.push_back(p);
  return out;
}

std::vector<std::vector<double>*> Network::persistent_state() {
  std::vector<std::vector<double>*> out;
  for (auto& layer : layers)
    for (auto* block : layer->persistent_state()) out.push_back(block);
  return out;
}

void Network::zero_grad() {
  for (auto& p : params()) std::fill(p.grad->begin(), p.grad->end(), 0.0);
}

std::string Network::signature() const {
  std::string out;
  for (const auto& layer : layers) {
    if (!out.empty()) out += '|';
    out += layer->signature();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adam

void Adam::step(const std::vector<ParamRef>& params, double grad_clip) {
  if (slots.size() != params.size()) {
    slots.clear();
    slots.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      slots[i].m.assign(params[i].value->size(), 0.0);
      slots[i].v.assign(params[i].value->size(), 0.0);
    }
  }
  double scale = 1.0;
  if (grad_clip > 0.0) {
    double sq = 0.0;
    for (const auto& p : params)
      for (double g : *p.grad) sq += g * g;
    double norm = std::sqrt(sq);
    if (norm > grad_clip) scale = grad_clip / norm;
  }
  ++t;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& value = *params[i].value;
    auto& grad = *params[i].grad;
    auto& slot = slots[i];
    for (size_t j = 0; j < value.size(); ++j) {
      double g = grad[j] * scale;
      slot.m[j] = beta1 * slot.m[j] + (1.0 - beta1) * g;
      slot.v[j] = beta2 * slot.v[j] + (1.0 - beta2) * g * g;
      double mhat = slot.m[j] / bc1;
      double vhat = slot.v[j] / bc2;
      value[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

std::vector<double> flatten_params(const std::vector<ParamRef>& params) {
  std::vector<double> flat;
  for (const auto& p : params) flat.insert(flat.end(), p.value->begin(), p.value->end());
  return flat;
}

void unflatten_params(const std::vector<ParamRef>& params, const std::vector<double>& flat) {
  size_t pos = 0;
  for (const auto& p : params) {
    std::copy(flat.begin() + pos, flat.begin() + pos + p.value->size(), p.value->begin());
    pos += p.value->size();
  }
  if (pos != flat.size()) throw std::runtime_error("unflatten_params: size mismatch");
}

std::vector<double> flatten_grads(const std::vector<ParamRef>& params) {
  std::vector<double> flat;
  for (const auto& p : params) flat.insert(flat.end(), p.grad->begin(), p.grad->end());
  return flat;
}

}  // namespace tablegan
