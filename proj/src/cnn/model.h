// SPDX-License-Identifier: MIT
// The face/non-face classifier network: conv(5x5x3, stride 4) -> ReLU ->
// maxpool(2x2, stride 2) -> conv(5x5, stride 1) -> ReLU -> fc(500) -> ReLU ->
// dropout(0.25) -> fc(1) -> sigmoid.  Valid padding and floor pooling
// throughout — the only combination that reproduces the pinned parameter
// counts (708,701 at input 64; 6,308,701 at input 128), which the constructor
// asserts for the standard configuration.
//
// The class is templated on the scalar type: float for training and
// inference, double for gradient checking.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../errors.h"
#include "../featimg.h"
#include "../rng.h"
#include "kernels.h"

namespace hf {

struct NetConfig {
  int input_size = 64;    // 64 or 128 for the standard model
  int conv1_filters = 100;
  int conv2_filters = 100;
  int fc1_units = 500;
  int qp = 0;  // provenance carried into the model file

  bool standard() const {
    return conv1_filters == 100 && conv2_filters == 100 && fc1_units == 500 &&
           (input_size == 64 || input_size == 128);
  }
};

struct NetShape {
  cnn::ConvDims conv1, conv2;
  int pool_h = 0, pool_w = 0;
  int fc_in = 0;   // flattened conv2 output
  int fc1 = 0;

  static NetShape of(const NetConfig& c) {
    NetShape s;
    s.conv1 = cnn::ConvDims::valid(c.input_size, c.input_size, 3,
                                   c.conv1_filters, 5, 4);
    s.pool_h = s.conv1.out_h / 2;
    s.pool_w = s.conv1.out_w / 2;
    s.conv2 = cnn::ConvDims::valid(s.pool_h, s.pool_w, c.conv1_filters,
                                   c.conv2_filters, 5, 1);
    s.fc_in = s.conv2.out_h * s.conv2.out_w * c.conv2_filters;
    s.fc1 = c.fc1_units;
    return s;
  }
};

template <typename T>
struct CnnParams {
  std::vector<T> conv1_w, conv1_b;
  std::vector<T> conv2_w, conv2_b;
  std::vector<T> fc1_w, fc1_b;
  std::vector<T> fc2_w, fc2_b;

  size_t count() const {
    return conv1_w.size() + conv1_b.size() + conv2_w.size() + conv2_b.size() +
           fc1_w.size() + fc1_b.size() + fc2_w.size() + fc2_b.size();
  }

  template <typename F>
  void for_each_blob(F f) {
    f(conv1_w); f(conv1_b); f(conv2_w); f(conv2_b);
    f(fc1_w); f(fc1_b); f(fc2_w); f(fc2_b);
  }
  template <typename F>
  void for_each_blob(F f) const {
    f(conv1_w); f(conv1_b); f(conv2_w); f(conv2_b);
    f(fc1_w); f(fc1_b); f(fc2_w); f(fc2_b);
  }

  void fill(T v) {
    for_each_blob([v](std::vector<T>& b) { std::fill(b.begin(), b.end(), v); });
  }
};

// Everything the backward pass needs from a forward pass, plus reusable
// scratch so a training loop does not churn the allocator.
template <typename T>
struct FwdCache {
  std::vector<T> x;                 // input copy
  std::vector<T> z1, a1;            // conv1 pre/post activation
  std::vector<T> pool;
  std::vector<int32_t> argmax;
  std::vector<T> z2, a2;            // conv2 pre/post activation
  std::vector<T> zf1, af1, af1d;    // fc1 pre/post activation, post-dropout
  std::vector<T> drop_mask;         // 0 or 1/keep_prob; 1 in eval mode
  T zf2 = 0;
  T prob = 0;
  bool train_mode = false;
  // backward scratch
  std::vector<T> d_af1, d_zf1, d_a2, d_z2, d_pool, d_a1, d_z1;
};

template <typename T>
T sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

// Binary cross-entropy with the probability clamped to [eps, 1-eps].
template <typename T>
T bce_loss(T p, T label) {
  const T eps = T(1e-7);
  const T q = p < eps ? eps : (p > T(1) - eps ? T(1) - eps : p);
  return -(label * std::log(q) + (T(1) - label) * std::log(T(1) - q));
}

template <typename T>
class Cnn {
 public:
  explicit Cnn(const NetConfig& cfg) : cfg_(cfg), shape_(NetShape::of(cfg)) {
    p_.conv1_w.assign(shape_.conv1.weight_count(), T(0));
    p_.conv1_b.assign(size_t(cfg.conv1_filters), T(0));
    p_.conv2_w.assign(shape_.conv2.weight_count(), T(0));
    p_.conv2_b.assign(size_t(cfg.conv2_filters), T(0));
    p_.fc1_w.assign(size_t(shape_.fc1) * shape_.fc_in, T(0));
    p_.fc1_b.assign(size_t(shape_.fc1), T(0));
    p_.fc2_w.assign(size_t(shape_.fc1), T(0));
    p_.fc2_b.assign(1, T(0));
    if (cfg.standard()) {
      const size_t expect = cfg.input_size == 64 ? 708701u : 6308701u;
      if (p_.count() != expect)
        throw ShapeMismatch("parameter count does not match the architecture");
    }
  }

  const NetConfig& config() const { return cfg_; }
  const NetShape& shape() const { return shape_; }
  CnnParams<T>& params() { return p_; }
  const CnnParams<T>& params() const { return p_; }
  size_t param_count() const { return p_.count(); }

  // Uniform initialization in +/- 1/sqrt(fan_in) per layer, all draws from
  // the one generator in a fixed order.
  void init_weights(Rng& rng) {
    auto init = [&rng](std::vector<T>& w, size_t fan_in) {
      const double s = 1.0 / std::sqrt(double(fan_in));
      for (T& v : w) v = T(rng.uniform(-s, s));
    };
    init(p_.conv1_w, size_t(shape_.conv1.k) * shape_.conv1.k * 3);
    init(p_.conv2_w, size_t(shape_.conv2.k) * shape_.conv2.k *
                         size_t(cfg_.conv1_filters));
    init(p_.fc1_w, size_t(shape_.fc_in));
    init(p_.fc2_w, size_t(shape_.fc1));
    // biases stay zero
  }

  // Returns P(face).  train_mode draws a dropout mask from rng (required in
  // that case); eval mode is a pure function of (params, x).
  T forward(const std::vector<T>& x, FwdCache<T>& c, bool train_mode = false,
            Rng* rng = nullptr, T dropout_rate = T(0.25)) const {
    const size_t want = size_t(cfg_.input_size) * cfg_.input_size * 3;
    if (x.size() != want) throw ShapeMismatch("input tensor size mismatch");
    const auto& s = shape_;
    c.x = x;
    c.train_mode = train_mode;
    c.z1.resize(s.conv1.out_count());
    c.a1.resize(s.conv1.out_count());
    cnn::conv_forward(s.conv1, x.data(), p_.conv1_w.data(), p_.conv1_b.data(),
                      c.z1.data());
    cnn::relu_forward(c.z1.data(), c.a1.data(), c.z1.size());

    const size_t pool_n = size_t(s.pool_h) * s.pool_w * cfg_.conv1_filters;
    c.pool.resize(pool_n);
    c.argmax.resize(pool_n);
    cnn::maxpool2_forward(s.conv1.out_h, s.conv1.out_w, cfg_.conv1_filters,
                          c.a1.data(), c.pool.data(), c.argmax.data());

    c.z2.resize(s.conv2.out_count());
    c.a2.resize(s.conv2.out_count());
    cnn::conv_forward(s.conv2, c.pool.data(), p_.conv2_w.data(),
                      p_.conv2_b.data(), c.z2.data());
    cnn::relu_forward(c.z2.data(), c.a2.data(), c.z2.size());

    c.zf1.resize(size_t(s.fc1));
    c.af1.resize(size_t(s.fc1));
    c.af1d.resize(size_t(s.fc1));
    cnn::fc_forward(s.fc1, s.fc_in, c.a2.data(), p_.fc1_w.data(),
                    p_.fc1_b.data(), c.zf1.data());
    cnn::relu_forward(c.zf1.data(), c.af1.data(), c.zf1.size());

    c.drop_mask.assign(size_t(s.fc1), T(1));
    if (train_mode) {
      if (!rng) throw ShapeMismatch("train-mode forward needs an rng");
      const T keep = T(1) - dropout_rate;
      for (int u = 0; u < s.fc1; u++)
        c.drop_mask[size_t(u)] =
            (T(rng->uniform()) < keep) ? T(1) / keep : T(0);
    }
    for (int u = 0; u < s.fc1; u++)
      c.af1d[size_t(u)] = c.af1[size_t(u)] * c.drop_mask[size_t(u)];

    cnn::fc_forward(1, s.fc1, c.af1d.data(), p_.fc2_w.data(), p_.fc2_b.data(),
                    &c.zf2);
    c.prob = sigmoid(c.zf2);
    return c.prob;
  }

  T forward_eval(const std::vector<T>& x) const {
    FwdCache<T> c;
    return forward(x, c, false, nullptr);
  }

  // Accumulates dLoss/dParam into grad (which must be shaped like params and
  // zeroed by the caller before the first example of a batch).
  void backward(FwdCache<T>& c, T label, CnnParams<T>& grad) const {
    const auto& s = shape_;
    // dL/dzf2 for BCE-through-sigmoid.
    const T dzf2 = c.prob - label;

    c.d_af1.resize(size_t(s.fc1));
    cnn::fc_backward_params(1, s.fc1, c.af1d.data(), &dzf2, grad.fc2_w.data(),
                            grad.fc2_b.data());
    cnn::fc_backward_input(1, s.fc1, p_.fc2_w.data(), &dzf2, c.d_af1.data());

    c.d_zf1.resize(size_t(s.fc1));
    for (int u = 0; u < s.fc1; u++)
      c.d_af1[size_t(u)] *= c.drop_mask[size_t(u)];
    cnn::relu_backward(c.zf1.data(), c.d_af1.data(), c.d_zf1.data(),
                       c.zf1.size());

    c.d_a2.resize(size_t(s.fc_in));
    cnn::fc_backward_params(s.fc1, s.fc_in, c.a2.data(), c.d_zf1.data(),
                            grad.fc1_w.data(), grad.fc1_b.data());
    cnn::fc_backward_input(s.fc1, s.fc_in, p_.fc1_w.data(), c.d_zf1.data(),
                           c.d_a2.data());

    c.d_z2.resize(c.z2.size());
    cnn::relu_backward(c.z2.data(), c.d_a2.data(), c.d_z2.data(), c.z2.size());

    c.d_pool.assign(c.pool.size(), T(0));
    cnn::conv_backward_params(s.conv2, c.d_z2.data(), c.pool.data(),
                              grad.conv2_w.data(), grad.conv2_b.data());
    cnn::conv_backward_input(s.conv2, c.d_z2.data(), p_.conv2_w.data(),
                             c.d_pool.data());

    c.d_a1.assign(c.a1.size(), T(0));
    cnn::maxpool2_backward(s.conv1.out_h, s.conv1.out_w, cfg_.conv1_filters,
                           c.d_pool.data(), c.argmax.data(), c.d_a1.data());

    c.d_z1.resize(c.z1.size());
    cnn::relu_backward(c.z1.data(), c.d_a1.data(), c.d_z1.data(), c.z1.size());
    cnn::conv_backward_params(s.conv1, c.d_z1.data(), c.x.data(),
                              grad.conv1_w.data(), grad.conv1_b.data());
    // No input gradient needed at the first layer.
  }

 private:
  NetConfig cfg_;
  NetShape shape_;
  CnnParams<T> p_;
};

// FeatureImage -> channels-last tensor in [0,1], channel order (IPM,PUS,BN).
template <typename T>
std::vector<T> feature_to_tensor(const FeatureImage& img) {
  const size_t n = size_t(img.width) * img.height;
  std::vector<T> x(3 * n);
  for (size_t i = 0; i < n; i++) {
    x[3 * i + 0] = T(img.ipm_plane[i]) / T(255);
    x[3 * i + 1] = T(img.pus_plane[i]) / T(255);
    x[3 * i + 2] = T(img.bn_plane[i]) / T(255);
  }
  return x;
}

// HFCN serialization (float models only).
std::vector<uint8_t> encode_model(const Cnn<float>& model);
Cnn<float> decode_model(const uint8_t* data, size_t size);
Cnn<float> decode_model(const std::vector<uint8_t>& bytes);
void save_model(const Cnn<float>& model, const std::string& path);
Cnn<float> load_model(const std::string& path);

}  // namespace hf
