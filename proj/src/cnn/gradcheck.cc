// SPDX-License-Identifier: MIT

#include "gradcheck.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace hf {

const char* blob_name(Blob b) {
  switch (b) {
    case Blob::conv1_w: return "conv1_w";
    case Blob::conv1_b: return "conv1_b";
    case Blob::conv2_w: return "conv2_w";
    case Blob::conv2_b: return "conv2_b";
    case Blob::fc1_w: return "fc1_w";
    case Blob::fc1_b: return "fc1_b";
    case Blob::fc2_w: return "fc2_w";
    default: return "fc2_b";
  }
}

FdEvaluator::FdEvaluator(const Cnn<double>& model,
                         const std::vector<double>& x, double label)
    : m_(model), label_(label) {
  const double p = m_.forward(x, c_, false, nullptr);
  base_loss_ = bce_loss(p, label_);
}

// Finish from sparse fc1 post-activation deltas (u, new_af1).
double FdEvaluator::finish_sparse_af1(
    const std::vector<std::pair<int, double>>& da) const {
  const auto& w2 = m_.params().fc2_w;
  double zf2 = c_.zf2;
  for (const auto& [u, na] : da) zf2 += w2[size_t(u)] * (na - c_.af1[size_t(u)]);
  return bce_loss(sigmoid(zf2), label_);
}

// Finish from sparse conv2 post-activation deltas (flat index, new value):
// propagate through fc1 (delta dot-products), its ReLU, and fc2.
double FdEvaluator::finish_sparse_a2(
    const std::vector<std::pair<int, double>>& na) const {
  if (na.empty()) return base_loss_;
  const auto& s = m_.shape();
  const auto& w1 = m_.params().fc1_w;
  const auto& w2 = m_.params().fc2_w;
  double zf2 = c_.zf2;
  for (int u = 0; u < s.fc1; u++) {
    const double* row = w1.data() + size_t(u) * s.fc_in;
    double dz = 0;
    for (const auto& [idx, v] : na) dz += row[idx] * (v - c_.a2[size_t(idx)]);
    if (dz == 0) continue;
    const double nz = c_.zf1[size_t(u)] + dz;
    const double naf = nz > 0 ? nz : 0;
    zf2 += w2[size_t(u)] * (naf - c_.af1[size_t(u)]);
  }
  return bce_loss(sigmoid(zf2), label_);
}

// conv2 weight or bias perturbation: only output channel f changes.
double FdEvaluator::loss_conv2(size_t idx, bool bias, double delta) const {
  const auto& s = m_.shape();
  const cnn::ConvDims& d = s.conv2;
  const int kk = d.k * d.k;
  const int f = bias ? int(idx) : int(idx / (size_t(kk) * d.in_c));
  int ky = 0, kx = 0, ci = 0;
  if (!bias) {
    const size_t rem = idx % (size_t(kk) * d.in_c);
    ky = int(rem / (size_t(d.k) * d.in_c));
    kx = int((rem / d.in_c) % d.k);
    ci = int(rem % d.in_c);
  }
  std::vector<std::pair<int, double>> na;
  na.reserve(size_t(d.out_h) * d.out_w);
  for (int oy = 0; oy < d.out_h; oy++) {
    for (int ox = 0; ox < d.out_w; ox++) {
      double dz = delta;
      if (!bias) {
        const int iy = oy + ky, ix = ox + kx;  // stride 1
        dz *= c_.pool[(size_t(iy) * d.in_w + ix) * d.in_c + ci];
      }
      if (dz == 0) continue;
      const size_t zi = (size_t(oy) * d.out_w + ox) * d.filters + f;
      const double nz = c_.z2[zi] + dz;
      const double nact = nz > 0 ? nz : 0;
      if (nact != c_.a2[zi]) na.emplace_back(int(zi), nact);
    }
  }
  return finish_sparse_a2(na);
}

// conv1 weight or bias perturbation: channel f of conv1 changes, then its
// pooled plane, then (densely) the conv2 output, then fc1.
double FdEvaluator::loss_conv1(int f, size_t widx, bool bias,
                               double delta) const {
  const auto& s = m_.shape();
  const cnn::ConvDims& d1 = s.conv1;
  int ky = 0, kx = 0, ci = 0;
  if (!bias) {
    const size_t rem = widx % (size_t(d1.k) * d1.k * d1.in_c);
    ky = int(rem / (size_t(d1.k) * d1.in_c));
    kx = int((rem / d1.in_c) % d1.k);
    ci = int(rem % d1.in_c);
  }

  // New a1 for channel f at every conv1 output position.
  const int oh = d1.out_h, ow = d1.out_w;
  std::vector<double> a1f(size_t(oh) * ow);
  for (int oy = 0; oy < oh; oy++) {
    for (int ox = 0; ox < ow; ox++) {
      double dz = delta;
      if (!bias) {
        const int iy = oy * d1.stride + ky, ix = ox * d1.stride + kx;
        dz *= c_.x[(size_t(iy) * d1.in_w + ix) * d1.in_c + ci];
      }
      const double nz = c_.z1[(size_t(oy) * ow + ox) * d1.filters + f] + dz;
      a1f[size_t(oy) * ow + ox] = nz > 0 ? nz : 0;
    }
  }

  // Re-pool channel f (window maxima may move; do not trust cached argmax).
  const int ph = s.pool_h, pw = s.pool_w;
  const int f1 = d1.filters;
  std::vector<double> dpool(size_t(ph) * pw);
  bool any_pool = false;
  for (int py = 0; py < ph; py++) {
    for (int px = 0; px < pw; px++) {
      double best = a1f[size_t(py * 2) * ow + px * 2];
      best = std::max(best, a1f[size_t(py * 2) * ow + px * 2 + 1]);
      best = std::max(best, a1f[size_t(py * 2 + 1) * ow + px * 2]);
      best = std::max(best, a1f[size_t(py * 2 + 1) * ow + px * 2 + 1]);
      const double dp =
          best - c_.pool[(size_t(py) * pw + px) * f1 + f];
      dpool[size_t(py) * pw + px] = dp;
      any_pool |= (dp != 0);
    }
  }
  if (!any_pool) return base_loss_;

  // Dense conv2 delta from the single changed input channel.
  const cnn::ConvDims& d2 = s.conv2;
  const auto& w2 = m_.params().conv2_w;
  std::vector<std::pair<int, double>> na;
  for (int oy = 0; oy < d2.out_h; oy++) {
    for (int ox = 0; ox < d2.out_w; ox++) {
      for (int g = 0; g < d2.filters; g++) {
        double dz = 0;
        const double* wg = w2.data() + size_t(g) * d2.k * d2.k * d2.in_c;
        for (int yy = 0; yy < d2.k; yy++)
          for (int xx = 0; xx < d2.k; xx++) {
            const double dp = dpool[size_t(oy + yy) * pw + (ox + xx)];
            if (dp != 0)
              dz += wg[(size_t(yy) * d2.k + xx) * d2.in_c + f] * dp;
          }
        if (dz == 0) continue;
        const size_t zi = (size_t(oy) * d2.out_w + ox) * d2.filters + g;
        const double nz = c_.z2[zi] + dz;
        const double nact = nz > 0 ? nz : 0;
        if (nact != c_.a2[zi]) na.emplace_back(int(zi), nact);
      }
    }
  }
  return finish_sparse_a2(na);
}

double FdEvaluator::loss_with(Blob blob, size_t idx, double value) const {
  const auto& p = m_.params();
  const auto& s = m_.shape();
  switch (blob) {
    case Blob::fc2_b:
      return bce_loss(sigmoid(c_.zf2 + (value - p.fc2_b[0])), label_);
    case Blob::fc2_w:
      return bce_loss(
          sigmoid(c_.zf2 + (value - p.fc2_w[idx]) * c_.af1[idx]), label_);
    case Blob::fc1_b: {
      const double nz = c_.zf1[idx] + (value - p.fc1_b[idx]);
      return finish_sparse_af1({{int(idx), nz > 0 ? nz : 0}});
    }
    case Blob::fc1_w: {
      const size_t u = idx / size_t(s.fc_in), i = idx % size_t(s.fc_in);
      const double nz = c_.zf1[u] + (value - p.fc1_w[idx]) * c_.a2[i];
      return finish_sparse_af1({{int(u), nz > 0 ? nz : 0}});
    }
    case Blob::conv2_w:
      return loss_conv2(idx, false, value - p.conv2_w[idx]);
    case Blob::conv2_b:
      return loss_conv2(idx, true, value - p.conv2_b[idx]);
    case Blob::conv1_w: {
      const size_t per_f = size_t(s.conv1.k) * s.conv1.k * s.conv1.in_c;
      return loss_conv1(int(idx / per_f), idx, false, value - p.conv1_w[idx]);
    }
    default:  // conv1_b
      return loss_conv1(int(idx), idx, true, value - p.conv1_b[idx]);
  }
}

double FdEvaluator::loss_naive(const Cnn<double>& model,
                               const std::vector<double>& x, double label,
                               Blob blob, size_t idx, double value) {
  Cnn<double> copy = model;
  auto& p = copy.params();
  switch (blob) {
    case Blob::conv1_w: p.conv1_w[idx] = value; break;
    case Blob::conv1_b: p.conv1_b[idx] = value; break;
    case Blob::conv2_w: p.conv2_w[idx] = value; break;
    case Blob::conv2_b: p.conv2_b[idx] = value; break;
    case Blob::fc1_w: p.fc1_w[idx] = value; break;
    case Blob::fc1_b: p.fc1_b[idx] = value; break;
    case Blob::fc2_w: p.fc2_w[idx] = value; break;
    case Blob::fc2_b: p.fc2_b[idx] = value; break;
  }
  return bce_loss(copy.forward_eval(x), label);
}

namespace {

// Distinct random indices; degenerates to "all" when the blob is small.
std::vector<size_t> sample_indices(Rng& rng, size_t blob_size, int samples) {
  std::vector<size_t> out;
  if (samples <= 0 || size_t(samples) >= blob_size) {
    out.resize(blob_size);
    for (size_t i = 0; i < blob_size; i++) out[i] = i;
    return out;
  }
  std::set<size_t> seen;
  while (seen.size() < size_t(samples)) seen.insert(rng.below(blob_size));
  out.assign(seen.begin(), seen.end());
  return out;
}

const std::vector<double>& blob_of(const CnnParams<double>& p, Blob b) {
  switch (b) {
    case Blob::conv1_w: return p.conv1_w;
    case Blob::conv1_b: return p.conv1_b;
    case Blob::conv2_w: return p.conv2_w;
    case Blob::conv2_b: return p.conv2_b;
    case Blob::fc1_w: return p.fc1_w;
    case Blob::fc1_b: return p.fc1_b;
    case Blob::fc2_w: return p.fc2_w;
    default: return p.fc2_b;
  }
}

}  // namespace

GradcheckReport gradcheck_model(const NetConfig& cfg,
                                const GradcheckConfig& gc) {
  Rng rng(gc.seed);
  Cnn<double> model(cfg);
  model.init_weights(rng);
  // Biases start at zero everywhere; nudge them so bias gradients are probed
  // at a generic point rather than a symmetric one.
  for (auto* b : {&model.params().conv1_b, &model.params().conv2_b,
                  &model.params().fc1_b, &model.params().fc2_b})
    for (double& v : *b) v = rng.uniform(-0.05, 0.05);

  std::vector<double> x(size_t(cfg.input_size) * cfg.input_size * 3);
  for (double& v : x) v = rng.uniform();
  const double label = rng.uniform() < 0.5 ? 0.0 : 1.0;

  // Analytic gradients at the same point.
  FwdCache<double> cache;
  model.forward(x, cache, false, nullptr);
  CnnParams<double> grad = model.params();
  grad.fill(0.0);
  model.backward(cache, label, grad);

  FdEvaluator fd(model, x, label);
  GradcheckReport report;

  const Blob weight_blobs[] = {Blob::conv1_w, Blob::conv2_w, Blob::fc1_w,
                               Blob::fc2_w};
  const Blob bias_blobs[] = {Blob::conv1_b, Blob::conv2_b, Blob::fc1_b,
                             Blob::fc2_b};

  auto check_one = [&](Blob blob, size_t idx) {
    const double w0 = blob_of(model.params(), blob)[idx];
    const double g = blob_of(grad, blob)[idx];
    double best_rel = std::numeric_limits<double>::infinity();
    double best_fd = 0;
    // Shrink the step when a comparison fails: a ReLU kink inside the
    // interval breaks the quadratic error model, and a smaller interval
    // almost surely excludes it.  A genuinely wrong gradient fails at all
    // steps since central differences converge to the true derivative.
    for (const double hs : {1e-5, 1e-6, 1e-7}) {
      const double h = hs * std::max(1.0, std::abs(w0));
      const double lp = fd.loss_with(blob, idx, w0 + h);
      const double lm = fd.loss_with(blob, idx, w0 - h);
      const double fdg = (lp - lm) / (2 * h);
      const double rel =
          std::abs(g - fdg) / std::max({std::abs(g), std::abs(fdg), 1e-10});
      if (rel < best_rel) {
        best_rel = rel;
        best_fd = fdg;
      }
      if (rel <= gc.tol || std::abs(g - fdg) <= 1e-9) {
        best_rel = std::min(best_rel, rel);
        break;
      }
    }
    report.checked++;
    report.max_rel_err = std::max(report.max_rel_err, best_rel);
    if (best_rel > gc.tol) {
      GradcheckFailure f;
      f.where = std::string(blob_name(blob)) + "[" + std::to_string(idx) + "]";
      f.analytic = g;
      f.fd = best_fd;
      f.rel_err = best_rel;
      report.failures.push_back(f);
    }
  };

  for (Blob b : weight_blobs)
    for (size_t idx : sample_indices(rng, blob_of(model.params(), b).size(),
                                     gc.samples_per_weight_layer))
      check_one(b, idx);
  for (Blob b : bias_blobs)
    for (size_t idx = 0; idx < blob_of(model.params(), b).size(); idx++)
      check_one(b, idx);

  return report;
}

GradcheckReport gradcheck_sampled(int input_size, const GradcheckConfig& gc) {
  NetConfig cfg;
  cfg.input_size = input_size;
  return gradcheck_model(cfg, gc);
}

GradcheckReport gradcheck_full_shrunken(const GradcheckConfig& gc) {
  NetConfig cfg;
  cfg.input_size = 64;
  cfg.conv1_filters = 10;
  cfg.conv2_filters = 10;
  cfg.fc1_units = 50;
  GradcheckConfig all = gc;
  all.samples_per_weight_layer = 0;
  return gradcheck_model(cfg, all);
}

}  // namespace hf
