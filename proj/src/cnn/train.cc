// SPDX-License-Identifier: MIT

#include "train.h"

#include <numeric>

#include "../errors.h"

namespace hf {

namespace {

template <typename F>
void zip_blobs(CnnParams<float>& a, const CnnParams<float>& b, F f) {
  f(a.conv1_w, b.conv1_w);
  f(a.conv1_b, b.conv1_b);
  f(a.conv2_w, b.conv2_w);
  f(a.conv2_b, b.conv2_b);
  f(a.fc1_w, b.fc1_w);
  f(a.fc1_b, b.fc1_b);
  f(a.fc2_w, b.fc2_w);
  f(a.fc2_b, b.fc2_b);
}

}  // namespace

double mean_loss(const Cnn<float>& model, const Dataset& ds) {
  if (ds.size() == 0) throw EmptyDataset("loss over empty dataset");
  double sum = 0;
  FwdCache<float> cache;
  for (size_t i = 0; i < ds.size(); i++) {
    const float p = model.forward(ds.x[i], cache, false, nullptr);
    sum += double(bce_loss(p, ds.y[i]));
  }
  return sum / double(ds.size());
}

TrainResult train(Cnn<float>& model, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& cfg) {
  if (train_set.size() == 0) throw EmptyDataset("empty training set");
  if (val_set.size() == 0) throw EmptyDataset("empty validation set");
  if (train_set.size() != train_set.y.size() ||
      val_set.size() != val_set.y.size())
    throw ShapeMismatch("dataset labels do not match examples");

  Rng rng(cfg.seed);
  EarlyStopper stopper(cfg.patience);
  TrainResult result;
  CnnParams<float> best = model.params();
  CnnParams<float> grad = model.params();
  grad.fill(0.0f);
  FwdCache<float> cache;

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 1; epoch <= cfg.max_epochs; epoch++) {
    rng.shuffle(order);
    double epoch_loss = 0;
    size_t done = 0;
    while (done < order.size()) {
      const size_t n = std::min(size_t(cfg.batch_size), order.size() - done);
      grad.fill(0.0f);
      for (size_t k = 0; k < n; k++) {
        const size_t idx = order[done + k];
        const float p = model.forward(train_set.x[idx], cache, true, &rng,
                                      float(cfg.dropout_rate));
        epoch_loss += double(bce_loss(p, train_set.y[idx]));
        model.backward(cache, train_set.y[idx], grad);
      }
      // Plain SGD on the mini-batch mean gradient.
      const float step = float(cfg.learning_rate / double(n));
      zip_blobs(model.params(), grad,
                [step](std::vector<float>& w, const std::vector<float>& g) {
                  for (size_t i = 0; i < w.size(); i++) w[i] -= step * g[i];
                });
      done += n;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / double(train_set.size());
    stats.val_loss = mean_loss(model, val_set);
    result.history.push_back(stats);
    result.stopped_epoch = epoch;

    if (stopper.observe(stats.val_loss)) best = model.params();
    if (stopper.should_stop()) break;
  }

  model.params() = best;
  result.best_epoch = stopper.best_epoch();
  result.best_val_loss = stopper.best_loss();
  return result;
}

}  // namespace hf
