// SPDX-License-Identifier: MIT
// Mini-batch SGD with patience-based early stopping: training stops once the
// validation loss has failed to improve for `patience` consecutive epochs,
// and the model is rolled back to the best-validation-loss snapshot.
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "model.h"

namespace hf {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 64;
  int max_epochs = 50;
  int patience = 3;
  uint64_t seed = 1;
  double dropout_rate = 0.25;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0;
  double val_loss = 0;
};

struct TrainResult {
  int best_epoch = 0;     // epoch whose snapshot the model now holds
  int stopped_epoch = 0;  // last epoch that ran
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::vector<EpochStats> history;
};

// The stopping rule, exposed separately so its behaviour can be tested
// against loss sequences directly.  An epoch improves only when its loss is
// strictly below the best seen so far.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  // Returns true when this epoch sets a new best (caller should snapshot).
  bool observe(double val_loss) {
    seen_++;
    if (val_loss < best_) {
      best_ = val_loss;
      best_epoch_ = seen_;
      since_best_ = 0;
      return true;
    }
    since_best_++;
    return false;
  }

  bool should_stop() const { return since_best_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }
  int epochs_seen() const { return seen_; }

 private:
  int patience_;
  double best_ = std::numeric_limits<double>::infinity();
  int best_epoch_ = 0;
  int since_best_ = 0;
  int seen_ = 0;
};

// In-memory dataset: one tensor (already scaled to [0,1]) and one 0/1 label
// per example.
struct Dataset {
  std::vector<std::vector<float>> x;
  std::vector<float> y;

  size_t size() const { return x.size(); }
};

// Trains in place; on return the model holds the best-validation snapshot.
TrainResult train(Cnn<float>& model, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& cfg);

// Mean eval-mode BCE over a dataset.
double mean_loss(const Cnn<float>& model, const Dataset& ds);

}  // namespace hf
