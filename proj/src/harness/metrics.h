// SPDX-License-Identifier: MIT
//
// Binary-classification metrics over a labelled feature-image manifest.
// "Face" is the positive class throughout.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "../cnn/model.h"
#include "manifest.h"

namespace hf {

struct EvalReport {
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t tn = 0;
  uint64_t fn = 0;
  // Left empty when the denominator is zero (no predicted positives for
  // precision, no actual positives for recall, both for F1).
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  // Experiment tag; 0 when the report is not tied to one configuration.
  int size = 0;
  int qp = 0;

  uint64_t total() const { return tp + fp + tn + fn; }
  double accuracy() const;
};

// Derives precision/recall/F1 from raw counts.
EvalReport report_from_counts(uint64_t tp, uint64_t fp, uint64_t tn,
                              uint64_t fn);

// Runs the model over every entry and tallies the confusion matrix.
// A probability >= threshold predicts "face". `manifest_path` anchors
// relative entry paths; `jobs` bounds the OpenMP team (<= 0 means default).
EvalReport evaluate(const Cnn<float>& model,
                    const std::vector<ManifestEntry>& entries,
                    const std::string& manifest_path, double threshold = 0.5,
                    int jobs = 0);

// Same tally over in-memory tensors (one flattened input per row).
EvalReport evaluate_tensors(const Cnn<float>& model,
                            const std::vector<std::vector<float>>& inputs,
                            const std::vector<float>& labels,
                            double threshold = 0.5, int jobs = 0);

}  // namespace hf
