// SPDX-License-Identifier: MIT

#include "metrics.h"

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "../errors.h"
#include "../featimg.h"

namespace hf {

double EvalReport::accuracy() const {
  const uint64_t n = total();
  return n == 0 ? 0.0 : double(tp + tn) / double(n);
}

EvalReport report_from_counts(uint64_t tp, uint64_t fp, uint64_t tn,
                              uint64_t fn) {
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  if (tp + fp > 0) r.precision = double(tp) / double(tp + fp);
  if (tp + fn > 0) r.recall = double(tp) / double(tp + fn);
  if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0)
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  return r;
}

EvalReport evaluate_tensors(const Cnn<float>& model,
                            const std::vector<std::vector<float>>& inputs,
                            const std::vector<float>& labels, double threshold,
                            int jobs) {
  if (inputs.size() != labels.size())
    throw ShapeMismatch("input and label counts differ");
  const size_t want =
      size_t(model.config().input_size) * size_t(model.config().input_size) * 3;
  for (const auto& x : inputs)
    if (x.size() != want)
      throw ShapeMismatch("input tensor does not match the model's geometry");

  long long tp = 0, fp = 0, tn = 0, fn = 0;
  const long long n = (long long)inputs.size();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : tp, fp, tn, fn) \
    num_threads(jobs > 0 ? jobs : omp_get_max_threads())
#endif
  for (long long i = 0; i < n; i++) {
    const double p = model.forward_eval(inputs[size_t(i)]);
    const bool pred_face = p >= threshold;
    const bool is_face = labels[size_t(i)] >= 0.5f;
    if (pred_face && is_face)
      tp++;
    else if (pred_face && !is_face)
      fp++;
    else if (!pred_face && !is_face)
      tn++;
    else
      fn++;
  }
  (void)jobs;
  return report_from_counts(uint64_t(tp), uint64_t(fp), uint64_t(tn),
                            uint64_t(fn));
}

EvalReport evaluate(const Cnn<float>& model,
                    const std::vector<ManifestEntry>& entries,
                    const std::string& manifest_path, double threshold,
                    int jobs) {
  if (entries.empty()) throw EmptyDataset("no entries to evaluate");

  // Load up front so the scoring loop below stays exception-free.
  std::vector<std::vector<float>> inputs;
  std::vector<float> labels;
  inputs.reserve(entries.size());
  labels.reserve(entries.size());
  for (const ManifestEntry& e : entries) {
    const FeatureImage img = load_fimg(resolve_path(manifest_path, e.path));
    if (img.width != model.config().input_size ||
        img.height != model.config().input_size)
      throw ShapeMismatch("feature image " + e.path +
                          " does not match the model's input size");
    inputs.push_back(feature_to_tensor<float>(img));
    labels.push_back(e.face ? 1.0f : 0.0f);
  }
  return evaluate_tensors(model, inputs, labels, threshold, jobs);
}

}  // namespace hf
