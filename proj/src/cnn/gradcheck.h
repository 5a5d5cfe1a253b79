// SPDX-License-Identifier: MIT
// Central finite-difference validation of the analytic gradients, in 64-bit
// arithmetic with dropout off.
//
// A naive check re-runs the whole forward pass twice per parameter, which is
// too slow for the full-size network.  FdEvaluator instead keeps the baseline
// activations of one forward pass and, for a single perturbed parameter,
// recomputes only the affected slice of each layer (one conv channel, one fc
// unit, ...) propagating deltas forward.  Because an unperturbed parameter
// contributes exactly zero delta, the evaluator is bit-exact against a full
// recompute at the baseline point, and the test suite cross-checks it against
// the naive path on small models.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model.h"

namespace hf {

enum class Blob {
  conv1_w, conv1_b, conv2_w, conv2_b, fc1_w, fc1_b, fc2_w, fc2_b,
};

const char* blob_name(Blob b);

class FdEvaluator {
 public:
  // Keeps references to the model and input; both must outlive the evaluator.
  FdEvaluator(const Cnn<double>& model, const std::vector<double>& x,
              double label);

  double base_loss() const { return base_loss_; }

  // Loss with the single parameter params[blob][idx] replaced by `value`,
  // everything else at baseline.  Does not mutate the model.
  double loss_with(Blob blob, size_t idx, double value) const;

  // Full-recompute reference for the same quantity (slow; for validation).
  static double loss_naive(const Cnn<double>& model,
                           const std::vector<double>& x, double label,
                           Blob blob, size_t idx, double value);

 private:
  double finish_sparse_af1(const std::vector<std::pair<int, double>>& da) const;
  double finish_sparse_a2(const std::vector<std::pair<int, double>>& na) const;
  double loss_conv1(int f, size_t widx, bool bias, double delta) const;
  double loss_conv2(size_t idx, bool bias, double delta) const;

  const Cnn<double>& m_;
  double label_;
  FwdCache<double> c_;
  double base_loss_;
};

struct GradcheckConfig {
  uint64_t seed = 1;
  int samples_per_weight_layer = 200;  // <= 0 checks every weight
  double tol = 1e-3;                   // relative error bound
};

struct GradcheckFailure {
  std::string where;
  double analytic = 0, fd = 0, rel_err = 0;
};

struct GradcheckReport {
  size_t checked = 0;
  double max_rel_err = 0;
  std::vector<GradcheckFailure> failures;
  bool ok() const { return failures.empty(); }
};

// Samples `samples_per_weight_layer` random weights per layer (all of them
// when <= 0) plus every bias, and compares analytic gradients against central
// finite differences.  The step starts at 1e-5 (relative to the parameter
// magnitude) and shrinks when a comparison fails, so a perturbation that
// happens to cross a ReLU kink is re-measured rather than misreported.
GradcheckReport gradcheck_model(const NetConfig& cfg,
                                const GradcheckConfig& gc);

// Standard architecture at the given input size, sampled parameters.
GradcheckReport gradcheck_sampled(int input_size, const GradcheckConfig& gc);

// Shrunken clone (10 conv filters per layer, 50 fc units, input 64): small
// enough that every single parameter is checked.
GradcheckReport gradcheck_full_shrunken(const GradcheckConfig& gc);

}  // namespace hf
