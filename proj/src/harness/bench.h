// SPDX-License-Identifier: MIT
//
// Wall-clock benchmark of the two pipeline stages: entropy parse + feature
// assembly per bitstream, and CNN evaluation per patch.  Machine-local
// numbers, reported as count/mean/p50/p95 so outliers are visible.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hf {

struct StageStats {
  size_t count = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
};

// Nearest-rank percentiles over the raw samples (milliseconds).
StageStats stage_stats(std::vector<double> samples_ms);

struct BenchReport {
  StageStats parse;                // one sample per .hevc bitstream (= patch)
  std::map<int, StageStats> eval;  // CNN forward per patch, keyed by size
  size_t skipped_nonsquare = 0;    // parsed but not square, so not evaluated
};

// Walks corpus_dir for .hevc files (sorted for reproducible order), times
// parse+assemble per file, then times one CNN forward per square patch with
// a seeded random model per size.  `jobs` sizes the OpenMP team used by the
// CNN kernels (<= 0 keeps the default); the measured loops stay sequential
// so each sample is an honest single-patch latency.
BenchReport bench_extract(const std::string& corpus_dir, uint64_t seed = 1,
                          int jobs = 0);

std::string bench_json(const BenchReport& r);

}  // namespace hf
