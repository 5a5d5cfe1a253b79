// SPDX-License-Identifier: MIT
//
// One experiment = one (patch size, QP) combination: split the manifest,
// train a model, evaluate on the held-out test split, and write the three
// artifacts (model file, JSON report, loss-history CSV).  `sweep` runs the
// full six-configuration grid.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "../cnn/train.h"
#include "manifest.h"
#include "metrics.h"

namespace hf {

struct ExperimentConfig {
  std::string manifest_path;
  int size = 64;
  int qp = 32;
  TrainConfig train;        // seed here drives init, shuffle and dropout
  double test_frac = 0.15;  // used only when the manifest carries no tags
  double val_frac = 0.10;
  int jobs = 0;
  std::string model_path;
  std::string report_path;   // empty = don't write
  std::string history_path;  // empty = don't write
};

struct ExperimentResult {
  EvalReport report;
  TrainResult train;
  uint64_t corpus_hash = 0;
  size_t n_train = 0, n_val = 0, n_test = 0;
};

// FNV-1a 64 over the raw FIMG bytes of every entry in manifest order;
// recorded in reports so a result can be tied to an exact corpus.
uint64_t corpus_fnv1a(const std::vector<ManifestEntry>& entries,
                      const std::string& manifest_path);

// Serialized report, reproducible byte-for-byte for a fixed seed and corpus
// (deliberately carries no timestamps or hostnames).
std::string report_json(const ExperimentConfig& cfg,
                        const ExperimentResult& res);

std::string history_csv(const TrainResult& res);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Runs the {64,128} x {22,32,42} grid.  Each combination reads
// <manifest_dir>/manifest_<size>_<qp>.jsonl and writes model_<size>_<qp>.hfcn,
// report_<size>_<qp>.json and history_<size>_<qp>.csv under out_dir.
// Missing manifests are skipped with a note on stderr so partial corpora
// still sweep; returns one result per combination actually run.
std::vector<ExperimentResult> sweep(const std::string& manifest_dir,
                                    const std::string& out_dir,
                                    const TrainConfig& base, int jobs = 0);

}  // namespace hf
