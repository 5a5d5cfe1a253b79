// SPDX-License-Identifier: MIT

#include "experiment.h"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "../cnn/model.h"
#include "../errors.h"
#include "../featimg.h"
#include "../rng.h"

namespace hf {

namespace {

using nlohmann::json;

std::string hex64(uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// %.17g round-trips every double, so reports stay byte-stable across runs.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json metric_or_null(const std::optional<double>& m) {
  return m ? json(*m) : json(nullptr);
}

Dataset load_split(const std::vector<ManifestEntry>& entries,
                   const std::string& manifest_path, const std::string& tag,
                   int size, int qp) {
  Dataset ds;
  for (const ManifestEntry& e : entries) {
    if (e.split != tag) continue;
    const FeatureImage img = load_fimg(resolve_path(manifest_path, e.path));
    if (img.width != size || img.height != size)
      throw FormatError("feature image " + e.path + " is " +
                        std::to_string(img.width) + "x" +
                        std::to_string(img.height) +
                        ", not the experiment's " + std::to_string(size));
    if (int(img.qp) != qp)
      throw FormatError("feature image " + e.path + " carries QP " +
                        std::to_string(int(img.qp)) +
                        ", not the experiment's " + std::to_string(qp));
    ds.x.push_back(feature_to_tensor<float>(img));
    ds.y.push_back(e.face ? 1.0f : 0.0f);
  }
  return ds;
}

}  // namespace

uint64_t corpus_fnv1a(const std::vector<ManifestEntry>& entries,
                      const std::string& manifest_path) {
  uint64_t h = 14695981039346656037ull;
  for (const ManifestEntry& e : entries) {
    const std::vector<uint8_t> bytes =
        read_file(resolve_path(manifest_path, e.path));
    for (uint8_t b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string report_json(const ExperimentConfig& cfg,
                        const ExperimentResult& res) {
  json j;
  j["size"] = cfg.size;
  j["qp"] = cfg.qp;
  j["config"] = {
      {"seed", cfg.train.seed},
      {"learning_rate", cfg.train.learning_rate},
      {"batch_size", cfg.train.batch_size},
      {"max_epochs", cfg.train.max_epochs},
      {"patience", cfg.train.patience},
      {"dropout_rate", cfg.train.dropout_rate},
      {"test_frac", cfg.test_frac},
      {"val_frac", cfg.val_frac},
  };
  j["corpus"] = {
      {"hash", "fnv1a64:" + hex64(res.corpus_hash)},
      {"train", res.n_train},
      {"val", res.n_val},
      {"test", res.n_test},
  };
  j["training"] = {
      {"best_epoch", res.train.best_epoch},
      {"stopped_epoch", res.train.stopped_epoch},
      {"best_val_loss", res.train.best_val_loss},
  };
  j["metrics"] = {
      {"tp", res.report.tp},
      {"fp", res.report.fp},
      {"tn", res.report.tn},
      {"fn", res.report.fn},
      {"accuracy", res.report.accuracy()},
      {"precision", metric_or_null(res.report.precision)},
      {"recall", metric_or_null(res.report.recall)},
      {"f1", metric_or_null(res.report.f1)},
  };
  return j.dump(2) + "\n";
}

std::string history_csv(const TrainResult& res) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss\n";
  for (const EpochStats& s : res.history)
    out << s.epoch << "," << fmt_double(s.train_loss) << ","
        << fmt_double(s.val_loss) << "\n";
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::vector<ManifestEntry> entries = load_manifest(cfg.manifest_path);
  if (entries.empty()) throw EmptyDataset("manifest lists no entries");
  for (const ManifestEntry& e : entries)
    if (e.size != cfg.size || e.qp != cfg.qp)
      throw FormatError("manifest entry " + e.path + " is tagged (" +
                        std::to_string(e.size) + ", QP " +
                        std::to_string(e.qp) +
                        "); an experiment covers exactly one combination");
  for (const std::string& w : manifest_warnings(entries))
    std::fprintf(stderr, "warning: %s\n", w.c_str());

  bool untagged = false;
  for (const ManifestEntry& e : entries) untagged |= e.split.empty();
  if (untagged)
    split_manifest(entries, cfg.test_frac, cfg.val_frac, cfg.train.seed);

  ExperimentResult res;
  res.corpus_hash = corpus_fnv1a(entries, cfg.manifest_path);

  const Dataset train_set =
      load_split(entries, cfg.manifest_path, "train", cfg.size, cfg.qp);
  const Dataset val_set =
      load_split(entries, cfg.manifest_path, "val", cfg.size, cfg.qp);
  const Dataset test_set =
      load_split(entries, cfg.manifest_path, "test", cfg.size, cfg.qp);
  res.n_train = train_set.size();
  res.n_val = val_set.size();
  res.n_test = test_set.size();

  NetConfig nc;
  nc.input_size = cfg.size;
  nc.qp = cfg.qp;
  Cnn<float> model(nc);
  Rng init_rng = Rng(cfg.train.seed).fork(1);
  model.init_weights(init_rng);

  res.train = train(model, train_set, val_set, cfg.train);

  res.report =
      evaluate_tensors(model, test_set.x, test_set.y, 0.5, cfg.jobs);
  res.report.size = cfg.size;
  res.report.qp = cfg.qp;

  if (!cfg.model_path.empty()) save_model(model, cfg.model_path);
  if (!cfg.report_path.empty()) {
    const std::string s = report_json(cfg, res);
    write_file(cfg.report_path,
               std::vector<uint8_t>(s.begin(), s.end()));
  }
  if (!cfg.history_path.empty()) {
    const std::string s = history_csv(res.train);
    write_file(cfg.history_path,
               std::vector<uint8_t>(s.begin(), s.end()));
  }
  return res;
}

std::vector<ExperimentResult> sweep(const std::string& manifest_dir,
                                    const std::string& out_dir,
                                    const TrainConfig& base, int jobs) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<ExperimentResult> results;
  for (int size : {64, 128}) {
    for (int qp : {22, 32, 42}) {
      const std::string tag =
          std::to_string(size) + "_" + std::to_string(qp);
      const fs::path manifest =
          fs::path(manifest_dir) / ("manifest_" + tag + ".jsonl");
      if (!fs::exists(manifest)) {
        std::fprintf(stderr, "sweep: no %s, skipping (%d, QP %d)\n",
                     manifest.string().c_str(), size, qp);
        continue;
      }
      ExperimentConfig cfg;
      cfg.manifest_path = manifest.string();
      cfg.size = size;
      cfg.qp = qp;
      cfg.train = base;
      cfg.jobs = jobs;
      cfg.model_path = (fs::path(out_dir) / ("model_" + tag + ".hfcn")).string();
      cfg.report_path =
          (fs::path(out_dir) / ("report_" + tag + ".json")).string();
      cfg.history_path =
          (fs::path(out_dir) / ("history_" + tag + ".csv")).string();
      std::fprintf(stderr, "sweep: training (%d, QP %d)\n", size, qp);
      results.push_back(run_experiment(cfg));
    }
  }
  if (results.empty())
    throw EmptyDataset("sweep found no manifest_<size>_<qp>.jsonl files");
  return results;
}

}  // namespace hf
