// SPDX-License-Identifier: MIT

#include "bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "../cnn/model.h"
#include "../errors.h"
#include "../featimg.h"
#include "../rng.h"
#include "../syntax.h"

namespace hf {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

StageStats stage_stats(std::vector<double> samples_ms) {
  StageStats s;
  s.count = samples_ms.size();
  if (samples_ms.empty()) return s;
  double sum = 0.0;
  for (double v : samples_ms) sum += v;
  s.mean_ms = sum / double(samples_ms.size());
  std::sort(samples_ms.begin(), samples_ms.end());
  auto rank = [&](double q) {
    const size_t n = samples_ms.size();
    size_t r = size_t(std::ceil(q * double(n)));
    if (r == 0) r = 1;
    return samples_ms[std::min(r, n) - 1];
  };
  s.p50_ms = rank(0.50);
  s.p95_ms = rank(0.95);
  return s;
}

BenchReport bench_extract(const std::string& corpus_dir, uint64_t seed,
                          int jobs) {
  namespace fs = std::filesystem;

#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif

  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(corpus_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".hevc")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw EmptyDataset("no .hevc files under " + corpus_dir);

  BenchReport report;
  std::vector<double> parse_ms;
  std::map<int, std::vector<std::vector<float>>> patches;  // size -> tensors

  for (const std::string& path : paths) {
    const std::vector<uint8_t> data = read_file(path);
    const auto t0 = Clock::now();
    const StreamParse sp = parse_stream(data);
    const FeatureImage img =
        assemble(sp.picture.records, sp.sps.pic_width_luma,
                 sp.sps.pic_height_luma, sp.slice.slice_qp);
    parse_ms.push_back(ms_since(t0));
    if (img.width == img.height)
      patches[img.width].push_back(feature_to_tensor<float>(img));
    else
      report.skipped_nonsquare++;
  }
  report.parse = stage_stats(std::move(parse_ms));

  for (auto& [size, tensors] : patches) {
    NetConfig nc;
    nc.input_size = size;
    Cnn<float> model(nc);
    Rng rng = Rng(seed).fork(uint64_t(size));
    model.init_weights(rng);
    // Warm-up forward so one-time allocation noise stays out of the samples.
    volatile float sink = model.forward_eval(tensors.front());
    std::vector<double> eval_ms;
    for (const auto& x : tensors) {
      const auto t0 = Clock::now();
      sink = model.forward_eval(x);
      eval_ms.push_back(ms_since(t0));
    }
    (void)sink;
    report.eval[size] = stage_stats(std::move(eval_ms));
  }
  return report;
}

std::string bench_json(const BenchReport& r) {
  using nlohmann::json;
  auto stage = [](const StageStats& s) {
    return json{{"count", s.count},
                {"mean_ms", s.mean_ms},
                {"p50_ms", s.p50_ms},
                {"p95_ms", s.p95_ms}};
  };
  json j;
  j["parse"] = stage(r.parse);
  j["cnn_eval"] = json::object();
  for (const auto& [size, stats] : r.eval)
    j["cnn_eval"][std::to_string(size)] = stage(stats);
  j["skipped_nonsquare"] = r.skipped_nonsquare;
  return j.dump(2) + "\n";
}

}  // namespace hf
