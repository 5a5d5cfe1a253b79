// SPDX-License-Identifier: MIT
//
// hevcface — face detection on HEVC all-intra bitstreams without pixel
// reconstruction.  The pipeline entropy-decodes a bitstream to per-PU
// syntax features (intra mode, PU size, bin count), assembles them into a
// 3-channel feature image, and classifies patches with a small CNN that
// this tool can also train and check.
//
// Exit codes: 0 success; 2 unsupported bitstream feature (outside the
// supported all-intra subset); 3 malformed/truncated bitstream; 1 anything
// else.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnn/gradcheck.h"
#include "cnn/model.h"
#include "errors.h"
#include "featimg.h"
#include "harness/bench.h"
#include "harness/experiment.h"
#include "harness/manifest.h"
#include "harness/metrics.h"
#include "syntax.h"

namespace {

using namespace hf;

std::string records_csv(const std::vector<PuRecord>& records) {
  std::ostringstream out;
  out << "x,y,size,ipm,bins\n";
  for (const PuRecord& r : records)
    out << r.x << "," << r.y << "," << r.size << "," << r.ipm << "," << r.bins
        << "\n";
  return out.str();
}

std::string bins_csv(const std::vector<BinLogEntry>& log) {
  std::ostringstream out;
  out << "n,mode,ctx,bin\n";
  for (size_t i = 0; i < log.size(); i++)
    out << i << "," << log[i].mode << "," << log[i].ctx_index << ","
        << int(log[i].bin) << "\n";
  return out.str();
}

void write_text(const std::string& path, const std::string& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot create " + path);
  f.write(s.data(), std::streamsize(s.size()));
  if (!f) throw Error("short write on " + path);
}

int run_gradcheck(uint64_t seed, int samples, double tol) {
  GradcheckConfig gc;
  gc.seed = seed;
  gc.samples_per_weight_layer = samples;
  gc.tol = tol;

  struct Item {
    const char* name;
    GradcheckReport report;
  };
  std::vector<Item> items;
  items.push_back({"sampled 64x64", gradcheck_sampled(64, gc)});
  items.push_back({"sampled 128x128", gradcheck_sampled(128, gc)});
  items.push_back({"shrunken exhaustive", gradcheck_full_shrunken(gc)});

  bool ok = true;
  for (const Item& it : items) {
    std::printf("%-20s %6zu gradients, max rel err %.3e  %s\n", it.name,
                it.report.checked, it.report.max_rel_err,
                it.report.ok() ? "ok" : "FAIL");
    for (const GradcheckFailure& f : it.report.failures)
      std::fprintf(stderr, "  %s: analytic %.9e vs fd %.9e (rel %.3e)\n",
                   f.where.c_str(), f.analytic, f.fd, f.rel_err);
    ok = ok && it.report.ok();
  }
  return ok ? 0 : 1;
}

int run(int argc, char** argv) {
  CLI::App app{
      "face detection on HEVC all-intra bitstreams, no pixel reconstruction"};
  app.require_subcommand(1);

  // ---- extract ----
  auto* cmd_extract = app.add_subcommand(
      "extract", "parse a bitstream and write its feature image");
  std::string x_in, x_out, x_ppm;
  bool x_compact = false;
  cmd_extract->add_option("input", x_in, "input .hevc (Annex B) bitstream")
      ->required();
  cmd_extract->add_option("-o,--output", x_out, "output .fimg path")
      ->required();
  cmd_extract->add_option("--ppm", x_ppm, "also write a viewable PPM");
  cmd_extract->add_flag("--compact", x_compact,
                        "store planes at 4x4 granularity (1/16 size)");
  cmd_extract->add_option("--jobs", "accepted for interface symmetry; "
                                    "a single extract is sequential");
  cmd_extract->callback([&] {
    const StreamParse sp = parse_stream(read_file(x_in));
    const FeatureImage img =
        assemble(sp.picture.records, sp.sps.pic_width_luma,
                 sp.sps.pic_height_luma, sp.slice.slice_qp);
    save_fimg(img, x_out, x_compact);
    if (!x_ppm.empty()) save_ppm(img, x_ppm);
    std::printf("%dx%d qp=%d pus=%zu bins=%llu -> %s\n", img.width,
                img.height, img.qp, sp.picture.records.size(),
                (unsigned long long)sp.picture.total_bins, x_out.c_str());
  });

  // ---- inspect ----
  auto* cmd_inspect = app.add_subcommand(
      "inspect", "dump per-PU records (and optionally the CABAC bin trace)");
  std::string i_in, i_csv;
  bool i_bins = false;
  cmd_inspect->add_option("input", i_in, "input .hevc bitstream")->required();
  cmd_inspect->add_option("--csv", i_csv,
                          "write records there instead of stdout");
  cmd_inspect->add_flag("--bins-trace", i_bins,
                        "also dump every decoded bin (n,mode,ctx,bin); goes "
                        "to stdout, after the records when both share it");
  cmd_inspect->callback([&] {
    const StreamParse sp = parse_stream(read_file(i_in), i_bins);
    const std::string rec = records_csv(sp.picture.records);
    if (i_csv.empty())
      std::fwrite(rec.data(), 1, rec.size(), stdout);
    else
      write_text(i_csv, rec);
    if (i_bins) {
      if (i_csv.empty()) std::printf("\n");
      const std::string trace = bins_csv(sp.picture.bin_log);
      std::fwrite(trace.data(), 1, trace.size(), stdout);
    }
  });

  // ---- train ----
  auto* cmd_train = app.add_subcommand(
      "train", "train one model for one (size, QP) combination");
  ExperimentConfig tcfg;
  cmd_train->add_option("--manifest", tcfg.manifest_path, "JSONL manifest")
      ->required();
  cmd_train->add_option("--size", tcfg.size, "patch size")
      ->required()
      ->check(CLI::IsMember({64, 128}));
  cmd_train->add_option("--qp", tcfg.qp, "quantization parameter")
      ->required()
      ->check(CLI::Range(0, 51));
  cmd_train->add_option("--seed", tcfg.train.seed, "master RNG seed");
  cmd_train->add_option("--epochs", tcfg.train.max_epochs, "epoch cap");
  cmd_train->add_option("--batch", tcfg.train.batch_size, "minibatch size");
  cmd_train->add_option("--lr", tcfg.train.learning_rate, "SGD step size");
  cmd_train->add_option("--test-frac", tcfg.test_frac,
                        "test share when the manifest is untagged");
  cmd_train->add_option("--val-frac", tcfg.val_frac,
                        "validation share of the training remainder");
  cmd_train->add_option("-o,--output", tcfg.model_path, "output .hfcn model")
      ->required();
  cmd_train->add_option("--report", tcfg.report_path,
                        "also write a JSON experiment report");
  cmd_train->add_option("--history", tcfg.history_path,
                        "also write the loss history CSV");
  cmd_train->callback([&] {
    const ExperimentResult res = run_experiment(tcfg);
    std::printf(
        "trained (%d, QP %d): best epoch %d, stopped %d, val loss %.6f\n",
        tcfg.size, tcfg.qp, res.train.best_epoch, res.train.stopped_epoch,
        res.train.best_val_loss);
    if (res.report.f1)
      std::printf("test F1 %.4f on %zu images -> %s\n", *res.report.f1,
                  res.n_test, tcfg.model_path.c_str());
    else
      std::printf("test F1 undefined on %zu images -> %s\n", res.n_test,
                  tcfg.model_path.c_str());
  });

  // ---- predict ----
  auto* cmd_predict =
      app.add_subcommand("predict", "classify feature images with a model");
  std::string p_model;
  std::vector<std::string> p_inputs;
  cmd_predict->add_option("--model", p_model, ".hfcn model file")->required();
  cmd_predict->add_option("inputs", p_inputs, ".fimg files")
      ->required()
      ->expected(-1);
  cmd_predict->callback([&] {
    const Cnn<float> model = load_model(p_model);
    for (const std::string& path : p_inputs) {
      const FeatureImage img = load_fimg(path);
      if (img.width != model.config().input_size ||
          img.height != model.config().input_size)
        throw ShapeMismatch(path + " is " + std::to_string(img.width) + "x" +
                            std::to_string(img.height) + ", model expects " +
                            std::to_string(model.config().input_size));
      const float p = model.forward_eval(feature_to_tensor<float>(img));
      std::printf("%s\t%.9g\t%s\n", path.c_str(), double(p),
                  p >= 0.5f ? "face" : "non-face");
    }
  });

  // ---- eval ----
  auto* cmd_eval = app.add_subcommand(
      "eval", "confusion matrix and P/R/F1 of a model over a manifest");
  std::string e_model, e_manifest, e_out;
  double e_threshold = 0.5;
  int e_jobs = 0;
  cmd_eval->add_option("--model", e_model, ".hfcn model file")->required();
  cmd_eval->add_option("--manifest", e_manifest, "JSONL manifest")->required();
  cmd_eval->add_option("-o,--output", e_out, "output report JSON")->required();
  cmd_eval->add_option("--threshold", e_threshold, "face decision threshold");
  cmd_eval->add_option("--jobs", e_jobs, "worker threads (0 = default)");
  cmd_eval->callback([&] {
    const Cnn<float> model = load_model(e_model);
    std::vector<ManifestEntry> entries = load_manifest(e_manifest);
    // A manifest with split tags is evaluated on its test split; an
    // untagged one is taken to be a ready-made test set.
    std::vector<ManifestEntry> chosen;
    for (const ManifestEntry& e : entries)
      if (e.split == "test") chosen.push_back(e);
    if (chosen.empty()) chosen = entries;
    EvalReport rep =
        evaluate(model, chosen, e_manifest, e_threshold, e_jobs);
    rep.size = model.config().input_size;
    rep.qp = model.config().qp;

    ExperimentConfig rcfg;  // reuse the report writer's config block
    rcfg.size = rep.size;
    rcfg.qp = rep.qp;
    ExperimentResult rres;
    rres.report = rep;
    rres.corpus_hash = corpus_fnv1a(chosen, e_manifest);
    rres.n_test = chosen.size();
    write_text(e_out, report_json(rcfg, rres));
    std::printf("tp=%llu fp=%llu tn=%llu fn=%llu", (unsigned long long)rep.tp,
                (unsigned long long)rep.fp, (unsigned long long)rep.tn,
                (unsigned long long)rep.fn);
    if (rep.precision) std::printf(" precision=%.4f", *rep.precision);
    if (rep.recall) std::printf(" recall=%.4f", *rep.recall);
    if (rep.f1) std::printf(" f1=%.4f", *rep.f1);
    std::printf(" -> %s\n", e_out.c_str());
  });

  // ---- sweep ----
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "train and evaluate the {64,128} x {22,32,42} grid");
  std::string s_dir, s_out;
  TrainConfig s_train;
  int s_jobs = 0;
  cmd_sweep
      ->add_option("--manifest-dir", s_dir,
                   "directory holding manifest_<size>_<qp>.jsonl files")
      ->required();
  cmd_sweep->add_option("-o,--output", s_out, "output directory")->required();
  cmd_sweep->add_option("--seed", s_train.seed, "master RNG seed");
  cmd_sweep->add_option("--epochs", s_train.max_epochs, "epoch cap");
  cmd_sweep->add_option("--batch", s_train.batch_size, "minibatch size");
  cmd_sweep->add_option("--jobs", s_jobs, "worker threads (0 = default)");
  cmd_sweep->callback([&] {
    const std::vector<ExperimentResult> results =
        sweep(s_dir, s_out, s_train, s_jobs);
    for (const ExperimentResult& r : results) {
      std::printf("(%d, QP %d): ", r.report.size, r.report.qp);
      if (r.report.f1)
        std::printf("F1 %.4f", *r.report.f1);
      else
        std::printf("F1 undefined");
      std::printf(" (tp=%llu fp=%llu tn=%llu fn=%llu)\n",
                  (unsigned long long)r.report.tp,
                  (unsigned long long)r.report.fp,
                  (unsigned long long)r.report.tn,
                  (unsigned long long)r.report.fn);
    }
  });

  // ---- gradcheck ----
  auto* cmd_gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference gradient verification suite");
  uint64_t g_seed = 1;
  int g_samples = 200;
  double g_tol = 1e-3;
  cmd_gradcheck->add_option("--seed", g_seed, "RNG seed");
  cmd_gradcheck->add_option("--samples", g_samples,
                            "sampled weights per layer (<= 0: all)");
  cmd_gradcheck->add_option("--tol", g_tol, "relative error bound");
  int gradcheck_rc = 0;
  cmd_gradcheck->callback(
      [&] { gradcheck_rc = run_gradcheck(g_seed, g_samples, g_tol); });

  // ---- bench ----
  auto* cmd_bench = app.add_subcommand(
      "bench", "time entropy parsing and CNN evaluation over a corpus");
  std::string b_corpus, b_out;
  uint64_t b_seed = 1;
  int b_jobs = 0;
  cmd_bench->add_option("--corpus", b_corpus, "directory of .hevc files")
      ->required();
  cmd_bench->add_option("-o,--output", b_out, "output timing JSON")
      ->required();
  cmd_bench->add_option("--seed", b_seed, "seed for the throwaway models");
  cmd_bench->add_option("--jobs", b_jobs, "CNN kernel threads (0 = default)");
  cmd_bench->callback([&] {
    const BenchReport r = bench_extract(b_corpus, b_seed, b_jobs);
    write_text(b_out, bench_json(r));
    std::printf("parse: %zu patches, mean %.3f ms, p95 %.3f ms\n",
                r.parse.count, r.parse.mean_ms, r.parse.p95_ms);
    for (const auto& [size, st] : r.eval)
      std::printf("cnn %d: %zu patches, mean %.3f ms, p95 %.3f ms\n", size,
                  st.count, st.mean_ms, st.p95_ms);
  });

  CLI11_PARSE(app, argc, argv);
  return gradcheck_rc;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hf::UnsupportedFeature& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hf::NoStartCode& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const hf::TruncatedNal& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const hf::OutOfBits& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const hf::MalformedCode& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const hf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
