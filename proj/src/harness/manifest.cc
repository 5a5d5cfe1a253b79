// SPDX-License-Identifier: MIT

#include "manifest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "../errors.h"
#include "../rng.h"

namespace hf {

namespace {

using nlohmann::json;

// Class test-set sizes by largest remainder: totals match round(total*frac)
// exactly while staying proportional per class.
std::vector<size_t> allocate(const std::vector<size_t>& class_sizes,
                             double frac) {
  size_t total = 0;
  for (size_t n : class_sizes) total += n;
  const size_t want = size_t(std::llround(double(total) * frac));
  std::vector<size_t> take(class_sizes.size());
  std::vector<std::pair<double, size_t>> rema;  // (-fractional part, class)
  size_t assigned = 0;
  for (size_t k = 0; k < class_sizes.size(); k++) {
    const double exact = double(class_sizes[k]) * frac;
    take[k] = size_t(exact);
    take[k] = std::min(take[k], class_sizes[k]);
    assigned += take[k];
    rema.push_back({-(exact - double(take[k])), k});
  }
  std::sort(rema.begin(), rema.end());
  for (const auto& [neg_frac, k] : rema) {
    if (assigned >= want) break;
    if (take[k] < class_sizes[k]) {
      take[k]++;
      assigned++;
    }
  }
  return take;
}

}  // namespace

std::string manifest_line(const ManifestEntry& e) {
  json j;
  j["path"] = e.path;
  j["label"] = e.face ? "face" : "non-face";
  j["qp"] = e.qp;
  j["size"] = e.size;
  if (!e.split.empty()) j["split"] = e.split;
  return j.dump();
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    ManifestEntry e;
    try {
      e.path = j.at("path").get<std::string>();
      const std::string label = j.at("label").get<std::string>();
      if (label == "face") {
        e.face = true;
      } else if (label == "non-face") {
        e.face = false;
      } else {
        throw FormatError(path + ":" + std::to_string(lineno) +
                          ": label must be \"face\" or \"non-face\"");
      }
      e.qp = j.at("qp").get<int>();
      e.size = j.at("size").get<int>();
      if (j.contains("split")) e.split = j.at("split").get<std::string>();
    } catch (const json::exception& ex) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " +
                        ex.what());
    }
    if (!e.split.empty() && e.split != "train" && e.split != "val" &&
        e.split != "test")
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": unknown split tag '" + e.split + "'");
    entries.push_back(std::move(e));
  }
  return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::string& path) {
  std::ostringstream out;
  for (const ManifestEntry& e : entries) out << manifest_line(e) << "\n";
  const std::string s = out.str();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot create " + path);
  f.write(s.data(), std::streamsize(s.size()));
  if (!f) throw Error("short write on " + path);
}

std::string resolve_path(const std::string& manifest_path,
                         const std::string& entry_path) {
  namespace fs = std::filesystem;
  fs::path p(entry_path);
  if (p.is_absolute()) return entry_path;
  return (fs::path(manifest_path).parent_path() / p).string();
}

void split_manifest(std::vector<ManifestEntry>& entries, double test_frac,
                    double val_frac, uint64_t seed) {
  if (entries.empty()) throw EmptyDataset("empty manifest");

  // Two strata: non-face (0) and face (1).
  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < entries.size(); i++)
    by_class[entries[i].face ? 1 : 0].push_back(i);

  Rng rng(seed);
  for (auto& cls : by_class) rng.shuffle(cls);

  const std::vector<size_t> sizes = {by_class[0].size(), by_class[1].size()};
  const std::vector<size_t> test_take = allocate(sizes, test_frac);

  std::vector<size_t> train_sizes(2);
  for (int k = 0; k < 2; k++) train_sizes[size_t(k)] = sizes[size_t(k)] - test_take[size_t(k)];
  const std::vector<size_t> val_take = allocate(train_sizes, val_frac);

  for (int k = 0; k < 2; k++) {
    const auto& cls = by_class[k];
    const size_t n_test = test_take[size_t(k)];
    const size_t n_val = val_take[size_t(k)];
    for (size_t i = 0; i < cls.size(); i++) {
      if (i < n_test)
        entries[cls[i]].split = "test";
      else if (i < n_test + n_val)
        entries[cls[i]].split = "val";
      else
        entries[cls[i]].split = "train";
    }
  }
}

std::vector<std::string> manifest_warnings(
    const std::vector<ManifestEntry>& entries) {
  std::vector<std::string> out;
  if (entries.empty()) return out;

  size_t face = 0, test = 0;
  const int size0 = entries[0].size, qp0 = entries[0].qp;
  bool mixed = false;
  for (const ManifestEntry& e : entries) {
    face += e.face ? 1 : 0;
    test += (e.split == "test") ? 1 : 0;
    mixed |= (e.size != size0 || e.qp != qp0);
  }
  if (mixed)
    out.push_back("manifest mixes (size, qp) combinations; "
                  "an experiment expects exactly one");
  const double n = double(entries.size());
  if (face > 0) {
    const double ratio = double(entries.size() - face) / double(face);
    if (ratio < 6.0 || ratio > 12.0)
      out.push_back("non-face:face ratio " + std::to_string(ratio) +
                    " is far from the reference protocol's ~9:1");
  } else {
    out.push_back("manifest has no positive (face) examples");
  }
  if (test > 0) {
    const double tf = double(test) / n;
    if (tf < 0.10 || tf > 0.20)
      out.push_back("test fraction " + std::to_string(tf) +
                    " is far from the reference protocol's 0.15");
  }
  return out;
}

}  // namespace hf
