// SPDX-License-Identifier: MIT
// Dataset manifests: JSON-lines files with one entry per feature image, plus
// the deterministic stratified train/val/test split.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hf {

struct ManifestEntry {
  std::string path;   // FIMG file, relative to the manifest or absolute
  bool face = false;  // label: "face" / "non-face"
  int qp = 0;
  int size = 0;
  std::string split;  // "train", "val", "test", or empty (unassigned)
};

// JSONL: one {"path","label","qp","size","split"} object per line; "split"
// may be absent.  Relative entry paths are interpreted against the manifest
// file's directory by resolve_path.
std::vector<ManifestEntry> load_manifest(const std::string& path);
void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::string& path);
std::string manifest_line(const ManifestEntry& e);

std::string resolve_path(const std::string& manifest_path,
                         const std::string& entry_path);

// Deterministic stratified split: per label class, a seeded shuffle, then
// test_frac of all entries to "test" and val_frac of the remainder to "val",
// class counts chosen by largest remainder so the totals hit
// round(n * frac) exactly.  Entries are re-tagged in place.
void split_manifest(std::vector<ManifestEntry>& entries, double test_frac,
                    double val_frac, uint64_t seed);

// The paper's protocol expectations (15% test share, roughly 9:1
// non-face:face).  Violations produce warnings, not errors; returns messages
// so the CLI can print them.
std::vector<std::string> manifest_warnings(
    const std::vector<ManifestEntry>& entries);

}  // namespace hf
