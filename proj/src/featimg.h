// SPDX-License-Identifier: MIT
// Feature-image assembly: turns the per-PU syntax records of one picture into
// a 3-channel 8-bit image (intra-mode, PU-size, and normalized bin-count
// planes) plus the FIMG container and a PPM export for eyeballing.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "syntax.h"

namespace hf {

struct FeatureImage {
  int width = 0;
  int height = 0;
  int qp = 0;  // provenance metadata only
  // Row-major width x height planes, channel order (IPM, PUS, BN).
  std::vector<uint8_t> ipm_plane;
  std::vector<uint8_t> pus_plane;
  std::vector<uint8_t> bn_plane;
};

// Intra mode 0..34 mapped linearly onto 0..255, rounding half-up.
int map_ipm(int ipm);

// PU size {4, 8, 16, 32} mapped onto {0, 85, 170, 255}.
int map_pus(int size);

// Min-max normalization of per-PU bin counts onto 0..255 (half-up); a
// degenerate range maps every PU to 0.  Returns one value per record, in
// record order.
std::vector<uint8_t> map_bn(const std::vector<PuRecord>& records);

// Paints each record's three mapped values over its rectangle.  The records
// must tile the width x height area exactly (no gaps, no overlaps, no
// out-of-bounds) or TilingGap is thrown.
FeatureImage assemble(const std::vector<PuRecord>& records, int width,
                      int height, int qp);

// FIMG container: magic "FIMG", version 1, u16-LE width and height, u8 qp,
// u8 flags (bit 0: compact = planes stored at 4x4 granularity, 1/16 area),
// then the three planes row-major.  Loading always yields full-size planes.
std::vector<uint8_t> encode_fimg(const FeatureImage& img, bool compact);
FeatureImage decode_fimg(const uint8_t* data, size_t size);
FeatureImage decode_fimg(const std::vector<uint8_t>& bytes);

void save_fimg(const FeatureImage& img, const std::string& path,
               bool compact = false);
FeatureImage load_fimg(const std::string& path);

// P6 PPM with channels on R,G,B — visualization only, never read back.
void save_ppm(const FeatureImage& img, const std::string& path);

// Shared low-level helpers (also used by model/manifest I/O).
std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const uint8_t* data, size_t size);
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);

}  // namespace hf
