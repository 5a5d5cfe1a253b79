// SPDX-License-Identifier: MIT
// CTU-level syntax decoding for I slices: coding quadtree, intra prediction
// modes (with MPM derivation), transform tree, and full residual coding.
// Coefficients are decoded only as far as parsing requires (Rice adaptation
// and sign-data-hiding parity depend on levels) and then dropped — there is
// no dequantization or reconstruction anywhere in this path.
//
// The output is one PuRecord per prediction unit: position, size, intra mode,
// and the number of CABAC bins attributed to the PU.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cabac.h"
#include "paramsets.h"

namespace hf {

struct PuRecord {
  int x = 0;     // top-left luma sample
  int y = 0;
  int size = 0;  // 4, 8, 16, or 32
  int ipm = 0;   // intra prediction mode, 0..34
  uint64_t bins = 0;
};

struct PictureParse {
  std::vector<PuRecord> records;  // z-scan order within raster CTUs
  uint64_t total_bins = 0;        // every bin decoded in the slice
  int trailing_bits = 0;          // payload bits left after end-of-slice (<= 7)
  std::vector<BinLogEntry> bin_log;
};

// Parses the single I slice of a picture.  The NAL must be an IDR slice; the
// sps/pps must be the active ones.  Throws subset and syntax errors with
// CTU/CU coordinates attached.
PictureParse parse_picture(const NalUnit& slice_nal, const SequenceParams& sps,
                           const PictureParams& pps,
                           bool enable_bin_log = false);

// Whole-stream convenience wrapper: splits NAL units, parses parameter sets,
// and decodes the first (and only) coded picture.
struct StreamParse {
  SequenceParams sps;
  PictureParams pps;
  SliceHeader slice;
  PictureParse picture;
};

StreamParse parse_stream(const uint8_t* data, size_t size,
                         bool enable_bin_log = false);
StreamParse parse_stream(const std::vector<uint8_t>& stream,
                         bool enable_bin_log = false);

// Scan-order table access (H.265 6.5.3-6.5.5), exposed for the test encoder:
// entries of (x, y) for a (1<<log2_size)^2 block; scan_idx 0 = up-right
// diagonal, 1 = horizontal, 2 = vertical.  log2_size in 0..3.
const std::array<uint8_t, 2>* scan_order(int log2_size, int scan_idx);

// Mode-dependent coefficient scan selection (H.265 7.4.9.11).
int scan_idx_for(int pred_mode, int log2_trafo_size, int c_idx);

}  // namespace hf
