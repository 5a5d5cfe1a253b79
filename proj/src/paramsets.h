// SPDX-License-Identifier: MIT
// VPS/SPS/PPS and slice-segment-header parsing for the supported all-intra
// subset: Main profile, 8-bit 4:2:0, IDR-only, one slice per picture, no
// tiles/WPP/dependent slices, SAO off at encode time, PCM off, scaling lists
// off, transform-skip off, fixed QP (no cu_qp_delta).  Anything outside the
// subset raises UnsupportedFeature instead of being silently ignored.
#pragma once

#include <utility>

#include "bitio.h"
#include "errors.h"

namespace hf {

struct SequenceParams {
  int sps_id = 0;
  int pic_width_luma = 0;
  int pic_height_luma = 0;
  int ctb_log2_size = 0;     // CtbLog2SizeY, 4..6
  int min_cb_log2_size = 3;  // MinCbLog2SizeY; the subset pins 8x8 CUs
  int min_tb_log2_size = 2;  // MinTbLog2SizeY; the subset pins 4x4 TBs
  int max_tb_log2_size = 5;  // MaxTbLog2SizeY
  int max_transform_hierarchy_depth_intra = 0;
  bool sao_enabled = false;
  bool amp_enabled = false;
  bool strong_intra_smoothing = false;
  int bit_depth_luma = 8;
  int bit_depth_chroma = 8;
  int chroma_format = 1;  // chroma_format_idc; 1 = 4:2:0

  int ctb_size() const { return 1 << ctb_log2_size; }
  int pic_width_in_ctbs() const {
    return (pic_width_luma + ctb_size() - 1) >> ctb_log2_size;
  }
  int pic_height_in_ctbs() const {
    return (pic_height_luma + ctb_size() - 1) >> ctb_log2_size;
  }
};

struct PictureParams {
  int pps_id = 0;
  int sps_id = 0;
  int init_qp = 26;
  bool sign_data_hiding_enabled = false;
  bool transform_skip_enabled = false;  // always false within the subset
  bool constrained_intra_pred = false;
  bool tiles_enabled = false;         // always false within the subset
  bool entropy_sync_enabled = false;  // always false within the subset
  bool output_flag_present = false;
  int num_extra_slice_header_bits = 0;
  bool slice_chroma_qp_offsets_present = false;
  bool deblocking_filter_control_present = false;
  bool deblocking_filter_override_enabled = false;
  bool deblocking_filter_disabled = false;
  bool loop_filter_across_slices = true;
  bool slice_header_extension_present = false;
  int cb_qp_offset = 0;  // parsed for completeness; the parser never dequantizes
  int cr_qp_offset = 0;
};

struct SliceHeader {
  int slice_type = 2;  // 2 = I, the only supported type
  int slice_qp = 26;   // 26 + init_qp_minus26 + slice_qp_delta, in [0, 51]
  bool sao_luma = false;
  bool sao_chroma = false;
  int first_ctb_address = 0;  // single-slice subset: always 0
};

// VPS carries nothing the subset needs; parse_vps validates the fixed-pattern
// fields and returns.  Throws MalformedCode on violations.
void parse_vps(const NalUnit& nal);

SequenceParams parse_sps(const NalUnit& nal);

PictureParams parse_pps(const NalUnit& nal);

// Parses the slice segment header of an IDR I-slice and returns the header
// plus a BitReader positioned at the first CABAC byte.  The reader borrows
// nal.rbsp, so the NalUnit must outlive it.
std::pair<SliceHeader, BitReader> parse_slice_header(const NalUnit& nal,
                                                     const SequenceParams& sps,
                                                     const PictureParams& pps);

}  // namespace hf
