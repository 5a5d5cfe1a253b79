// SPDX-License-Identifier: MIT
#include "paramsets.h"

namespace hf {

namespace {

// profile_tier_level(1, maxSubLayersMinus1), H.265 7.3.3.  The contents do
// not change subset parsing; only the bit budget has to be walked exactly.
void skip_profile_tier_level(BitReader& r, int max_sub_layers_minus1) {
  r.read_bits(8);   // profile_space(2) tier(1) profile_idc(5)
  r.read_bits(32);  // general_profile_compatibility_flag[32]
  r.read_bits(4);   // progressive / interlaced / non_packed / frame_only
  r.read_bits(32);  // general_reserved_zero_43bits ...
  r.read_bits(11);  //   ... continued
  r.read_bits(1);   // general_reserved_zero_bit / inbld
  r.read_bits(8);   // general_level_idc
  bool profile_present[8] = {};
  bool level_present[8] = {};
  for (int i = 0; i < max_sub_layers_minus1; i++) {
    profile_present[i] = r.read_bit();
    level_present[i] = r.read_bit();
  }
  if (max_sub_layers_minus1 > 0)
    for (int i = max_sub_layers_minus1; i < 8; i++) r.read_bits(2);
  for (int i = 0; i < max_sub_layers_minus1; i++) {
    if (profile_present[i]) {
      r.read_bits(32);  // sub-layer profile block: 88 bits total
      r.read_bits(32);
      r.read_bits(24);
    }
    if (level_present[i]) r.read_bits(8);
  }
}

}  // namespace

void parse_vps(const NalUnit& nal) {
  if (nal.nal_unit_type != NAL_VPS)
    throw MalformedCode("parse_vps: not a VPS NAL");
  BitReader r(nal.rbsp);
  r.read_bits(4);  // vps_video_parameter_set_id
  r.read_bits(2);  // vps_base_layer_internal_flag, vps_base_layer_available_flag
  r.read_bits(6);  // vps_max_layers_minus1
  int max_sub_layers_minus1 = int(r.read_bits(3));
  r.read_bits(1);  // vps_temporal_id_nesting_flag
  if (r.read_bits(16) != 0xffff)
    throw MalformedCode("VPS: vps_reserved_0xffff_16bits mismatch");
  // Nothing after this point matters to an all-intra single-layer decode.
  (void)max_sub_layers_minus1;
}

SequenceParams parse_sps(const NalUnit& nal) {
  if (nal.nal_unit_type != NAL_SPS)
    throw MalformedCode("parse_sps: not an SPS NAL");
  BitReader r(nal.rbsp);
  SequenceParams sps;

  r.read_bits(4);  // sps_video_parameter_set_id
  int max_sub_layers_minus1 = int(r.read_bits(3));
  if (max_sub_layers_minus1 > 6)
    throw MalformedCode("SPS: sps_max_sub_layers_minus1 > 6");
  r.read_bits(1);  // sps_temporal_id_nesting_flag
  skip_profile_tier_level(r, max_sub_layers_minus1);

  sps.sps_id = int(r.read_ue());
  if (sps.sps_id > 15) throw MalformedCode("SPS: id out of range");

  sps.chroma_format = int(r.read_ue());
  if (sps.chroma_format != 1)
    throw UnsupportedFeature("chroma_format", "only 4:2:0 is supported");

  sps.pic_width_luma = int(r.read_ue());
  sps.pic_height_luma = int(r.read_ue());
  if (sps.pic_width_luma <= 0 || sps.pic_height_luma <= 0 ||
      sps.pic_width_luma > 16888 || sps.pic_height_luma > 16888)
    throw MalformedCode("SPS: picture size out of range");
  if ((sps.pic_width_luma & 7) != 0 || (sps.pic_height_luma & 7) != 0)
    throw UnsupportedFeature("pic_alignment",
                             "subset requires dimensions in whole 8x8 CUs");

  if (r.read_bit()) {  // conformance_window_flag: irrelevant to parsing
    r.read_ue();
    r.read_ue();
    r.read_ue();
    r.read_ue();
  }

  sps.bit_depth_luma = int(r.read_ue()) + 8;
  sps.bit_depth_chroma = int(r.read_ue()) + 8;
  if (sps.bit_depth_luma != 8 || sps.bit_depth_chroma != 8)
    throw UnsupportedFeature("bit_depth", "only 8-bit is supported");

  r.read_ue();  // log2_max_pic_order_cnt_lsb_minus4
  bool sub_layer_ordering_info = r.read_bit();
  int n = sub_layer_ordering_info ? max_sub_layers_minus1 + 1 : 1;
  for (int i = 0; i < n; i++) {
    r.read_ue();  // sps_max_dec_pic_buffering_minus1
    r.read_ue();  // sps_max_num_reorder_pics
    r.read_ue();  // sps_max_latency_increase_plus1
  }

  int min_cb_log2_minus3 = int(r.read_ue());
  if (min_cb_log2_minus3 != 0)
    throw UnsupportedFeature("min_cb_size",
                             "subset pins the minimum CU at 8x8");
  sps.min_cb_log2_size = 3;
  sps.ctb_log2_size = sps.min_cb_log2_size + int(r.read_ue());
  if (sps.ctb_log2_size < 4 || sps.ctb_log2_size > 6)
    throw MalformedCode("SPS: CTU size outside 16..64");

  int min_tb_log2_minus2 = int(r.read_ue());
  if (min_tb_log2_minus2 != 0)
    throw UnsupportedFeature("min_tb_size",
                             "subset pins the minimum TB at 4x4");
  sps.min_tb_log2_size = 2;
  sps.max_tb_log2_size = sps.min_tb_log2_size + int(r.read_ue());
  if (sps.max_tb_log2_size > 5 || sps.max_tb_log2_size > sps.ctb_log2_size)
    throw MalformedCode("SPS: max transform size invalid");

  r.read_ue();  // max_transform_hierarchy_depth_inter
  sps.max_transform_hierarchy_depth_intra = int(r.read_ue());
  if (sps.max_transform_hierarchy_depth_intra > 4)
    throw MalformedCode("SPS: max_transform_hierarchy_depth_intra > 4");

  if (r.read_bit())  // scaling_list_enabled_flag
    throw UnsupportedFeature("scaling_lists");
  sps.amp_enabled = r.read_bit();
  sps.sao_enabled = r.read_bit();
  if (r.read_bit())  // pcm_enabled_flag
    throw UnsupportedFeature("pcm");

  if (r.read_ue() != 0)  // num_short_term_ref_pic_sets
    throw UnsupportedFeature("ref_pic_sets",
                             "all-intra streams carry no RPS");
  if (r.read_bit())  // long_term_ref_pics_present_flag
    throw UnsupportedFeature("long_term_ref_pics");
  r.read_bit();  // sps_temporal_mvp_enabled_flag
  sps.strong_intra_smoothing = r.read_bit();

  bool vui_present = r.read_bit();
  if (!vui_present) {
    if (r.read_bit())  // sps_extension_present_flag
      throw UnsupportedFeature("sps_extension");
  }
  // VUI is display metadata; nothing in it affects entropy decoding, so a
  // stream with VUI is accepted without walking the remainder.
  return sps;
}

PictureParams parse_pps(const NalUnit& nal) {
  if (nal.nal_unit_type != NAL_PPS)
    throw MalformedCode("parse_pps: not a PPS NAL");
  BitReader r(nal.rbsp);
  PictureParams pps;

  pps.pps_id = int(r.read_ue());
  pps.sps_id = int(r.read_ue());
  if (pps.pps_id > 63 || pps.sps_id > 15)
    throw MalformedCode("PPS: id out of range");

  if (r.read_bit())  // dependent_slice_segments_enabled_flag
    throw UnsupportedFeature("dependent_slices");
  pps.output_flag_present = r.read_bit();
  pps.num_extra_slice_header_bits = int(r.read_bits(3));
  pps.sign_data_hiding_enabled = r.read_bit();
  r.read_bit();  // cabac_init_present_flag: only alters P/B headers
  r.read_ue();   // num_ref_idx_l0_default_active_minus1
  r.read_ue();   // num_ref_idx_l1_default_active_minus1
  pps.init_qp = 26 + int(r.read_se());
  if (pps.init_qp < 0 || pps.init_qp > 51)
    throw MalformedCode("PPS: init_qp outside [0, 51]");
  pps.constrained_intra_pred = r.read_bit();
  pps.transform_skip_enabled = r.read_bit();
  if (pps.transform_skip_enabled) throw UnsupportedFeature("transform_skip");
  if (r.read_bit())  // cu_qp_delta_enabled_flag
    throw UnsupportedFeature("cu_qp_delta", "subset requires fixed QP");
  pps.cb_qp_offset = int(r.read_se());
  pps.cr_qp_offset = int(r.read_se());
  if (pps.cb_qp_offset < -12 || pps.cb_qp_offset > 12 ||
      pps.cr_qp_offset < -12 || pps.cr_qp_offset > 12)
    throw MalformedCode("PPS: chroma QP offset outside [-12, 12]");
  pps.slice_chroma_qp_offsets_present = r.read_bit();
  r.read_bit();  // weighted_pred_flag
  r.read_bit();  // weighted_bipred_flag
  if (r.read_bit())  // transquant_bypass_enabled_flag
    throw UnsupportedFeature("transquant_bypass");
  pps.tiles_enabled = r.read_bit();
  pps.entropy_sync_enabled = r.read_bit();
  if (pps.tiles_enabled) throw UnsupportedFeature("tiles");
  if (pps.entropy_sync_enabled) throw UnsupportedFeature("wpp");
  pps.loop_filter_across_slices = r.read_bit();
  pps.deblocking_filter_control_present = r.read_bit();
  if (pps.deblocking_filter_control_present) {
    pps.deblocking_filter_override_enabled = r.read_bit();
    pps.deblocking_filter_disabled = r.read_bit();
    if (!pps.deblocking_filter_disabled) {
      r.read_se();  // pps_beta_offset_div2
      r.read_se();  // pps_tc_offset_div2
    }
  }
  if (r.read_bit())  // pps_scaling_list_data_present_flag
    throw UnsupportedFeature("scaling_lists");
  r.read_bit();  // lists_modification_present_flag
  r.read_ue();   // log2_parallel_merge_level_minus2
  pps.slice_header_extension_present = r.read_bit();
  if (r.read_bit())  // pps_extension_present_flag
    throw UnsupportedFeature("pps_extension");
  return pps;
}

std::pair<SliceHeader, BitReader> parse_slice_header(
    const NalUnit& nal, const SequenceParams& sps, const PictureParams& pps) {
  if (!is_irap(nal.nal_unit_type))
    throw UnsupportedFeature("inter_slice", "only IRAP pictures are supported");
  if (nal.nal_unit_type != NAL_IDR_W_RADL && nal.nal_unit_type != NAL_IDR_N_LP)
    throw UnsupportedFeature("non_idr_slice",
                             "only IDR pictures are supported");

  BitReader r(nal.rbsp);
  SliceHeader sh;

  if (!r.read_bit())  // first_slice_segment_in_pic_flag
    throw UnsupportedFeature("multi_slice",
                             "one slice per picture is supported");
  r.read_bit();  // no_output_of_prior_pics_flag (IRAP)
  int slice_pps_id = int(r.read_ue());
  if (slice_pps_id != pps.pps_id)
    throw MalformedCode("slice header references an unknown PPS");
  for (int i = 0; i < pps.num_extra_slice_header_bits; i++) r.read_bit();

  int slice_type = int(r.read_ue());
  if (slice_type != 2) throw UnsupportedFeature("inter_slice");
  sh.slice_type = 2;
  sh.first_ctb_address = 0;

  if (pps.output_flag_present) r.read_bit();  // pic_output_flag
  // IDR: no POC, no RPS, no temporal MVP syntax in the header.

  if (sps.sao_enabled) {
    sh.sao_luma = r.read_bit();
    sh.sao_chroma = r.read_bit();
    if (sh.sao_luma || sh.sao_chroma)
      throw UnsupportedFeature("sao", "subset requires SAO off at encode time");
  }

  sh.slice_qp = pps.init_qp + int(r.read_se());
  if (sh.slice_qp < 0 || sh.slice_qp > 51)
    throw MalformedCode("slice QP outside [0, 51]");

  if (pps.slice_chroma_qp_offsets_present) {
    r.read_se();  // slice_cb_qp_offset
    r.read_se();  // slice_cr_qp_offset
  }
  bool deblocking_disabled = pps.deblocking_filter_disabled;
  if (pps.deblocking_filter_override_enabled) {
    if (r.read_bit()) {  // deblocking_filter_override_flag
      deblocking_disabled = r.read_bit();
      if (!deblocking_disabled) {
        r.read_se();  // slice_beta_offset_div2
        r.read_se();  // slice_tc_offset_div2
      }
    }
  }
  if (pps.loop_filter_across_slices &&
      (sh.sao_luma || sh.sao_chroma || !deblocking_disabled))
    r.read_bit();  // slice_loop_filter_across_slices_enabled_flag

  // No tiles/WPP: no entry-point offsets.
  if (pps.slice_header_extension_present) {
    int len = int(r.read_ue());
    for (int i = 0; i < len; i++) r.read_bits(8);
  }

  // byte_alignment(): one 1-bit then zeros up to the boundary.
  if (r.read_bit() != 1)
    throw MalformedCode("slice header alignment bit is zero");
  while (!r.byte_aligned()) {
    if (r.read_bit() != 0)
      throw MalformedCode("nonzero bit in slice header alignment");
  }
  return {sh, r};
}

}  // namespace hf
