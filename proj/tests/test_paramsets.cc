// SPDX-License-Identifier: MIT
// Parameter-set parsing: field extraction on well-formed VPS/SPS/PPS/slice
// headers, plus the subset gates (everything outside the restricted profile
// must raise UnsupportedFeature, boundary-value garbage MalformedCode).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paramsets.h"
#include "support/bitwriter.h"
#include "support/enc_headers.h"

using namespace hf;
using hf::test::BitWriter;
using hf::test::EncoderConfig;
using hf::test::wrap_nal;

namespace {

// Local SPS/PPS/slice writers with every subset-relevant field exposed, so
// each test can flip exactly one knob.  The happy-path layout mirrors
// support/enc_headers.cc.
struct SpsFields {
  int chroma_format_idc = 1;
  int width = 64, height = 64;
  int bit_depth_minus8 = 0;
  int min_cb_log2_minus3 = 0;
  int log2_diff_max_min_cb = 3;  // CTB 64
  int min_tb_log2_minus2 = 0;
  int log2_diff_max_min_tb = 3;  // max TB 32
  int max_hier_intra = 1;
  int scaling_list_enabled = 0;
  int sao_enabled = 0;
  int pcm_enabled = 0;
  int num_st_ref_pic_sets = 0;
  int long_term_ref_pics = 0;
  int strong_intra_smoothing = 0;
  int extension_flag = 0;
};

void put_ptl(BitWriter& w) {
  w.put_bits(0, 2);
  w.put_bit(0);
  w.put_bits(1, 5);
  w.put_bits(0x60000000, 32);
  w.put_bit(1);
  w.put_bit(0);
  w.put_bit(0);
  w.put_bit(1);
  w.put_bits(0, 32);
  w.put_bits(0, 11);
  w.put_bit(0);
  w.put_bits(120, 8);
}

NalUnit sps_nal(const SpsFields& f) {
  BitWriter w;
  w.put_bits(0, 4);
  w.put_bits(0, 3);
  w.put_bit(1);
  put_ptl(w);
  w.put_ue(0);  // sps_seq_parameter_set_id
  w.put_ue(uint32_t(f.chroma_format_idc));
  if (f.chroma_format_idc == 3) w.put_bit(0);  // separate_colour_plane_flag
  w.put_ue(uint32_t(f.width));
  w.put_ue(uint32_t(f.height));
  w.put_bit(0);
  w.put_ue(uint32_t(f.bit_depth_minus8));
  w.put_ue(uint32_t(f.bit_depth_minus8));
  w.put_ue(4);
  w.put_bit(1);
  w.put_ue(0);
  w.put_ue(0);
  w.put_ue(0);
  w.put_ue(uint32_t(f.min_cb_log2_minus3));
  w.put_ue(uint32_t(f.log2_diff_max_min_cb));
  w.put_ue(uint32_t(f.min_tb_log2_minus2));
  w.put_ue(uint32_t(f.log2_diff_max_min_tb));
  w.put_ue(0);
  w.put_ue(uint32_t(f.max_hier_intra));
  w.put_bit(f.scaling_list_enabled);
  w.put_bit(0);  // amp
  w.put_bit(f.sao_enabled);
  w.put_bit(f.pcm_enabled);
  w.put_ue(uint32_t(f.num_st_ref_pic_sets));
  if (f.num_st_ref_pic_sets > 0) {
    // st_ref_pic_set(0) for one negative picture; never parsed (the gate
    // fires first) but keeps the bit layout honest.
    w.put_ue(1);
    w.put_ue(0);
    w.put_ue(0);
    w.put_bit(1);
  }
  w.put_bit(f.long_term_ref_pics);
  w.put_bit(0);
  w.put_bit(f.strong_intra_smoothing);
  w.put_bit(0);  // vui
  w.put_bit(f.extension_flag);
  w.put_trailing_bits();
  auto nal = split_annexb(wrap_nal(NAL_SPS, w.bytes()));
  return nal.at(0);
}

struct PpsFields {
  int sign_data_hiding = 1;
  int qp = 32;
  int dependent_slices = 0;
  int transform_skip = 0;
  int cu_qp_delta = 0;
  int cb_qp_offset = 0;
  int transquant_bypass = 0;
  int tiles = 0;
  int wpp = 0;
  int scaling_list_data = 0;
};

NalUnit pps_nal(const PpsFields& f) {
  BitWriter w;
  w.put_ue(0);
  w.put_ue(0);
  w.put_bit(f.dependent_slices);
  w.put_bit(0);
  w.put_bits(0, 3);
  w.put_bit(f.sign_data_hiding);
  w.put_bit(0);
  w.put_ue(0);
  w.put_ue(0);
  w.put_se(f.qp - 26);
  w.put_bit(0);
  w.put_bit(f.transform_skip);
  w.put_bit(f.cu_qp_delta);
  if (f.cu_qp_delta) w.put_ue(0);  // diff_cu_qp_delta_depth
  w.put_se(f.cb_qp_offset);
  w.put_se(0);
  w.put_bit(0);
  w.put_bit(0);
  w.put_bit(0);
  w.put_bit(f.transquant_bypass);
  w.put_bit(f.tiles);
  w.put_bit(f.wpp);
  // tiles=1 would append the tile grid here; the gate fires before it is
  // read, so the truncated layout never misparses in these tests.
  w.put_bit(0);
  w.put_bit(1);
  w.put_bit(0);
  w.put_bit(1);
  w.put_bit(f.scaling_list_data);
  w.put_bit(0);
  w.put_ue(0);
  w.put_bit(0);
  w.put_bit(0);
  w.put_trailing_bits();
  auto nal = split_annexb(wrap_nal(NAL_PPS, w.bytes()));
  return nal.at(0);
}

struct SliceFields {
  int nal_type = NAL_IDR_W_RADL;
  int first_slice = 1;
  int pps_id = 0;
  int slice_type = 2;  // I
  int qp_delta = 0;
  int sao_luma = 0, sao_chroma = 0;  // written only when the SPS enables SAO
};

NalUnit slice_nal(const SliceFields& f, bool sps_sao = false) {
  BitWriter w;
  w.put_bit(f.first_slice);
  w.put_bit(0);  // no_output_of_prior_pics_flag (IRAP types only)
  w.put_ue(uint32_t(f.pps_id));
  if (!f.first_slice) w.put_ue(0);  // slice_segment_address
  w.put_ue(uint32_t(f.slice_type));
  if (sps_sao) {
    w.put_bit(f.sao_luma);
    w.put_bit(f.sao_chroma);
  }
  w.put_se(f.qp_delta);
  w.put_bit(1);
  while (!w.byte_aligned()) w.put_bit(0);
  // A couple of payload bytes standing in for CABAC data.
  w.put_bits(0xAB, 8);
  w.put_bits(0xCD, 8);
  auto nal = split_annexb(wrap_nal(f.nal_type, w.bytes()));
  return nal.at(0);
}

}  // namespace

TEST_CASE("VPS accepts the reference layout and checks its fixed pattern") {
  auto nal = split_annexb(wrap_nal(NAL_VPS, hf::test::build_vps_rbsp())).at(0);
  CHECK_NOTHROW(parse_vps(nal));

  // Break vps_reserved_0xffff_16bits (bit 17 of the payload).
  auto rbsp = hf::test::build_vps_rbsp();
  rbsp[2] ^= 0x40;
  auto bad = split_annexb(wrap_nal(NAL_VPS, rbsp)).at(0);
  CHECK_THROWS_AS(parse_vps(bad), MalformedCode);

  CHECK_THROWS_AS(parse_vps(sps_nal(SpsFields{})), MalformedCode);
}

TEST_CASE("SPS field extraction on the reference configurations") {
  EncoderConfig cfg;  // 64x64, CTB 64, max TB 32, hierarchy 1
  auto nal = split_annexb(wrap_nal(NAL_SPS, hf::test::build_sps_rbsp(cfg))).at(0);
  SequenceParams sps = parse_sps(nal);
  CHECK(sps.sps_id == 0);
  CHECK(sps.pic_width_luma == 64);
  CHECK(sps.pic_height_luma == 64);
  CHECK(sps.ctb_log2_size == 6);
  CHECK(sps.min_cb_log2_size == 3);
  CHECK(sps.min_tb_log2_size == 2);
  CHECK(sps.max_tb_log2_size == 5);
  CHECK(sps.max_transform_hierarchy_depth_intra == 1);
  CHECK(sps.chroma_format == 1);
  CHECK(sps.bit_depth_luma == 8);
  CHECK_FALSE(sps.sao_enabled);
  CHECK_FALSE(sps.strong_intra_smoothing);
  CHECK(sps.ctb_size() == 64);
  CHECK(sps.pic_width_in_ctbs() == 1);
  CHECK(sps.pic_height_in_ctbs() == 1);

  SpsFields f;
  f.width = 1280;
  f.height = 720;
  f.log2_diff_max_min_cb = 2;  // CTB 32
  f.log2_diff_max_min_tb = 3;
  f.max_hier_intra = 2;
  f.strong_intra_smoothing = 1;
  SequenceParams s2 = parse_sps(sps_nal(f));
  CHECK(s2.pic_width_luma == 1280);
  CHECK(s2.pic_height_luma == 720);
  CHECK(s2.ctb_log2_size == 5);
  CHECK(s2.pic_width_in_ctbs() == 40);
  CHECK(s2.pic_height_in_ctbs() == 23);  // ceil(720 / 32)
  CHECK(s2.max_transform_hierarchy_depth_intra == 2);
  CHECK(s2.strong_intra_smoothing);
}

TEST_CASE("SPS subset gates raise UnsupportedFeature") {
  auto expect_unsupported = [](SpsFields f, const char* feature) {
    try {
      parse_sps(sps_nal(f));
      FAIL_CHECK("no exception for ", feature);
    } catch (const UnsupportedFeature& e) {
      CHECK(e.feature == feature);
    }
  };

  SpsFields f;
  f.chroma_format_idc = 0;
  expect_unsupported(f, "chroma_format");
  f = SpsFields{};
  f.chroma_format_idc = 2;
  expect_unsupported(f, "chroma_format");
  f = SpsFields{};
  f.chroma_format_idc = 3;
  expect_unsupported(f, "chroma_format");

  f = SpsFields{};
  f.bit_depth_minus8 = 2;
  expect_unsupported(f, "bit_depth");

  f = SpsFields{};
  f.width = 68;  // not a whole number of 8x8 CUs
  expect_unsupported(f, "pic_alignment");
  f = SpsFields{};
  f.height = 60;
  expect_unsupported(f, "pic_alignment");

  f = SpsFields{};
  f.min_cb_log2_minus3 = 1;
  expect_unsupported(f, "min_cb_size");

  f = SpsFields{};
  f.min_tb_log2_minus2 = 1;
  expect_unsupported(f, "min_tb_size");

  f = SpsFields{};
  f.scaling_list_enabled = 1;
  expect_unsupported(f, "scaling_lists");

  f = SpsFields{};
  f.pcm_enabled = 1;
  expect_unsupported(f, "pcm");

  f = SpsFields{};
  f.num_st_ref_pic_sets = 1;
  expect_unsupported(f, "ref_pic_sets");

  f = SpsFields{};
  f.long_term_ref_pics = 1;
  expect_unsupported(f, "long_term_ref_pics");

  f = SpsFields{};
  f.extension_flag = 1;
  expect_unsupported(f, "sps_extension");
}

TEST_CASE("SPS malformed values") {
  SpsFields f;
  f.log2_diff_max_min_cb = 4;  // CTB 128
  CHECK_THROWS_AS(parse_sps(sps_nal(f)), MalformedCode);

  f = SpsFields{};
  f.log2_diff_max_min_tb = 4;  // max TB 64
  CHECK_THROWS_AS(parse_sps(sps_nal(f)), MalformedCode);

  f = SpsFields{};
  f.log2_diff_max_min_cb = 1;  // CTB 16 but max TB 32
  CHECK_THROWS_AS(parse_sps(sps_nal(f)), MalformedCode);

  f = SpsFields{};
  f.width = 0;
  CHECK_THROWS_AS(parse_sps(sps_nal(f)), MalformedCode);

  f = SpsFields{};
  f.max_hier_intra = 5;
  CHECK_THROWS_AS(parse_sps(sps_nal(f)), MalformedCode);

  // Truncated payload: cut the RBSP in half.
  auto rbsp = hf::test::build_sps_rbsp(EncoderConfig{});
  rbsp.resize(rbsp.size() / 2);
  rbsp.back() |= 0x01;  // keep the NAL wrapper from trimming padding
  auto nal = split_annexb(wrap_nal(NAL_SPS, rbsp)).at(0);
  CHECK_THROWS_AS(parse_sps(nal), OutOfBits);
}

TEST_CASE("PPS field extraction and subset gates") {
  PpsFields f;
  PictureParams pps = parse_pps(pps_nal(f));
  CHECK(pps.pps_id == 0);
  CHECK(pps.sps_id == 0);
  CHECK(pps.init_qp == 32);
  CHECK(pps.sign_data_hiding_enabled);
  CHECK_FALSE(pps.tiles_enabled);
  CHECK(pps.deblocking_filter_control_present);
  CHECK(pps.deblocking_filter_disabled);

  f = PpsFields{};
  f.sign_data_hiding = 0;
  f.qp = 22;
  f.cb_qp_offset = -3;
  pps = parse_pps(pps_nal(f));
  CHECK_FALSE(pps.sign_data_hiding_enabled);
  CHECK(pps.init_qp == 22);
  CHECK(pps.cb_qp_offset == -3);

  auto expect_unsupported = [](PpsFields pf, const char* feature) {
    try {
      parse_pps(pps_nal(pf));
      FAIL_CHECK("no exception for ", feature);
    } catch (const UnsupportedFeature& e) {
      CHECK(e.feature == feature);
    }
  };
  f = PpsFields{};
  f.dependent_slices = 1;
  expect_unsupported(f, "dependent_slices");
  f = PpsFields{};
  f.transform_skip = 1;
  expect_unsupported(f, "transform_skip");
  f = PpsFields{};
  f.cu_qp_delta = 1;
  expect_unsupported(f, "cu_qp_delta");
  f = PpsFields{};
  f.transquant_bypass = 1;
  expect_unsupported(f, "transquant_bypass");
  f = PpsFields{};
  f.tiles = 1;
  expect_unsupported(f, "tiles");
  f = PpsFields{};
  f.wpp = 1;
  expect_unsupported(f, "wpp");
  f = PpsFields{};
  f.scaling_list_data = 1;
  expect_unsupported(f, "scaling_lists");

  f = PpsFields{};
  f.qp = 52;
  CHECK_THROWS_AS(parse_pps(pps_nal(f)), MalformedCode);
  f = PpsFields{};
  f.cb_qp_offset = 13;
  CHECK_THROWS_AS(parse_pps(pps_nal(f)), MalformedCode);
}

TEST_CASE("slice header: QP derivation and reader alignment") {
  SequenceParams sps = parse_sps(sps_nal(SpsFields{}));
  PpsFields pf;
  pf.qp = 30;
  PictureParams pps = parse_pps(pps_nal(pf));

  SliceFields sf;
  sf.qp_delta = 4;
  // The returned reader borrows the NAL's rbsp, so the unit must stay alive.
  NalUnit nal = slice_nal(sf);
  auto [sh, reader] = parse_slice_header(nal, sps, pps);
  CHECK(sh.slice_type == 2);
  CHECK(sh.slice_qp == 34);
  CHECK(sh.first_ctb_address == 0);
  CHECK(reader.byte_aligned());
  // The reader must sit exactly on the stand-in payload.
  CHECK(reader.read_bits(8) == 0xAB);
  CHECK(reader.read_bits(8) == 0xCD);

  sf = SliceFields{};
  sf.qp_delta = -40;  // 32 - 40 < 0
  CHECK_THROWS_AS(parse_slice_header(slice_nal(sf), sps,
                                     parse_pps(pps_nal(PpsFields{}))),
                  MalformedCode);
}

TEST_CASE("slice header subset gates") {
  SequenceParams sps = parse_sps(sps_nal(SpsFields{}));
  PictureParams pps = parse_pps(pps_nal(PpsFields{}));

  auto expect_unsupported = [&](const SliceFields& sf, const char* feature,
                                bool sps_sao = false) {
    SequenceParams s = sps;
    s.sao_enabled = sps_sao;
    try {
      parse_slice_header(slice_nal(sf, sps_sao), s, pps);
      FAIL_CHECK("no exception for ", feature);
    } catch (const UnsupportedFeature& e) {
      CHECK(e.feature == feature);
    }
  };

  SliceFields sf;
  sf.slice_type = 0;  // B
  expect_unsupported(sf, "inter_slice");
  sf = SliceFields{};
  sf.slice_type = 1;  // P
  expect_unsupported(sf, "inter_slice");

  sf = SliceFields{};
  sf.nal_type = 1;  // TRAIL_R: not an IRAP picture
  expect_unsupported(sf, "inter_slice");

  sf = SliceFields{};
  sf.nal_type = NAL_CRA_NUT;  // IRAP but not instantaneous
  expect_unsupported(sf, "non_idr_slice");

  sf = SliceFields{};
  sf.first_slice = 0;
  expect_unsupported(sf, "multi_slice");

  sf = SliceFields{};
  sf.sao_luma = 1;
  expect_unsupported(sf, "sao", /*sps_sao=*/true);

  sf = SliceFields{};
  sf.pps_id = 3;  // no such PPS
  CHECK_THROWS_AS(parse_slice_header(slice_nal(sf), sps, pps), MalformedCode);
}

TEST_CASE("SAO-capable SPS with per-slice SAO off parses fine") {
  SpsFields f;
  f.sao_enabled = 1;
  SequenceParams sps = parse_sps(sps_nal(f));
  CHECK(sps.sao_enabled);
  PictureParams pps = parse_pps(pps_nal(PpsFields{}));
  SliceFields sf;  // sao_luma = sao_chroma = 0
  NalUnit nal = slice_nal(sf, true);
  auto [sh, reader] = parse_slice_header(nal, sps, pps);
  CHECK_FALSE(sh.sao_luma);
  CHECK_FALSE(sh.sao_chroma);
  CHECK(reader.read_bits(8) == 0xAB);
}
