// SPDX-License-Identifier: MIT
// Syntax-walk conformance against the shipped fixture corpus: per-PU records
// must match the generator's ground-truth trace field for field, bins must
// balance, and malformed or out-of-subset streams must fail loudly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <string>
#include <vector>

#include "featimg.h"
#include "support/bitwriter.h"
#include "support/enc_headers.h"
#include "support/gen_corpus.h"
#include "syntax.h"

using namespace hf;
using json = nlohmann::json;

namespace {

std::string data_path(const std::string& name) {
  return std::string(HEVCFACE_TEST_DATA_DIR) + "/" + name;
}

struct Fixture {
  std::vector<uint8_t> stream;
  json trace;
};

Fixture load_fixture(const std::string& name) {
  Fixture f;
  f.stream = read_file(data_path(name + ".hevc"));
  const auto tr = read_file(data_path(name + ".trace.json"));
  f.trace = json::parse(tr.begin(), tr.end());
  return f;
}

}  // namespace

TEST_CASE("fixture corpus: records match the reference trace exactly") {
  for (const auto& spec : hf::test::fixture_specs()) {
    CAPTURE(spec.name);
    Fixture f = load_fixture(spec.name);
    StreamParse sp = parse_stream(f.stream);

    const int width = f.trace["width"];
    const int height = f.trace["height"];
    CHECK(sp.sps.pic_width_luma == width);
    CHECK(sp.sps.pic_height_luma == height);
    CHECK(sp.slice.slice_qp == int(f.trace["qp"]));

    const auto& expect = f.trace["records"];
    REQUIRE(sp.picture.records.size() == expect.size());
    uint64_t bins_sum = 0;
    uint64_t area_sum = 0;
    for (size_t i = 0; i < expect.size(); i++) {
      const auto& e = expect[i];
      const PuRecord& r = sp.picture.records[i];
      REQUIRE(r.x == int(e["x"]));
      REQUIRE(r.y == int(e["y"]));
      REQUIRE(r.size == int(e["size"]));
      REQUIRE(r.ipm == int(e["ipm"]));
      REQUIRE(r.bins == uint64_t(e["bins"]));
      bins_sum += r.bins;
      area_sum += uint64_t(r.size) * uint64_t(r.size);
    }
    // Conservation invariants: the records tile the picture and the
    // attribution rule loses no bins.
    CHECK(sp.picture.total_bins == uint64_t(f.trace["total_bins"]));
    CHECK(bins_sum == sp.picture.total_bins);
    CHECK(area_sum == uint64_t(width) * uint64_t(height));
    // A finished slice leaves at most the byte-alignment padding unread.
    CHECK(sp.picture.trailing_bits >= 0);
    CHECK(sp.picture.trailing_bits <= 7);
  }
}

TEST_CASE("record fields stay inside their domains") {
  Fixture f = load_fixture("grid_busy_128_q32");
  StreamParse sp = parse_stream(f.stream);
  for (const PuRecord& r : sp.picture.records) {
    CHECK(r.ipm >= 0);
    CHECK(r.ipm <= 34);
    CHECK((r.size == 4 || r.size == 8 || r.size == 16 || r.size == 32));
    CHECK(r.x % r.size == 0);
    CHECK(r.y % r.size == 0);
    CHECK(r.x + r.size <= sp.sps.pic_width_luma);
    CHECK(r.y + r.size <= sp.sps.pic_height_luma);
  }
}

TEST_CASE("parsing is deterministic") {
  Fixture f = load_fixture("grid_smooth_128_q22");
  StreamParse a = parse_stream(f.stream);
  StreamParse b = parse_stream(f.stream);
  REQUIRE(a.picture.records.size() == b.picture.records.size());
  for (size_t i = 0; i < a.picture.records.size(); i++) {
    CHECK(a.picture.records[i].x == b.picture.records[i].x);
    CHECK(a.picture.records[i].bins == b.picture.records[i].bins);
  }
  CHECK(a.picture.total_bins == b.picture.total_bins);
}

TEST_CASE("bin log covers every decoded bin and ends in terminate") {
  Fixture f = load_fixture("grid_busy_64_q22");
  StreamParse sp = parse_stream(f.stream, /*enable_bin_log=*/true);
  const auto& log = sp.picture.bin_log;
  REQUIRE(log.size() == sp.picture.total_bins);
  size_t regular = 0;
  for (const BinLogEntry& e : log) {
    REQUIRE((e.mode == 'r' || e.mode == 'b' || e.mode == 't'));
    if (e.mode == 'r') {
      REQUIRE(e.ctx_index >= 0);
      REQUIRE(e.ctx_index < CTX_COUNT);
      regular++;
    } else {
      REQUIRE(e.ctx_index == -1);
    }
    REQUIRE((e.bin == 0 || e.bin == 1));
  }
  CHECK(regular > 0);
  CHECK(log.back().mode == 't');
  CHECK(log.back().bin == 1);

  // Off by default.
  StreamParse quiet = parse_stream(f.stream);
  CHECK(quiet.picture.bin_log.empty());
}

TEST_CASE("NAL-level stream errors") {
  Fixture f = load_fixture("grid_smooth_64_q32");
  const auto nals = split_annexb(f.stream);
  REQUIRE(nals.size() == 4);  // VPS SPS PPS IDR

  auto rebuild = [](std::initializer_list<const NalUnit*> units) {
    std::vector<uint8_t> s;
    for (const NalUnit* u : units) {
      auto bytes = hf::test::wrap_nal(u->nal_unit_type, u->rbsp);
      s.insert(s.end(), bytes.begin(), bytes.end());
    }
    return s;
  };
  const NalUnit& vps = nals[0];
  const NalUnit& sps = nals[1];
  const NalUnit& pps = nals[2];
  const NalUnit& idr = nals[3];

  // Slice with no parameter sets ahead of it.
  CHECK_THROWS_AS(parse_stream(rebuild({&idr})), MalformedCode);
  CHECK_THROWS_AS(parse_stream(rebuild({&vps, &sps, &idr})), MalformedCode);
  // PPS before SPS.
  CHECK_THROWS_AS(parse_stream(rebuild({&vps, &pps, &sps, &idr})),
                  MalformedCode);
  // Headers only, no coded picture.
  CHECK_THROWS_AS(parse_stream(rebuild({&vps, &sps, &pps})), MalformedCode);

  // Two coded pictures: outside the single-picture subset.
  try {
    parse_stream(rebuild({&vps, &sps, &pps, &idr, &idr}));
    FAIL_CHECK("second picture accepted");
  } catch (const UnsupportedFeature& e) {
    CHECK(e.feature == "multi_picture");
  }

  // AUD and SEI units are skipped, not rejected.
  hf::test::BitWriter aud;
  aud.put_bits(2, 3);  // pic_type: I
  aud.put_trailing_bits();
  std::vector<uint8_t> with_aud = hf::test::wrap_nal(NAL_AUD, aud.bytes());
  auto rest = rebuild({&vps, &sps, &pps, &idr});
  with_aud.insert(with_aud.end(), rest.begin(), rest.end());
  StreamParse sp = parse_stream(with_aud);
  CHECK(sp.picture.records.size() == parse_stream(f.stream).picture.records.size());
}

TEST_CASE("unsupported PPS features surface through parse_stream") {
  // Minimal PPS prefix up to tiles_enabled_flag = 1; the gate fires before
  // the tile grid would be read.
  hf::test::BitWriter w;
  w.put_ue(0);       // pps id
  w.put_ue(0);       // sps id
  w.put_bit(0);      // dependent_slice_segments_enabled_flag
  w.put_bit(0);      // output_flag_present_flag
  w.put_bits(0, 3);  // num_extra_slice_header_bits
  w.put_bit(0);      // sign_data_hiding_enabled_flag
  w.put_bit(0);      // cabac_init_present_flag
  w.put_ue(0);       // num_ref_idx_l0_default_active_minus1
  w.put_ue(0);       // num_ref_idx_l1_default_active_minus1
  w.put_se(6);       // init_qp_minus26
  w.put_bit(0);      // constrained_intra_pred_flag
  w.put_bit(0);      // transform_skip_enabled_flag
  w.put_bit(0);      // cu_qp_delta_enabled_flag
  w.put_se(0);       // pps_cb_qp_offset
  w.put_se(0);       // pps_cr_qp_offset
  w.put_bit(0);      // pps_slice_chroma_qp_offsets_present_flag
  w.put_bit(0);      // weighted_pred_flag
  w.put_bit(0);      // weighted_bipred_flag
  w.put_bit(0);      // transquant_bypass_enabled_flag
  w.put_bit(1);      // tiles_enabled_flag
  w.put_trailing_bits();

  Fixture f = load_fixture("grid_smooth_64_q32");
  const auto nals = split_annexb(f.stream);
  std::vector<uint8_t> s;
  auto add = [&s](const std::vector<uint8_t>& bytes) {
    s.insert(s.end(), bytes.begin(), bytes.end());
  };
  add(hf::test::wrap_nal(nals[0].nal_unit_type, nals[0].rbsp));
  add(hf::test::wrap_nal(nals[1].nal_unit_type, nals[1].rbsp));
  add(hf::test::wrap_nal(NAL_PPS, w.bytes()));
  add(hf::test::wrap_nal(nals[3].nal_unit_type, nals[3].rbsp));
  try {
    parse_stream(s);
    FAIL_CHECK("tiled PPS accepted");
  } catch (const UnsupportedFeature& e) {
    CHECK(e.feature == "tiles");
  }
}

TEST_CASE("every truncation of a valid stream throws a library error") {
  Fixture f = load_fixture("grid_busy_64_q32");
  const size_t n = f.stream.size();
  size_t tried = 0;
  for (size_t cut = 0; cut < n; cut += (cut < 128 ? 1 : 7)) {
    tried++;
    std::vector<uint8_t> prefix(f.stream.begin(),
                                f.stream.begin() + long(cut));
    try {
      parse_stream(prefix);
      CAPTURE(cut);
      FAIL_CHECK("truncated stream parsed successfully");
    } catch (const Error&) {
      // Expected: NoStartCode / TruncatedNal / OutOfBits / MalformedCode,
      // depending on where the cut lands.
    }
  }
  CHECK(tried > 100);
}

TEST_CASE("mid-slice truncation reports the CTU position") {
  Fixture f = load_fixture("grid_busy_128_q32");
  // Cut deep inside the slice payload so several CTUs decode first.
  std::vector<uint8_t> prefix(f.stream.begin(),
                              f.stream.begin() + long(f.stream.size() - 40));
  try {
    parse_stream(prefix);
    FAIL_CHECK("truncated slice parsed successfully");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("CTU") != std::string::npos);
  }
}

TEST_CASE("scan order tables: 4x4 diagonal, horizontal, vertical") {
  // H.265 6.5.3: up-right diagonal for a 4x4 block, [0] = x and [1] = y as in
  // the standard's initialization pseudo-code.
  const auto* diag = scan_order(2, 0);
  const int expect_diag[16][2] = {{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0},
                                  {0, 3}, {1, 2}, {2, 1}, {3, 0}, {1, 3}, {2, 2},
                                  {3, 1}, {2, 3}, {3, 2}, {3, 3}};
  for (int i = 0; i < 16; i++) {
    CHECK(int(diag[i][0]) == expect_diag[i][0]);
    CHECK(int(diag[i][1]) == expect_diag[i][1]);
  }
  // 6.5.4 horizontal: row-major.  6.5.5 vertical: column-major.
  const auto* hor = scan_order(2, 1);
  const auto* ver = scan_order(2, 2);
  for (int i = 0; i < 16; i++) {
    CHECK(int(hor[i][0]) == i % 4);
    CHECK(int(hor[i][1]) == i / 4);
    CHECK(int(ver[i][0]) == i / 4);
    CHECK(int(ver[i][1]) == i % 4);
  }
}

TEST_CASE("scan selection follows 7.4.9.11") {
  // 4x4 and 8x8 luma pick the mode-dependent scan.
  CHECK(scan_idx_for(6, 2, 0) == 2);   // near-horizontal -> vertical scan
  CHECK(scan_idx_for(14, 2, 0) == 2);
  CHECK(scan_idx_for(22, 2, 0) == 1);  // near-vertical -> horizontal scan
  CHECK(scan_idx_for(30, 3, 0) == 1);
  CHECK(scan_idx_for(10, 3, 0) == 2);
  // Outside 6..14 / 22..30: diagonal.
  CHECK(scan_idx_for(0, 2, 0) == 0);
  CHECK(scan_idx_for(1, 2, 0) == 0);
  CHECK(scan_idx_for(5, 2, 0) == 0);
  CHECK(scan_idx_for(15, 2, 0) == 0);
  CHECK(scan_idx_for(34, 2, 0) == 0);
  // 16x16+ luma always diagonal.
  CHECK(scan_idx_for(10, 4, 0) == 0);
  CHECK(scan_idx_for(26, 5, 0) == 0);
  // Chroma: mode-dependent only at 4x4 (log2 == 2).
  CHECK(scan_idx_for(10, 2, 1) == 2);
  CHECK(scan_idx_for(26, 2, 2) == 1);
  CHECK(scan_idx_for(10, 3, 1) == 0);
}
