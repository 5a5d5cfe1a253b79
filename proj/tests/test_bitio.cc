// SPDX-License-Identifier: MIT
// Unit tests for Annex-B splitting, emulation handling, and Exp-Golomb codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bitio.h"
#include "support/bitwriter.h"

using namespace hf;

TEST_CASE("split_annexb decodes the NAL header") {
  // forbidden=0, type=32 (VPS), layer=0, tid+1=1
  std::vector<uint8_t> stream = {0x00, 0x00, 0x01, 0x40, 0x01, 0xAA};
  auto units = split_annexb(stream);
  REQUIRE(units.size() == 1);
  CHECK(units[0].nal_unit_type == 32);
  CHECK(units[0].nuh_layer_id == 0);
  CHECK(units[0].temporal_id == 0);
  CHECK(units[0].rbsp == std::vector<uint8_t>{0xAA});
}

TEST_CASE("split_annexb removes emulation-prevention bytes") {
  std::vector<uint8_t> stream = {0x00, 0x00, 0x00, 0x01, 0x42, 0x01,
                                 0x00, 0x00, 0x03, 0x02};
  auto units = split_annexb(stream);
  REQUIRE(units.size() == 1);
  CHECK(units[0].nal_unit_type == 33);
  CHECK(units[0].rbsp == std::vector<uint8_t>({0x00, 0x00, 0x02}));
}

TEST_CASE("split_annexb handles multiple units and start-code flavours") {
  std::vector<uint8_t> stream;
  auto append = [&stream](std::vector<uint8_t> v) {
    stream.insert(stream.end(), v.begin(), v.end());
  };
  append({0x00, 0x00, 0x01, 0x40, 0x01, 0x11});              // VPS, short code
  append({0x00, 0x00, 0x00, 0x01, 0x42, 0x01, 0x22, 0x33});  // SPS, long code
  append({0x00, 0x00, 0x01, 0x44, 0x01, 0x44});              // PPS
  append({0x00, 0x00});  // trailing zeros are ignored
  auto units = split_annexb(stream);
  REQUIRE(units.size() == 3);
  CHECK(units[0].nal_unit_type == NAL_VPS);
  CHECK(units[1].nal_unit_type == NAL_SPS);
  CHECK(units[1].rbsp == std::vector<uint8_t>({0x22, 0x33}));
  CHECK(units[2].nal_unit_type == NAL_PPS);
}

TEST_CASE("split_annexb error cases") {
  std::vector<uint8_t> empty;
  CHECK_THROWS_AS(split_annexb(empty), NoStartCode);

  std::vector<uint8_t> no_code = {0x12, 0x34, 0x56};
  CHECK_THROWS_AS(split_annexb(no_code), NoStartCode);

  std::vector<uint8_t> short_nal = {0x00, 0x00, 0x01, 0x40};
  CHECK_THROWS_AS(split_annexb(short_nal), TruncatedNal);

  std::vector<uint8_t> forbidden = {0x00, 0x00, 0x01, 0xC0, 0x01, 0xAA};
  CHECK_THROWS_AS(split_annexb(forbidden), MalformedCode);
}

TEST_CASE("emulation round-trip over random payloads") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 200; iter++) {
    std::vector<uint8_t> rbsp(1 + rng() % 64);
    for (auto& b : rbsp) b = uint8_t(rng() % 4);  // zero-heavy on purpose
    rbsp.back() |= 0x80;  // keep split_annexb from trimming it as padding
    auto ebsp = hf::test::insert_emulation(rbsp);
    auto back = strip_emulation(ebsp.data(), ebsp.size());
    CHECK(back == rbsp);
    // And through the full NAL path.
    auto nal_bytes = hf::test::wrap_nal(NAL_SPS, rbsp);
    auto units = split_annexb(nal_bytes);
    REQUIRE(units.size() == 1);
    CHECK(units[0].rbsp == rbsp);
  }
}

TEST_CASE("read_bits is MSB-first and bounds-checked") {
  std::vector<uint8_t> data = {0b10100000};
  BitReader r(data);
  CHECK(r.read_bits(3) == 5);
  CHECK(r.bit_position() == 3);
  CHECK(r.read_bits(0) == 0);
  CHECK(r.bit_position() == 3);

  std::vector<uint8_t> one = {0xFF};
  BitReader r2(one);
  CHECK_THROWS_AS(r2.read_bits(9), OutOfBits);

  std::vector<uint8_t> four = {0x12, 0x34, 0x56, 0x78};
  BitReader r3(four);
  CHECK(r3.read_bits(32) == 0x12345678u);
}

TEST_CASE("read_ue on the canonical table") {
  // "1" -> 0, "010" -> 1, "00100" -> 3
  std::vector<uint8_t> data = {0b10100010, 0b00000000};
  BitReader r(data);
  CHECK(r.read_ue() == 0);
  CHECK(r.read_ue() == 1);
  CHECK(r.read_ue() == 3);
}

TEST_CASE("read_se maps codeNum to signed values") {
  // "1" -> 0, "010" -> +1, "011" -> -1
  std::vector<uint8_t> data = {0b10100110, 0b00000000};
  BitReader r(data);
  CHECK(r.read_se() == 0);
  CHECK(r.read_se() == 1);
  CHECK(r.read_se() == -1);
}

TEST_CASE("read_ue rejects runaway prefixes") {
  std::vector<uint8_t> data(16, 0x00);  // 128 zero bits: no codeword
  BitReader r(data);
  CHECK_THROWS_AS(r.read_ue(), MalformedCode);
}

TEST_CASE("ue/se round-trip through the test writer") {
  hf::test::BitWriter w;
  for (uint32_t v = 0; v < (1u << 16); v += 37) w.put_ue(v);
  for (int32_t v = -300; v <= 300; v++) w.put_se(v);
  w.put_trailing_bits();

  BitReader r(w.bytes());
  for (uint32_t v = 0; v < (1u << 16); v += 37) CHECK(r.read_ue() == v);
  for (int32_t v = -300; v <= 300; v++) CHECK(r.read_se() == v);
}

TEST_CASE("more_rbsp_data sees through trailing bits") {
  hf::test::BitWriter w;
  w.put_bits(0x5, 3);
  w.put_trailing_bits();
  BitReader r(w.bytes());
  CHECK(r.more_rbsp_data());
  r.read_bits(3);
  CHECK(!r.more_rbsp_data());  // only the stop bit and padding remain
}
