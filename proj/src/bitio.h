// SPDX-License-Identifier: MIT
// Annex-B byte stream handling: start-code scanning, NAL header decoding,
// emulation-prevention removal, and a big-endian bit reader with the
// Exp-Golomb codes used by all HEVC fixed syntax (ITU-T H.265 clauses 7.3/9.2).
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "errors.h"

namespace hf {

// NAL unit types we need to recognise (H.265 Table 7-1).
enum NalType : int {
  NAL_IDR_W_RADL = 19,
  NAL_IDR_N_LP = 20,
  NAL_CRA_NUT = 21,
  NAL_VPS = 32,
  NAL_SPS = 33,
  NAL_PPS = 34,
  NAL_AUD = 35,
  NAL_EOS = 36,
  NAL_EOB = 37,
  NAL_FD = 38,
  NAL_PREFIX_SEI = 39,
  NAL_SUFFIX_SEI = 40,
};

// IRAP pictures span types 16..23 (BLA/IDR/CRA); within the supported subset
// every coded picture must be one of these (all-intra).
inline bool is_irap(int nal_unit_type) {
  return nal_unit_type >= 16 && nal_unit_type <= 23;
}

// VCL NAL units occupy types 0..31 (H.265 Table 7-1).
inline bool is_vcl(int nal_unit_type) { return nal_unit_type <= 31; }

struct NalUnit {
  int nal_unit_type = 0;  // 6 bits, 0..63
  int nuh_layer_id = 0;   // 6 bits
  int temporal_id = 0;    // nuh_temporal_id_plus1 - 1
  std::vector<uint8_t> rbsp;  // payload with emulation-prevention bytes removed
};

// Removes emulation_prevention_three_byte occurrences: any 0x03 that follows
// two zero bytes is dropped (H.265 7.4.2 / 7.3.1.1).  Exposed for tests.
std::vector<uint8_t> strip_emulation(const uint8_t* data, size_t size);

// Splits an Annex-B stream into NAL units.  Both 3- and 4-byte start codes are
// accepted; trailing zero bytes after each unit are ignored.  Throws
// NoStartCode when the stream contains no start code at all and TruncatedNal
// when a unit is shorter than its 2-byte header.
std::vector<NalUnit> split_annexb(const uint8_t* data, size_t size);
std::vector<NalUnit> split_annexb(const std::vector<uint8_t>& stream);

// MSB-first bit reader over an RBSP.  All multi-bit reads are big-endian
// within bytes, matching the u(n)/ue(v)/se(v) descriptors of H.265 clause 9.2.
class BitReader {
 public:
  BitReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
  explicit BitReader(const std::vector<uint8_t>& bytes)
      : BitReader(bytes.data(), bytes.size()) {}

  // Next n bits (0..32) MSB-first.  n = 0 reads nothing and returns 0.
  uint32_t read_bits(int n);
  uint32_t read_bit() { return read_bits(1); }

  // ue(v): Exp-Golomb codeNum = 2^k - 1 + k-bit suffix, k = leading zeros.
  // A prefix longer than 31 zeros cannot come from a conforming stream.
  uint32_t read_ue();

  // se(v): codeNum k maps to (-1)^(k+1) * ceil(k/2).
  int32_t read_se();

  bool byte_aligned() const { return (pos_ & 7) == 0; }

  // Consumes bits up to the next byte boundary (no value check).
  void align_to_byte() { pos_ = (pos_ + 7) & ~size_t{7}; }

  size_t bit_position() const { return pos_; }
  size_t bits_left() const { return size_ * 8 - pos_; }

  // more_rbsp_data() in the sense of H.265 7.2: true while bits other than
  // the rbsp_stop_one_bit and its trailing zeros remain.
  bool more_rbsp_data() const;

 private:
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;  // in bits
};

}  // namespace hf
