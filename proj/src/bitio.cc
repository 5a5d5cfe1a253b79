// SPDX-License-Identifier: MIT
#include "bitio.h"

namespace hf {

std::vector<uint8_t> strip_emulation(const uint8_t* data, size_t size) {
  std::vector<uint8_t> out;
  out.reserve(size);
  int zeros = 0;
  for (size_t i = 0; i < size; i++) {
    uint8_t b = data[i];
    if (zeros >= 2 && b == 0x03) {
      // emulation_prevention_three_byte: drop it, restart the zero run.
      zeros = 0;
      continue;
    }
    zeros = (b == 0) ? zeros + 1 : 0;
    out.push_back(b);
  }
  return out;
}

namespace {

// Finds the next 0x000001 at or after `from`; returns size when none is left.
size_t find_start_code(const uint8_t* data, size_t size, size_t from) {
  if (size < 3) return size;
  for (size_t i = from; i + 2 < size; i++) {
    if (data[i] == 0 && data[i + 1] == 0 && data[i + 2] == 1) return i;
  }
  return size;
}

}  // namespace

std::vector<NalUnit> split_annexb(const uint8_t* data, size_t size) {
  size_t sc = find_start_code(data, size, 0);
  if (sc == size) throw NoStartCode();

  std::vector<NalUnit> units;
  while (sc < size) {
    size_t begin = sc + 3;  // first payload byte
    size_t next = find_start_code(data, size, begin);
    size_t end = next;
    // A 4-byte start code is a zero byte plus the 3-byte code; that zero (and
    // any trailing_zero_8bits before it) belongs to no unit.
    while (end > begin && data[end - 1] == 0) end--;

    if (end - begin < 2)
      throw TruncatedNal("NAL unit shorter than its 2-byte header");
    // nal_unit_header(): forbidden_zero_bit(1) type(6) layer(6) tid_plus1(3).
    uint16_t hdr = uint16_t(data[begin] << 8 | data[begin + 1]);
    if (hdr & 0x8000) throw MalformedCode("forbidden_zero_bit set in NAL header");
    NalUnit nal;
    nal.nal_unit_type = (hdr >> 9) & 0x3f;
    nal.nuh_layer_id = (hdr >> 3) & 0x3f;
    nal.temporal_id = (hdr & 0x7) - 1;
    if (nal.temporal_id < 0)
      throw MalformedCode("nuh_temporal_id_plus1 is zero");
    nal.rbsp = strip_emulation(data + begin + 2, end - begin - 2);
    if (nal.rbsp.empty()) throw TruncatedNal("NAL unit with empty payload");
    units.push_back(std::move(nal));
    sc = next;
  }
  return units;
}

std::vector<NalUnit> split_annexb(const std::vector<uint8_t>& stream) {
  return split_annexb(stream.data(), stream.size());
}

uint32_t BitReader::read_bits(int n) {
  if (n == 0) return 0;
  if (n < 0 || n > 32) throw MalformedCode("read_bits: n out of range");
  if (bits_left() < size_t(n)) throw OutOfBits();
  uint32_t v = 0;
  for (int i = 0; i < n; i++) {
    v = (v << 1) | ((data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1);
    pos_++;
  }
  return v;
}

uint32_t BitReader::read_ue() {
  int k = 0;
  while (read_bits(1) == 0) {
    if (++k > 31) throw MalformedCode("Exp-Golomb prefix longer than 31 zeros");
  }
  if (k == 0) return 0;
  return (uint32_t(1) << k) - 1 + read_bits(k);
}

int32_t BitReader::read_se() {
  uint32_t code = read_ue();
  // codeNum k -> (-1)^(k+1) * ceil(k/2): 0,1,-1,2,-2,...
  int32_t mag = int32_t((code + 1) >> 1);
  return (code & 1) ? mag : -mag;
}

bool BitReader::more_rbsp_data() const {
  if (bits_left() == 0) return false;
  // Locate the last set bit of the payload: it is the rbsp_stop_one_bit.
  size_t last = size_ * 8;
  while (last > pos_) {
    size_t bit = last - 1;
    if ((data_[bit >> 3] >> (7 - (bit & 7))) & 1) break;
    last--;
  }
  if (last == pos_) return false;  // only zeros remain: malformed, caller checks
  return pos_ < last - 1;          // bits strictly before the stop bit remain
}

}  // namespace hf
