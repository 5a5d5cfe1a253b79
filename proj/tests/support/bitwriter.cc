// SPDX-License-Identifier: MIT
#include "bitwriter.h"

namespace hf::test {

std::vector<uint8_t> insert_emulation(const std::vector<uint8_t>& rbsp) {
  std::vector<uint8_t> out;
  out.reserve(rbsp.size() + rbsp.size() / 64);
  int zeros = 0;
  for (uint8_t b : rbsp) {
    if (zeros >= 2 && b <= 0x03) {
      out.push_back(0x03);
      zeros = 0;
    }
    zeros = (b == 0) ? zeros + 1 : 0;
    out.push_back(b);
  }
  return out;
}

std::vector<uint8_t> wrap_nal(int nal_type, const std::vector<uint8_t>& rbsp,
                              bool long_start_code, int layer_id,
                              int temporal_id) {
  std::vector<uint8_t> out;
  if (long_start_code) out.push_back(0x00);
  out.insert(out.end(), {0x00, 0x00, 0x01});
  uint16_t hdr = uint16_t((nal_type & 0x3f) << 9 | (layer_id & 0x3f) << 3 |
                          ((temporal_id + 1) & 0x7));
  out.push_back(uint8_t(hdr >> 8));
  out.push_back(uint8_t(hdr & 0xff));
  std::vector<uint8_t> ebsp = insert_emulation(rbsp);
  out.insert(out.end(), ebsp.begin(), ebsp.end());
  return out;
}

}  // namespace hf::test
