// SPDX-License-Identifier: MIT
#include "cabac.h"

namespace hf {

namespace {

inline int clip3(int lo, int hi, int v) { return v < lo ? lo : v > hi ? hi : v; }

}  // namespace

ContextModel init_context(int init_value, int qp) {
  // H.265 9.3.2.2: slope/offset split of the 8-bit initValue.
  int slope = (init_value >> 4) * 5 - 45;
  int offset = ((init_value & 15) << 3) - 16;
  int pre_state = clip3(1, 126, ((slope * clip3(0, 51, qp)) >> 4) + offset);
  ContextModel cm;
  if (pre_state <= 63) {
    cm.p_state_idx = uint8_t(63 - pre_state);
    cm.val_mps = 0;
  } else {
    cm.p_state_idx = uint8_t(pre_state - 64);
    cm.val_mps = 1;
  }
  return cm;
}

CabacState::CabacState(BitReader reader, int slice_qp, bool enable_bin_log)
    : reader_(reader), log_on_(enable_bin_log) {
  if (!reader_.byte_aligned())
    throw MalformedCode("CABAC init on unaligned reader");
  for (int i = 0; i < CTX_COUNT; i++)
    ctx_[size_t(i)] = init_context(kInitValuesISlice[size_t(i)], slice_qp);
  range_ = 510;
  offset_ = reader_.read_bits(9);
  if (offset_ >= 510)
    throw MalformedCode("CABAC: initial ivlOffset is 510 or 511");
}

void CabacState::renorm() {
  while (range_ < 256) {
    range_ <<= 1;
    offset_ = (offset_ << 1) | reader_.read_bit();
  }
}

int CabacState::decode_bin(int ctx_index) {
  ContextModel& cm = ctx_[size_t(ctx_index)];
  uint32_t q = (range_ >> 6) & 3;
  uint32_t lps = kRangeTabLps[cm.p_state_idx][q];
  range_ -= lps;
  int bin;
  if (offset_ >= range_) {
    bin = 1 - cm.val_mps;
    offset_ -= range_;
    range_ = lps;
    if (cm.p_state_idx == 0) cm.val_mps = uint8_t(1 - cm.val_mps);
    cm.p_state_idx = kTransIdxLps[cm.p_state_idx];
  } else {
    bin = cm.val_mps;
    cm.p_state_idx = kTransIdxMps[cm.p_state_idx];
  }
  renorm();
  bins_++;
  log('r', ctx_index, bin);
  return bin;
}

int CabacState::decode_bypass() {
  offset_ = (offset_ << 1) | reader_.read_bit();
  int bin = 0;
  if (offset_ >= range_) {
    bin = 1;
    offset_ -= range_;
  }
  bins_++;
  log('b', -1, bin);
  return bin;
}

uint32_t CabacState::decode_bypass_n(int n) {
  uint32_t v = 0;
  for (int i = 0; i < n; i++) v = (v << 1) | uint32_t(decode_bypass());
  return v;
}

int CabacState::decode_terminate() {
  range_ -= 2;
  int bin;
  if (offset_ >= range_) {
    // end_of_slice_segment_flag = 1: no renormalization; the remaining offset
    // bits are the alignment tail.
    bin = 1;
  } else {
    bin = 0;
    renorm();
  }
  bins_++;
  log('t', -1, bin);
  return bin;
}

}  // namespace hf
