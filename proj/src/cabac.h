// SPDX-License-Identifier: MIT
// Context-adaptive binary arithmetic decoding (H.265 clause 9.3) with per-bin
// accounting.  Every decoded bin — regular, bypass, or terminate — increments
// one counter; mark()/bins_since() snapshot it so the syntax walker can
// attribute bins to prediction units.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bitio.h"
#include "cabac_tables.h"
#include "errors.h"

namespace hf {

struct ContextModel {
  uint8_t p_state_idx = 0;  // 0..62
  uint8_t val_mps = 0;      // 0 or 1
};

// Context variable initialization, H.265 9.3.2.2.
ContextModel init_context(int init_value, int qp);

// One optional trace record per bin: mode is 'r' (regular), 'b' (bypass), or
// 't' (terminate); ctx_index is -1 outside regular mode.
struct BinLogEntry {
  char mode;
  int16_t ctx_index;
  uint8_t bin;
};

class CabacState {
 public:
  // init_slice: reader must sit on the first CABAC byte (byte-aligned).
  // Loads 9 offset bits, sets ivlCurrRange = 510, initializes all contexts
  // for I-slice initType 0 at the given slice QP.
  CabacState(BitReader reader, int slice_qp, bool enable_bin_log = false);

  int decode_bin(int ctx_index);
  int decode_bypass();
  uint32_t decode_bypass_n(int n);  // n <= 32 bypass bins, MSB-first
  int decode_terminate();

  uint64_t bins_decoded() const { return bins_; }
  uint64_t mark() const { return bins_; }
  uint64_t bins_since(uint64_t m) const { return bins_ - m; }

  const std::vector<BinLogEntry>& bin_log() const { return log_; }

  BitReader& reader() { return reader_; }
  uint32_t range() const { return range_; }
  uint32_t offset() const { return offset_; }
  const ContextModel& context(int idx) const { return ctx_[size_t(idx)]; }

 private:
  void renorm();
  void log(char mode, int ctx_index, int bin) {
    if (log_on_) log_.push_back({mode, int16_t(ctx_index), uint8_t(bin)});
  }

  BitReader reader_;
  uint32_t range_ = 510;
  uint32_t offset_ = 0;
  std::array<ContextModel, CTX_COUNT> ctx_{};
  uint64_t bins_ = 0;
  bool log_on_ = false;
  std::vector<BinLogEntry> log_;
};

// Spec-named constructor.
inline CabacState init_slice(BitReader reader, int slice_qp,
                             bool enable_bin_log = false) {
  return CabacState(reader, slice_qp, enable_bin_log);
}

}  // namespace hf
