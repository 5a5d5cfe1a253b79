// SPDX-License-Identifier: MIT
// CABAC constant tables transcribed from ITU-T H.265: the range-subdivision
// table (Table 9-46), the state-transition tables (Table 9-47), and the
// I-slice (initType 0) context initialization values (Tables 9-...-9-52 in
// syntax-element order).  Everything syntax-facing indexes one flat context
// array laid out by the CTX_* offsets below.
//
// Transcription errors here would desynchronize every parse, so the whole
// block is covered by an FNV-1a checksum test plus stream-level conformance.
#pragma once

#include <array>
#include <cstdint>

namespace hf {

// Flat context layout for everything an I-slice within the subset can code.
enum CtxOffset : int {
  CTX_SPLIT_CU_FLAG = 0,           // 3 contexts (neighbour-depth driven)
  CTX_PART_MODE = 3,               // 1 context (intra uses only bin 0)
  CTX_PREV_INTRA_LUMA_PRED = 4,    // 1
  CTX_INTRA_CHROMA_PRED_MODE = 5,  // 1
  CTX_SPLIT_TRANSFORM_FLAG = 6,    // 3 (ctx = 5 - log2TrafoSize)
  CTX_CBF_LUMA = 9,                // 2 (trafoDepth == 0 ? 1 : 0)
  CTX_CBF_CHROMA = 11,             // 5 (ctx = trafoDepth; depth 4 unreachable)
  CTX_LAST_SIG_X_PREFIX = 16,      // 18 (15 luma + 3 chroma)
  CTX_LAST_SIG_Y_PREFIX = 34,      // 18
  CTX_CODED_SUB_BLOCK = 52,        // 4 (2 luma + 2 chroma)
  CTX_SIG_COEFF = 56,              // 42 (27 luma + 15 chroma)
  CTX_GREATER1 = 98,               // 24 (16 luma + 8 chroma)
  CTX_GREATER2 = 122,              // 6 (4 luma + 2 chroma)
  CTX_COUNT = 128,
};

// ivlLpsRange = kRangeTabLps[pStateIdx][(ivlCurrRange >> 6) & 3]
extern const uint8_t kRangeTabLps[64][4];

// MPS/LPS successor states.
extern const uint8_t kTransIdxMps[64];
extern const uint8_t kTransIdxLps[64];

// initValue per context for initType 0 (I slices), laid out per CtxOffset.
extern const std::array<uint8_t, CTX_COUNT> kInitValuesISlice;

// FNV-1a over kRangeTabLps ++ kTransIdxMps ++ kTransIdxLps ++ kInitValuesISlice,
// in that order; the unit tests pin the expected digest.
uint64_t cabac_tables_checksum();

}  // namespace hf
