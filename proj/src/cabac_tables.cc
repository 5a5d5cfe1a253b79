// SPDX-License-Identifier: MIT
#include "cabac_tables.h"

#include <cstddef>

namespace hf {

// H.265 Table 9-46 (rangeTabLps).
const uint8_t kRangeTabLps[64][4] = {
    {128, 176, 208, 240}, {128, 167, 197, 227}, {128, 158, 187, 216},
    {123, 150, 178, 205}, {116, 142, 169, 195}, {111, 135, 160, 185},
    {105, 128, 152, 175}, {100, 122, 144, 166}, {95, 116, 137, 158},
    {90, 110, 130, 150},  {85, 104, 123, 142},  {81, 99, 117, 135},
    {77, 94, 111, 128},   {73, 89, 105, 122},   {69, 85, 100, 116},
    {66, 80, 95, 110},    {62, 76, 90, 104},    {59, 72, 86, 99},
    {56, 69, 81, 94},     {53, 65, 77, 89},     {51, 62, 73, 85},
    {48, 59, 69, 80},     {46, 56, 66, 76},     {43, 53, 63, 72},
    {41, 50, 59, 69},     {39, 48, 56, 65},     {37, 45, 54, 62},
    {35, 43, 51, 59},     {33, 41, 48, 56},     {32, 39, 46, 53},
    {30, 37, 43, 50},     {29, 35, 41, 48},     {27, 33, 39, 45},
    {26, 31, 37, 43},     {24, 30, 35, 41},     {23, 28, 33, 39},
    {22, 27, 32, 37},     {21, 26, 30, 35},     {20, 24, 29, 33},
    {19, 23, 27, 31},     {18, 22, 26, 30},     {17, 21, 25, 28},
    {16, 20, 23, 27},     {15, 19, 22, 25},     {14, 18, 21, 24},
    {14, 17, 20, 23},     {13, 16, 19, 22},     {12, 15, 18, 21},
    {12, 14, 17, 20},     {11, 14, 16, 19},     {11, 13, 15, 18},
    {10, 12, 15, 17},     {10, 12, 14, 16},     {9, 11, 13, 15},
    {9, 11, 12, 14},      {8, 10, 12, 14},      {8, 9, 11, 13},
    {7, 9, 11, 12},       {7, 9, 10, 12},       {7, 8, 10, 11},
    {6, 8, 9, 11},        {6, 7, 9, 10},        {6, 7, 8, 9},
    {2, 2, 2, 2}};

// H.265 Table 9-47 (transIdxMps / transIdxLps).
const uint8_t kTransIdxMps[64] = {
    1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 12, 13, 14, 15, 16,
    17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32,
    33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 43, 44, 45, 46, 47, 48,
    49, 50, 51, 52, 53, 54, 55, 56, 57, 58, 59, 60, 61, 62, 62, 63};

const uint8_t kTransIdxLps[64] = {
    0,  0,  1,  2,  2,  4,  4,  5,  6,  7,  8,  9,  9,  11, 11, 12,
    13, 13, 15, 15, 16, 16, 18, 18, 19, 19, 21, 21, 22, 22, 23, 24,
    24, 25, 26, 26, 27, 27, 28, 29, 29, 30, 30, 30, 31, 32, 32, 33,
    33, 33, 34, 34, 35, 35, 35, 36, 36, 36, 37, 37, 37, 38, 38, 63};

namespace {

// initType 0 values per syntax element, in CtxOffset layout order.
constexpr uint8_t kSplitCuFlag[3] = {139, 141, 157};
constexpr uint8_t kPartMode[1] = {184};
constexpr uint8_t kPrevIntraLumaPred[1] = {184};
constexpr uint8_t kIntraChromaPredMode[1] = {63};
constexpr uint8_t kSplitTransformFlag[3] = {153, 138, 138};
constexpr uint8_t kCbfLuma[2] = {111, 141};
constexpr uint8_t kCbfChroma[5] = {94, 138, 182, 154, 154};
constexpr uint8_t kLastSigPrefix[18] = {110, 110, 124, 125, 140, 153,
                                        125, 127, 140, 109, 111, 143,
                                        127, 111, 79,  108, 123, 63};
constexpr uint8_t kCodedSubBlock[4] = {91, 171, 134, 141};
constexpr uint8_t kSigCoeff[42] = {
    111, 111, 125, 110, 110, 94,  124, 108, 124, 107, 125, 141, 179, 153,
    125, 107, 125, 141, 179, 153, 125, 107, 125, 141, 179, 153, 125, 140,
    139, 182, 182, 152, 136, 152, 136, 153, 136, 139, 111, 136, 139, 111};
constexpr uint8_t kGreater1[24] = {140, 92,  137, 138, 140, 152, 138, 139,
                                   153, 74,  149, 92,  139, 107, 122, 152,
                                   140, 179, 166, 182, 140, 227, 122, 197};
constexpr uint8_t kGreater2[6] = {138, 153, 136, 167, 152, 152};

std::array<uint8_t, CTX_COUNT> build_init_values() {
  std::array<uint8_t, CTX_COUNT> t{};
  auto put = [&t](int offset, const uint8_t* v, int n) {
    for (int i = 0; i < n; i++) t[size_t(offset + i)] = v[i];
  };
  put(CTX_SPLIT_CU_FLAG, kSplitCuFlag, 3);
  put(CTX_PART_MODE, kPartMode, 1);
  put(CTX_PREV_INTRA_LUMA_PRED, kPrevIntraLumaPred, 1);
  put(CTX_INTRA_CHROMA_PRED_MODE, kIntraChromaPredMode, 1);
  put(CTX_SPLIT_TRANSFORM_FLAG, kSplitTransformFlag, 3);
  put(CTX_CBF_LUMA, kCbfLuma, 2);
  put(CTX_CBF_CHROMA, kCbfChroma, 5);
  put(CTX_LAST_SIG_X_PREFIX, kLastSigPrefix, 18);
  put(CTX_LAST_SIG_Y_PREFIX, kLastSigPrefix, 18);
  put(CTX_CODED_SUB_BLOCK, kCodedSubBlock, 4);
  put(CTX_SIG_COEFF, kSigCoeff, 42);
  put(CTX_GREATER1, kGreater1, 24);
  put(CTX_GREATER2, kGreater2, 6);
  return t;
}

}  // namespace

const std::array<uint8_t, CTX_COUNT> kInitValuesISlice = build_init_values();

uint64_t cabac_tables_checksum() {
  uint64_t h = 1469598103934665603ull;  // FNV-1a 64-bit
  auto mix = [&h](uint8_t b) {
    h ^= b;
    h *= 1099511628211ull;
  };
  for (const auto& row : kRangeTabLps)
    for (uint8_t v : row) mix(v);
  for (uint8_t v : kTransIdxMps) mix(v);
  for (uint8_t v : kTransIdxLps) mix(v);
  for (uint8_t v : kInitValuesISlice) mix(v);
  return h;
}

}  // namespace hf
