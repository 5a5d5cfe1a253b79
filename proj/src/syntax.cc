// SPDX-License-Identifier: MIT
// I-slice syntax decoding.  Clause references are to ITU-T H.265 (V10).

#include "syntax.h"

#include <algorithm>
#include <array>
#include <string>

#include "cabac_tables.h"
#include "errors.h"

namespace hf {

namespace {

constexpr int kIntraPlanar = 0;
constexpr int kIntraDc = 1;
constexpr int kIntraAngular26 = 26;

// ---------------------------------------------------------------------------
// Scan order tables (6.5.3 up-right diagonal, 6.5.4 horizontal, 6.5.5
// vertical) for block sizes 1x1 .. 8x8.  Coefficient scans always use the
// 4x4 table; sub-block scans use the (1 << (log2TrafoSize - 2))^2 table.

struct ScanTables {
  // [log2 size][scan idx] -> (x, y) pairs in scan order.
  std::vector<std::array<uint8_t, 2>> tab[4][3];

  ScanTables() {
    for (int lg = 0; lg <= 3; lg++) {
      const int s = 1 << lg;
      auto& diag = tab[lg][0];
      auto& hor = tab[lg][1];
      auto& ver = tab[lg][2];
      diag.reserve(size_t(s) * s);
      hor.reserve(size_t(s) * s);
      ver.reserve(size_t(s) * s);
      // 6.5.3: walk up-right diagonals starting from (0, 0).
      int x = 0, y = 0;
      bool stop = false;
      while (!stop) {
        while (y >= 0) {
          if (x < s && y < s)
            diag.push_back({uint8_t(x), uint8_t(y)});
          y--;
          x++;
        }
        y = x;
        x = 0;
        if (diag.size() == size_t(s) * s) stop = true;
      }
      for (int i = 0; i < s * s; i++) {
        hor.push_back({uint8_t(i % s), uint8_t(i / s)});
        ver.push_back({uint8_t(i / s), uint8_t(i % s)});
      }
    }
  }
};

const ScanTables& scans() {
  static const ScanTables t;
  return t;
}

// ---------------------------------------------------------------------------
// Per-picture parse state.

struct CuDesc {
  int x0 = 0, y0 = 0, log2 = 0;
  bool nxn = false;
  int chroma_mode = kIntraDc;
};

// Bin accounting for one coding unit.  "tied" buckets hold bins that belong
// to a specific NxN prediction unit; "shared" holds CU-wide syntax (part
// mode, chroma mode and residual, chroma cbfs) that is split across the PUs
// when the records are emitted.
struct CuAcct {
  uint64_t shared = 0;
  std::array<uint64_t, 4> tied{};
};

struct Ctx {
  const SequenceParams& sps;
  const PictureParams& pps;
  CabacState cab;
  int pic_w, pic_h;
  int w4, h4;  // picture size in 4x4 luma units
  int w8;      // picture width in 8x8 (minimum CB) units
  std::vector<uint8_t> ipm4;    // per-4x4 intra mode of decoded PUs
  std::vector<uint8_t> depth8;  // CtDepth per 8x8 cell
  std::vector<PuRecord> recs;
  uint64_t pending = 0;  // split_cu_flag bins awaiting the next emitted PU
  int cu_x = 0, cu_y = 0, cu_log2 = 0;  // for error positions

  Ctx(const SequenceParams& s, const PictureParams& p, BitReader reader,
      int slice_qp, bool log)
      : sps(s),
        pps(p),
        cab(std::move(reader), slice_qp, log),
        pic_w(s.pic_width_luma),
        pic_h(s.pic_height_luma),
        w4((pic_w + 3) >> 2),
        h4((pic_h + 3) >> 2),
        w8((pic_w + 7) >> 3),
        ipm4(size_t(w4) * h4, 0xff),
        depth8(size_t(w8) * ((pic_h + 7) >> 3), 0) {}

  int ct_depth_at(int x, int y) const {
    return depth8[size_t(y >> 3) * w8 + (x >> 3)];
  }
  int ipm_at(int x, int y) const {
    return ipm4[size_t(y >> 2) * w4 + (x >> 2)];
  }
  void store_ipm(int x0, int y0, int size, int mode) {
    for (int y = y0; y < std::min(y0 + size, pic_h); y += 4)
      for (int x = x0; x < std::min(x0 + size, pic_w); x += 4)
        ipm4[size_t(y >> 2) * w4 + (x >> 2)] = uint8_t(mode);
  }
};

// ---------------------------------------------------------------------------
// Intra mode derivation (8.4.2): most probable mode candidate list.

void mpm_candidates(const Ctx& c, int x_pb, int y_pb, int cand[3]) {
  // Neighbouring modes default to DC when the neighbour is unavailable.  In
  // an all-intra single-slice picture a decoded in-picture neighbour is
  // always intra, so availability reduces to picture bounds plus the rule
  // that an above neighbour outside the current CTB row is not used.
  int a = kIntraDc, b = kIntraDc;
  if (x_pb > 0) a = c.ipm_at(x_pb - 1, y_pb);
  if (y_pb > 0) b = c.ipm_at(x_pb, y_pb - 1);
  const int ctb_mask = ~((1 << c.sps.ctb_log2_size) - 1);
  if (y_pb == 0 || (y_pb - 1) < (y_pb & ctb_mask)) b = kIntraDc;

  if (a == b) {
    if (a < 2) {
      cand[0] = kIntraPlanar;
      cand[1] = kIntraDc;
      cand[2] = kIntraAngular26;
    } else {
      cand[0] = a;
      cand[1] = 2 + ((a + 29) % 32);
      cand[2] = 2 + ((a - 2 + 1) % 32);
    }
  } else {
    cand[0] = a;
    cand[1] = b;
    if (a != kIntraPlanar && b != kIntraPlanar)
      cand[2] = kIntraPlanar;
    else if (a != kIntraDc && b != kIntraDc)
      cand[2] = kIntraDc;
    else
      cand[2] = kIntraAngular26;
  }
}

int decode_chroma_mode(Ctx& c, int luma_mode) {
  if (c.cab.decode_bin(CTX_INTRA_CHROMA_PRED_MODE) == 0)
    return luma_mode;  // derived mode
  static const int mode_list[4] = {kIntraPlanar, kIntraAngular26, 10,
                                   kIntraDc};
  const int m = mode_list[c.cab.decode_bypass_n(2)];
  return m == luma_mode ? 34 : m;
}

// ---------------------------------------------------------------------------
// Residual coding (7.3.8.11 / 9.3.4.2).

int last_prefix_ctx(int c_idx, int log2, int bin_idx, bool is_y) {
  int offset, shift;
  if (c_idx == 0) {
    offset = 3 * (log2 - 2) + ((log2 - 1) >> 2);
    shift = (log2 + 1) >> 2;
  } else {
    offset = 15;
    shift = log2 - 2;
  }
  const int base = is_y ? CTX_LAST_SIG_Y_PREFIX : CTX_LAST_SIG_X_PREFIX;
  return base + offset + (bin_idx >> shift);
}

// 9.3.4.2.5: significant_coeff_flag context increment.
int sig_ctx_inc(int log2, int c_idx, int xc, int yc, int scan_idx,
                const std::vector<uint8_t>& csbf, int sb_w) {
  static const int ctx_idx_map[16] = {0, 1, 4, 5, 2, 3, 4, 5,
                                      6, 6, 8, 8, 7, 7, 8, 0};
  int sig_ctx;
  if (log2 == 2) {
    sig_ctx = ctx_idx_map[(yc << 2) + xc];
  } else if (xc == 0 && yc == 0) {
    sig_ctx = 0;
  } else {
    const int xs = xc >> 2, ys = yc >> 2;
    const int right = (xs + 1 < sb_w) ? csbf[size_t(ys) * sb_w + xs + 1] : 0;
    const int below = (ys + 1 < sb_w) ? csbf[size_t(ys + 1) * sb_w + xs] : 0;
    const int prev_csbf = right + 2 * below;
    const int xp = xc & 3, yp = yc & 3;
    switch (prev_csbf) {
      case 0:
        sig_ctx = (xp + yp == 0) ? 2 : (xp + yp < 3) ? 1 : 0;
        break;
      case 1:
        sig_ctx = (yp == 0) ? 2 : (yp == 1) ? 1 : 0;
        break;
      case 2:
        sig_ctx = (xp == 0) ? 2 : (xp == 1) ? 1 : 0;
        break;
      default:
        sig_ctx = 2;
        break;
    }
    if (c_idx == 0) {
      if (xs != 0 || ys != 0) sig_ctx += 3;
      sig_ctx += (log2 == 3) ? ((scan_idx == 0) ? 9 : 15) : 21;
    } else {
      sig_ctx += (log2 == 3) ? 9 : 12;
    }
  }
  return sig_ctx + (c_idx ? 27 : 0);
}

// 9.3.3.10: coeff_abs_level_remaining, truncated Rice + k-th order Exp-Golomb.
uint32_t decode_remaining(CabacState& cab, int rice) {
  int prefix = 0;
  while (prefix < 32 && cab.decode_bypass()) prefix++;
  if (prefix >= 32)
    throw MalformedCode("coeff_abs_level_remaining prefix overflow");
  if (prefix <= 3)
    return (uint32_t(prefix) << rice) + cab.decode_bypass_n(rice);
  const int nbits = prefix - 3 + rice;
  if (nbits > 31)
    throw MalformedCode("coeff_abs_level_remaining suffix overflow");
  return (((1u << (prefix - 3)) + 2u) << rice) + cab.decode_bypass_n(nbits);
}

void residual_coding(Ctx& c, int log2, int c_idx, int scan_idx) {
  CabacState& cab = c.cab;

  // last_sig_coeff prefixes (truncated rice, cMax = 2*log2 - 1) + suffixes.
  const int cmax = (log2 << 1) - 1;
  int prefix_x = 0, prefix_y = 0;
  while (prefix_x < cmax &&
         cab.decode_bin(last_prefix_ctx(c_idx, log2, prefix_x, false)))
    prefix_x++;
  while (prefix_y < cmax &&
         cab.decode_bin(last_prefix_ctx(c_idx, log2, prefix_y, true)))
    prefix_y++;
  int last_x = prefix_x, last_y = prefix_y;
  if (prefix_x > 3) {
    const int nbits = (prefix_x >> 1) - 1;
    last_x = ((2 + (prefix_x & 1)) << nbits) + int(cab.decode_bypass_n(nbits));
  }
  if (prefix_y > 3) {
    const int nbits = (prefix_y >> 1) - 1;
    last_y = ((2 + (prefix_y & 1)) << nbits) + int(cab.decode_bypass_n(nbits));
  }
  if (scan_idx == 2) std::swap(last_x, last_y);  // coded transposed (7.4.9.11)

  const auto* sb_scan = scan_order(log2 - 2, scan_idx);
  const auto* coef_scan = scan_order(2, scan_idx);
  const int sb_w = 1 << (log2 - 2);
  const int num_sb = sb_w * sb_w;

  // Walk the scan backwards to find (last_sb, last_pos) (7.3.8.11).
  int last_sb = num_sb - 1, last_pos = 16;
  for (;;) {
    if (last_pos == 0) {
      last_pos = 16;
      if (--last_sb < 0)
        throw MalformedCode("last significant coefficient not on scan");
    }
    last_pos--;
    const int xc = (sb_scan[last_sb][0] << 2) + coef_scan[last_pos][0];
    const int yc = (sb_scan[last_sb][1] << 2) + coef_scan[last_pos][1];
    if (xc == last_x && yc == last_y) break;
  }

  std::vector<uint8_t> csbf(size_t(num_sb), 0);
  int greater1_ctx = 1;  // persists across sub-blocks of this transform block

  for (int i = last_sb; i >= 0; i--) {
    const int xs = sb_scan[i][0], ys = sb_scan[i][1];
    bool infer_sb_dc = false;
    uint8_t sbf = 1;
    if (i < last_sb && i > 0) {
      const int right = (xs + 1 < sb_w) ? csbf[size_t(ys) * sb_w + xs + 1] : 0;
      const int below = (ys + 1 < sb_w) ? csbf[size_t(ys + 1) * sb_w + xs] : 0;
      const int inc = std::min(1, right + below) + (c_idx ? 2 : 0);
      sbf = uint8_t(cab.decode_bin(CTX_CODED_SUB_BLOCK + inc));
      infer_sb_dc = true;
    }
    csbf[size_t(ys) * sb_w + xs] = sbf;
    if (!sbf) continue;

    // significant_coeff_flag
    uint8_t sig[16] = {};
    int start = 15;
    if (i == last_sb) {
      sig[last_pos] = 1;
      start = last_pos - 1;
    }
    for (int n = start; n >= 0; n--) {
      if (n > 0 || !infer_sb_dc) {
        const int xc = (xs << 2) + coef_scan[n][0];
        const int yc = (ys << 2) + coef_scan[n][1];
        sig[n] = uint8_t(cab.decode_bin(
            CTX_SIG_COEFF +
            sig_ctx_inc(log2, c_idx, xc, yc, scan_idx, csbf, sb_w)));
        if (sig[n]) infer_sb_dc = false;
      } else {
        sig[n] = 1;  // inferred DC significance
      }
    }

    // coeff_abs_level_greater1_flag: context set selection (9.3.4.2.6).
    int ctx_set = (i > 0 && c_idx == 0) ? 2 : 0;
    if (i != last_sb && greater1_ctx == 0) ctx_set++;
    greater1_ctx = 1;

    uint8_t g1[16] = {};
    int num_g1 = 0, last_g1_pos = -1;
    int first_sig = 16, last_sig = -1;
    for (int n = 15; n >= 0; n--) {
      if (!sig[n]) continue;
      if (num_g1 < 8) {
        const int inc =
            ctx_set * 4 + std::min(3, greater1_ctx) + (c_idx ? 16 : 0);
        g1[n] = uint8_t(cab.decode_bin(CTX_GREATER1 + inc));
        num_g1++;
        if (g1[n]) {
          greater1_ctx = 0;
          if (last_g1_pos < 0) last_g1_pos = n;
        } else if (greater1_ctx > 0 && greater1_ctx < 3) {
          greater1_ctx++;
        }
      }
      if (last_sig < 0) last_sig = n;
      first_sig = n;
    }

    uint8_t g2 = 0;
    if (last_g1_pos >= 0)
      g2 = uint8_t(cab.decode_bin(CTX_GREATER2 + ctx_set + (c_idx ? 4 : 0)));

    // Sign bypass bins; the first (lowest) significant position is hidden
    // when SDH applies to this sub-block.
    const bool sign_hidden = c.pps.sign_data_hiding_enabled &&
                             (last_sig - first_sig > 3);
    for (int n = 15; n >= 0; n--)
      if (sig[n] && (n != first_sig || !sign_hidden)) cab.decode_bypass();

    // coeff_abs_level_remaining with Rice parameter adaptation.  Levels are
    // needed only to drive the adaptation; they are discarded afterwards.
    int num_sig = 0, rice = 0;
    for (int n = 15; n >= 0; n--) {
      if (!sig[n]) continue;
      const int base_level = 1 + g1[n] + (n == last_g1_pos ? g2 : 0);
      const int threshold =
          (num_sig < 8) ? ((n == last_g1_pos) ? 3 : 2) : 1;
      if (base_level == threshold) {
        const uint32_t abs_level = uint32_t(base_level) +
                                   decode_remaining(cab, rice);
        if (abs_level > (3u << rice)) rice = std::min(rice + 1, 4);
      }
      num_sig++;
    }
  }
}

// ---------------------------------------------------------------------------
// Transform tree (7.3.8.8) and transform unit (7.3.8.10).

void transform_unit(Ctx& c, CuAcct& a, const CuDesc& cu, uint64_t* luma_sink,
                    int x0, int y0, int log2, int blk_idx, int cbf_luma,
                    int cbf_cb, int cbf_cr) {
  if (cbf_luma) {
    const int luma_mode = c.ipm_at(x0, y0);
    const int scan = scan_idx_for(luma_mode, log2, 0);
    const uint64_t m = c.cab.mark();
    residual_coding(c, log2, 0, scan);
    *luma_sink += c.cab.bins_since(m);
  }
  // 4:2:0 chroma: one TB of half size per component, except that the four
  // 4x4 luma TBs of an 8x8 parent share one 4x4 chroma TB parsed with the
  // last (blk_idx == 3) luma TB.
  const uint64_t m = c.cab.mark();
  if (log2 > 2) {
    const int log2_c = log2 - 1;
    const int scan_c = scan_idx_for(cu.chroma_mode, log2_c, 1);
    if (cbf_cb) residual_coding(c, log2_c, 1, scan_c);
    if (cbf_cr) residual_coding(c, log2_c, 2, scan_c);
  } else if (blk_idx == 3) {
    const int scan_c = scan_idx_for(cu.chroma_mode, 2, 1);
    if (cbf_cb) residual_coding(c, 2, 1, scan_c);
    if (cbf_cr) residual_coding(c, 2, 2, scan_c);
  }
  a.shared += c.cab.bins_since(m);
}

void transform_tree(Ctx& c, CuAcct& a, const CuDesc& cu, int x0, int y0,
                    int log2, int depth, int blk_idx, int cbf_cb, int cbf_cr) {
  const bool intra_split = cu.nxn;
  const int max_depth =
      c.sps.max_transform_hierarchy_depth_intra + (intra_split ? 1 : 0);

  const uint64_t m0 = c.cab.mark();
  int split;
  if (log2 <= c.sps.max_tb_log2_size && log2 > c.sps.min_tb_log2_size &&
      depth < max_depth && !(intra_split && depth == 0)) {
    split = c.cab.decode_bin(CTX_SPLIT_TRANSFORM_FLAG + 5 - log2);
  } else {
    split = (log2 > c.sps.max_tb_log2_size || (intra_split && depth == 0))
                ? 1
                : 0;
  }
  // Chroma cbfs live at every node down to 8x8 luma (log2 > 2); below that
  // they are inherited from the parent.  A flag is present only while the
  // parent level had a non-zero cbf (or at depth 0).
  if (log2 > 2) {
    cbf_cb = (depth == 0 || cbf_cb)
                 ? c.cab.decode_bin(CTX_CBF_CHROMA + depth)
                 : 0;
    cbf_cr = (depth == 0 || cbf_cr)
                 ? c.cab.decode_bin(CTX_CBF_CHROMA + depth)
                 : 0;
  }
  a.shared += c.cab.bins_since(m0);

  if (split) {
    const int half = 1 << (log2 - 1);
    transform_tree(c, a, cu, x0, y0, log2 - 1, depth + 1, 0, cbf_cb, cbf_cr);
    transform_tree(c, a, cu, x0 + half, y0, log2 - 1, depth + 1, 1, cbf_cb,
                   cbf_cr);
    transform_tree(c, a, cu, x0, y0 + half, log2 - 1, depth + 1, 2, cbf_cb,
                   cbf_cr);
    transform_tree(c, a, cu, x0 + half, y0 + half, log2 - 1, depth + 1, 3,
                   cbf_cb, cbf_cr);
    return;
  }

  // Leaf: attribute luma syntax to the NxN quadrant PU when applicable.
  int quad = 0;
  if (cu.nxn) {
    const int half = 1 << (cu.log2 - 1);
    quad = ((x0 - cu.x0) >= half ? 1 : 0) + ((y0 - cu.y0) >= half ? 2 : 0);
  }
  uint64_t* luma_sink = cu.nxn ? &a.tied[size_t(quad)] : &a.shared;

  // cbf_luma (always present for intra CUs).
  const uint64_t m1 = c.cab.mark();
  const int cbf_luma = c.cab.decode_bin(CTX_CBF_LUMA + (depth == 0 ? 1 : 0));
  *luma_sink += c.cab.bins_since(m1);

  transform_unit(c, a, cu, luma_sink, x0, y0, log2, blk_idx, cbf_luma, cbf_cb,
                 cbf_cr);
}

// ---------------------------------------------------------------------------
// Coding unit (7.3.8.5) — intra only in this subset.

void emit_cu_records(Ctx& c, const CuDesc& cu, const int modes[4],
                     const CuAcct& a) {
  const size_t first = c.recs.size();
  const int size = 1 << cu.log2;
  if (cu.nxn) {
    const int half = size >> 1;
    const uint64_t base = a.shared / 4, rem = a.shared % 4;
    for (int i = 0; i < 4; i++) {
      c.recs.push_back({cu.x0 + (i & 1) * half, cu.y0 + (i >> 1) * half, half,
                        modes[i],
                        a.tied[size_t(i)] + base + (i == 0 ? rem : 0)});
    }
  } else if (size == 64) {
    // A 64x64 CU is reported as four 32x32 units sharing its mode and bins.
    const uint64_t total = a.shared + a.tied[0];
    const uint64_t base = total / 4, rem = total % 4;
    for (int i = 0; i < 4; i++) {
      c.recs.push_back({cu.x0 + (i & 1) * 32, cu.y0 + (i >> 1) * 32, 32,
                        modes[0], base + (i == 0 ? rem : 0)});
    }
  } else {
    c.recs.push_back({cu.x0, cu.y0, size, modes[0], a.shared + a.tied[0]});
  }
  c.recs[first].bins += c.pending;
  c.pending = 0;
}

void coding_unit(Ctx& c, int x0, int y0, int log2) {
  c.cu_x = x0;
  c.cu_y = y0;
  c.cu_log2 = log2;

  CuDesc cu;
  cu.x0 = x0;
  cu.y0 = y0;
  cu.log2 = log2;
  CuAcct acct;

  // part_mode: present only at the minimum CB size (7.4.9.5); bin 1 is
  // PART_2Nx2N, bin 0 is PART_NxN.
  const uint64_t m0 = c.cab.mark();
  if (log2 == c.sps.min_cb_log2_size)
    cu.nxn = (c.cab.decode_bin(CTX_PART_MODE) == 0);
  acct.shared += c.cab.bins_since(m0);

  const int n_pu = cu.nxn ? 4 : 1;
  const int pb_size = (1 << log2) >> (cu.nxn ? 1 : 0);

  // All prev_intra_luma_pred_flags precede the per-PU mode syntax (7.3.8.5).
  int prev_flag[4] = {};
  for (int i = 0; i < n_pu; i++) {
    const uint64_t m = c.cab.mark();
    prev_flag[i] = c.cab.decode_bin(CTX_PREV_INTRA_LUMA_PRED);
    acct.tied[size_t(i)] += c.cab.bins_since(m);
  }

  int modes[4] = {};
  for (int i = 0; i < n_pu; i++) {
    const uint64_t m = c.cab.mark();
    const int x_pb = x0 + (i & 1) * pb_size;
    const int y_pb = y0 + (i >> 1) * pb_size;
    int cand[3];
    mpm_candidates(c, x_pb, y_pb, cand);
    int mode;
    if (prev_flag[i]) {
      int idx = 0;  // mpm_idx: TR, cMax 2, bypass
      if (c.cab.decode_bypass()) idx = 1 + int(c.cab.decode_bypass());
      mode = cand[idx];
    } else {
      mode = int(c.cab.decode_bypass_n(5));  // rem_intra_luma_pred_mode
      std::sort(cand, cand + 3);
      for (int j = 0; j < 3; j++)
        if (mode >= cand[j]) mode++;
    }
    modes[i] = mode;
    // Stored immediately: a later PU of this CU may use it as MPM neighbour.
    c.store_ipm(x_pb, y_pb, pb_size, mode);
    acct.tied[size_t(i)] += c.cab.bins_since(m);
  }

  const uint64_t m1 = c.cab.mark();
  cu.chroma_mode = decode_chroma_mode(c, modes[0]);
  acct.shared += c.cab.bins_since(m1);

  transform_tree(c, acct, cu, x0, y0, log2, 0, 0, 0, 0);

  emit_cu_records(c, cu, modes, acct);
}

// ---------------------------------------------------------------------------
// Coding quadtree (7.3.8.4).

void coding_quadtree(Ctx& c, int x0, int y0, int log2, int depth) {
  const int size = 1 << log2;
  const bool inside =
      (x0 + size <= c.pic_w) && (y0 + size <= c.pic_h);
  int split;
  if (inside && log2 > c.sps.min_cb_log2_size) {
    int inc = 0;
    if (x0 > 0 && c.ct_depth_at(x0 - 1, y0) > depth) inc++;
    if (y0 > 0 && c.ct_depth_at(x0, y0 - 1) > depth) inc++;
    const uint64_t m = c.cab.mark();
    split = c.cab.decode_bin(CTX_SPLIT_CU_FLAG + inc);
    c.pending += c.cab.bins_since(m);
  } else {
    // Inferred: split while the block overhangs the picture (picture
    // dimensions are multiples of the minimum CB, so a minimum-size block
    // never overhangs).
    split = (log2 > c.sps.min_cb_log2_size && !inside) ? 1 : 0;
  }

  if (split) {
    // Record the final CtDepth for this area now; left/above context lookups
    // only ever touch fully decoded areas, for which the marks below have
    // been superseded by deeper ones already.
    for (int y = y0; y < std::min(y0 + size, c.pic_h); y += 8)
      for (int x = x0; x < std::min(x0 + size, c.pic_w); x += 8)
        c.depth8[size_t(y >> 3) * c.w8 + (x >> 3)] =
            uint8_t(depth + 1);
    const int half = size >> 1;
    coding_quadtree(c, x0, y0, log2 - 1, depth + 1);
    if (x0 + half < c.pic_w)
      coding_quadtree(c, x0 + half, y0, log2 - 1, depth + 1);
    if (y0 + half < c.pic_h)
      coding_quadtree(c, x0, y0 + half, log2 - 1, depth + 1);
    if (x0 + half < c.pic_w && y0 + half < c.pic_h)
      coding_quadtree(c, x0 + half, y0 + half, log2 - 1, depth + 1);
  } else {
    coding_unit(c, x0, y0, log2);
  }
}

std::string pos_suffix(const Ctx& c, int ctb_x, int ctb_y) {
  return " at CTU(" + std::to_string(ctb_x) + "," + std::to_string(ctb_y) +
         ") CU(" + std::to_string(c.cu_x) + "," + std::to_string(c.cu_y) +
         ")x" + std::to_string(1 << c.cu_log2);
}

}  // namespace

const std::array<uint8_t, 2>* scan_order(int log2_size, int scan_idx) {
  return scans().tab[log2_size][scan_idx].data();
}

int scan_idx_for(int pred_mode, int log2_trafo_size, int c_idx) {
  // 7.4.9.11: mode-dependent scans apply to 4x4 and (luma) 8x8 intra TBs;
  // with 4:2:0 chroma the c_idx test reduces to log2 == 2.
  if (log2_trafo_size == 2 || (log2_trafo_size == 3 && c_idx == 0)) {
    if (pred_mode >= 6 && pred_mode <= 14) return 2;   // near-horizontal modes: vertical scan
    if (pred_mode >= 22 && pred_mode <= 30) return 1;  // near-vertical modes: horizontal scan
  }
  return 0;
}

PictureParse parse_picture(const NalUnit& slice_nal,
                           const SequenceParams& sps,
                           const PictureParams& pps, bool enable_bin_log) {
  auto [sh, reader] = parse_slice_header(slice_nal, sps, pps);

  Ctx c(sps, pps, std::move(reader), sh.slice_qp, enable_bin_log);

  const int ctbs_w = sps.pic_width_in_ctbs();
  const int ctbs_h = sps.pic_height_in_ctbs();
  const int total = ctbs_w * ctbs_h;
  for (int addr = 0; addr < total; addr++) {
    const int ctb_x = (addr % ctbs_w) << sps.ctb_log2_size;
    const int ctb_y = (addr / ctbs_w) << sps.ctb_log2_size;
    try {
      coding_quadtree(c, ctb_x, ctb_y, sps.ctb_log2_size, 0);
      const int end = c.cab.decode_terminate();
      // The end_of_slice_segment_flag bin is charged to the last PU of the
      // CTU it follows.
      c.recs.back().bins += 1;
      const bool last = (addr == total - 1);
      if (end && !last)
        throw MalformedCode("slice ended before the last CTU");
      if (!end && last)
        throw MalformedCode("missing end-of-slice at the last CTU");
    } catch (const UnsupportedFeature& e) {
      throw UnsupportedFeature(e.feature,
                               std::string(e.what()) + pos_suffix(c, ctb_x, ctb_y));
    } catch (const OutOfBits& e) {
      throw OutOfBits(std::string(e.what()) + pos_suffix(c, ctb_x, ctb_y));
    } catch (const MalformedCode& e) {
      throw MalformedCode(std::string(e.what()) + pos_suffix(c, ctb_x, ctb_y));
    }
  }
  // After the final terminate bin only byte-alignment padding may remain.
  if (c.cab.reader().bits_left() > 7)
    throw MalformedCode("slice payload continues past the end of the slice");

  PictureParse out;
  out.records = std::move(c.recs);
  out.total_bins = c.cab.bins_decoded();
  out.trailing_bits = static_cast<int>(c.cab.reader().bits_left());
  out.bin_log = c.cab.bin_log();
  return out;
}

StreamParse parse_stream(const uint8_t* data, size_t size,
                         bool enable_bin_log) {
  const auto nals = split_annexb(data, size);

  StreamParse out;
  bool have_sps = false, have_pps = false, have_slice = false;
  for (const NalUnit& nal : nals) {
    switch (nal.nal_unit_type) {
      case NAL_VPS:
        parse_vps(nal);
        break;
      case NAL_SPS:
        out.sps = parse_sps(nal);
        have_sps = true;
        break;
      case NAL_PPS:
        if (!have_sps) throw MalformedCode("PPS before SPS");
        out.pps = parse_pps(nal);
        if (out.pps.sps_id != out.sps.sps_id)
          throw MalformedCode("PPS references an unknown SPS");
        have_pps = true;
        break;
      default:
        if (is_vcl(nal.nal_unit_type)) {
          if (!have_sps || !have_pps)
            throw MalformedCode("slice before parameter sets");
          if (have_slice)
            throw UnsupportedFeature(
                "multi_picture", "expected a single-picture bitstream");
          auto [sh, reader] = parse_slice_header(nal, out.sps, out.pps);
          (void)reader;
          out.slice = sh;
          out.picture = parse_picture(nal, out.sps, out.pps, enable_bin_log);
          have_slice = true;
        }
        break;  // SEI, AUD, filler: ignored
    }
  }
  if (!have_slice) throw MalformedCode("no coded slice in stream");
  return out;
}

StreamParse parse_stream(const std::vector<uint8_t>& stream,
                         bool enable_bin_log) {
  return parse_stream(stream.data(), stream.size(), enable_bin_log);
}

}  // namespace hf
