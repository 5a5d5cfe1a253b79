// SPDX-License-Identifier: MIT
#include "enc_intra.h"

#include <algorithm>
#include <cstdlib>

namespace hf::test {

namespace {

inline int clip1(int v) { return v < 0 ? 0 : v > 255 ? 255 : v; }

// Table 8-5: intraPredAngle for modes 2..34.
const int kAngle[33] = {32,  26,  21,  17,  13,  9,   5,   2,   0,
                        -2,  -5,  -9,  -13, -17, -21, -26, -32, -26,
                        -21, -17, -13, -9,  -5,  -2,  0,   2,   5,
                        9,   13,  17,  21,  26,  32};

// Table 8-6: invAngle for the negative angles (modes 11..25).
const int kInvAngle[8] = {-4096, -1638, -910, -630, -482, -390, -315, -256};

int inv_angle(int angle) {
  static const int neg[8] = {-2, -5, -9, -13, -17, -21, -26, -32};
  for (int i = 0; i < 8; i++)
    if (neg[i] == angle) return kInvAngle[i];
  return 0;  // unreachable for valid negative angles
}

}  // namespace

uint64_t z_key(int x_luma, int y_luma, int ctb_log2, int ctbs_w) {
  const int ctb = 1 << ctb_log2;
  const uint64_t ctu = uint64_t(y_luma / ctb) * uint64_t(ctbs_w) +
                       uint64_t(x_luma / ctb);
  const int x4 = (x_luma & (ctb - 1)) >> 2;
  const int y4 = (y_luma & (ctb - 1)) >> 2;
  uint64_t z = 0;
  for (int i = 0; i < ctb_log2 - 2; i++) {
    z |= uint64_t((x4 >> i) & 1) << (2 * i);
    z |= uint64_t((y4 >> i) & 1) << (2 * i + 1);
  }
  return (ctu << uint64_t(2 * (ctb_log2 - 2))) + z;
}

RefSamples build_refs(const Plane& plane, const AvailCtx& av, int x0, int y0,
                      int n, int mode, int c_idx) {
  RefSamples r;
  r.n = n;
  r.left.assign(size_t(2 * n), 0);
  r.above.assign(size_t(2 * n), 0);

  // Gather with per-sample availability.  Scan order for substitution runs
  // from p[-1][2n-1] up the left column, through the corner, then across
  // the above row (8.4.4.2.2).
  const int total = 4 * n + 1;
  std::vector<int> val(size_t(total), 0);
  std::vector<uint8_t> ok(size_t(total), 0);
  auto sample = [&](int dx, int dy, int idx) {
    const int x = x0 + dx, y = y0 + dy;
    if (av.available(x, y)) {
      val[size_t(idx)] = plane.at(x, y);
      ok[size_t(idx)] = 1;
    }
  };
  for (int i = 0; i < 2 * n; i++) sample(-1, 2 * n - 1 - i, i);  // left, bottom-up
  sample(-1, -1, 2 * n);                                         // corner
  for (int i = 0; i < 2 * n; i++) sample(i, -1, 2 * n + 1 + i);  // above row

  bool any = false;
  for (int i = 0; i < total; i++) any = any || ok[size_t(i)];
  if (!any) {
    for (int i = 0; i < total; i++) val[size_t(i)] = 128;  // 1 << (BitDepth-1)
  } else {
    if (!ok[0]) {
      int j = 1;
      while (!ok[size_t(j)]) j++;
      val[0] = val[size_t(j)];
      ok[0] = 1;
    }
    for (int i = 1; i < total; i++)
      if (!ok[size_t(i)]) val[size_t(i)] = val[size_t(i - 1)];
  }

  for (int i = 0; i < 2 * n; i++) r.left[size_t(i)] = val[size_t(2 * n - 1 - i)];
  r.corner = val[size_t(2 * n)];
  for (int i = 0; i < 2 * n; i++) r.above[size_t(i)] = val[size_t(2 * n + 1 + i)];

  // Smoothing (8.4.4.2.3): luma only, never DC, never 4x4; otherwise by the
  // distance of the mode from pure horizontal/vertical.
  bool filter = false;
  if (c_idx == 0 && mode != 1 && n > 4) {
    const int min_dist = std::min(std::abs(mode - 26), std::abs(mode - 10));
    const int thresh = (n == 8) ? 7 : (n == 16) ? 1 : 0;
    filter = min_dist > thresh;
  }
  if (filter) {
    std::vector<int> fl(size_t(2 * n)), fa(size_t(2 * n));
    const int fc = (r.left[0] + 2 * r.corner + r.above[0] + 2) >> 2;
    for (int y = 0; y < 2 * n - 1; y++) {
      const int up = (y == 0) ? r.corner : r.left[size_t(y - 1)];
      fl[size_t(y)] = (up + 2 * r.left[size_t(y)] + r.left[size_t(y + 1)] + 2) >> 2;
    }
    fl[size_t(2 * n - 1)] = r.left[size_t(2 * n - 1)];
    for (int x = 0; x < 2 * n - 1; x++) {
      const int lt = (x == 0) ? r.corner : r.above[size_t(x - 1)];
      fa[size_t(x)] = (lt + 2 * r.above[size_t(x)] + r.above[size_t(x + 1)] + 2) >> 2;
    }
    fa[size_t(2 * n - 1)] = r.above[size_t(2 * n - 1)];
    r.left = fl;
    r.above = fa;
    r.corner = fc;
  }
  return r;
}

std::vector<int> predict_block(const RefSamples& r, int mode, int c_idx) {
  const int n = r.n;
  std::vector<int> pred(size_t(n) * n, 0);
  auto P = [&](int x, int y) -> int& { return pred[size_t(y) * n + x]; };

  if (mode == 0) {  // INTRA_PLANAR (8.4.4.2.4)
    const int lg = [&] { int l = 0; while ((1 << l) < n) l++; return l; }();
    for (int y = 0; y < n; y++)
      for (int x = 0; x < n; x++)
        P(x, y) = ((n - 1 - x) * r.left[size_t(y)] + (x + 1) * r.above[size_t(n)] +
                   (n - 1 - y) * r.above[size_t(x)] + (y + 1) * r.left[size_t(n)] +
                   n) >>
                  (lg + 1);
    return pred;
  }

  if (mode == 1) {  // INTRA_DC (8.4.4.2.5)
    int sum = n;
    for (int i = 0; i < n; i++) sum += r.left[size_t(i)] + r.above[size_t(i)];
    const int lg = [&] { int l = 0; while ((1 << l) < n) l++; return l; }();
    const int dc = sum >> (lg + 1);
    for (int y = 0; y < n; y++)
      for (int x = 0; x < n; x++) P(x, y) = dc;
    if (c_idx == 0 && n < 32) {
      P(0, 0) = (r.left[0] + 2 * dc + r.above[0] + 2) >> 2;
      for (int x = 1; x < n; x++) P(x, 0) = (r.above[size_t(x)] + 3 * dc + 2) >> 2;
      for (int y = 1; y < n; y++) P(0, y) = (r.left[size_t(y)] + 3 * dc + 2) >> 2;
    }
    return pred;
  }

  // Angular (8.4.4.2.6).  ref[] is indexed -n..2n via an offset.
  const int angle = kAngle[mode - 2];
  std::vector<int> ref(size_t(3 * n + 1), 0);
  auto R = [&](int i) -> int& { return ref[size_t(i + n)]; };

  if (mode >= 18) {
    R(0) = r.corner;
    for (int x = 1; x <= n; x++) R(x) = r.above[size_t(x - 1)];
    if (angle < 0) {
      if ((n * angle) >> 5 < -1) {
        const int ia = inv_angle(angle);
        for (int x = -1; x >= (n * angle) >> 5; x--) {
          const int src = ((x * ia + 128) >> 8) - 1;  // index into p[-1][y]
          R(x) = (src < 0) ? r.corner : r.left[size_t(src)];
        }
      }
    } else {
      for (int x = n + 1; x <= 2 * n; x++) R(x) = r.above[size_t(x - 1)];
    }
    for (int y = 0; y < n; y++) {
      const int idx = ((y + 1) * angle) >> 5;
      const int fact = ((y + 1) * angle) & 31;
      for (int x = 0; x < n; x++) {
        P(x, y) = fact ? ((32 - fact) * R(x + idx + 1) +
                          fact * R(x + idx + 2) + 16) >>
                             5
                       : R(x + idx + 1);
      }
    }
    if (mode == 26 && c_idx == 0 && n < 32)
      for (int y = 0; y < n; y++)
        P(0, y) = clip1(r.above[0] + ((r.left[size_t(y)] - r.corner) >> 1));
  } else {
    R(0) = r.corner;
    for (int y = 1; y <= n; y++) R(y) = r.left[size_t(y - 1)];
    if (angle < 0) {
      if ((n * angle) >> 5 < -1) {
        const int ia = inv_angle(angle);
        for (int y = -1; y >= (n * angle) >> 5; y--) {
          const int src = ((y * ia + 128) >> 8) - 1;  // index into p[x][-1]
          R(y) = (src < 0) ? r.corner : r.above[size_t(src)];
        }
      }
    } else {
      for (int y = n + 1; y <= 2 * n; y++) R(y) = r.left[size_t(y - 1)];
    }
    for (int x = 0; x < n; x++) {
      const int idx = ((x + 1) * angle) >> 5;
      const int fact = ((x + 1) * angle) & 31;
      for (int y = 0; y < n; y++) {
        P(x, y) = fact ? ((32 - fact) * R(y + idx + 1) +
                          fact * R(y + idx + 2) + 16) >>
                             5
                       : R(y + idx + 1);
      }
    }
    if (mode == 10 && c_idx == 0 && n < 32)
      for (int x = 0; x < n; x++)
        P(x, 0) = clip1(r.left[0] + ((r.above[size_t(x)] - r.corner) >> 1));
  }
  return pred;
}

}  // namespace hf::test
