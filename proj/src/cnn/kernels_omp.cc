// SPDX-License-Identifier: MIT
// OpenMP kernels.  Parallelism is only ever across independent output
// elements; each element's accumulation runs serially in the same order as
// the reference kernels, so results are bitwise identical for any thread
// count.  Builds without OpenMP degrade to serial loops.

#include "kernels.h"

namespace hf::cnn {
namespace omp {

template <typename T>
void conv_forward(const ConvDims& d, const T* in, const T* w, const T* b,
                  T* out) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int oy = 0; oy < d.out_h; oy++) {
    for (int ox = 0; ox < d.out_w; ox++) {
      for (int f = 0; f < d.filters; f++) {
        T acc = b[f];
        for (int ky = 0; ky < d.k; ky++) {
          const int iy = oy * d.stride + ky;
          for (int kx = 0; kx < d.k; kx++) {
            const int ix = ox * d.stride + kx;
            const T* in_px = in + (size_t(iy) * d.in_w + ix) * d.in_c;
            const T* w_px =
                w + (size_t(f) * d.k * d.k + size_t(ky) * d.k + kx) * d.in_c;
            for (int ci = 0; ci < d.in_c; ci++) acc += in_px[ci] * w_px[ci];
          }
        }
        out[(size_t(oy) * d.out_w + ox) * d.filters + f] = acc;
      }
    }
  }
}

template <typename T>
void conv_backward_input(const ConvDims& d, const T* dout, const T* w,
                         T* din) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int iy = 0; iy < d.in_h; iy++) {
    for (int ix = 0; ix < d.in_w; ix++) {
      for (int ci = 0; ci < d.in_c; ci++) {
        T acc = 0;
        for (int f = 0; f < d.filters; f++) {
          for (int ky = 0; ky < d.k; ky++) {
            const int ty = iy - ky;
            if (ty < 0 || ty % d.stride != 0) continue;
            const int oy = ty / d.stride;
            if (oy >= d.out_h) continue;
            for (int kx = 0; kx < d.k; kx++) {
              const int tx = ix - kx;
              if (tx < 0 || tx % d.stride != 0) continue;
              const int ox = tx / d.stride;
              if (ox >= d.out_w) continue;
              acc +=
                  dout[(size_t(oy) * d.out_w + ox) * d.filters + f] *
                  w[(size_t(f) * d.k * d.k + size_t(ky) * d.k + kx) * d.in_c +
                    ci];
            }
          }
        }
        din[(size_t(iy) * d.in_w + ix) * d.in_c + ci] = acc;
      }
    }
  }
}

template <typename T>
void conv_backward_params(const ConvDims& d, const T* dout, const T* in,
                          T* dw, T* db) {
#pragma omp parallel for schedule(static)
  for (int f = 0; f < d.filters; f++) {
    T acc = 0;
    for (int oy = 0; oy < d.out_h; oy++)
      for (int ox = 0; ox < d.out_w; ox++)
        acc += dout[(size_t(oy) * d.out_w + ox) * d.filters + f];
    db[f] += acc;
  }
#pragma omp parallel for collapse(3) schedule(static)
  for (int f = 0; f < d.filters; f++) {
    for (int ky = 0; ky < d.k; ky++) {
      for (int kx = 0; kx < d.k; kx++) {
        for (int ci = 0; ci < d.in_c; ci++) {
          T acc = 0;
          for (int oy = 0; oy < d.out_h; oy++) {
            const int iy = oy * d.stride + ky;
            for (int ox = 0; ox < d.out_w; ox++) {
              const int ix = ox * d.stride + kx;
              acc += dout[(size_t(oy) * d.out_w + ox) * d.filters + f] *
                     in[(size_t(iy) * d.in_w + ix) * d.in_c + ci];
            }
          }
          dw[(size_t(f) * d.k * d.k + size_t(ky) * d.k + kx) * d.in_c + ci] +=
              acc;
        }
      }
    }
  }
}

template <typename T>
void relu_forward(const T* z, T* a, size_t n) {
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; i++)
    a[i] = z[i] > T(0) ? z[i] : T(0);
}

template <typename T>
void relu_backward(const T* z, const T* da, T* dz, size_t n) {
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; i++)
    dz[i] = z[i] > T(0) ? da[i] : T(0);
}

template <typename T>
void maxpool2_forward(int h, int w, int c, const T* in, T* out,
                      int32_t* argmax) {
  const int ph = h / 2, pw = w / 2;
#pragma omp parallel for collapse(2) schedule(static)
  for (int py = 0; py < ph; py++) {
    for (int px = 0; px < pw; px++) {
      for (int ch = 0; ch < c; ch++) {
        int32_t best_idx = int32_t((size_t(py * 2) * w + px * 2) * c + ch);
        T best = in[best_idx];
        for (int ky = 0; ky < 2; ky++) {
          for (int kx = 0; kx < 2; kx++) {
            const int32_t idx =
                int32_t((size_t(py * 2 + ky) * w + (px * 2 + kx)) * c + ch);
            if (in[idx] > best) {
              best = in[idx];
              best_idx = idx;
            }
          }
        }
        const size_t o = (size_t(py) * pw + px) * c + ch;
        out[o] = best;
        argmax[o] = best_idx;
      }
    }
  }
}

template <typename T>
void maxpool2_backward(int h, int w, int c, const T* dout,
                       const int32_t* argmax, T* din) {
  const int ph = h / 2, pw = w / 2;
  const long long n = (long long)ph * pw * c;
  // Disjoint pool windows: every argmax target is unique.
#pragma omp parallel for schedule(static)
  for (long long o = 0; o < n; o++) din[argmax[o]] += dout[o];
}

template <typename T>
void fc_forward(int units, int inputs, const T* in, const T* w, const T* b,
                T* out) {
#pragma omp parallel for schedule(static)
  for (int u = 0; u < units; u++) {
    T acc = b[u];
    const T* row = w + size_t(u) * inputs;
    for (int i = 0; i < inputs; i++) acc += row[i] * in[i];
    out[u] = acc;
  }
}

template <typename T>
void fc_backward_params(int units, int inputs, const T* in, const T* dout,
                        T* dw, T* db) {
#pragma omp parallel for schedule(static)
  for (int u = 0; u < units; u++) {
    db[u] += dout[u];
    T* row = dw + size_t(u) * inputs;
    const T g = dout[u];
    for (int i = 0; i < inputs; i++) row[i] += g * in[i];
  }
}

template <typename T>
void fc_backward_input(int units, int inputs, const T* w, const T* dout,
                       T* din) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < inputs; i++) {
    T acc = 0;
    for (int u = 0; u < units; u++) acc += w[size_t(u) * inputs + i] * dout[u];
    din[i] = acc;
  }
}

#define HF_CNN_INSTANTIATE(T)                                                 \
  template void conv_forward<T>(const ConvDims&, const T*, const T*,          \
                                const T*, T*);                                \
  template void conv_backward_input<T>(const ConvDims&, const T*, const T*,   \
                                       T*);                                   \
  template void conv_backward_params<T>(const ConvDims&, const T*, const T*,  \
                                        T*, T*);                              \
  template void relu_forward<T>(const T*, T*, size_t);                        \
  template void relu_backward<T>(const T*, const T*, T*, size_t);             \
  template void maxpool2_forward<T>(int, int, int, const T*, T*, int32_t*);   \
  template void maxpool2_backward<T>(int, int, int, const T*,                 \
                                     const int32_t*, T*);                     \
  template void fc_forward<T>(int, int, const T*, const T*, const T*, T*);    \
  template void fc_backward_params<T>(int, int, const T*, const T*, T*, T*);  \
  template void fc_backward_input<T>(int, int, const T*, const T*, T*);

HF_CNN_INSTANTIATE(float)
HF_CNN_INSTANTIATE(double)
#undef HF_CNN_INSTANTIATE

}  // namespace omp
}  // namespace hf::cnn
