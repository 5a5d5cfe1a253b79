// SPDX-License-Identifier: MIT
// CNN layer kernels in two interchangeable flavours: a plain serial reference
// and an OpenMP version parallelized over independent output elements.  Both
// accumulate each output element in the same order, so results are bitwise
// identical — the test suite asserts this and the training path may use
// either.
//
// Tensor layout is channels-last row-major: element (y, x, c) of an
// h x w x c tensor lives at ((y * w) + x) * c_count + c.  Convolution weights
// are [filter][ky][kx][c_in]; fully-connected weights are [unit][input].
//
// Convention: *_backward_params kernels accumulate (+=) into the gradient
// buffers so mini-batch gradients can be summed in place; data-gradient
// kernels overwrite their output buffer.
#pragma once

#include <cstdint>
#include <cstddef>

namespace hf::cnn {

struct ConvDims {
  int in_h, in_w, in_c;
  int filters, k, stride;
  int out_h, out_w;

  static ConvDims valid(int in_h, int in_w, int in_c, int filters, int k,
                        int stride) {
    ConvDims d{in_h, in_w, in_c, filters, k, stride, 0, 0};
    d.out_h = (in_h - k) / stride + 1;
    d.out_w = (in_w - k) / stride + 1;
    return d;
  }
  size_t in_count() const { return size_t(in_h) * in_w * in_c; }
  size_t out_count() const { return size_t(out_h) * out_w * filters; }
  size_t weight_count() const { return size_t(filters) * k * k * in_c; }
};

#define HF_CNN_KERNEL_DECLS                                                   \
  template <typename T>                                                       \
  void conv_forward(const ConvDims& d, const T* in, const T* w, const T* b,  \
                    T* out);                                                  \
  template <typename T>                                                       \
  void conv_backward_input(const ConvDims& d, const T* dout, const T* w,     \
                           T* din);                                           \
  template <typename T>                                                       \
  void conv_backward_params(const ConvDims& d, const T* dout, const T* in,   \
                            T* dw, T* db);                                    \
  template <typename T>                                                       \
  void relu_forward(const T* z, T* a, size_t n);                             \
  template <typename T>                                                       \
  void relu_backward(const T* z, const T* da, T* dz, size_t n);              \
  template <typename T>                                                       \
  void maxpool2_forward(int h, int w, int c, const T* in, T* out,            \
                        int32_t* argmax);                                     \
  template <typename T>                                                       \
  void maxpool2_backward(int h, int w, int c, const T* dout,                 \
                         const int32_t* argmax, T* din);                      \
  template <typename T>                                                       \
  void fc_forward(int units, int inputs, const T* in, const T* w,            \
                  const T* b, T* out);                                        \
  template <typename T>                                                       \
  void fc_backward_params(int units, int inputs, const T* in, const T* dout, \
                          T* dw, T* db);                                      \
  template <typename T>                                                       \
  void fc_backward_input(int units, int inputs, const T* w, const T* dout,   \
                         T* din);

namespace serial {
HF_CNN_KERNEL_DECLS
}
namespace omp {
HF_CNN_KERNEL_DECLS
}

#undef HF_CNN_KERNEL_DECLS

// Process-wide kernel selection; defaults to the OpenMP flavour.  Safe to
// flip at any point because the flavours are bitwise-equivalent.
bool parallel_kernels();
void set_parallel_kernels(bool enabled);

template <typename T>
inline void conv_forward(const ConvDims& d, const T* in, const T* w,
                         const T* b, T* out) {
  parallel_kernels() ? omp::conv_forward(d, in, w, b, out)
                     : serial::conv_forward(d, in, w, b, out);
}
template <typename T>
inline void conv_backward_input(const ConvDims& d, const T* dout, const T* w,
                                T* din) {
  parallel_kernels() ? omp::conv_backward_input(d, dout, w, din)
                     : serial::conv_backward_input(d, dout, w, din);
}
template <typename T>
inline void conv_backward_params(const ConvDims& d, const T* dout,
                                 const T* in, T* dw, T* db) {
  parallel_kernels() ? omp::conv_backward_params(d, dout, in, dw, db)
                     : serial::conv_backward_params(d, dout, in, dw, db);
}
template <typename T>
inline void relu_forward(const T* z, T* a, size_t n) {
  parallel_kernels() ? omp::relu_forward(z, a, n) : serial::relu_forward(z, a, n);
}
template <typename T>
inline void relu_backward(const T* z, const T* da, T* dz, size_t n) {
  parallel_kernels() ? omp::relu_backward(z, da, dz, n)
                     : serial::relu_backward(z, da, dz, n);
}
template <typename T>
inline void maxpool2_forward(int h, int w, int c, const T* in, T* out,
                             int32_t* argmax) {
  parallel_kernels() ? omp::maxpool2_forward(h, w, c, in, out, argmax)
                     : serial::maxpool2_forward(h, w, c, in, out, argmax);
}
template <typename T>
inline void maxpool2_backward(int h, int w, int c, const T* dout,
                              const int32_t* argmax, T* din) {
  parallel_kernels() ? omp::maxpool2_backward(h, w, c, dout, argmax, din)
                     : serial::maxpool2_backward(h, w, c, dout, argmax, din);
}
template <typename T>
inline void fc_forward(int units, int inputs, const T* in, const T* w,
                       const T* b, T* out) {
  parallel_kernels() ? omp::fc_forward(units, inputs, in, w, b, out)
                     : serial::fc_forward(units, inputs, in, w, b, out);
}
template <typename T>
inline void fc_backward_params(int units, int inputs, const T* in,
                               const T* dout, T* dw, T* db) {
  parallel_kernels() ? omp::fc_backward_params(units, inputs, in, dout, dw, db)
                     : serial::fc_backward_params(units, inputs, in, dout, dw,
                                                  db);
}
template <typename T>
inline void fc_backward_input(int units, int inputs, const T* w,
                              const T* dout, T* din) {
  parallel_kernels() ? omp::fc_backward_input(units, inputs, w, dout, din)
                     : serial::fc_backward_input(units, inputs, w, dout, din);
}

}  // namespace hf::cnn
