#ifndef ANISORES_FFT_HPP
#define ANISORES_FFT_HPP

#include <vector>

#include "anisores/common.hpp"

namespace anisores {

// Complex 2-d FFT on an N x N torus grid, N a power of two.
//
// Convention: samples f(x_j) at x_j = j/N, coefficients at integer frequencies
// with phases e^{2*pi*i k.x},
//   fhat(k) = (1/N^2) sum_j f(x_j) e^{-2*pi*i k.x_j},   f(x_j) = sum_k fhat(k) e^{2*pi*i k.x_j}.
// Coefficients are stored in FFT layout; use freq_of_index/index_of_freq to map
// between array index and signed frequency in [-N/2, N/2).
class TorusFFT2 {
 public:
  explicit TorusFFT2(int n);
  ~TorusFFT2();
  TorusFFT2(const TorusFFT2&) = delete;
  TorusFFT2& operator=(const TorusFFT2&) = delete;

  int size() const { return n_; }

  // forward: samples -> coefficients (includes the 1/N^2 factor)
  void forward(const std::vector<cplx>& samples, std::vector<cplx>& coeffs) const;
  // inverse: coefficients -> samples
  void inverse(const std::vector<cplx>& coeffs, std::vector<cplx>& samples) const;

  int freq_of_index(int i) const { return i < n_ / 2 ? i : i - n_; }
  int index_of_freq(int k) const { return k >= 0 ? k : k + n_; }
  // flattened index (row-major over [i1][i2] = frequency (k1,k2))
  int flat(int i1, int i2) const { return i1 * n_ + i2; }

 private:
  int n_;
  void* plan_fwd_;
  void* plan_bwd_;
  mutable std::vector<cplx> buf_in_, buf_out_;
};

bool is_power_of_two(int n);

}  // namespace anisores

#endif
