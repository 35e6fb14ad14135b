#include "anisores/fft.hpp"

#include <fftw3.h>

#include <cstring>

namespace anisores {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

TorusFFT2::TorusFFT2(int n) : n_(n) {
  if (!is_power_of_two(n)) throw ResolutionError("grid size must be a power of two, got " + std::to_string(n));
  buf_in_.resize(static_cast<size_t>(n) * n);
  buf_out_.resize(static_cast<size_t>(n) * n);
  auto* in = reinterpret_cast<fftw_complex*>(buf_in_.data());
  auto* out = reinterpret_cast<fftw_complex*>(buf_out_.data());
  plan_fwd_ = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

TorusFFT2::~TorusFFT2() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void TorusFFT2::forward(const std::vector<cplx>& samples, std::vector<cplx>& coeffs) const {
  const size_t sz = static_cast<size_t>(n_) * n_;
  if (samples.size() != sz) throw ResolutionError("sample array size mismatch");
  std::memcpy(buf_in_.data(), samples.data(), sz * sizeof(cplx));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  coeffs.resize(sz);
  const double scale = 1.0 / static_cast<double>(sz);
  for (size_t i = 0; i < sz; ++i) coeffs[i] = buf_out_[i] * scale;
}

void TorusFFT2::inverse(const std::vector<cplx>& coeffs, std::vector<cplx>& samples) const {
  const size_t sz = static_cast<size_t>(n_) * n_;
  if (coeffs.size() != sz) throw ResolutionError("coefficient array size mismatch");
  std::memcpy(buf_in_.data(), coeffs.data(), sz * sizeof(cplx));
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  samples.assign(buf_out_.begin(), buf_out_.end());
}

}  // namespace anisores
