#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace decaycoh::detail {

// Owns an FFTW real-to-complex plan of fixed length n; output holds the
// n / 2 + 1 nonnegative-frequency bins.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)) {
    if (in_ == nullptr || out_ == nullptr) throw std::bad_alloc();
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }
  std::span<double> input() { return {in_, n_}; }

  void execute(std::span<std::complex<double>> spectrum) {
    fftw_execute(plan_);
    for (std::size_t i = 0; i < bins(); ++i) spectrum[i] = {out_[i][0], out_[i][1]};
  }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace decaycoh::detail
