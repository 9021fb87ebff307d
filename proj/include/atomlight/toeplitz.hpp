#pragma once

#include <fftw3.h>

#include <cstddef>
#include <vector>

#include "atomlight/constants.hpp"

namespace atomlight {

namespace detail {

// Smallest size >= n whose prime factors are all in {2, 3, 5, 7}; keeps the
// padded transforms on fast FFT paths.
inline int next_fast_fft_size(int n) {
  if (n < 1) return 1;
  for (int p = n;; ++p) {
    int q = p;
    for (int f : {2, 3, 5, 7})
      while (q % f == 0) q /= f;
    if (q == 1) return p;
  }
}

}  // namespace detail

// FFT-accelerated 2D convolution y(i,j) = sum_{i',j'} K(i-i', j-j') x(i',j')
// on an n x n grid, via circulant embedding of the doubly-Toeplitz kernel on
// a padded p x p torus (p >= 2n-1, so wraparound never aliases). Kernel
// queried once for every displacement at construction; plans use the
// deterministic FFTW_ESTIMATE mode.
class ToeplitzConvolver2D {
 public:
  template <class Kernel>  // Complex kernel(int di, int dj)
  ToeplitzConvolver2D(int n, Kernel&& kernel)
      : n_(n), p_(detail::next_fast_fft_size(2 * n - 1)) {
    if (n < 1) throw ConfigError("convolver grid must be non-empty");
    const std::size_t pp = static_cast<std::size_t>(p_) * p_;
    buf_ = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * pp));
    if (!buf_) throw ComputeError("fftw_malloc failed");
    khat_.resize(pp);
    fwd_ = fftw_plan_dft_2d(p_, p_, reinterpret_cast<fftw_complex*>(buf_),
                            reinterpret_cast<fftw_complex*>(buf_),
                            FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(p_, p_, reinterpret_cast<fftw_complex*>(buf_),
                            reinterpret_cast<fftw_complex*>(buf_),
                            FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) {
      release();
      throw ComputeError("fftw plan creation failed");
    }
    // Kernel lives at torus index (di mod p, dj mod p).
    for (std::size_t a = 0; a < pp; ++a) buf_[a] = 0.0;
    for (int di = -(n - 1); di <= n - 1; ++di) {
      const int a = (di + p_) % p_;
      for (int dj = -(n - 1); dj <= n - 1; ++dj) {
        const int b = (dj + p_) % p_;
        buf_[static_cast<std::size_t>(a) * p_ + b] = kernel(di, dj);
      }
    }
    fftw_execute(fwd_);
    for (std::size_t a = 0; a < pp; ++a) khat_[a] = buf_[a];
  }

  ToeplitzConvolver2D(const ToeplitzConvolver2D&) = delete;
  ToeplitzConvolver2D& operator=(const ToeplitzConvolver2D&) = delete;

  ~ToeplitzConvolver2D() { release(); }

  int grid_size() const { return n_; }
  int padded_size() const { return p_; }

  // x, y: row-major n x n (flat index i*n + j); y may alias x.
  void apply(const Complex* x, Complex* y) const {
    const std::size_t pp = static_cast<std::size_t>(p_) * p_;
    for (std::size_t a = 0; a < pp; ++a) buf_[a] = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        buf_[static_cast<std::size_t>(i) * p_ + j] =
            x[static_cast<std::size_t>(i) * n_ + j];
    fftw_execute(fwd_);
    const double scale = 1.0 / static_cast<double>(pp);
    for (std::size_t a = 0; a < pp; ++a) buf_[a] *= khat_[a] * scale;
    fftw_execute(bwd_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        y[static_cast<std::size_t>(i) * n_ + j] =
            buf_[static_cast<std::size_t>(i) * p_ + j];
  }

 private:
  void release() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
    if (buf_) fftw_free(buf_);
    fwd_ = bwd_ = nullptr;
    buf_ = nullptr;
  }

  int n_ = 0, p_ = 0;
  Complex* buf_ = nullptr;
  std::vector<Complex> khat_;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

}  // namespace atomlight
