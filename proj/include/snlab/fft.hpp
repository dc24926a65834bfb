#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace snlab {

/// In-place complex FFT over a rank-1, -2 or -3 cube with `n` points per axis,
/// backed by FFTW. Forward is unnormalized; inverse carries 1/N^rank.
///
/// Plans are created once per shape with FFTW_ESTIMATE (deterministic) and
/// shared; execution is thread-safe.
class Fft {
 public:
  Fft(int rank, int n);

  int rank() const noexcept { return rank_; }
  int points_per_axis() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }

  void forward(std::span<std::complex<double>> data) const;
  void inverse(std::span<std::complex<double>> data) const;

  struct Plans;

 private:
  int rank_;
  int n_;
  std::size_t size_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace snlab
