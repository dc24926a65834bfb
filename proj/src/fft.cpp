#include "snlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "snlab/errors.hpp"

namespace snlab {

struct Fft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const Fft::Plans> make_plans(int rank, int n, std::size_t size) {
  // FFTW's planner is not re-entrant; execution with fftw_execute_dft is.
  std::lock_guard lock(planner_mutex());
  static std::map<std::pair<int, int>, std::shared_ptr<const Fft::Plans>> cache;
  const auto key = std::make_pair(rank, n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
  if (buffer == nullptr) throw std::bad_alloc();
  int dims[3] = {n, n, n};
  constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  auto plans = std::make_shared<Fft::Plans>();
  plans->forward = fftw_plan_dft(rank, dims, buffer, buffer, FFTW_FORWARD, kFlags);
  plans->backward = fftw_plan_dft(rank, dims, buffer, buffer, FFTW_BACKWARD, kFlags);
  fftw_free(buffer);
  if (plans->forward == nullptr || plans->backward == nullptr) {
    throw InvalidArgument("FFTW could not plan a transform of rank " + std::to_string(rank));
  }
  cache.emplace(key, plans);
  return plans;
}

}  // namespace

Fft::Fft(int rank, int n) : rank_(rank), n_(n), size_(1) {
  if (rank < 1 || rank > 3) throw InvalidArgument("FFT rank must be 1, 2 or 3");
  if (n < 1) throw InvalidArgument("FFT length must be positive");
  for (int a = 0; a < rank; ++a) size_ *= static_cast<std::size_t>(n);
  plans_ = make_plans(rank, n, size_);
}

void Fft::forward(std::span<std::complex<double>> data) const {
  if (data.size() != size_) throw InvalidArgument("FFT input has the wrong length");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, p, p);
}

void Fft::inverse(std::span<std::complex<double>> data) const {
  if (data.size() != size_) throw InvalidArgument("FFT input has the wrong length");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, p, p);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : data) v *= scale;
}

}  // namespace snlab
