#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace md2d::fft {

using cplx = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per shape, in place and unaligned, and then shared.
struct Plan {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plan() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

inline std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

inline const Plan& plan_for(int rank, int n0, int n1) {
  static std::map<std::pair<int, std::pair<int, int>>, std::unique_ptr<Plan>> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(rank, std::make_pair(n0, n1));
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  auto plan = std::make_unique<Plan>();
  const std::size_t len = rank == 1 ? static_cast<std::size_t>(n0)
                                    : static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1);
  std::vector<cplx> scratch(len);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (rank == 1) {
    plan->forward = fftw_plan_dft_1d(n0, buf, buf, FFTW_FORWARD, flags);
    plan->backward = fftw_plan_dft_1d(n0, buf, buf, FFTW_BACKWARD, flags);
  } else {
    plan->forward = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_FORWARD, flags);
    plan->backward = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_BACKWARD, flags);
  }
  auto& ref = *plan;
  cache.emplace(key, std::move(plan));
  return ref;
}

}  // namespace detail

/// Unnormalized in-place 2d DFT, sum_x f(x) e^{-2 pi i k.x / n}.
inline void forward_2d(cplx* data, int n) {
  fftw_execute_dft(detail::plan_for(2, n, n).forward, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

/// Unnormalized in-place inverse 2d DFT (no 1/n^2).
inline void backward_2d(cplx* data, int n) {
  fftw_execute_dft(detail::plan_for(2, n, n).backward, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

inline void forward_1d(cplx* data, int len) {
  fftw_execute_dft(detail::plan_for(1, len, 1).forward, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

inline void backward_1d(cplx* data, int len) {
  fftw_execute_dft(detail::plan_for(1, len, 1).backward, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

}  // namespace md2d::fft
