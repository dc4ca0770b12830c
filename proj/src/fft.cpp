#include "sbs/fft.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include "sbs/common.hpp"

namespace sbs {

namespace {
// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

PaddedDft::PaddedDft(std::size_t length, Sign sign) : length_(length) {
  if (length == 0) throw DomainError("DFT length must be positive");
  std::lock_guard lock(planner_mutex());
  in_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * length));
  out_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * length));
  plan_ = fftw_plan_dft_1d(static_cast<int>(length), reinterpret_cast<fftw_complex*>(in_),
                           reinterpret_cast<fftw_complex*>(out_),
                           sign == Sign::kNegative ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plan_ == nullptr) {
    release();
    throw NumericalError("FFTW could not create a plan");
  }
}

PaddedDft::~PaddedDft() { release(); }

PaddedDft::PaddedDft(PaddedDft&& other) noexcept
    : length_(std::exchange(other.length_, 0)),
      in_(std::exchange(other.in_, nullptr)),
      out_(std::exchange(other.out_, nullptr)),
      plan_(std::exchange(other.plan_, nullptr)) {}

PaddedDft& PaddedDft::operator=(PaddedDft&& other) noexcept {
  if (this != &other) {
    release();
    length_ = std::exchange(other.length_, 0);
    in_ = std::exchange(other.in_, nullptr);
    out_ = std::exchange(other.out_, nullptr);
    plan_ = std::exchange(other.plan_, nullptr);
  }
  return *this;
}

void PaddedDft::release() noexcept {
  if (plan_ == nullptr && in_ == nullptr && out_ == nullptr) return;
  std::lock_guard lock(planner_mutex());
  if (plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (in_ != nullptr) fftw_free(in_);
  if (out_ != nullptr) fftw_free(out_);
  plan_ = nullptr;
  in_ = out_ = nullptr;
}

void PaddedDft::transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  if (in.size() > length_) throw DomainError("DFT input longer than transform length");
  if (out.size() != length_) throw DomainError("DFT output size must equal transform length");
  std::copy(in.begin(), in.end(), in_);
  std::fill(in_ + in.size(), in_ + length_, std::complex<double>{});
  fftw_execute(static_cast<fftw_plan>(plan_));
  const double scale = 1.0 / std::sqrt(static_cast<double>(length_));
  std::transform(out_, out_ + length_, out.begin(), [scale](const std::complex<double>& v) { return v * scale; });
}

}  // namespace sbs
