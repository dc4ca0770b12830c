#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace sbs {

/// Unitary zero-padded DFT of fixed length backed by an FFTW plan:
///   X[k] = L^{-1/2} sum_m x[m] exp(sign * j 2 pi k m / L),  L = length()
/// Inputs shorter than L are zero-padded. One instance owns its buffers and
/// must not be shared across threads; separate instances are independent.
class PaddedDft {
 public:
  enum class Sign { kNegative = -1, kPositive = +1 };

  PaddedDft(std::size_t length, Sign sign);
  ~PaddedDft();
  PaddedDft(const PaddedDft&) = delete;
  PaddedDft& operator=(const PaddedDft&) = delete;
  PaddedDft(PaddedDft&& other) noexcept;
  PaddedDft& operator=(PaddedDft&& other) noexcept;

  std::size_t length() const { return length_; }

  /// `in.size()` must be <= length(); `out.size()` must equal length().
  void transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  void release() noexcept;

  std::size_t length_ = 0;
  std::complex<double>* in_ = nullptr;
  std::complex<double>* out_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace sbs
