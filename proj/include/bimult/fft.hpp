#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bimult {

enum class FftDirection { Forward, Backward };

/// Unnormalized multi-dimensional DFT, row-major, last axis fastest.
/// Forward uses e^{-2 pi i k x / N}, Backward e^{+2 pi i k x / N}.
/// Planning is serialized internally; execution is reentrant.
void fft(std::span<std::complex<double>> data, std::span<const int> shape, FftDirection dir);

inline void fft(std::vector<std::complex<double>>& data, std::initializer_list<int> shape,
                FftDirection dir) {
  std::vector<int> s(shape);
  fft(std::span<std::complex<double>>(data), std::span<const int>(s), dir);
}

/// Exact integer linear convolution of two nonnegative integer sequences via
/// FFT with rounding. Inputs must keep |result| well below 2^50.
std::vector<long long> integer_convolution(std::span<const long long> a, std::span<const long long> b);

}  // namespace bimult
