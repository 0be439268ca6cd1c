#include "bimult/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

#include "bimult/error.hpp"

namespace bimult {
namespace {

// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

void fft(std::span<std::complex<double>> data, std::span<const int> shape, FftDirection dir) {
  if (shape.empty()) throw InvalidArgument("fft: empty shape");
  std::size_t total = 1;
  for (int s : shape) {
    if (s <= 0) throw InvalidArgument("fft: non-positive extent");
    total *= static_cast<std::size_t>(s);
  }
  if (total != data.size()) throw DimensionMismatch("fft: data size does not match shape");

  // Always run on an fftw_malloc buffer: alignment then never changes the
  // plan, which keeps results bitwise reproducible.
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total)));
  std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buf.get()));

  const int sign = dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf.get(), buf.get(), sign,
                         FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const auto* out = reinterpret_cast<const std::complex<double>*>(buf.get());
  std::copy(out, out + total, data.begin());
}

std::vector<long long> integer_convolution(std::span<const long long> a, std::span<const long long> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = static_cast<double>(a[i]);
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = static_cast<double>(b[i]);
  const int shape[] = {static_cast<int>(n)};
  fft(fa, shape, FftDirection::Forward);
  fft(fb, shape, FftDirection::Forward);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft(fa, shape, FftDirection::Backward);
  std::vector<long long> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i)
    out[i] = std::llround(fa[i].real() / static_cast<double>(n));
  return out;
}

}  // namespace bimult
