#include "entropybench/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace entropybench::numeric {

namespace {

constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

// Prefactor x^a e^{-x} / Γ(a), evaluated in log space.
double gamma_prefactor(double a, double x) {
  return std::exp(a * std::log(x) - x - std::lgamma(a));
}

// Series for P(a, x): converges quickly for x < a + 1.
double lower_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
  }
  return sum * gamma_prefactor(a, x);
}

// Continued fraction for Q(a, x) (modified Lentz), used for x >= a + 1.
double upper_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return h * gamma_prefactor(a, x);
}

void check_domain(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("incomplete gamma: a must be positive and finite");
  if (!(x >= 0.0) || std::isnan(x)) throw std::domain_error("incomplete gamma: x must be non-negative");
}

using Complex = std::complex<double>;

// In-place iterative radix-2 FFT; data.size() must be a power of two.
// Plain complex product; std::complex's operator* carries NaN/Inf recovery
// that is several times slower and never needed here.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Forward twiddles exp(-2 pi i k / n), k < n/2, each from its own angle so
/// rounding error does not accumulate.
std::vector<Complex> twiddles(std::size_t n) {
  std::vector<Complex> table(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    table[k] = Complex(std::cos(angle), std::sin(angle));
  }
  return table;
}

void fft_pow2(std::vector<Complex>& data, const std::vector<Complex>& table, bool inverse) {
  const std::size_t n = data.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  std::vector<Complex> stage(n / 2);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t k = 0; k < half; ++k) {
      const Complex w = table[k * stride];
      stage[k] = inverse ? std::conj(w) : w;
    }
    for (std::size_t start = 0; start < n; start += len) {
      Complex* lo = data.data() + start;
      Complex* hi = lo + half;
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = lo[k];
        const Complex v = mul(hi[k], stage[k]);
        lo[k] = u + v;
        hi[k] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& value : data) value *= scale;
  }
}

std::vector<Complex> bluestein(std::span<const double> signal) {
  const std::size_t n = signal.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  // chirp[k] = exp(-i pi k^2 / n); k^2 is reduced mod 2n in integers first.
  std::vector<Complex> chirp(n);
  const std::uint64_t period = 2 * static_cast<std::uint64_t>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % period;
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = Complex(std::cos(angle), std::sin(angle));
  }

  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = signal[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

  const auto table = twiddles(m);
  fft_pow2(a, table, false);
  fft_pow2(b, table, false);
  for (std::size_t i = 0; i < m; ++i) a[i] = mul(a[i], b[i]);
  fft_pow2(a, table, true);

  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = mul(a[k], chirp[k]);
  return out;
}

}  // namespace

double erfc(double x) { return std::erfc(x); }

double igamc(double a, double x) {
  check_domain(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - lower_series(a, x), 0.0, 1.0);
  return std::clamp(upper_continued_fraction(a, x), 0.0, 1.0);
}

double igam(double a, double x) {
  check_domain(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(lower_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - upper_continued_fraction(a, x), 0.0, 1.0);
}

std::vector<double> dft_moduli(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 2) throw std::invalid_argument("dft_moduli: signal length must be at least 2");

  std::vector<Complex> spectrum;
  if ((n & (n - 1)) == 0) {
    spectrum.assign(signal.begin(), signal.end());
    fft_pow2(spectrum, twiddles(n), false);
  } else {
    spectrum = bluestein(signal);
  }

  std::vector<double> moduli(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) moduli[k] = std::abs(spectrum[k]);
  return moduli;
}

}  // namespace entropybench::numeric
