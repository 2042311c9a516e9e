#pragma once

#include <span>
#include <vector>

namespace entropybench::numeric {

/// Complementary error function. Total on finite input.
double erfc(double x);

/// Upper regularized incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
/// Throws std::domain_error for a <= 0 or x < 0.
double igamc(double a, double x);

/// Lower regularized incomplete gamma P(a, x) = 1 - Q(a, x).
double igam(double a, double x);

/// Moduli |X_k| of the first floor(n/2) DFT coefficients of `signal`.
///
/// Any length n >= 2 is handled exactly: power-of-two lengths go straight
/// through a radix-2 FFT, everything else through Bluestein's chirp-z
/// reduction onto a power-of-two convolution. No truncation or padding
/// of the input is ever visible in the output.
std::vector<double> dft_moduli(std::span<const double> signal);

}  // namespace entropybench::numeric
