#pragma once

#include <complex>
#include <vector>

namespace uteich {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Unnormalised DFT, X_k = sum_j x_j e^{-2 pi i jk/n}. Thread-safe (plans are cached under a lock).
CVec fft(const CVec& x);
/// Inverse without the 1/n factor, x_j = sum_k X_k e^{+2 pi i jk/n}.
CVec ifft_raw(const CVec& X);

/// Samples f(x_j), x_j = 2 pi j / n, to Fourier coefficients c_k, k = -K..K (K <= (n-1)/2).
CVec samples_to_coeffs(const CVec& samples, int K);
/// Fourier coefficients c_k, k = -K..K, to n samples on the uniform grid (n > 2K).
CVec coeffs_to_samples(const CVec& coeffs, int n);

} // namespace uteich
