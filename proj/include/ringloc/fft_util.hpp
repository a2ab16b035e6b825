#pragma once

#include <complex>
#include <vector>

namespace ringloc::fft {

/// Real-to-complex DFT of length n; out has n/2+1 bins.
void forward_r2c(int n, const double* in, std::complex<double>* out);

/// Inverse of forward_r2c, scaled by 1/n so the round trip is the identity.
void inverse_c2r(int n, const std::complex<double>* in, double* out);

/// 2D real-to-complex DFT of an n0 x n1 row-major array; out is n0 x (n1/2+1).
void forward_r2c_2d(int n0, int n1, const double* in, std::complex<double>* out);

/// Inverse of forward_r2c_2d, scaled by 1/(n0*n1). Clobbers `in`.
void inverse_c2r_2d(int n0, int n1, std::complex<double>* in, double* out);

/// Smallest integer >= n whose prime factors are all in {2, 3, 5}.
int next_fast_size(int n);

}  // namespace ringloc::fft
