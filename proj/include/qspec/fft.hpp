#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qspec {

// Smallest 5-smooth integer >= n (efficient transform sizes for the
// underlying mixed-radix FFT).
std::size_t next_fast_size(std::size_t n);

// In/out complex DFTs, length = input size. fft computes
// X_k = sum_t x_t exp(-2*pi*i*t*k/N); ifft is its unnormalized inverse
// divided by N (so ifft(fft(x)) == x).
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x);

}  // namespace qspec
