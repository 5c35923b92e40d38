#include "qspec/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace qspec {

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  while (true) {
    std::size_t m = n;
    while (m % 2 == 0) m /= 2;
    while (m % 3 == 0) m /= 3;
    while (m % 5 == 0) m /= 5;
    if (m == 1) return n;
    ++n;
  }
}

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> engine;
  std::vector<std::complex<double>> out;
  engine.fwd(out, x);
  return out;
}

std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> engine;
  std::vector<std::complex<double>> out;
  engine.inv(out, x);
  return out;
}

}  // namespace qspec
