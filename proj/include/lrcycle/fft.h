#ifndef LRCYCLE_FFT_H_
#define LRCYCLE_FFT_H_

#include <complex>
#include <vector>

namespace lrcycle {

// In-place iterative radix-2 DFT, X_k = sum_t x_t exp(-2 pi i k t / N).
// Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

}  // namespace lrcycle

#endif  // LRCYCLE_FFT_H_
