#pragma once

#include <complex>
#include <vector>

namespace mbpi {

// out_j = sum_k in_k e^{-2 pi i jk/M}
void forward_dft(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out);

}  // namespace mbpi
