#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "mbpi/errors.hpp"

namespace mbpi {

namespace {

std::mutex plan_mutex;

// Plans are cached per size; fftw_execute_dft on a cached plan is thread-safe.
fftw_plan plan_for(int m) {
  static std::map<int, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = plans.find(m);
  if (it != plans.end()) return it->second;
  std::vector<std::complex<double>> a(m), b(m);
  fftw_plan p = fftw_plan_dft_1d(m, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(b.data()),
                                 FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw NumericError("fftw plan creation failed");
  plans.emplace(m, p);
  return p;
}

}  // namespace

void forward_dft(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) {
  const int m = static_cast<int>(in.size());
  out.resize(m);
  fftw_execute_dft(plan_for(m), reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace mbpi
