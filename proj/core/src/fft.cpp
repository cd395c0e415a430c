#include "qpb/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace qpb {
namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plans;

fftw_plan plan_for(int rows, int cols, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(rows, cols, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  // Planning scratch only; FFTW_ESTIMATE does not touch the arrays.
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
  fftw_plan p = fftw_plan_dft_2d(rows, cols, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  plans.emplace(key, p);
  return p;
}

void run(CGrid& a, int sign) {
  if (a.size() == 0) return;
  fftw_plan p = plan_for(a.rows(), a.cols(), sign);
  auto* d = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(p, d, d);
}

}  // namespace

void fft2_forward(CGrid& a) { run(a, FFTW_FORWARD); }
void fft2_inverse(CGrid& a) { run(a, FFTW_BACKWARD); }

double fft_frequency(int i, int n, double d) {
  int k = i < (n + 1) / 2 ? i : i - n;
  return static_cast<double>(k) / (n * d);
}

}  // namespace qpb
