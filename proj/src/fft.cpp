#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace gsr::detail {
namespace {

// The FFTW planner is not thread-safe; executing an existing plan on fresh
// arrays is. Plans are created once per (size, direction) and never freed.
class PlanCache {
 public:
  fftw_plan get(int width, int height, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(width, height, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    // UNALIGNED: the same codelets run whatever the caller's buffer alignment,
    // which keeps repeated runs bit-identical.
    fftw_plan plan = fftw_plan_dft_2d(height, width, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(int width, int height, int sign, const Complex* in, Complex* out) {
  fftw_plan plan = cache().get(width, height, sign);
  // Out-of-place c2c plans leave the input untouched.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void fft2_forward(int width, int height, const Complex* in, Complex* out) {
  run(width, height, FFTW_FORWARD, in, out);
}

void fft2_backward(int width, int height, const Complex* in, Complex* out) {
  run(width, height, FFTW_BACKWARD, in, out);
}

}  // namespace gsr::detail
