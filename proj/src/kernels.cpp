#include "curla/kernels.hpp"

#include <atomic>

namespace curla::kernels {
namespace {

std::atomic<bool> g_parallel{true};

void affine_impl(const double* w, const double* b, const double* x, double* y,
                 int rows, int cols, bool par) {
#pragma omp parallel for schedule(static) if (par)
  for (int r = 0; r < rows; ++r) {
    const double* row = w + static_cast<std::int64_t>(r) * cols;
    double acc = b[r];
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void affine_backward_impl(const double* w, const double* x, const double* dy,
                          double* dw, double* db, double* dx, int rows,
                          int cols, bool par) {
#pragma omp parallel for schedule(static) if (par)
  for (int r = 0; r < rows; ++r) {
    double* dwrow = dw + static_cast<std::int64_t>(r) * cols;
    const double g = dy[r];
    for (int c = 0; c < cols; ++c) dwrow[c] += g * x[c];
    db[r] += g;
  }
  if (dx != nullptr) {
#pragma omp parallel for schedule(static) if (par)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int r = 0; r < rows; ++r)
        acc += w[static_cast<std::int64_t>(r) * cols + c] * dy[r];
      dx[c] = acc;
    }
  }
}

}  // namespace

void set_parallel(bool enabled) {
  g_parallel.store(enabled, std::memory_order_relaxed);
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void affine(const double* w, const double* b, const double* x, double* y,
            int rows, int cols) {
  const bool par = parallel_enabled() &&
                   static_cast<std::int64_t>(rows) * cols >= kParallelWorkThreshold;
  affine_impl(w, b, x, y, rows, cols, par);
}

void affine_serial(const double* w, const double* b, const double* x,
                   double* y, int rows, int cols) {
  affine_impl(w, b, x, y, rows, cols, false);
}

void affine_backward(const double* w, const double* x, const double* dy,
                     double* dw, double* db, double* dx, int rows, int cols) {
  const bool par = parallel_enabled() &&
                   static_cast<std::int64_t>(rows) * cols >= kParallelWorkThreshold;
  affine_backward_impl(w, x, dy, dw, db, dx, rows, cols, par);
}

void affine_backward_serial(const double* w, const double* x, const double* dy,
                            double* dw, double* db, double* dx, int rows,
                            int cols) {
  affine_backward_impl(w, x, dy, dw, db, dx, rows, cols, false);
}

}  // namespace curla::kernels
