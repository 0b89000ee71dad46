#pragma once
#include <cstdint>

namespace curla::kernels {

// Parallel and serial paths compute every output element with the same
// serial inner loop, each element written by exactly one thread, so results
// are bit-identical regardless of backend or thread count. The toggle only
// affects speed. Tests assert exact equality of the two paths.
void set_parallel(bool enabled);
bool parallel_enabled();

// Work below this many multiply-adds is not worth a parallel region.
inline constexpr int kParallelWorkThreshold = 32768;

// Fixed partition width for chunked gradient accumulation: per-chunk
// buffers reduced in ascending chunk order keep sums independent of the
// thread count.
inline constexpr int kGradChunks = 4;

// y[r] = b[r] + sum_c w[r*cols + c] * x[c]
void affine(const double* w, const double* b, const double* x, double* y,
            int rows, int cols);
void affine_serial(const double* w, const double* b, const double* x,
                   double* y, int rows, int cols);

// Backward of the affine map: accumulates dw[r*cols+c] += dy[r] * x[c],
// db[r] += dy[r], and writes dx[c] = sum_r w[r*cols+c] * dy[r].
// dx may be null when the input gradient is not needed.
void affine_backward(const double* w, const double* x, const double* dy,
                     double* dw, double* db, double* dx, int rows, int cols);
void affine_backward_serial(const double* w, const double* x, const double* dy,
                            double* dw, double* db, double* dx, int rows,
                            int cols);

// Invokes fn(chunk, begin, end) over a fixed kGradChunks-way partition of
// [0, n). The partition does not depend on the thread count; callers that
// accumulate into per-chunk buffers and reduce them in chunk order get the
// same bits with or without OpenMP.
template <typename Fn>
void for_each_chunk(int n, Fn&& fn) {
#pragma omp parallel for schedule(static) if (parallel_enabled())
  for (int chunk = 0; chunk < kGradChunks; ++chunk) {
    const int begin = static_cast<int>(
        static_cast<std::int64_t>(n) * chunk / kGradChunks);
    const int end = static_cast<int>(
        static_cast<std::int64_t>(n) * (chunk + 1) / kGradChunks);
    fn(chunk, begin, end);
  }
}

}  // namespace curla::kernels
