// Compares the OpenMP kernel path against the serial reference on the shapes
// the trainer actually uses, and checks the outputs match bit for bit.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "curla/kernels.hpp"
#include "curla/observation.hpp"
#include "curla/rng.hpp"
#include "curla/sim.hpp"

using namespace curla;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

template <typename Fn>
double time_loop(int iterations, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < iterations; ++i) fn();
  return seconds_since(start) / iterations;
}

void fill(std::vector<double>& v, Rng& rng) {
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
}

void bench_affine(int rows, int cols, int iterations) {
  Rng rng(7);
  std::vector<double> w(static_cast<std::size_t>(rows) * cols), b(rows),
      x(cols), y_par(rows), y_ser(rows), dy(rows);
  std::vector<double> dw_par(w.size(), 0.0), dw_ser(w.size(), 0.0),
      db_par(rows, 0.0), db_ser(rows, 0.0), dx_par(cols), dx_ser(cols);
  fill(w, rng);
  fill(b, rng);
  fill(x, rng);
  fill(dy, rng);

  kernels::set_parallel(true);
  const double fwd_par = time_loop(iterations, [&] {
    kernels::affine(w.data(), b.data(), x.data(), y_par.data(), rows, cols);
  });
  const double bwd_par = time_loop(iterations, [&] {
    kernels::affine_backward(w.data(), x.data(), dy.data(), dw_par.data(),
                             db_par.data(), dx_par.data(), rows, cols);
  });
  const double fwd_ser = time_loop(iterations, [&] {
    kernels::affine_serial(w.data(), b.data(), x.data(), y_ser.data(), rows, cols);
  });
  const double bwd_ser = time_loop(iterations, [&] {
    kernels::affine_backward_serial(w.data(), x.data(), dy.data(),
                                    dw_ser.data(), db_ser.data(),
                                    dx_ser.data(), rows, cols);
  });
  kernels::set_parallel(true);

  const bool match =
      std::memcmp(y_par.data(), y_ser.data(), rows * sizeof(double)) == 0 &&
      std::memcmp(dw_par.data(), dw_ser.data(), dw_par.size() * sizeof(double)) == 0 &&
      std::memcmp(dx_par.data(), dx_ser.data(), cols * sizeof(double)) == 0;
  std::printf("affine %5dx%-5d fwd %8.1f us -> %8.1f us (%.2fx)   bwd %8.1f us -> %8.1f us (%.2fx)   bitwise %s\n",
              rows, cols, fwd_ser * 1e6, fwd_par * 1e6, fwd_ser / fwd_par,
              bwd_ser * 1e6, bwd_par * 1e6, bwd_ser / bwd_par,
              match ? "equal" : "DIFFER");
}

void bench_raster(int iterations) {
  TrackSpec spec;
  spec.shape = TrackShape::Oval;
  spec.straight_length = 40.0;
  spec.end_radius = 15.0;
  const Track track = build_track(spec);
  EnvConfig env_config;
  env_config.traffic_count = 4;
  Environment env(track, env_config);
  env.reset(0);
  for (int i = 0; i < 40; ++i) env.step({0.6, 0.0});
  const EnvSnapshot snap = env.snapshot();
  const RasterConfig raster;

  kernels::set_parallel(true);
  RasterFrame par_frame;
  const double par = time_loop(iterations, [&] { par_frame = rasterize(snap, raster); });
  kernels::set_parallel(false);
  RasterFrame ser_frame;
  const double ser = time_loop(iterations, [&] { ser_frame = rasterize(snap, raster); });
  kernels::set_parallel(true);

  const bool match = par_frame.values == ser_frame.values;
  std::printf("raster %dx%d       %8.1f us -> %8.1f us (%.2fx)   bitwise %s\n",
              raster.width, raster.height, ser * 1e6, par * 1e6, ser / par,
              match ? "equal" : "DIFFER");
}

}  // namespace

int main() {
  std::printf("serial reference vs OpenMP kernels (times per call)\n");
  bench_affine(256, 3200, 50);   // VAE encoder input layer
  bench_affine(3200, 256, 50);   // VAE decoder output layer
  bench_affine(128, 256, 200);   // VAE hidden layer
  bench_affine(64, 64, 2000);    // policy hidden layer (below parallel cutoff)
  bench_raster(20);
  return 0;
}
