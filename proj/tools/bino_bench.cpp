// Times the serial reference kernels against their OpenMP counterparts:
// dense matmul (forward and both adjoint layouts), kernel-matrix assembly,
// and a full loss forward+backward step for each problem.

#include <chrono>
#include <cstdio>

#include "bino/bie.hpp"
#include "bino/mat.hpp"
#include "bino/rng.hpp"

using namespace bino;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
  fn(); // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

Mat random_mat(int r, int c, uint64_t seed) {
  Mat m(r, c);
  RngStream rng(seed, {0xbe9cull});
  for (double& v : m.a) v = rng.uniform(-1.0, 1.0);
  return m;
}

void bench_gemm(int m, int k, int n) {
  const Mat a = random_mat(m, k, 1);
  const Mat b = random_mat(k, n, 2);
  Mat c(m, n);
  const double flops = 2.0 * m * k * n;
  for (int variant = 0; variant < 3; ++variant) {
    const bool ta = variant == 1, tb = variant == 2;
    const Mat& aa = ta ? random_mat(k, m, 3) : a;
    const Mat& bb = tb ? random_mat(n, k, 4) : b;
    const double serial =
        time_ms(3, [&] { gemm_serial(c, aa, bb, ta, tb, false); });
    const double omp = time_ms(3, [&] { gemm_omp(c, aa, bb, ta, tb, false); });
    std::printf("  gemm %c%c %4dx%4dx%4d  serial %8.2f ms (%5.2f GF/s)  omp %8.2f ms (%5.2f GF/s)  speedup %.2fx\n",
                ta ? 'T' : 'N', tb ? 'T' : 'N', m, k, n, serial, flops / serial / 1e6, omp,
                flops / omp / 1e6, serial / omp);
  }
}

void bench_loss(PdeKind pde, const char* name) {
  ProblemSpec spec;
  spec.pde = pde;
  if (pde == PdeKind::kHelmholtz3D) {
    spec.t_min = 0.0;
    spec.t_max = 0.5;
  } else if (pde == PdeKind::kBiharmonic2D) {
    spec.curve_family = CurveFamily::kBiharmonicStar;
  }
  NetworkConfig net;
  net.coord_dim = spec.coord_dim();
  net.n_out = spec.n_out();
  net.fourier_features = 64 * net.coord_dim;
  OperatorModel model(net, 0);
  const BatchShape shape{4, 100, 1000};
  const TrainBatch batch = make_batch(spec, shape, 0, 0);

  for (int par = 0; par <= 1; ++par) {
    const ExecPolicy pol{par == 1, true};
    LossGraph graph(model, spec, shape, pol);
    const double fwd = time_ms(3, [&] { graph.forward(batch); });
    const double bwd = time_ms(3, [&] { graph.backward(); });
    std::printf("  %-12s %-6s  forward %8.2f ms   backward %8.2f ms\n", name,
                par ? "omp" : "serial", fwd, bwd);
  }
}

} // namespace

int main() {
  std::printf("threads available: %d\n\n", par::max_threads());
  std::printf("dense kernels:\n");
  bench_gemm(2000, 356, 100);
  bench_gemm(8000, 484, 100);
  std::printf("\nloss graph (N_t=4, N_y=100, M=1000):\n");
  bench_loss(PdeKind::kLaplace2D, "laplace");
  bench_loss(PdeKind::kBiharmonic2D, "biharmonic");
  bench_loss(PdeKind::kHelmholtz3D, "helmholtz");
  return 0;
}
