#include "bino/sphere.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "bino/kernels.hpp"
#include "bino/rng.hpp"

namespace bino {

namespace {
using cplx = std::complex<double>;
const cplx kImag(0.0, 1.0);

cplx hankel1_sph(int n, double x) {
  return {std::sph_bessel(static_cast<unsigned>(n), x),
          std::sph_neumann(static_cast<unsigned>(n), x)};
}

cplx ipow(int n) {
  switch (n & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}
} // namespace

SphereSeries SphereSeries::build(double k, double tol, int max_terms) {
  if (!(k > 0)) throw std::invalid_argument("SphereSeries: k must be > 0");
  SphereSeries s;
  s.k = k;
  double scale = 0;
  int quiet = 0;
  for (int n = 0; n < max_terms; ++n) {
    const double jn = std::sph_bessel(static_cast<unsigned>(n), k);
    const cplx hn = hankel1_sph(n, k);
    const cplx cn = -ipow(n) * (2.0 * n + 1.0) * jn / hn;
    s.coeff.push_back(cn);
    // P_n and the far-field factor are O(1); the coefficient magnitude
    // drives convergence.
    const double mag = std::abs(cn) / k;
    scale = std::max(scale, mag);
    quiet = (mag < tol * scale) ? quiet + 1 : 0;
    if (quiet >= 3) break;
  }
  s.n_terms = static_cast<int>(s.coeff.size());
  if (s.n_terms >= max_terms)
    throw std::runtime_error("SphereSeries: series did not converge; increase max_terms");
  return s;
}

std::complex<double> SphereSeries::far_field(double cos_theta) const {
  cplx acc(0, 0);
  for (int n = 0; n < n_terms; ++n) {
    const cplx factor = std::conj(ipow(n + 1)); // (-i)^{n+1}
    acc += factor * coeff[n] * std::legendre(static_cast<unsigned>(n), cos_theta);
  }
  return acc / k;
}

std::complex<double> SphereSeries::scattered(double r, double cos_theta) const {
  cplx acc(0, 0);
  for (int n = 0; n < n_terms; ++n)
    acc += coeff[n] * hankel1_sph(n, k * r) *
           std::legendre(static_cast<unsigned>(n), cos_theta);
  return acc;
}

Mat sphere_far_field(double k, const Mat& directions) {
  const SphereSeries s = SphereSeries::build(k);
  Mat out(directions.rows, 2);
  for (int i = 0; i < directions.rows; ++i) {
    const double ct = directions(i, 2); // unit direction, z component
    const cplx v = s.far_field(ct);
    out(i, 0) = v.real();
    out(i, 1) = v.imag();
  }
  return out;
}

double sphere_near_field_residual(const SphereSeries& series, int n_probe, uint64_t seed) {
  RngStream rng(seed, {0xdead5eedull});
  double worst = 0;
  for (int i = 0; i < n_probe; ++i) {
    // uniform point on the sphere
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    (void)phi; // axisymmetric; kept for clarity of the sampling
    const cplx ui = std::exp(kImag * series.k * z);
    const cplx us = series.scattered(1.0, z);
    worst = std::max(worst, std::abs(ui + us));
  }
  return worst;
}

Mat sphere_collocation_far_field(double k, int n_theta, int n_phi, const Mat& directions) {
  if (n_theta < 8 || n_phi < 8)
    throw std::invalid_argument("sphere_collocation_far_field: grid too coarse");
  using MatC = Eigen::MatrixXcd;
  using VecC = Eigen::VectorXcd;

  const double dth = kPi / n_theta;
  const double dph = 2.0 * kPi / n_phi;
  std::vector<double> theta(n_theta), cell_area(n_theta);
  for (int m = 0; m < n_theta; ++m) {
    theta[m] = (m + 0.5) * dth;
    cell_area[m] = std::sin(theta[m]) * dth * dph;
  }
  const double phi0 = 0.0; // collocation meridian coincides with the q=0 nodes

  // Ring system: collocation at (theta_m, phi0); unknown density per ring.
  MatC a(n_theta, n_theta);
  VecC b(n_theta);
  for (int m = 0; m < n_theta; ++m) {
    const Vec3 y{std::sin(theta[m]) * std::cos(phi0), std::sin(theta[m]) * std::sin(phi0),
                 std::cos(theta[m])};
    for (int n = 0; n < n_theta; ++n) {
      cplx acc(0, 0);
      for (int q = 0; q < n_phi; ++q) {
        const double phi = q * dph;
        if (n == m && q == 0) {
          // Equal-area-disk integral of e^{ikr}/(4 pi r) around the
          // collocation point: (e^{ika} - 1) / (2ik), a = sqrt(area/pi).
          const double adisk = std::sqrt(cell_area[n] / kPi);
          acc += (std::exp(kImag * k * adisk) - 1.0) / (2.0 * kImag * k);
          continue;
        }
        const Vec3 x{std::sin(theta[n]) * std::cos(phi), std::sin(theta[n]) * std::sin(phi),
                     std::cos(theta[n])};
        const KernelValue g = helmholtz3d(x, y, k);
        acc += cplx(g.re, g.im) * cell_area[n];
      }
      a(m, n) = acc;
    }
    b(m) = -std::exp(kImag * k * y.z); // sound-soft data
  }

  Eigen::BDCSVD<MatC> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-8); // k may sit on an interior resonance; drop the null ring
  const VecC rho = svd.solve(b);

  Mat out(directions.rows, 2);
  for (int i = 0; i < directions.rows; ++i) {
    const Vec3 dir{directions(i, 0), directions(i, 1), directions(i, 2)};
    cplx acc(0, 0);
    for (int n = 0; n < n_theta; ++n) {
      for (int q = 0; q < n_phi; ++q) {
        const double phi = q * dph;
        const Vec3 x{std::sin(theta[n]) * std::cos(phi), std::sin(theta[n]) * std::sin(phi),
                     std::cos(theta[n])};
        acc += rho(n) * std::exp(-kImag * k * dot(dir, x)) * cell_area[n];
      }
    }
    acc /= 4.0 * kPi;
    out(i, 0) = acc.real();
    out(i, 1) = acc.imag();
  }
  return out;
}

} // namespace bino
