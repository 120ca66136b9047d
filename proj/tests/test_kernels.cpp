#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "bino/kernels.hpp"

using namespace bino;

namespace {
constexpr double kE = 2.718281828459045235;

// Central difference of a kernel along a direction in its first argument.
template <class F>
double fd_directional(F f, const Vec2& x, const Vec2& dir, double h) {
  return (f({x.x + h * dir.x, x.y + h * dir.y}) - f({x.x - h * dir.x, x.y - h * dir.y})) /
         (2.0 * h);
}

template <class F>
double fd_laplacian2(F f, const Vec2& x, double h) {
  return (f({x.x + h, x.y}) + f({x.x - h, x.y}) + f({x.x, x.y + h}) + f({x.x, x.y - h}) -
          4.0 * f(x)) /
         (h * h);
}

template <class F>
double fd_laplacian3(F f, const Vec3& x, double h) {
  return (f({x.x + h, x.y, x.z}) + f({x.x - h, x.y, x.z}) + f({x.x, x.y + h, x.z}) +
          f({x.x, x.y - h, x.z}) + f({x.x, x.y, x.z + h}) + f({x.x, x.y, x.z - h}) -
          6.0 * f(x)) /
         (h * h);
}

template <class F>
double fd_bilaplacian2(F f, const Vec2& p, double h) {
  const double c = f(p);
  return (20.0 * c - 8.0 * (f({p.x + h, p.y}) + f({p.x - h, p.y}) + f({p.x, p.y + h}) +
                            f({p.x, p.y - h})) +
          2.0 * (f({p.x + h, p.y + h}) + f({p.x - h, p.y + h}) + f({p.x + h, p.y - h}) +
                 f({p.x - h, p.y - h})) +
          f({p.x + 2 * h, p.y}) + f({p.x - 2 * h, p.y}) + f({p.x, p.y + 2 * h}) +
          f({p.x, p.y - 2 * h})) /
         (h * h * h * h);
}
} // namespace

TEST_CASE("laplace2d point values") {
  CHECK(laplace2d({1.0, 0.0}, {0.0, 0.0}).re == 0.0); // ln 1
  CHECK(laplace2d({0.3, -0.2}, {0.3, -0.2}).re == 1.0e5); // clamped at coincidence
  CHECK(laplace2d({kE, 0.0}, {0.0, 0.0}).re ==
        doctest::Approx(-1.0 / (2.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("laplace3d point values") {
  CHECK(laplace3d({1, 0, 0}, {0, 0, 0}).re == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-15));
  CHECK(laplace3d({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}).re == 1.0e5);
  CHECK(laplace3d({2, 0, 0}, {0, 0, 0}).re == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-15));
}

TEST_CASE("biharmonic kernel and its x-normal derivative") {
  CHECK(biharmonic2d({1, 0}, {0, 0}).re == 0.0);       // r^2 ln r at r=1
  CHECK(biharmonic2d({0.4, 0.4}, {0.4, 0.4}).re == 0.0); // continuous extension
  // r=1 with (x-y).n = 1: (2 ln 1 + 1)/(8 pi)
  CHECK(biharmonic2d_dnx({1, 0}, {0, 0}, {1, 0}).re ==
        doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("biharmonic derivative formulas agree with finite differences") {
  // The closed forms are derived, not quoted; this is the gate that they are
  // right, at r in {0.1, 1, 3}.
  const Vec2 y{0.15, -0.4};
  const Vec2 n_x{0.6, 0.8};
  const Vec2 n_y{-0.8, 0.6};
  for (double r : {0.1, 1.0, 3.0}) {
    const Vec2 x{y.x + r * std::cos(0.7), y.y + r * std::sin(0.7)};
    auto g = [&](const Vec2& xx) { return biharmonic2d(xx, y).re; };
    const double fd_dnx = fd_directional(g, x, n_x, 1e-6);
    const double an_dnx = biharmonic2d_dnx(x, y, n_x).re;
    CHECK(an_dnx == doctest::Approx(fd_dnx).epsilon(1e-7));

    auto gy = [&](const Vec2& yy) { return biharmonic2d(x, yy).re; };
    const double fd_dny = fd_directional(gy, y, n_y, 1e-6);
    const double an_dny = biharmonic2d_dny(x, y, n_y).re;
    CHECK(an_dny == doctest::Approx(fd_dny).epsilon(1e-7));

    // mixed derivative: difference the analytic dnx along n_y in y
    auto gnx = [&](const Vec2& yy) { return biharmonic2d_dnx(x, yy, n_x).re; };
    const double fd_mixed = fd_directional(gnx, y, n_y, 1e-6);
    const double an_mixed = biharmonic2d_dnxdny(x, y, n_x, n_y).re;
    CHECK(an_mixed == doctest::Approx(fd_mixed).epsilon(1e-6));
  }
}

TEST_CASE("helmholtz3d point values") {
  const Vec3 o{0, 0, 0};
  const KernelValue k0 = helmholtz3d({1, 0, 0}, o, 0.0);
  CHECK(k0.re == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-15));
  CHECK(k0.im == 0.0);

  const KernelValue k1 = helmholtz3d({0, 1, 0}, o, 2.0 * kPi);
  CHECK(std::abs(k1.re - 1.0 / (4.0 * kPi)) < 1e-14);
  CHECK(std::abs(k1.im) < 1e-14);

  const KernelValue k2 = helmholtz3d({0, 0, 0.5}, o, 2.0 * kPi);
  CHECK(k2.re == doctest::Approx(-1.0 / (2.0 * kPi)).epsilon(1e-12));
  CHECK(std::abs(k2.im) < 1e-12);
}

TEST_CASE("truncation rule") {
  const TruncationRule rule{1.0e5};
  const KernelValue a = truncate({2.0e5, 0.0}, rule);
  CHECK(a.re == 1.0e5);
  CHECK(a.im == 0.0);
  const KernelValue b = truncate({std::nan(""), -3.0e5}, rule);
  CHECK(b.re == 1.0e5);
  CHECK(b.im == -1.0e5);
  const KernelValue c = truncate({1.0, -1.0}, rule);
  CHECK(c.re == 1.0);
  CHECK(c.im == -1.0);
  // idempotence
  const KernelValue d = truncate(truncate({7.7e9, std::nan("")}, rule), rule);
  CHECK(d.re == 1.0e5);
  CHECK(d.im == 1.0e5);
}

TEST_CASE("kernel symmetry is exact") {
  const Vec2 x{0.3, 1.2}, y{-0.7, 0.4};
  CHECK(laplace2d(x, y).re == laplace2d(y, x).re);
  CHECK(biharmonic2d(x, y).re == biharmonic2d(y, x).re);
  const Vec3 x3{0.3, 1.2, -0.5}, y3{-0.7, 0.4, 0.9};
  CHECK(laplace3d(x3, y3).re == laplace3d(y3, x3).re);
  const KernelValue h1 = helmholtz3d(x3, y3, 2.0 * kPi);
  const KernelValue h2 = helmholtz3d(y3, x3, 2.0 * kPi);
  CHECK(h1.re == h2.re);
  CHECK(h1.im == h2.im);
}

TEST_CASE("finite-difference pde residuals of the kernels") {
  const Vec2 y2{0.05, -0.1};
  const Vec3 y3{0.05, -0.1, 0.2};
  auto g2 = [&](const Vec2& x) { return laplace2d(x, y2).re; };
  auto g3 = [&](const Vec3& x) { return laplace3d(x, y3).re; };
  const double k = 2.0 * kPi;
  auto hre = [&](const Vec3& x) { return helmholtz3d(x, y3, k).re; };
  auto him = [&](const Vec3& x) { return helmholtz3d(x, y3, k).im; };
  auto bih = [&](const Vec2& x) { return biharmonic2d(x, y2).re; };

  for (double r : {0.5, 1.0, 2.0}) {
    const Vec2 x2{y2.x + r * std::cos(0.3), y2.y + r * std::sin(0.3)};
    CHECK(std::abs(fd_laplacian2(g2, x2, 1e-4)) < 1e-4);
    const Vec3 x3{y3.x + r * 0.36, y3.y + r * 0.48, y3.z + r * 0.8};
    CHECK(std::abs(fd_laplacian3(g3, x3, 1e-4)) < 1e-4);
    CHECK(std::abs(fd_laplacian3(hre, x3, 1e-4) + k * k * hre(x3)) < 1e-3);
    CHECK(std::abs(fd_laplacian3(him, x3, 1e-4) + k * k * him(x3)) < 1e-3);
  }
  for (double r : {1.0, 2.0, 3.0}) {
    const Vec2 x2{y2.x + r * std::cos(1.1), y2.y + r * std::sin(1.1)};
    CHECK(std::abs(fd_bilaplacian2(bih, x2, 1e-2)) < 1e-2);
  }
}
