#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "bino/parallel.hpp"

namespace bino {

/// Dense row-major matrix of doubles. Everything the network and the loss
/// touch is one of these; column vectors are n x 1.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  Mat(int r, int c, std::vector<double> values) : rows(r), cols(c), a(std::move(values)) {}

  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  size_t size() const { return a.size(); }
  bool empty() const { return a.empty(); }

  void set_zero() { std::fill(a.begin(), a.end(), 0.0); }
  void resize(int r, int c) {
    rows = r;
    cols = c;
    a.assign(static_cast<size_t>(r) * c, 0.0);
  }
};

/// C (+)= op(A) * op(B).  op is transposition, selected per argument.
/// Shapes are checked; mismatches throw std::invalid_argument.
void gemm(Mat& c, const Mat& a, const Mat& b, bool trans_a, bool trans_b,
          bool accumulate, const ExecPolicy& pol);
void gemm_serial(Mat& c, const Mat& a, const Mat& b, bool trans_a, bool trans_b,
                 bool accumulate);
void gemm_omp(Mat& c, const Mat& a, const Mat& b, bool trans_a, bool trans_b,
              bool accumulate);

inline void gemm(Mat& c, const Mat& a, const Mat& b, bool trans_a = false,
                 bool trans_b = false, bool accumulate = false) {
  gemm(c, a, b, trans_a, trans_b, accumulate, par::config());
}

/// Sum of all entries. Deterministic mode keeps a fixed summation order
/// regardless of thread count.
double sum_all(const Mat& m, const ExecPolicy& pol);
double sum_all_serial(const Mat& m);
double sum_all_omp(const Mat& m);
inline double sum_all(const Mat& m) { return sum_all(m, par::config()); }

double dot(const Mat& x, const Mat& y); // flat dot product, shapes must match

double max_abs(const Mat& m);
bool has_nan(const Mat& m);

} // namespace bino
