#include "bino/mat.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace bino {

namespace par {

ExecPolicy& config() {
  static ExecPolicy cfg;
  return cfg;
}

int max_threads() { return omp_get_max_threads(); }

} // namespace par

namespace {

void check_gemm_shapes(const Mat& c, const Mat& a, const Mat& b, bool ta, bool tb) {
  const int am = ta ? a.cols : a.rows;
  const int ak = ta ? a.rows : a.cols;
  const int bk = tb ? b.cols : b.rows;
  const int bn = tb ? b.rows : b.cols;
  if (ak != bk || c.rows != am || c.cols != bn)
    throw std::invalid_argument("gemm: shape mismatch");
}

// C[i,:] (+)= sum_k A[i,k] B[k,:].  Four-row blocking keeps the C rows in
// registers while one pass streams B.
inline void gemm_nn_rows(Mat& c, const Mat& a, const Mat& b, bool acc, int i0, int i1) {
  const int n = c.cols, kk = a.cols;
  int i = i0;
  for (; i + 4 <= i1; i += 4) {
    double* c0 = c.row(i);
    double* c1 = c.row(i + 1);
    double* c2 = c.row(i + 2);
    double* c3 = c.row(i + 3);
    if (!acc)
      for (int j = 0; j < n; ++j) c0[j] = c1[j] = c2[j] = c3[j] = 0.0;
    for (int k = 0; k < kk; ++k) {
      const double a0 = a(i, k), a1 = a(i + 1, k), a2 = a(i + 2, k), a3 = a(i + 3, k);
      const double* bk = b.row(k);
#pragma omp simd
      for (int j = 0; j < n; ++j) {
        const double bj = bk[j];
        c0[j] += a0 * bj;
        c1[j] += a1 * bj;
        c2[j] += a2 * bj;
        c3[j] += a3 * bj;
      }
    }
  }
  for (; i < i1; ++i) {
    double* ci = c.row(i);
    if (!acc)
      for (int j = 0; j < n; ++j) ci[j] = 0.0;
    for (int k = 0; k < kk; ++k) {
      const double aik = a(i, k);
      const double* bk = b.row(k);
#pragma omp simd
      for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
}

// C[i,j] (+)= dot(A.row(i), B.row(j)).  Both rows are contiguous.
inline void gemm_nt_rows(Mat& c, const Mat& a, const Mat& b, bool acc, int i0, int i1) {
  const int n = c.cols, kk = a.cols;
  for (int i = i0; i < i1; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b.row(j);
      const double* b1 = b.row(j + 1);
      const double* b2 = b.row(j + 2);
      const double* b3 = b.row(j + 3);
      double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
#pragma omp simd reduction(+ : s0, s1, s2, s3)
      for (int k = 0; k < kk; ++k) {
        const double av = ai[k];
        s0 += av * b0[k];
        s1 += av * b1[k];
        s2 += av * b2[k];
        s3 += av * b3[k];
      }
      if (acc) {
        ci[j] += s0; ci[j + 1] += s1; ci[j + 2] += s2; ci[j + 3] += s3;
      } else {
        ci[j] = s0; ci[j + 1] = s1; ci[j + 2] = s2; ci[j + 3] = s3;
      }
    }
    for (; j < n; ++j) {
      const double* bj = b.row(j);
      double s = 0;
#pragma omp simd reduction(+ : s)
      for (int k = 0; k < kk; ++k) s += ai[k] * bj[k];
      if (acc) ci[j] += s; else ci[j] = s;
    }
  }
}

// C[l,:] (+)= sum_i A[i,l] B[i,:], one pass over the rows of A and B per
// tile of C rows. Tiles keep the active C block L1-resident. Each (l, j)
// cell sees the i loop in index order, so the result does not depend on how
// tiles map to threads.
inline void gemm_tn_rows(Mat& c, const Mat& a, const Mat& b, bool acc, int l0, int l1) {
  const int n = c.cols, m = a.rows;
  constexpr int kTile = 24;
  if (!acc)
    for (int l = l0; l < l1; ++l) {
      double* cl = c.row(l);
      for (int j = 0; j < n; ++j) cl[j] = 0.0;
    }
  for (int lt = l0; lt < l1; lt += kTile) {
    const int le = std::min(l1, lt + kTile);
    for (int i = 0; i < m; ++i) {
      const double* bi = b.row(i);
      const double* airow = a.row(i);
      for (int l = lt; l < le; ++l) {
        const double ail = airow[l];
        double* cl = c.row(l);
#pragma omp simd
        for (int j = 0; j < n; ++j) cl[j] += ail * bi[j];
      }
    }
  }
}

// C (+)= A^T B^T == (B A)^T; rare and small, do it directly.
inline void gemm_tt_rows(Mat& c, const Mat& a, const Mat& b, bool acc, int i0, int i1) {
  const int n = c.cols, kk = a.rows;
  for (int i = i0; i < i1; ++i) {
    double* ci = c.row(i);
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < kk; ++k) s += a(k, i) * b(j, k);
      if (acc) ci[j] += s; else ci[j] = s;
    }
  }
}

inline void gemm_dispatch(Mat& c, const Mat& a, const Mat& b, bool ta, bool tb,
                          bool acc, int r0, int r1) {
  if (!ta && !tb) gemm_nn_rows(c, a, b, acc, r0, r1);
  else if (!ta && tb) gemm_nt_rows(c, a, b, acc, r0, r1);
  else if (ta && !tb) gemm_tn_rows(c, a, b, acc, r0, r1);
  else gemm_tt_rows(c, a, b, acc, r0, r1);
}

} // namespace

void gemm_serial(Mat& c, const Mat& a, const Mat& b, bool ta, bool tb, bool acc) {
  check_gemm_shapes(c, a, b, ta, tb);
  gemm_dispatch(c, a, b, ta, tb, acc, 0, c.rows);
}

void gemm_omp(Mat& c, const Mat& a, const Mat& b, bool ta, bool tb, bool acc) {
  check_gemm_shapes(c, a, b, ta, tb);
  const int m = c.rows;
#pragma omp parallel
  {
    const int nt = omp_get_num_threads();
    const int tid = omp_get_thread_num();
    const int chunk = (m + nt - 1) / nt;
    const int r0 = std::min(m, tid * chunk);
    const int r1 = std::min(m, r0 + chunk);
    if (r0 < r1) gemm_dispatch(c, a, b, ta, tb, acc, r0, r1);
  }
}

void gemm(Mat& c, const Mat& a, const Mat& b, bool ta, bool tb, bool acc,
          const ExecPolicy& pol) {
  if (pol.parallel && c.rows >= 4 && c.size() >= 4096)
    gemm_omp(c, a, b, ta, tb, acc);
  else
    gemm_serial(c, a, b, ta, tb, acc);
}

double sum_all_serial(const Mat& m) {
  double s = 0;
  for (double v : m.a) s += v;
  return s;
}

double sum_all_omp(const Mat& m) {
  const size_t n = m.size();
  double s = 0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (size_t i = 0; i < n; ++i) s += m.a[i];
  return s;
}

double sum_all(const Mat& m, const ExecPolicy& pol) {
  if (pol.deterministic || !pol.parallel || m.size() < (1u << 16))
    return sum_all_serial(m);
  return sum_all_omp(m);
}

double dot(const Mat& x, const Mat& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += x.a[i] * y.a[i];
  return s;
}

double max_abs(const Mat& m) {
  double v = 0;
  for (double x : m.a) v = std::max(v, std::abs(x));
  return v;
}

bool has_nan(const Mat& m) {
  for (double x : m.a)
    if (std::isnan(x)) return true;
  return false;
}

} // namespace bino
