#include "bino/tape.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace bino {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

template <class F>
void elementwise(Mat& out, const Mat& in, const ExecPolicy& pol, F f) {
  const long n = static_cast<long>(in.size());
  if (pol.parallel && n >= 4096) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out.a[i] = f(in.a[i]);
  } else {
    for (long i = 0; i < n; ++i) out.a[i] = f(in.a[i]);
  }
}

template <class F>
void elementwise_acc(Mat& acc, const Mat& x, const Mat& y, const ExecPolicy& pol, F f) {
  const long n = static_cast<long>(acc.size());
  if (pol.parallel && n >= 4096) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) acc.a[i] += f(x.a[i], y.a[i]);
  } else {
    for (long i = 0; i < n; ++i) acc.a[i] += f(x.a[i], y.a[i]);
  }
}

// acc[j] += sum_i d(i, j). Columns are partitioned across threads and each
// column is summed in row order, so the result is thread-count independent.
void add_col_sums(Mat& acc, const Mat& d, const ExecPolicy& pol) {
  const int m = d.rows, c = d.cols;
  if (pol.parallel && d.size() >= 65536 && c >= 2) {
#pragma omp parallel
    {
      const int nt = omp_get_num_threads();
      const int tid = omp_get_thread_num();
      const int chunk = (c + nt - 1) / nt;
      const int j0 = std::min(c, tid * chunk);
      const int j1 = std::min(c, j0 + chunk);
      if (j0 < j1)
        for (int i = 0; i < m; ++i) {
          const double* di = d.row(i);
          for (int j = j0; j < j1; ++j) acc.a[j] += di[j];
        }
    }
  } else {
    for (int i = 0; i < m; ++i) {
      const double* di = d.row(i);
      for (int j = 0; j < c; ++j) acc.a[j] += di[j];
    }
  }
}
} // namespace

double gelu_scalar(double z) { return z * 0.5 * (1.0 + std::erf(z * kInvSqrt2)); }

double gelu_derivative(double z) {
  const double phi_cdf = 0.5 * (1.0 + std::erf(z * kInvSqrt2));
  const double phi_pdf = kInvSqrt2Pi * std::exp(-0.5 * z * z);
  return phi_cdf + z * phi_pdf;
}

void Tape::ensure_shape(Node& n, int r, int c) {
  if (n.val.rows != r || n.val.cols != c) n.val.resize(r, c);
  if (n.needs && (n.grd.rows != r || n.grd.cols != c)) n.grd.resize(r, c);
}

int Tape::push(Node n) {
  if (n.op == Op::kParam) n.needs = true;
  else if (n.op != Op::kInput)
    n.needs = (n.a >= 0 && nodes_[n.a].needs) || (n.b >= 0 && nodes_[n.b].needs);
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  if (nodes_[id].op != Op::kInput && nodes_[id].op != Op::kParam) compute(id);
  return id;
}

int Tape::input(Mat value) {
  Node n;
  n.op = Op::kInput;
  n.val = std::move(value);
  return push(std::move(n));
}

int Tape::param(Mat* value, Mat* grad) {
  if (!value || !grad || value->rows != grad->rows || value->cols != grad->cols)
    throw std::invalid_argument("Tape::param: value/grad storage mismatch");
  Node n;
  n.op = Op::kParam;
  n.pval = value;
  n.pgrd = grad;
  return push(std::move(n));
}

#define BINO_BINARY(NAME, OPK)                         \
  int Tape::NAME(int a, int b) {                       \
    Node n;                                            \
    n.op = OPK;                                        \
    n.a = a;                                           \
    n.b = b;                                           \
    return push(std::move(n));                         \
  }

BINO_BINARY(matmul, Op::kMatMul)
BINO_BINARY(add, Op::kAdd)
BINO_BINARY(sub, Op::kSub)
BINO_BINARY(add_bias, Op::kAddBias)
BINO_BINARY(mul, Op::kMul)
BINO_BINARY(concat_cols, Op::kConcatCols)
#undef BINO_BINARY

int Tape::scale(int a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.c0 = c;
  return push(std::move(n));
}

#define BINO_UNARY(NAME, OPK)   \
  int Tape::NAME(int a) {       \
    Node n;                     \
    n.op = OPK;                 \
    n.a = a;                    \
    return push(std::move(n));  \
  }

BINO_UNARY(gelu, Op::kGelu)
BINO_UNARY(cos_op, Op::kCos)
BINO_UNARY(sin_op, Op::kSin)
BINO_UNARY(fourier_feats, Op::kFourierFeats)
BINO_UNARY(row_sum, Op::kRowSum)
BINO_UNARY(sum_all, Op::kSumAll)
#undef BINO_UNARY

int Tape::clamp(int a, double lo, double hi) {
  Node n;
  n.op = Op::kClamp;
  n.a = a;
  n.c0 = lo;
  n.c1 = hi;
  return push(std::move(n));
}

int Tape::slice_row(int a, int row) {
  Node n;
  n.op = Op::kSliceRow;
  n.a = a;
  n.i0 = row;
  return push(std::move(n));
}

int Tape::slice_cols(int a, int col0, int col1) {
  Node n;
  n.op = Op::kSliceCols;
  n.a = a;
  n.i0 = col0;
  n.i1 = col1;
  return push(std::move(n));
}

int Tape::broadcast_row(int a, int m) {
  Node n;
  n.op = Op::kBroadcastRow;
  n.a = a;
  n.i0 = m;
  return push(std::move(n));
}

void Tape::compute(int id) {
  Node& n = nodes_[id];
  switch (n.op) {
    case Op::kInput:
    case Op::kParam:
      return;
    case Op::kMatMul: {
      const Mat& a = val(n.a);
      const Mat& b = val(n.b);
      ensure_shape(n, a.rows, b.cols);
      gemm(n.val, a, b, false, false, false, pol_);
      return;
    }
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul: {
      const Mat& a = val(n.a);
      const Mat& b = val(n.b);
      if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument("Tape: elementwise shape mismatch");
      ensure_shape(n, a.rows, a.cols);
      const long sz = static_cast<long>(a.size());
      const Op op = n.op;
      Mat& out = n.val;
      auto body = [&](long i) {
        out.a[i] = op == Op::kAdd ? a.a[i] + b.a[i]
                 : op == Op::kSub ? a.a[i] - b.a[i]
                                  : a.a[i] * b.a[i];
      };
      if (pol_.parallel && sz >= 4096) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < sz; ++i) body(i);
      } else {
        for (long i = 0; i < sz; ++i) body(i);
      }
      return;
    }
    case Op::kAddBias: {
      const Mat& a = val(n.a);
      const Mat& b = val(n.b);
      if (b.rows != 1 || b.cols != a.cols)
        throw std::invalid_argument("Tape: bias must be [1, cols]");
      ensure_shape(n, a.rows, a.cols);
      Mat& out = n.val;
      const int m = a.rows, c = a.cols;
#pragma omp parallel for schedule(static) if (pol_.parallel && a.size() >= 4096)
      for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (int j = 0; j < c; ++j) oi[j] = ai[j] + b.a[j];
      }
      return;
    }
    case Op::kScale: {
      const Mat& a = val(n.a);
      ensure_shape(n, a.rows, a.cols);
      const double c = n.c0;
      elementwise(n.val, a, pol_, [c](double v) { return c * v; });
      return;
    }
    case Op::kGelu: {
      const Mat& a = val(n.a);
      ensure_shape(n, a.rows, a.cols);
      // save Phi(z) so the adjoint pass does not re-evaluate erf
      if (n.aux.rows != a.rows || n.aux.cols != a.cols) n.aux.resize(a.rows, a.cols);
      Mat& cdf = n.aux;
      Mat& out = n.val;
      const long sz = static_cast<long>(a.size());
#pragma omp parallel for schedule(static) if (pol_.parallel && sz >= 4096)
      for (long i = 0; i < sz; ++i) {
        const double z = a.a[i];
        const double c = 0.5 * (1.0 + std::erf(z * kInvSqrt2));
        cdf.a[i] = c;
        out.a[i] = z * c;
      }
      return;
    }
    case Op::kFourierFeats: {
      const Mat& a = val(n.a);
      ensure_shape(n, a.rows, 2 * a.cols);
      Mat& out = n.val;
      const int m = a.rows, nc = a.cols;
#pragma omp parallel for schedule(static) if (pol_.parallel && a.size() >= 4096)
      for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (int j = 0; j < nc; ++j) ::sincos(ai[j], oi + nc + j, oi + j);
      }
      return;
    }
    case Op::kCos: {
      const Mat& a = val(n.a);
      ensure_shape(n, a.rows, a.cols);
      elementwise(n.val, a, pol_, [](double v) { return std::cos(v); });
      return;
    }
    case Op::kSin: {
      const Mat& a = val(n.a);
      ensure_shape(n, a.rows, a.cols);
      elementwise(n.val, a, pol_, [](double v) { return std::sin(v); });
      return;
    }
    case Op::kClamp: {
      const Mat& a = val(n.a);
      ensure_shape(n, a.rows, a.cols);
      const double lo = n.c0, hi = n.c1;
      elementwise(n.val, a, pol_, [lo, hi](double v) {
        if (std::isnan(v)) return hi;
        return v < lo ? lo : (v > hi ? hi : v);
      });
      return;
    }
    case Op::kConcatCols: {
      const Mat& a = val(n.a);
      const Mat& b = val(n.b);
      if (a.rows != b.rows) throw std::invalid_argument("Tape: concat row mismatch");
      ensure_shape(n, a.rows, a.cols + b.cols);
      Mat& out = n.val;
      const int m = a.rows;
#pragma omp parallel for schedule(static) if (pol_.parallel && out.size() >= 65536)
      for (int i = 0; i < m; ++i) {
        double* oi = out.row(i);
        const double* ai = a.row(i);
        const double* bi = b.row(i);
        for (int j = 0; j < a.cols; ++j) oi[j] = ai[j];
        for (int j = 0; j < b.cols; ++j) oi[a.cols + j] = bi[j];
      }
      return;
    }
    case Op::kSliceRow: {
      const Mat& a = val(n.a);
      if (n.i0 < 0 || n.i0 >= a.rows) throw std::invalid_argument("Tape: slice_row out of range");
      ensure_shape(n, 1, a.cols);
      const double* ai = a.row(n.i0);
      for (int j = 0; j < a.cols; ++j) n.val.a[j] = ai[j];
      return;
    }
    case Op::kSliceCols: {
      const Mat& a = val(n.a);
      if (n.i0 < 0 || n.i1 > a.cols || n.i0 >= n.i1)
        throw std::invalid_argument("Tape: slice_cols out of range");
      const int w = n.i1 - n.i0;
      ensure_shape(n, a.rows, w);
      Mat& out = n.val;
      for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i) + n.i0;
        double* oi = out.row(i);
        for (int j = 0; j < w; ++j) oi[j] = ai[j];
      }
      return;
    }
    case Op::kBroadcastRow: {
      const Mat& a = val(n.a);
      if (a.rows != 1) throw std::invalid_argument("Tape: broadcast_row needs [1, n]");
      ensure_shape(n, n.i0, a.cols);
      Mat& out = n.val;
      const int m = n.i0;
#pragma omp parallel for schedule(static) if (pol_.parallel && out.size() >= 65536)
      for (int i = 0; i < m; ++i) {
        double* oi = out.row(i);
        for (int j = 0; j < a.cols; ++j) oi[j] = a.a[j];
      }
      return;
    }
    case Op::kRowSum: {
      const Mat& a = val(n.a);
      ensure_shape(n, a.rows, 1);
      Mat& out = n.val;
      const int m = a.rows;
#pragma omp parallel for schedule(static) if (pol_.parallel && a.size() >= 65536)
      for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double s = 0;
        for (int j = 0; j < a.cols; ++j) s += ai[j];
        out.a[i] = s;
      }
      return;
    }
    case Op::kSumAll: {
      const Mat& a = val(n.a);
      ensure_shape(n, 1, 1);
      n.val.a[0] = bino::sum_all(a, pol_);
      return;
    }
  }
}

void Tape::adjoint(int id) {
  Node& n = nodes_[id];
  if (!n.needs) return;
  const Mat& d = n.grd;
  const bool na = n.a >= 0 && nodes_[n.a].needs;
  const bool nb = n.b >= 0 && nodes_[n.b].needs;
  switch (n.op) {
    case Op::kInput:
    case Op::kParam:
      return;
    case Op::kMatMul: {
      if (na) gemm(grad_buf(n.a), d, val(n.b), false, true, true, pol_);  // dA += dC B^T
      if (nb) gemm(grad_buf(n.b), val(n.a), d, true, false, true, pol_);  // dB += A^T dC
      return;
    }
    case Op::kAdd: {
      if (na) elementwise_acc(grad_buf(n.a), d, d, pol_, [](double x, double) { return x; });
      if (nb) elementwise_acc(grad_buf(n.b), d, d, pol_, [](double x, double) { return x; });
      return;
    }
    case Op::kSub: {
      if (na) elementwise_acc(grad_buf(n.a), d, d, pol_, [](double x, double) { return x; });
      if (nb) elementwise_acc(grad_buf(n.b), d, d, pol_, [](double x, double) { return -x; });
      return;
    }
    case Op::kAddBias: {
      if (na) elementwise_acc(grad_buf(n.a), d, d, pol_, [](double x, double) { return x; });
      if (nb) add_col_sums(grad_buf(n.b), d, pol_);
      return;
    }
    case Op::kMul: {
      if (na) elementwise_acc(grad_buf(n.a), d, val(n.b), pol_, [](double x, double y) { return x * y; });
      if (nb) elementwise_acc(grad_buf(n.b), d, val(n.a), pol_, [](double x, double y) { return x * y; });
      return;
    }
    case Op::kScale: {
      if (!na) return;
      const double c = n.c0;
      elementwise_acc(grad_buf(n.a), d, d, pol_, [c](double x, double) { return c * x; });
      return;
    }
    case Op::kGelu: {
      if (!na) return;
      const double bias = corrupt_gelu_ ? 1.01 : 1.0;
      Mat& da = grad_buf(n.a);
      const Mat& z = val(n.a);
      const Mat& cdf = n.aux;
      const long sz = static_cast<long>(da.size());
#pragma omp parallel for schedule(static) if (pol_.parallel && sz >= 4096)
      for (long i = 0; i < sz; ++i) {
        const double zi = z.a[i];
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * zi * zi);
        da.a[i] += bias * d.a[i] * (cdf.a[i] + zi * pdf);
      }
      return;
    }
    case Op::kFourierFeats: {
      if (!na) return;
      Mat& da = grad_buf(n.a);
      const Mat& out = n.val; // cos | sin values, reused as the derivatives
      const int m = d.rows, nc = da.cols;
#pragma omp parallel for schedule(static) if (pol_.parallel && d.size() >= 4096)
      for (int i = 0; i < m; ++i) {
        const double* di = d.row(i);
        const double* oi = out.row(i);
        double* dai = da.row(i);
        for (int j = 0; j < nc; ++j)
          dai[j] += -oi[nc + j] * di[j] + oi[j] * di[nc + j];
      }
      return;
    }
    case Op::kCos: {
      if (na)
        elementwise_acc(grad_buf(n.a), d, val(n.a), pol_,
                        [](double x, double z) { return -x * std::sin(z); });
      return;
    }
    case Op::kSin: {
      if (na)
        elementwise_acc(grad_buf(n.a), d, val(n.a), pol_,
                        [](double x, double z) { return x * std::cos(z); });
      return;
    }
    case Op::kClamp: {
      if (!na) return;
      const double lo = n.c0, hi = n.c1;
      elementwise_acc(grad_buf(n.a), d, val(n.a), pol_, [lo, hi](double x, double z) {
        return (std::isnan(z) || z <= lo || z >= hi) ? 0.0 : x;
      });
      return;
    }
    case Op::kConcatCols: {
      if (!na && !nb) return;
      const int m = d.rows;
      Mat* da = na ? &grad_buf(n.a) : nullptr;
      Mat* db = nb ? &grad_buf(n.b) : nullptr;
      const int ca = val(n.a).cols;
#pragma omp parallel for schedule(static) if (pol_.parallel && d.size() >= 65536)
      for (int i = 0; i < m; ++i) {
        const double* di = d.row(i);
        if (da) {
          double* dai = da->row(i);
          for (int j = 0; j < ca; ++j) dai[j] += di[j];
        }
        if (db) {
          double* dbi = db->row(i);
          for (int j = 0; j < d.cols - ca; ++j) dbi[j] += di[ca + j];
        }
      }
      return;
    }
    case Op::kSliceRow: {
      if (!na) return;
      double* row = grad_buf(n.a).row(n.i0);
      for (int j = 0; j < d.cols; ++j) row[j] += d.a[j];
      return;
    }
    case Op::kSliceCols: {
      if (!na) return;
      Mat& da = grad_buf(n.a);
      for (int i = 0; i < d.rows; ++i) {
        const double* di = d.row(i);
        double* dai = da.row(i) + n.i0;
        for (int j = 0; j < d.cols; ++j) dai[j] += di[j];
      }
      return;
    }
    case Op::kBroadcastRow: {
      if (na) add_col_sums(grad_buf(n.a), d, pol_);
      return;
    }
    case Op::kRowSum: {
      if (!na) return;
      Mat& da = grad_buf(n.a);
      const int m = d.rows;
#pragma omp parallel for schedule(static) if (pol_.parallel && da.size() >= 65536)
      for (int i = 0; i < m; ++i) {
        const double di = d.a[i];
        double* dai = da.row(i);
        for (int j = 0; j < da.cols; ++j) dai[j] += di;
      }
      return;
    }
    case Op::kSumAll: {
      if (!na) return;
      Mat& da = grad_buf(n.a);
      const double di = d.a[0];
      const long sz = static_cast<long>(da.size());
#pragma omp parallel for schedule(static) if (pol_.parallel && sz >= 4096)
      for (long i = 0; i < sz; ++i) da.a[i] += di;
      return;
    }
  }
}

void Tape::forward() {
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) compute(id);
}

void Tape::backward(int root) {
  if (root < 0 || root >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("Tape::backward: bad root id");
  if (val(root).rows != 1 || val(root).cols != 1)
    throw std::invalid_argument("Tape::backward: root must be a 1x1 scalar");
  for (Node& n : nodes_) {
    if (n.pgrd) n.pgrd->set_zero();
    else if (n.needs) n.grd.set_zero();
  }
  Node& r = nodes_[root];
  if (r.grd.rows != 1 || r.grd.cols != 1) r.grd.resize(1, 1);
  r.grd.a[0] = 1.0;
  if (!r.needs) return; // no parameters reachable; gradients are all zero
  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) adjoint(id);
}

const Mat& Tape::value(int id) const { return val(id); }

const Mat& Tape::grad(int id) const {
  return nodes_[id].pgrd ? *nodes_[id].pgrd : nodes_[id].grd;
}

Mat& Tape::input_value(int id) {
  if (nodes_[id].op != Op::kInput)
    throw std::invalid_argument("Tape::input_value: node is not an input");
  return nodes_[id].val;
}

} // namespace bino
