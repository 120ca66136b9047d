#pragma once

#include <vector>

#include "bino/mat.hpp"
#include "bino/parallel.hpp"

namespace bino {

/// Reverse-mode autodiff over matrix-valued nodes.
///
/// Recording an op computes its value immediately. The recorded graph can be
/// re-executed: overwrite input values via input_value() and call forward(),
/// which recomputes every non-leaf node in recording order. backward(root)
/// zeroes all adjoints, seeds d(root) = 1 and replays the ops in reverse,
/// accumulating exact adjoints. Parameters live outside the tape (the model
/// owns value and gradient storage); the tape only references them, so one
/// recorded training graph is reused across optimizer steps.
class Tape {
 public:
  explicit Tape(ExecPolicy pol = par::config()) : pol_(pol) {}

  // Leaves.
  int input(Mat value);             // constant w.r.t. differentiation; mutable between forwards
  int param(Mat* value, Mat* grad); // external storage; grad accumulated by backward()

  // Primitives. Shapes are fixed at record time.
  int matmul(int a, int b);             // [m,k] x [k,n]
  int add(int a, int b);                // same shape
  int sub(int a, int b);                // same shape
  int add_bias(int a, int bias);        // [m,n] + broadcast [1,n]
  int mul(int a, int b);                // elementwise, same shape
  int scale(int a, double c);           // c * a
  int gelu(int a);                      // exact z Phi(z)
  int cos_op(int a);
  int sin_op(int a);
  int fourier_feats(int a);             // [m,n] -> [cos(a) | sin(a)], [m,2n]
  int clamp(int a, double lo, double hi); // zero adjoint where saturated
  int concat_cols(int a, int b);        // [m,na], [m,nb] -> [m,na+nb]
  int slice_row(int a, int row);        // [m,n] -> [1,n]
  int slice_cols(int a, int col0, int col1); // [m,n] -> [m,col1-col0]
  int broadcast_row(int a, int m);      // [1,n] -> [m,n]
  int row_sum(int a);                   // [m,n] -> [m,1]
  int sum_all(int a);                   // [m,n] -> [1,1]

  /// Recompute every non-leaf node in recording order.
  void forward();
  /// Zero all adjoints (including external parameter gradients), seed the
  /// scalar root with 1 and run all adjoint rules in reverse order.
  /// Throws std::invalid_argument if root is not 1x1.
  void backward(int root);

  const Mat& value(int id) const;
  const Mat& grad(int id) const;
  Mat& input_value(int id); // throws unless id is an input leaf

  int node_count() const { return static_cast<int>(nodes_.size()); }
  ExecPolicy& policy() { return pol_; }

  /// Test hook: deliberately mis-scales the GeLU adjoint so gradient
  /// checking must fail. Never set outside negative-control tests.
  void corrupt_gelu_adjoint(bool on) { corrupt_gelu_ = on; }

 private:
  enum class Op {
    kInput, kParam, kMatMul, kAdd, kSub, kAddBias, kMul, kScale, kGelu,
    kCos, kSin, kFourierFeats, kClamp, kConcatCols, kSliceRow, kSliceCols,
    kBroadcastRow, kRowSum, kSumAll
  };

  struct Node {
    Op op;
    int a = -1, b = -1;
    Mat val;
    Mat grd;
    Mat aux;             // op scratch saved for the adjoint (GeLU CDF)
    Mat* pval = nullptr; // set for params
    Mat* pgrd = nullptr;
    double c0 = 0, c1 = 0; // scale factor / clamp bounds
    int i0 = 0, i1 = 0;    // slice bounds / broadcast rows
    // True when a parameter is reachable from this node; adjoints are only
    // stored and propagated where this holds, so constants (inputs) cost
    // nothing in backward().
    bool needs = false;
  };

  std::vector<Node> nodes_;
  ExecPolicy pol_;
  bool corrupt_gelu_ = false;

  const Mat& val(int id) const { return nodes_[id].pval ? *nodes_[id].pval : nodes_[id].val; }
  Mat& grad_buf(int id) { return nodes_[id].pgrd ? *nodes_[id].pgrd : nodes_[id].grd; }
  bool needs(int id) const { return nodes_[id].needs; }
  void ensure_shape(Node& n, int r, int c);
  int push(Node n);
  void compute(int id);
  void adjoint(int id);
};

/// Exact GeLU z * Phi(z) with Phi the standard normal CDF, and its
/// derivative Phi(z) + z phi(z).
double gelu_scalar(double z);
double gelu_derivative(double z);

} // namespace bino
