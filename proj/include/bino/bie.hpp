#pragma once

#include <functional>
#include <vector>

#include "bino/network.hpp"
#include "bino/problem.hpp"

namespace bino {

/// Batch dimensions: N_t geometry draws, N_y observation points per
/// geometry, M integration points per geometry.
struct BatchShape {
  int n_t = 10;
  int n_y = 100;
  int m = 3000;
};

struct GeomBatch {
  double t = 0;
  BoundarySample quad; // integration set B_j
  BoundarySample obs;  // observation points on the same boundary
  Mat targets;         // [n_y x n_targets]
};

struct TrainBatch {
  std::vector<GeomBatch> geoms;
  BatchShape shape;
};

/// Draw a training batch. All randomness is counter-based on
/// (seed, purpose, step, geometry index), so batches are reproducible and
/// independent of evaluation order.
TrainBatch make_batch(const ProblemSpec& spec, const BatchShape& shape, uint64_t seed,
                      uint64_t step);

/// Monte-Carlo boundary representation evaluated at arbitrary points:
///   Laplace/Helmholtz  u(y) =  (measure/M) sum_k v_k u*(x_k, y)
///   Biharmonic         u(y) = -(measure/M) sum_k [w_k u* + v_k du*/dn_x]
/// v has n_out columns (biharmonic: col 0 = v, col 1 = w; Helmholtz:
/// re, im). Output has 1 column, or 2 for Helmholtz.
Mat eval_representation(const ProblemSpec& spec, const BoundarySample& quad, const Mat& v,
                        const Mat& pts);

/// Normal derivative of the biharmonic representation at boundary points.
Mat eval_representation_dn(const ProblemSpec& spec, const BoundarySample& quad,
                           const Mat& v, const BoundarySample& obs);

/// Any source of boundary potential values: the trained network, or an
/// injected oracle density (e.g. a Nystrom solve used as a lookup table).
using PotentialFn = std::function<Mat(double t, const BoundarySample& quad)>;

/// The Monte-Carlo boundary loss: mean over observation points and geometry
/// draws of the squared residual between the represented boundary values and
/// the boundary data (complex modulus for Helmholtz; the biharmonic adds the
/// Neumann residual with unit weight).
double mc_loss(const ProblemSpec& spec, const TrainBatch& batch, const PotentialFn& fn);

PotentialFn model_potential_fn(const OperatorModel& model);

/// The same loss recorded as a differentiable graph. The structure is
/// recorded once per (spec, shape); each step loads a fresh batch into the
/// input nodes and re-runs the tape.
class LossGraph {
 public:
  LossGraph(OperatorModel& model, const ProblemSpec& spec, const BatchShape& shape,
            ExecPolicy pol = par::config());

  /// Load batch values into the graph inputs, run forward, return the loss.
  double forward(const TrainBatch& batch);
  /// Re-run the forward pass on the already-loaded inputs (after parameter
  /// changes) and return the loss.
  double refresh();
  /// Accumulate d(loss)/d(params) into the model's gradient buffers.
  void backward();
  double loss_value() const;
  Tape& tape() { return tape_; }
  int loss_node() const { return loss_; }

 private:
  OperatorModel& model_;
  ProblemSpec spec_;
  BatchShape shape_;
  Tape tape_;
  int t_in_ = -1, loss_ = -1;
  struct GeomNodes {
    int x = -1;
    std::vector<int> kmats;   // kernel matrix inputs, pde-dependent count
    std::vector<int> targets; // one [n_y x 1] input per target channel
  };
  std::vector<GeomNodes> gnodes_;

  void load(const TrainBatch& batch);
};

/// Far-field pattern of the represented scattered wave (Helmholtz):
///   u_inf(dir) = (1/4pi) (measure/M) sum_k e^{-ik dir.x_k} v_k.
/// directions are [n x 3] unit vectors; output [n x 2] (re, im).
Mat far_field(const ProblemSpec& spec, const BoundarySample& quad, const Mat& v,
              const Mat& directions);

/// Squared-norm error ratio sum|pred-truth|^2 / sum|truth|^2 over all
/// entries. Throws std::domain_error on identically zero truth.
double relative_l2(const Mat& pred, const Mat& truth);

// --- model-driven evaluation (fresh fixed-seed quadrature of size m_eval) ---
Mat eval_field(const OperatorModel& model, const ProblemSpec& spec, double t,
               const Mat& pts, int m_eval, uint64_t eval_seed);
Mat far_field_model(const OperatorModel& model, const ProblemSpec& spec, double t,
                    const Mat& directions, int m_eval, uint64_t eval_seed);
/// Incident plus scattered field on a point set (Helmholtz).
Mat total_field(const OperatorModel& model, const ProblemSpec& spec, double t,
                const Mat& pts, int m_eval, uint64_t eval_seed);

/// Evaluation grids, masked away from the boundary.
struct FieldGrid {
  Mat points; // kept points, [n x d]
};

/// n x n grid over the curve's bounding box, keeping points inside the curve
/// with normal clearance at least delta.
FieldGrid make_interior_grid(const ParamCurve2D& curve, double t, int n, double delta);

/// n x n slice grid at y = 0 over (x, z) in [box_lo, box_hi]^2, masking the
/// solid hemispheres and a delta-collar around their surfaces.
FieldGrid make_slice_grid(double t, int n, double box_lo, double box_hi, double delta);

/// Latitude-longitude unit directions on the sphere; returns [n_theta*n_phi x 3]
/// and fills thetas/phis per row.
Mat latlong_directions(int n_theta, int n_phi, std::vector<double>* thetas = nullptr,
                       std::vector<double>* phis = nullptr);

} // namespace bino
