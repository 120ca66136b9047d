#include "bino/gradcheck.hpp"

#include <cmath>

#include "bino/bie.hpp"

namespace bino {

GradCheckReport gradcheck_problem(PdeKind pde, bool corrupt_adjoint) {
  ProblemSpec spec;
  spec.pde = pde;
  if (pde == PdeKind::kHelmholtz3D) {
    spec.t_min = 0.0;
    spec.t_max = 0.5;
  } else {
    spec.curve_family = pde == PdeKind::kBiharmonic2D ? CurveFamily::kBiharmonicStar
                                                      : CurveFamily::kLaplaceStar;
    spec.t_min = 1.0;
    spec.t_max = 2.0;
  }

  NetworkConfig net;
  net.coord_dim = spec.coord_dim();
  net.n_out = spec.n_out();
  net.encoder_depth = 3;
  net.encoder_width = 10;
  net.latent_p = 10;
  net.decoder_depth = 2;
  net.decoder_width = 10;
  net.fourier_features = 4;

  OperatorModel model(net, /*seed=*/11);
  // hemisphere sampling needs even counts
  const BatchShape shape{2, pde == PdeKind::kHelmholtz3D ? 4 : 3,
                         pde == PdeKind::kHelmholtz3D ? 6 : 5};
  const ExecPolicy pol{false, true};
  LossGraph graph(model, spec, shape, pol);
  graph.tape().corrupt_gelu_adjoint(corrupt_adjoint);

  const TrainBatch batch = make_batch(spec, shape, /*seed=*/7, /*step=*/0);
  graph.forward(batch);
  graph.backward();

  ParamStore& store = model.params();
  std::vector<Mat> g_ad;
  for (int p = 0; p < store.count(); ++p) g_ad.push_back(store[p].grad);

  GradCheckReport rep;
  rep.pde = pde;
  double gmax = 0, max_diff = 0;
  for (int p = 0; p < store.count(); ++p) {
    Mat& theta = store[p].value;
    for (size_t i = 0; i < theta.size(); ++i) {
      const double orig = theta.a[i];
      const double h = 1e-5 * std::max(1.0, std::abs(orig));
      theta.a[i] = orig + h;
      const double lp = graph.refresh();
      theta.a[i] = orig - h;
      const double lm = graph.refresh();
      theta.a[i] = orig;
      const double g_fd = (lp - lm) / (2.0 * h);
      gmax = std::max(gmax, std::abs(g_fd));
      max_diff = std::max(max_diff, std::abs(g_ad[p].a[i] - g_fd));
      ++rep.n_params;
    }
  }
  graph.refresh(); // restore recorded values
  rep.grad_inf_norm = gmax;
  rep.max_rel_error = max_diff / std::max(gmax, 1e-12);
  rep.pass = rep.max_rel_error < 1e-6;
  return rep;
}

std::vector<GradCheckReport> run_gradcheck(bool corrupt_adjoint) {
  return {gradcheck_problem(PdeKind::kLaplace2D, corrupt_adjoint),
          gradcheck_problem(PdeKind::kBiharmonic2D, corrupt_adjoint),
          gradcheck_problem(PdeKind::kHelmholtz3D, corrupt_adjoint)};
}

} // namespace bino
