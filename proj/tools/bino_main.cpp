#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bino/bie.hpp"
#include "bino/checkpoint.hpp"
#include "bino/config.hpp"
#include "bino/field_io.hpp"
#include "bino/gradcheck.hpp"
#include "bino/nystrom.hpp"
#include "bino/sphere.hpp"
#include "bino/sweep.hpp"
#include "bino/trainer.hpp"

namespace {

using namespace bino;

struct CommonOpts {
  std::string config_path;
  std::string checkpoint_path;
  std::string out_dir;
  double t = 1.15;
  long seed = -1;
  bool deterministic = false;
};

RunConfig apply_overrides(RunConfig cfg, const CommonOpts& opt) {
  if (opt.seed >= 0) cfg.seed = static_cast<uint64_t>(opt.seed);
  if (opt.deterministic) cfg.deterministic = true;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  return cfg;
}

/// Rebuild the model a checkpoint was trained with.
OperatorModel model_from_checkpoint(const Checkpoint& ck) {
  OperatorModel model(ck.config.network(), ck.config.seed);
  restore_model(ck, model);
  return model;
}

int cmd_train(const CommonOpts& opt) {
  RunConfig cfg = apply_overrides(load_config(opt.config_path), opt);
  par::config().deterministic = cfg.deterministic;
  const TrainOutputs out = run_training(cfg, opt.checkpoint_path);
  std::printf("trained %ld steps, final loss %.6g\n", out.steps_run, out.final_loss);
  std::printf("checkpoint: %s\n", out.final_checkpoint.c_str());
  std::printf("loss trace: %s\n", out.trace_path.c_str());
  return 0;
}

int cmd_eval(const CommonOpts& opt, int grid_n, int m_eval_override, double delta,
             double box_lo, double box_hi) {
  const Checkpoint ck = load_checkpoint(opt.checkpoint_path);
  RunConfig cfg = apply_overrides(ck.config, opt);
  par::config().deterministic = cfg.deterministic;
  const ProblemSpec spec = cfg.problem();
  const OperatorModel model = model_from_checkpoint(ck);
  const int m_eval = m_eval_override > 0 ? m_eval_override : cfg.m_eval;
  std::filesystem::create_directories(cfg.out_dir);
  const FileMeta meta{"field", cfg.seed, config_hash(cfg)};

  if (spec.pde == PdeKind::kHelmholtz3D) {
    const FieldGrid grid = make_slice_grid(opt.t, grid_n, box_lo, box_hi, delta);
    const Mat field = total_field(model, spec, opt.t, grid.points, m_eval, cfg.seed);
    const std::string path = cfg.out_dir + "/total_field.csv";
    write_field_file(path, grid.points, field, nullptr, meta);
    std::printf("total-field slice (%d points): %s\n", grid.points.rows, path.c_str());
    return 0;
  }

  const ParamCurve2D curve = ParamCurve2D::from_family(spec.curve_family);
  const FieldGrid grid = make_interior_grid(curve, opt.t, grid_n, delta);
  const Mat field = eval_field(model, spec, opt.t, grid.points, m_eval, cfg.seed);
  const Mat truth = interior_truth(spec, grid.points);
  const double err = relative_l2(field, truth);
  const std::string path = cfg.out_dir + "/field.csv";
  write_field_file(path, grid.points, field, &truth, meta);
  const std::string report = cfg.out_dir + "/eval_report.txt";
  std::ofstream rep(report);
  rep << meta_comment({"eval-report", cfg.seed, config_hash(cfg)}) << "\n";
  rep << "t," << opt.t << "\n" << "points," << grid.points.rows << "\n";
  rep << "relative_l2," << err << "\n";
  std::printf("field (%d points): %s\nrelative l2 error at t=%g: %.6g\n", grid.points.rows,
              path.c_str(), opt.t, err);
  return 0;
}

int cmd_far_field(const CommonOpts& opt, int n_theta, int n_phi, int m_eval_override) {
  const Checkpoint ck = load_checkpoint(opt.checkpoint_path);
  RunConfig cfg = apply_overrides(ck.config, opt);
  par::config().deterministic = cfg.deterministic;
  const ProblemSpec spec = cfg.problem();
  if (spec.pde != PdeKind::kHelmholtz3D) {
    std::fprintf(stderr, "far-field requires a Helmholtz checkpoint\n");
    return 1;
  }
  const OperatorModel model = model_from_checkpoint(ck);
  const int m_eval = m_eval_override > 0 ? m_eval_override : cfg.m_eval;
  std::vector<double> thetas, phis;
  const Mat dirs = latlong_directions(n_theta, n_phi, &thetas, &phis);
  const Mat ff = far_field_model(model, spec, opt.t, dirs, m_eval, cfg.seed);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/far_field.csv";
  write_far_field_file(path, thetas, phis, ff, {"far-field", cfg.seed, config_hash(cfg)});
  std::printf("far field (%d directions): %s\n", dirs.rows, path.c_str());
  return 0;
}

int cmd_sweep(const CommonOpts& opt) {
  SweepSettings sweep = parse_sweep_config(opt.config_path);
  if (opt.seed >= 0) sweep.base.seed = static_cast<uint64_t>(opt.seed);
  if (opt.deterministic) sweep.base.deterministic = true;
  const std::string out_dir = opt.out_dir.empty() ? sweep.base.out_dir : opt.out_dir;
  par::config().deterministic = sweep.base.deterministic;
  const auto files = run_sweep(sweep, out_dir);
  for (const auto& f : files) std::printf("table: %s\n", f.c_str());
  return 0;
}

int cmd_oracle(const CommonOpts& opt, int n_nodes, int grid_n, int n_theta, int n_phi) {
  RunConfig cfg = apply_overrides(load_config(opt.config_path), opt);
  par::config().deterministic = cfg.deterministic;
  const ProblemSpec spec = cfg.problem();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string hash = config_hash(cfg);

  if (spec.pde == PdeKind::kHelmholtz3D) {
    std::vector<double> thetas, phis;
    const Mat dirs = latlong_directions(n_theta, n_phi, &thetas, &phis);
    const Mat ff = sphere_far_field(spec.wavenumber, dirs);
    const std::string path = cfg.out_dir + "/oracle_far_field.csv";
    write_far_field_file(path, thetas, phis, ff, {"far-field", cfg.seed, hash});
    std::printf("series far field (unit sphere, k=%g): %s\n", spec.wavenumber, path.c_str());
    return 0;
  }

  const NystromSystem sys = nystrom_solve(spec, opt.t, n_nodes);
  const std::string density_path = cfg.out_dir + "/oracle_density.csv";
  write_density_file(density_path, sys.nodes.params, sys.nodes.points, sys.density,
                     {"density", cfg.seed, hash});
  const ParamCurve2D curve = ParamCurve2D::from_family(spec.curve_family);
  const FieldGrid grid = make_interior_grid(curve, opt.t, grid_n, 0.01);
  const Mat field = nystrom_field(spec, sys, grid.points);
  const Mat truth = interior_truth(spec, grid.points);
  const double err = relative_l2(field, truth);
  const std::string field_path = cfg.out_dir + "/oracle_field.csv";
  write_field_file(field_path, grid.points, field, &truth, {"field", cfg.seed, hash});
  std::printf("nystrom n=%d t=%g: density %s\nfield %s\nrelative l2 vs manufactured: %.6g\n",
              n_nodes, opt.t, density_path.c_str(), field_path.c_str(), err);
  std::printf("solve residual %.3g, condition estimate %.3g\n", sys.solve_residual,
              sys.condition);
  return 0;
}

int cmd_gradcheck(bool corrupt) {
  const auto reports = run_gradcheck(corrupt);
  bool pass = true;
  for (const auto& r : reports) {
    std::printf("%-13s max relative gradient error %.3e over %ld parameters  [%s]\n",
                to_string(r.pde).c_str(), r.max_rel_error, r.n_params,
                r.pass ? "ok" : "FAIL");
    pass = pass && r.pass;
  }
  std::printf("gradcheck: %s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary-integral neural operator solver"};
  app.require_subcommand(1);

  CommonOpts opt;
  int grid_n = 200, m_eval = 0, n_nodes = 512, n_theta = 24, n_phi = 48;
  double delta = 0.01, box_lo = -4.0, box_hi = 4.0;
  bool corrupt = false;

  auto add_common = [&](CLI::App* sub, bool needs_config, bool needs_checkpoint) {
    auto* c = sub->add_option("--config", opt.config_path, "run configuration file");
    if (needs_config) c->required();
    auto* k = sub->add_option("--checkpoint", opt.checkpoint_path, "checkpoint file");
    if (needs_checkpoint) k->required();
    sub->add_option("--t", opt.t, "geometry parameter");
    sub->add_option("--seed", opt.seed, "override RNG seed");
    sub->add_flag("--deterministic", opt.deterministic, "bit-stable reductions");
    sub->add_option("--out", opt.out_dir, "output directory");
  };

  auto* train = app.add_subcommand("train", "train the boundary operator");
  add_common(train, true, false);

  auto* eval = app.add_subcommand("eval", "reconstruct a field from a checkpoint");
  add_common(eval, false, true);
  eval->add_option("--grid", grid_n, "grid resolution per side");
  eval->add_option("--m-eval", m_eval, "quadrature size for reconstruction");
  eval->add_option("--delta", delta, "boundary clearance for grid masking");
  eval->add_option("--box-lo", box_lo, "slice box lower bound (Helmholtz)");
  eval->add_option("--box-hi", box_hi, "slice box upper bound (Helmholtz)");

  auto* far = app.add_subcommand("far-field", "far-field pattern from a checkpoint");
  add_common(far, false, true);
  far->add_option("--ntheta", n_theta, "polar grid size");
  far->add_option("--nphi", n_phi, "azimuthal grid size");
  far->add_option("--m-eval", m_eval, "quadrature size");

  auto* sweep = app.add_subcommand("sweep", "hyper-parameter sweep tables");
  add_common(sweep, true, false);

  auto* oracle = app.add_subcommand("oracle", "classical reference solutions");
  add_common(oracle, true, false);
  oracle->add_option("--n", n_nodes, "collocation nodes (2D problems)");
  oracle->add_option("--grid", grid_n, "field grid resolution");
  oracle->add_option("--ntheta", n_theta, "far-field polar grid");
  oracle->add_option("--nphi", n_phi, "far-field azimuthal grid");

  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  add_common(gc, false, false);
  gc->add_flag("--corrupt", corrupt, "negative control: corrupt one adjoint rule");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(opt);
    if (eval->parsed()) return cmd_eval(opt, grid_n, m_eval, delta, box_lo, box_hi);
    if (far->parsed()) return cmd_far_field(opt, n_theta, n_phi, m_eval);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (oracle->parsed()) return cmd_oracle(opt, n_nodes, grid_n, n_theta, n_phi);
    if (gc->parsed()) return cmd_gradcheck(corrupt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
