#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bino/gradcheck.hpp"
#include "bino/trainer.hpp"

using namespace bino;

namespace {
RunConfig smoke_config(const std::string& out_dir) {
  RunConfig cfg;
  cfg.pde = PdeKind::kLaplace2D;
  cfg.geometry = CurveFamily::kLaplaceStar;
  cfg.n_t = 4;
  cfg.n_y = 30;
  cfg.m = 200;
  cfg.m_eval = 2000;
  cfg.encoder_depth = 2;
  cfg.encoder_width = 24;
  cfg.latent_p = 16;
  cfg.decoder_depth = 2;
  cfg.decoder_width = 24;
  cfg.fourier_features = 16;
  cfg.steps = 0;
  cfg.out_dir = out_dir;
  return cfg;
}

std::string tmp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
} // namespace

TEST_CASE("loss decreases over 500 steps for at least 4 of 5 seeds") {
  int improved = 0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    RunConfig cfg = smoke_config("");
    cfg.seed = seed;
    const ProblemSpec spec = cfg.problem();
    OperatorModel model(cfg.network(), seed);
    AdamState adam;
    adam.init(model.params());
    double early = 0, late = 0;
    int n_early = 0, n_late = 0;
    train_loop(model, spec, cfg.batch_shape(), cfg.schedule(), adam, seed, 0, 500,
               {true, true}, [&](long step, double loss, double) {
                 if (step < 50) { early += loss; ++n_early; }
                 if (step >= 450) { late += loss; ++n_late; }
               });
    if (late / n_late < early / n_early) ++improved;
  }
  CHECK(improved >= 4);
}

TEST_CASE("smoke training writes traces and checkpoints, 2-row trace for 100 steps") {
  RunConfig cfg = smoke_config(tmp_dir("bino_train_smoke"));
  cfg.steps = 100;
  const TrainOutputs out = run_training(cfg);
  CHECK(std::filesystem::exists(out.final_checkpoint));
  const std::string trace = slurp(out.trace_path);
  // comment + header + rows at steps 0 and 100
  int rows = 0;
  for (char c : trace) rows += c == '\n';
  CHECK(rows == 4);
  CHECK(trace.find("step,loss,lr") != std::string::npos);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("resuming with no extra steps rewrites an identical checkpoint") {
  RunConfig cfg = smoke_config(tmp_dir("bino_train_resume"));
  cfg.steps = 40;
  const TrainOutputs first = run_training(cfg);
  const std::string original = slurp(first.final_checkpoint);
  const TrainOutputs second = run_training(cfg, first.final_checkpoint);
  CHECK(slurp(second.final_checkpoint) == original);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("resume continues to the same result as an uninterrupted run") {
  RunConfig cfg = smoke_config(tmp_dir("bino_train_split"));
  cfg.steps = 60;
  const TrainOutputs full = run_training(cfg);
  const std::string full_ck = slurp(full.final_checkpoint);

  std::filesystem::remove_all(cfg.out_dir);
  RunConfig half = cfg;
  half.steps = 30;
  const TrainOutputs part1 = run_training(half);
  RunConfig rest = cfg; // back to 60 steps
  const TrainOutputs part2 = run_training(rest, part1.final_checkpoint);
  CHECK(slurp(part2.final_checkpoint) == full_ck);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("identical seeds give bit-identical loss traces under the determinism flag") {
  RunConfig cfg = smoke_config(tmp_dir("bino_train_det_a"));
  cfg.steps = 120;
  cfg.deterministic = true;
  const TrainOutputs a = run_training(cfg);
  const std::string trace_a = slurp(a.trace_path);
  RunConfig cfg2 = cfg;
  cfg2.out_dir = tmp_dir("bino_train_det_b");
  const TrainOutputs b = run_training(cfg2);
  CHECK(trace_a == slurp(b.trace_path));
  std::filesystem::remove_all(cfg.out_dir);
  std::filesystem::remove_all(cfg2.out_dir);
}

TEST_CASE("gradcheck passes on every problem and the corrupted tape fails") {
  for (const auto& rep : run_gradcheck(false)) {
    CAPTURE(to_string(rep.pde));
    CHECK(rep.max_rel_error < 1e-6);
    CHECK(rep.pass);
  }
  bool any_fail = false;
  for (const auto& rep : run_gradcheck(true)) any_fail = any_fail || !rep.pass;
  CHECK(any_fail);
}
