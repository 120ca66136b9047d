#include "bino/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bino/field_io.hpp"

namespace bino {

double train_loop(OperatorModel& model, const ProblemSpec& spec, const BatchShape& shape,
                  const LrSchedule& sched, AdamState& adam, uint64_t seed, long start_step,
                  long end_step, ExecPolicy pol,
                  const std::function<void(long, double, double)>& on_step) {
  LossGraph graph(model, spec, shape, pol);
  double loss = graph.loss_value();
  for (long step = start_step; step < end_step; ++step) {
    const TrainBatch batch = make_batch(spec, shape, seed, static_cast<uint64_t>(step));
    loss = graph.forward(batch);
    if (std::isnan(loss))
      throw TrainingError("NaN loss at step " + std::to_string(step) + " (seed " +
                          std::to_string(seed) + ", batch stream " + std::to_string(step) + ")");
    if (on_step) on_step(step, loss, sched.rate(step));
    graph.backward();
    adam_step(model.params(), adam, sched);
  }
  return loss;
}

namespace {
std::string checkpoint_name(long step, bool final) {
  if (final) return "checkpoint_final.txt";
  char buf[48];
  std::snprintf(buf, sizeof buf, "checkpoint_%08ld.txt", step);
  return buf;
}
} // namespace

TrainOutputs run_training(const RunConfig& cfg, const std::string& resume_path) {
  cfg.validate();
  const ProblemSpec spec = cfg.problem();
  const BatchShape shape = cfg.batch_shape();
  const ExecPolicy pol{true, cfg.deterministic};

  OperatorModel model(cfg.network(), cfg.seed);
  AdamState adam;
  adam.init(model.params());
  long start_step = 0;

  if (!resume_path.empty()) {
    const Checkpoint ck = load_checkpoint(resume_path);
    if (serialize_config(ck.config) != serialize_config(cfg)) {
      // Model architecture must agree; training length and output may differ.
      RunConfig a = ck.config, b = cfg;
      a.steps = b.steps;
      a.out_dir = b.out_dir;
      a.seed = b.seed;
      a.deterministic = b.deterministic;
      if (serialize_config(a) != serialize_config(b))
        throw TrainingError("resume: checkpoint configuration does not match");
    }
    restore_model(ck, model);
    restore_adam(ck, model, adam);
    start_step = ck.step;
    if (start_step > cfg.steps)
      throw TrainingError("resume: checkpoint is ahead of the configured step budget");
  }

  std::filesystem::create_directories(cfg.out_dir);
  const std::string trace_path = cfg.out_dir + "/loss_trace.txt";
  std::ofstream trace(trace_path);
  if (!trace) throw TrainingError("cannot write loss trace: " + trace_path);
  const FileMeta meta{"loss-trace", cfg.seed, config_hash(cfg)};
  trace << meta_comment(meta) << "\n" << "step,loss,lr\n";
  char row[96];
  auto trace_row = [&](long step, double loss, double lr) {
    std::snprintf(row, sizeof row, "%ld,%.17g,%.17g\n", step, loss, lr);
    trace << row;
  };

  const LrSchedule sched = cfg.schedule();
  TrainOutputs out;
  out.trace_path = trace_path;

  auto save_at = [&](long step, bool final) {
    const Checkpoint ck = make_checkpoint(cfg, model, adam, step);
    const std::string path = cfg.out_dir + "/" + checkpoint_name(step, final);
    save_checkpoint(ck, path);
    return path;
  };

  long next_checkpoint = ((start_step / 10000) + 1) * 10000;
  train_loop(model, spec, shape, sched, adam, cfg.seed, start_step, cfg.steps, pol,
             [&](long step, double loss, double lr) {
               if (step % 100 == 0) trace_row(step, loss, lr);
               if (step + 1 == next_checkpoint && step + 1 < cfg.steps) {
                 save_at(step + 1, false);
                 next_checkpoint += 10000;
               }
             });

  // Closing trace row: loss of the final parameters on the next batch draw.
  {
    LossGraph graph(model, spec, shape, pol);
    const TrainBatch batch =
        make_batch(spec, shape, cfg.seed, static_cast<uint64_t>(cfg.steps));
    out.final_loss = graph.forward(batch);
    trace_row(cfg.steps, out.final_loss, sched.rate(cfg.steps));
  }
  out.steps_run = cfg.steps - start_step;
  out.final_checkpoint = save_at(cfg.steps, true);
  return out;
}

} // namespace bino
