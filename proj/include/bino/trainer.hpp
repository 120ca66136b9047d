#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "bino/checkpoint.hpp"
#include "bino/config.hpp"

namespace bino {

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Core optimization loop: fresh batch every step (counter-based on the step
/// index), forward, backward, Adam. on_step fires before the update with the
/// loss of the current parameters. Throws TrainingError on a NaN loss,
/// naming the step and seed.
double train_loop(OperatorModel& model, const ProblemSpec& spec, const BatchShape& shape,
                  const LrSchedule& sched, AdamState& adam, uint64_t seed, long start_step,
                  long end_step, ExecPolicy pol,
                  const std::function<void(long step, double loss, double lr)>& on_step);

struct TrainOutputs {
  double final_loss = 0;
  long steps_run = 0;
  std::string final_checkpoint;
  std::string trace_path;
};

/// Full training command: resolves the output directory, writes the loss
/// trace (every 100 steps plus a final evaluation row), checkpoints every
/// 10,000 steps and at the end, optionally resuming from a checkpoint whose
/// architecture must match the config.
TrainOutputs run_training(const RunConfig& cfg, const std::string& resume_path = "");

} // namespace bino
