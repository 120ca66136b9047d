#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bino/config.hpp"
#include "bino/network.hpp"
#include "bino/optim.hpp"

namespace bino {

/// Self-describing text snapshot of a training run: format version, the full
/// run configuration, step and RNG-stream counters, every named parameter
/// array (row-major) and the Adam moments. Doubles are written with %.17g so
/// a save/load round trip is bit-exact.
struct Checkpoint {
  int version = 1;
  RunConfig config;
  long step = 0;         // optimizer steps completed
  uint64_t rng_step = 0; // next batch stream index
  double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;
  std::vector<std::pair<std::string, Mat>> params;
  std::vector<std::pair<std::string, Mat>> adam_m;
  std::vector<std::pair<std::string, Mat>> adam_v;
};

Checkpoint make_checkpoint(const RunConfig& cfg, const OperatorModel& model,
                           const AdamState& adam, long step);

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Copy checkpoint state back into a freshly constructed model/optimizer.
/// Parameter arrays are matched by name; mismatches throw.
void restore_model(const Checkpoint& ck, OperatorModel& model);
void restore_adam(const Checkpoint& ck, const OperatorModel& model, AdamState& adam);

} // namespace bino
