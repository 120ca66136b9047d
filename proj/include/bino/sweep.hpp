#pragma once

#include <string>
#include <vector>

#include "bino/config.hpp"

namespace bino {

/// Hyper-parameter sweep harness: trains one reduced-budget model per
/// (layers, neurons, p, decoder-mode) cell and tabulates the interior-field
/// error at a fixed evaluation parameter. One table file per (mode, p),
/// rows = layer counts, columns = neuron counts.
struct SweepSettings {
  std::vector<int> layers{1, 3, 5, 7};
  std::vector<int> neurons{10, 50, 100, 150};
  std::vector<int> ps{10, 50, 100, 150};
  std::vector<DecoderMode> modes{DecoderMode::kFourier};
  long steps_per_cell = 1000;
  double eval_t = 1.15;
  int grid_n = 100;
  RunConfig base;
};

/// Parse a config file that additionally carries a [sweep] section with keys
/// layers, neurons, p, modes, steps, eval_t, grid_n (all optional).
SweepSettings parse_sweep_config(const std::string& path);

/// Runs the grid; returns the paths of the emitted table files.
std::vector<std::string> run_sweep(const SweepSettings& sweep, const std::string& out_dir);

} // namespace bino
