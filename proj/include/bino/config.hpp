#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "bino/bie.hpp"
#include "bino/network.hpp"
#include "bino/optim.hpp"
#include "bino/problem.hpp"

namespace bino {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value run configuration with sections. Unknown keys and
/// malformed lines are hard errors carrying the line number. Defaults are
/// the paper-default experiment setup.
struct RunConfig {
  // [problem]
  PdeKind pde = PdeKind::kLaplace2D;
  CurveFamily geometry = CurveFamily::kLaplaceStar;
  double t_min = 1.0, t_max = 2.0;
  double wavenumber = 2.0 * kPi;
  double beta = 100000.0;
  // [sampling]
  int n_t = 10, n_y = 100, m = 3000, m_eval = 20000;
  // [model]
  int encoder_depth = 3, encoder_width = 100, latent_p = 100;
  int decoder_depth = 3, decoder_width = 100;
  int fourier_features = 0; // 0 -> 64 per coordinate dimension
  bool fourier_trainable = true;
  DecoderMode decoder_mode = DecoderMode::kFourier;
  FusionMode fusion = FusionMode::kConcat;
  // [training]
  long steps = 200000;
  double lr = 1e-3, lr_decay_rate = 0.95;
  long lr_decay_period = 20000;
  uint64_t seed = 0;
  bool deterministic = true;
  // [output]
  std::string out_dir = "out";

  ProblemSpec problem() const;
  BatchShape batch_shape() const;
  NetworkConfig network() const;
  LrSchedule schedule() const;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

} // namespace bino
