#pragma once

#include <cstdint>
#include <vector>

#include "bino/optim.hpp"
#include "bino/tape.hpp"

namespace bino {

enum class DecoderMode { kFourier, kPlain };
enum class FusionMode { kConcat, kInnerProduct };

/// Architecture of the operator network: a fully-connected encoder mapping
/// the geometry parameter t to a latent code of width p, and a decoder
/// evaluated jointly on (latent, boundary point). In Fourier mode the
/// decoder first lifts the point through random sinusoids cos(xF), sin(xF).
struct NetworkConfig {
  int param_dim = 1;   // dimension of the geometry parameter
  int coord_dim = 2;   // spatial dimension of boundary points
  int n_out = 1;       // 1 scalar channel, or 2 (complex / value+normal-derivative)
  int encoder_depth = 3;
  int encoder_width = 100;
  int latent_p = 100;
  int decoder_depth = 3;
  int decoder_width = 100;
  int fourier_features = 128; // number of random frequencies (columns of F)
  bool fourier_trainable = true;
  DecoderMode decoder_mode = DecoderMode::kFourier;
  FusionMode fusion = FusionMode::kConcat;
};

/// Parameter node ids of one model bound to one tape.
struct TapeBinding {
  std::vector<int> node; // indexed like the ParamStore entries
};

class OperatorModel {
 public:
  OperatorModel(NetworkConfig cfg, uint64_t seed);

  const NetworkConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }

  long parameter_count() const;
  static long expected_parameter_count(const NetworkConfig& cfg);

  // --- plain evaluation (no differentiation) ---
  Mat encode(double t) const;                       // [1 x p]
  Mat encode_batch(const Mat& ts) const;            // [n x 1] -> [n x p]
  Mat decode(const Mat& beta, const Mat& x) const;  // beta [1 x p], x [M x d] -> [M x n_out]
  Mat potential(double t, const Mat& x) const;      // decode(encode(t), x)

  // --- tape-building evaluation ---
  TapeBinding bind(Tape& tape) const;
  int encode_tape(Tape& tape, const TapeBinding& bind, int t_input) const;
  int decode_tape(Tape& tape, const TapeBinding& bind, int beta_row, int x_input) const;

 private:
  NetworkConfig cfg_;
  // ParamStore is mutable state; indices below address it.
  mutable ParamStore store_;
  std::vector<int> enc_w_, enc_b_; // hidden layers (GeLU)
  int enc_out_w_ = -1, enc_out_b_ = -1;
  int fourier_ = -1;
  // Concat fusion stores the first decoder layer split into its feature and
  // latent row blocks, so the latent contribution is a [1 x width] row that
  // broadcasts through the bias add instead of materializing [M x p].
  int dec_w0f_ = -1, dec_w0z_ = -1;
  std::vector<int> dec_w_, dec_b_; // hidden layers (GeLU); b_[0] pairs with w0
  int out_w_ = -1, out_b_ = -1;
  int ip_b_ = -1; // inner-product output bias

  int feature_dim() const;
  int head_input_dim() const;
  int head_output_dim() const;
  Mat forward_mlp(Mat h, const std::vector<int>& ws, const std::vector<int>& bs,
                  int out_w, int out_b) const;
};

} // namespace bino
