#include "bino/network.hpp"

#include <stdexcept>

namespace bino {

namespace {
std::vector<int> mlp_dims(int in, int width, int depth, int out) {
  std::vector<int> dims;
  dims.push_back(in);
  for (int i = 0; i < depth; ++i) dims.push_back(width);
  dims.push_back(out);
  return dims;
}
} // namespace

OperatorModel::OperatorModel(NetworkConfig cfg, uint64_t seed) : cfg_(cfg) {
  if (cfg_.encoder_depth < 1 || cfg_.decoder_depth < 1)
    throw std::invalid_argument("OperatorModel: depth must be >= 1");
  uint64_t slot = 0;
  auto next_stream = [&]() { return RngStream(seed, StreamPurpose::kInit, slot++); };

  const auto enc_dims = mlp_dims(cfg_.param_dim, cfg_.encoder_width, cfg_.encoder_depth,
                                 cfg_.latent_p);
  for (size_t l = 0; l + 2 < enc_dims.size(); ++l) {
    RngStream rw = next_stream();
    enc_w_.push_back(store_.add("enc.w" + std::to_string(l),
                                xavier_init(enc_dims[l], enc_dims[l + 1], rw)));
    enc_b_.push_back(store_.add("enc.b" + std::to_string(l), Mat(1, enc_dims[l + 1])));
  }
  {
    RngStream rw = next_stream();
    const int in = enc_dims[enc_dims.size() - 2], out = enc_dims.back();
    enc_out_w_ = store_.add("enc.out_w", xavier_init(in, out, rw));
    enc_out_b_ = store_.add("enc.out_b", Mat(1, out));
  }

  if (cfg_.decoder_mode == DecoderMode::kFourier) {
    RngStream rf = next_stream();
    Mat f(cfg_.coord_dim, cfg_.fourier_features);
    for (double& v : f.a) v = rf.gaussian(); // standard Gaussian frequencies
    fourier_ = store_.add("dec.fourier", std::move(f));
    store_[fourier_].trainable = cfg_.fourier_trainable;
  }

  const auto dec_dims = mlp_dims(head_input_dim(), cfg_.decoder_width, cfg_.decoder_depth,
                                 head_output_dim());
  for (size_t l = 0; l + 2 < dec_dims.size(); ++l) {
    RngStream rw = next_stream();
    Mat w = xavier_init(dec_dims[l], dec_dims[l + 1], rw);
    if (l == 0 && cfg_.fusion == FusionMode::kConcat) {
      const int fd = feature_dim(), width = dec_dims[1];
      Mat wf(fd, width), wz(cfg_.latent_p, width);
      for (int i = 0; i < fd; ++i)
        for (int j = 0; j < width; ++j) wf(i, j) = w(i, j);
      for (int i = 0; i < cfg_.latent_p; ++i)
        for (int j = 0; j < width; ++j) wz(i, j) = w(fd + i, j);
      dec_w0f_ = store_.add("dec.w0f", std::move(wf));
      dec_w0z_ = store_.add("dec.w0z", std::move(wz));
    } else {
      dec_w_.push_back(store_.add("dec.w" + std::to_string(l), std::move(w)));
    }
    dec_b_.push_back(store_.add("dec.b" + std::to_string(l), Mat(1, dec_dims[l + 1])));
  }
  {
    RngStream rw = next_stream();
    const int in = dec_dims[dec_dims.size() - 2], out = dec_dims.back();
    out_w_ = store_.add("dec.out_w", xavier_init(in, out, rw));
    out_b_ = store_.add("dec.out_b", Mat(1, out));
  }
  if (cfg_.fusion == FusionMode::kInnerProduct)
    ip_b_ = store_.add("dec.ip_b", Mat(1, cfg_.n_out));
}

int OperatorModel::feature_dim() const {
  return cfg_.decoder_mode == DecoderMode::kFourier ? 2 * cfg_.fourier_features
                                                    : cfg_.coord_dim;
}

int OperatorModel::head_input_dim() const {
  return cfg_.fusion == FusionMode::kConcat ? feature_dim() + cfg_.latent_p
                                            : feature_dim();
}

int OperatorModel::head_output_dim() const {
  return cfg_.fusion == FusionMode::kConcat ? cfg_.n_out : cfg_.latent_p * cfg_.n_out;
}

long OperatorModel::parameter_count() const { return store_.scalar_count(); }

long OperatorModel::expected_parameter_count(const NetworkConfig& cfg) {
  auto mlp_count = [](const std::vector<int>& dims) {
    long n = 0;
    for (size_t l = 0; l + 1 < dims.size(); ++l)
      n += static_cast<long>(dims[l]) * dims[l + 1] + dims[l + 1];
    return n;
  };
  const int feat = cfg.decoder_mode == DecoderMode::kFourier ? 2 * cfg.fourier_features
                                                             : cfg.coord_dim;
  const int head_in = cfg.fusion == FusionMode::kConcat ? feat + cfg.latent_p : feat;
  const int head_out =
      cfg.fusion == FusionMode::kConcat ? cfg.n_out : cfg.latent_p * cfg.n_out;
  long n = mlp_count(mlp_dims(cfg.param_dim, cfg.encoder_width, cfg.encoder_depth,
                              cfg.latent_p));
  if (cfg.decoder_mode == DecoderMode::kFourier)
    n += static_cast<long>(cfg.coord_dim) * cfg.fourier_features;
  n += mlp_count(mlp_dims(head_in, cfg.decoder_width, cfg.decoder_depth, head_out));
  if (cfg.fusion == FusionMode::kInnerProduct) n += cfg.n_out;
  return n;
}

Mat OperatorModel::forward_mlp(Mat h, const std::vector<int>& ws,
                               const std::vector<int>& bs, int out_w, int out_b) const {
  for (size_t l = 0; l < ws.size(); ++l) {
    Mat z(h.rows, store_[ws[l]].value.cols);
    gemm(z, h, store_[ws[l]].value);
    const Mat& b = store_[bs[l]].value;
    for (int i = 0; i < z.rows; ++i) {
      double* zi = z.row(i);
      for (int j = 0; j < z.cols; ++j) zi[j] = gelu_scalar(zi[j] + b.a[j]);
    }
    h = std::move(z);
  }
  Mat out(h.rows, store_[out_w].value.cols);
  gemm(out, h, store_[out_w].value);
  const Mat& b = store_[out_b].value;
  for (int i = 0; i < out.rows; ++i) {
    double* oi = out.row(i);
    for (int j = 0; j < out.cols; ++j) oi[j] += b.a[j];
  }
  return out;
}

Mat OperatorModel::encode_batch(const Mat& ts) const {
  if (ts.cols != cfg_.param_dim) throw std::invalid_argument("encode: bad input dim");
  return forward_mlp(ts, enc_w_, enc_b_, enc_out_w_, enc_out_b_);
}

Mat OperatorModel::encode(double t) const {
  Mat ts(1, 1);
  ts.a[0] = t;
  return encode_batch(ts);
}

Mat OperatorModel::decode(const Mat& beta, const Mat& x) const {
  if (beta.rows != 1 || beta.cols != cfg_.latent_p)
    throw std::invalid_argument("decode: beta must be [1, p]");
  if (x.cols != cfg_.coord_dim) throw std::invalid_argument("decode: bad point dim");
  const int m = x.rows;

  Mat feats;
  if (cfg_.decoder_mode == DecoderMode::kFourier) {
    Mat u(m, cfg_.fourier_features);
    gemm(u, x, store_[fourier_].value);
    feats.resize(m, 2 * cfg_.fourier_features);
    for (int i = 0; i < m; ++i) {
      const double* ui = u.row(i);
      double* fi = feats.row(i);
      for (int j = 0; j < u.cols; ++j) {
        fi[j] = std::cos(ui[j]);
        fi[u.cols + j] = std::sin(ui[j]);
      }
    }
  } else {
    feats = x;
  }

  Mat h;
  if (cfg_.fusion == FusionMode::kConcat) {
    // first layer: feats * W0f + (beta * W0z + b0) broadcast across rows
    const Mat& w0f = store_[dec_w0f_].value;
    h.resize(m, w0f.cols);
    gemm(h, feats, w0f);
    Mat u(1, w0f.cols);
    gemm(u, beta, store_[dec_w0z_].value);
    const Mat& b0 = store_[dec_b_[0]].value;
    for (int j = 0; j < u.cols; ++j) u.a[j] += b0.a[j];
    for (int i = 0; i < m; ++i) {
      double* hi = h.row(i);
      for (int j = 0; j < h.cols; ++j) hi[j] = gelu_scalar(hi[j] + u.a[j]);
    }
    std::vector<int> rest_b(dec_b_.begin() + 1, dec_b_.end());
    Mat raw = forward_mlp(std::move(h), dec_w_, rest_b, out_w_, out_b_);
    return raw;
  }

  Mat raw = forward_mlp(std::move(feats), dec_w_, dec_b_, out_w_, out_b_);
  // Inner-product fusion: per-channel dot of the trunk block with the latent.
  Mat out(m, cfg_.n_out);
  const Mat& bias = store_[ip_b_].value;
  for (int i = 0; i < m; ++i) {
    const double* ri = raw.row(i);
    for (int c = 0; c < cfg_.n_out; ++c) {
      double s = 0;
      const double* blk = ri + c * cfg_.latent_p;
      for (int j = 0; j < cfg_.latent_p; ++j) s += blk[j] * beta.a[j];
      out(i, c) = s + bias.a[c];
    }
  }
  return out;
}

Mat OperatorModel::potential(double t, const Mat& x) const {
  return decode(encode(t), x);
}

TapeBinding OperatorModel::bind(Tape& tape) const {
  TapeBinding b;
  for (auto& e : store_.entries()) b.node.push_back(tape.param(&e.value, &e.grad));
  return b;
}

int OperatorModel::encode_tape(Tape& tape, const TapeBinding& bind, int t_input) const {
  int h = t_input;
  for (size_t l = 0; l < enc_w_.size(); ++l)
    h = tape.gelu(tape.add_bias(tape.matmul(h, bind.node[enc_w_[l]]), bind.node[enc_b_[l]]));
  return tape.add_bias(tape.matmul(h, bind.node[enc_out_w_]), bind.node[enc_out_b_]);
}

int OperatorModel::decode_tape(Tape& tape, const TapeBinding& bind, int beta_row,
                               int x_input) const {
  const int m = tape.value(x_input).rows;

  int feats;
  if (cfg_.decoder_mode == DecoderMode::kFourier) {
    feats = tape.fourier_feats(tape.matmul(x_input, bind.node[fourier_]));
  } else {
    feats = x_input;
  }

  int h;
  size_t next_bias = 0;
  if (cfg_.fusion == FusionMode::kConcat) {
    const int u = tape.add_bias(tape.matmul(beta_row, bind.node[dec_w0z_]),
                                bind.node[dec_b_[next_bias++]]);
    h = tape.gelu(tape.add_bias(tape.matmul(feats, bind.node[dec_w0f_]), u));
  } else {
    h = feats;
  }

  for (size_t l = 0; l < dec_w_.size(); ++l)
    h = tape.gelu(
        tape.add_bias(tape.matmul(h, bind.node[dec_w_[l]]), bind.node[dec_b_[next_bias++]]));
  int raw = tape.add_bias(tape.matmul(h, bind.node[out_w_]), bind.node[out_b_]);
  if (cfg_.fusion == FusionMode::kConcat) return raw;

  const int beta_b = tape.broadcast_row(beta_row, m);
  int out = -1;
  for (int c = 0; c < cfg_.n_out; ++c) {
    const int blk = tape.slice_cols(raw, c * cfg_.latent_p, (c + 1) * cfg_.latent_p);
    const int chan = tape.row_sum(tape.mul(blk, beta_b));
    out = (c == 0) ? chan : tape.concat_cols(out, chan);
  }
  return tape.add_bias(out, bind.node[ip_b_]);
}

} // namespace bino
