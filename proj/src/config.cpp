#include "bino/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bino {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
  }
}

long parse_long(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected true/false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

ProblemSpec RunConfig::problem() const {
  ProblemSpec spec;
  spec.pde = pde;
  spec.curve_family = geometry;
  spec.t_min = t_min;
  spec.t_max = t_max;
  spec.wavenumber = wavenumber;
  spec.trunc.beta = beta;
  return spec;
}

BatchShape RunConfig::batch_shape() const { return {n_t, n_y, m}; }

NetworkConfig RunConfig::network() const {
  const ProblemSpec spec = problem();
  NetworkConfig net;
  net.param_dim = 1;
  net.coord_dim = spec.coord_dim();
  net.n_out = spec.n_out();
  net.encoder_depth = encoder_depth;
  net.encoder_width = encoder_width;
  net.latent_p = latent_p;
  net.decoder_depth = decoder_depth;
  net.decoder_width = decoder_width;
  net.fourier_features = fourier_features > 0 ? fourier_features : 64 * net.coord_dim;
  net.fourier_trainable = fourier_trainable;
  net.decoder_mode = decoder_mode;
  net.fusion = fusion;
  return net;
}

LrSchedule RunConfig::schedule() const { return {lr, lr_decay_rate, lr_decay_period}; }

void RunConfig::validate() const {
  try {
    problem().validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid problem: ") + e.what());
  }
  if (n_t < 1 || n_y < 1 || m < 1 || m_eval < 1)
    throw ConfigError("sampling counts must be positive");
  if (encoder_depth < 1 || encoder_width < 1 || latent_p < 1 || decoder_depth < 1 ||
      decoder_width < 1 || fourier_features < 0)
    throw ConfigError("model sizes must be positive");
  if (steps < 0 || lr <= 0 || lr_decay_period < 1 || lr_decay_rate <= 0)
    throw ConfigError("invalid training settings");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      section = s.substr(1, s.size() - 2);
      if (section != "problem" && section != "sampling" && section != "model" &&
          section != "training" && section != "output")
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "problem.pde") {
      try {
        cfg.pde = pde_from_string(val);
      } catch (const std::exception& e) {
        throw ConfigError("line " + std::to_string(line) + ": " + e.what());
      }
    } else if (qual == "problem.geometry") {
      try {
        cfg.geometry = curve_family_from_string(val);
      } catch (const std::exception& e) {
        throw ConfigError("line " + std::to_string(line) + ": " + e.what());
      }
    } else if (qual == "problem.t_min") cfg.t_min = parse_double(val, line);
    else if (qual == "problem.t_max") cfg.t_max = parse_double(val, line);
    else if (qual == "problem.wavenumber") cfg.wavenumber = parse_double(val, line);
    else if (qual == "problem.beta") cfg.beta = parse_double(val, line);
    else if (qual == "sampling.n_t") cfg.n_t = static_cast<int>(parse_long(val, line));
    else if (qual == "sampling.n_y") cfg.n_y = static_cast<int>(parse_long(val, line));
    else if (qual == "sampling.m") cfg.m = static_cast<int>(parse_long(val, line));
    else if (qual == "sampling.m_eval") cfg.m_eval = static_cast<int>(parse_long(val, line));
    else if (qual == "model.encoder_depth") cfg.encoder_depth = static_cast<int>(parse_long(val, line));
    else if (qual == "model.encoder_width") cfg.encoder_width = static_cast<int>(parse_long(val, line));
    else if (qual == "model.latent_p") cfg.latent_p = static_cast<int>(parse_long(val, line));
    else if (qual == "model.decoder_depth") cfg.decoder_depth = static_cast<int>(parse_long(val, line));
    else if (qual == "model.decoder_width") cfg.decoder_width = static_cast<int>(parse_long(val, line));
    else if (qual == "model.fourier_features") cfg.fourier_features = static_cast<int>(parse_long(val, line));
    else if (qual == "model.fourier_trainable") cfg.fourier_trainable = parse_bool(val, line);
    else if (qual == "model.decoder_mode") {
      if (val == "fourier") cfg.decoder_mode = DecoderMode::kFourier;
      else if (val == "plain") cfg.decoder_mode = DecoderMode::kPlain;
      else throw ConfigError("line " + std::to_string(line) + ": decoder_mode must be fourier|plain");
    } else if (qual == "model.fusion") {
      if (val == "concat") cfg.fusion = FusionMode::kConcat;
      else if (val == "inner-product") cfg.fusion = FusionMode::kInnerProduct;
      else throw ConfigError("line " + std::to_string(line) + ": fusion must be concat|inner-product");
    } else if (qual == "training.steps") cfg.steps = parse_long(val, line);
    else if (qual == "training.lr") cfg.lr = parse_double(val, line);
    else if (qual == "training.lr_decay_period") cfg.lr_decay_period = parse_long(val, line);
    else if (qual == "training.lr_decay_rate") cfg.lr_decay_rate = parse_double(val, line);
    else if (qual == "training.seed") cfg.seed = static_cast<uint64_t>(parse_long(val, line));
    else if (qual == "training.deterministic") cfg.deterministic = parse_bool(val, line);
    else if (qual == "output.dir") cfg.out_dir = val;
    else
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                        "' in section [" + section + "]");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "pde = " << to_string(cfg.pde) << "\n";
  out << "geometry = " << to_string(cfg.geometry) << "\n";
  out << "t_min = " << fmt(cfg.t_min) << "\n";
  out << "t_max = " << fmt(cfg.t_max) << "\n";
  out << "wavenumber = " << fmt(cfg.wavenumber) << "\n";
  out << "beta = " << fmt(cfg.beta) << "\n";
  out << "[sampling]\n";
  out << "n_t = " << cfg.n_t << "\n";
  out << "n_y = " << cfg.n_y << "\n";
  out << "m = " << cfg.m << "\n";
  out << "m_eval = " << cfg.m_eval << "\n";
  out << "[model]\n";
  out << "encoder_depth = " << cfg.encoder_depth << "\n";
  out << "encoder_width = " << cfg.encoder_width << "\n";
  out << "latent_p = " << cfg.latent_p << "\n";
  out << "decoder_depth = " << cfg.decoder_depth << "\n";
  out << "decoder_width = " << cfg.decoder_width << "\n";
  out << "fourier_features = " << cfg.fourier_features << "\n";
  out << "fourier_trainable = " << (cfg.fourier_trainable ? "true" : "false") << "\n";
  out << "decoder_mode = "
      << (cfg.decoder_mode == DecoderMode::kFourier ? "fourier" : "plain") << "\n";
  out << "fusion = "
      << (cfg.fusion == FusionMode::kConcat ? "concat" : "inner-product") << "\n";
  out << "[training]\n";
  out << "steps = " << cfg.steps << "\n";
  out << "lr = " << fmt(cfg.lr) << "\n";
  out << "lr_decay_period = " << cfg.lr_decay_period << "\n";
  out << "lr_decay_rate = " << fmt(cfg.lr_decay_rate) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "deterministic = " << (cfg.deterministic ? "true" : "false") << "\n";
  out << "[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& cfg) {
  // Identifies the run semantics: the output location is not part of it.
  std::string s = serialize_config(cfg);
  const auto out_pos = s.find("[output]");
  if (out_pos != std::string::npos) s.resize(out_pos);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace bino
