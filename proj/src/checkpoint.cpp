#include "bino/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bino {

namespace {

void write_arrays(std::ostream& out, const char* tag,
                  const std::vector<std::pair<std::string, Mat>>& arrays) {
  char buf[40];
  for (const auto& [name, m] : arrays) {
    out << tag << " " << name << " " << m.rows << " " << m.cols;
    for (double v : m.a) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      out << buf;
    }
    out << "\n";
  }
}

std::pair<std::string, Mat> read_array(std::istringstream& line) {
  std::string name;
  int rows, cols;
  if (!(line >> name >> rows >> cols)) throw std::runtime_error("checkpoint: bad array header");
  Mat m(rows, cols);
  for (size_t i = 0; i < m.size(); ++i)
    if (!(line >> m.a[i])) throw std::runtime_error("checkpoint: truncated array " + name);
  return {name, std::move(m)};
}

} // namespace

Checkpoint make_checkpoint(const RunConfig& cfg, const OperatorModel& model,
                           const AdamState& adam, long step) {
  Checkpoint ck;
  ck.config = cfg;
  ck.step = step;
  ck.rng_step = static_cast<uint64_t>(step);
  ck.adam_beta1 = adam.beta1;
  ck.adam_beta2 = adam.beta2;
  ck.adam_eps = adam.eps;
  const ParamStore& store = model.params();
  for (int i = 0; i < store.count(); ++i) {
    ck.params.emplace_back(store[i].name, store[i].value);
    ck.adam_m.emplace_back(store[i].name, adam.m[i]);
    ck.adam_v.emplace_back(store[i].name, adam.v[i]);
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "bino-checkpoint v" << ck.version << "\n";
  out << "step " << ck.step << "\n";
  out << "rng_step " << ck.rng_step << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "adam %.17g %.17g %.17g\n", ck.adam_beta1, ck.adam_beta2,
                ck.adam_eps);
  out << buf;
  out << "config-begin\n" << serialize_config(ck.config) << "config-end\n";
  write_arrays(out, "param", ck.params);
  write_arrays(out, "adam_m", ck.adam_m);
  write_arrays(out, "adam_v", ck.adam_v);
  out << "end\n";
  if (!out) throw std::runtime_error("write failure on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  Checkpoint ck;
  std::string line;
  if (!std::getline(in, line) || line.rfind("bino-checkpoint v", 0) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  ck.version = std::stoi(line.substr(17));
  if (ck.version != 1) throw std::runtime_error("unsupported checkpoint version");
  bool have_config = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "step") ls >> ck.step;
    else if (tag == "rng_step") ls >> ck.rng_step;
    else if (tag == "adam") ls >> ck.adam_beta1 >> ck.adam_beta2 >> ck.adam_eps;
    else if (tag == "config-begin") {
      std::string cfg_text;
      while (std::getline(in, line) && line != "config-end") cfg_text += line + "\n";
      ck.config = parse_config_text(cfg_text);
      have_config = true;
    } else if (tag == "param") ck.params.push_back(read_array(ls));
    else if (tag == "adam_m") ck.adam_m.push_back(read_array(ls));
    else if (tag == "adam_v") ck.adam_v.push_back(read_array(ls));
    else if (tag == "end") break;
    else throw std::runtime_error("checkpoint: unknown record '" + tag + "'");
  }
  if (!have_config) throw std::runtime_error("checkpoint: missing config block");
  return ck;
}

namespace {
const Mat& find_array(const std::vector<std::pair<std::string, Mat>>& arrays,
                      const std::string& name) {
  for (const auto& [n, m] : arrays)
    if (n == name) return m;
  throw std::runtime_error("checkpoint: missing array " + name);
}

void copy_into(Mat& dst, const Mat& src, const std::string& name) {
  if (dst.rows != src.rows || dst.cols != src.cols)
    throw std::runtime_error("checkpoint: shape mismatch for " + name);
  dst = src;
}
} // namespace

void restore_model(const Checkpoint& ck, OperatorModel& model) {
  ParamStore& store = model.params();
  if (store.count() != static_cast<int>(ck.params.size()))
    throw std::runtime_error("checkpoint: parameter count mismatch");
  for (int i = 0; i < store.count(); ++i)
    copy_into(store[i].value, find_array(ck.params, store[i].name), store[i].name);
}

void restore_adam(const Checkpoint& ck, const OperatorModel& model, AdamState& adam) {
  adam.init(model.params());
  adam.beta1 = ck.adam_beta1;
  adam.beta2 = ck.adam_beta2;
  adam.eps = ck.adam_eps;
  adam.step = ck.step;
  const ParamStore& store = model.params();
  for (int i = 0; i < store.count(); ++i) {
    copy_into(adam.m[i], find_array(ck.adam_m, store[i].name), store[i].name);
    copy_into(adam.v[i], find_array(ck.adam_v, store[i].name), store[i].name);
  }
}

} // namespace bino
