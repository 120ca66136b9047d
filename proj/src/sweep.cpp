#include "bino/sweep.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bino/field_io.hpp"
#include "bino/trainer.hpp"

namespace bino {

namespace {
std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line) + ": bad integer list '" + v + "'");
    }
  }
  if (out.empty()) throw ConfigError("line " + std::to_string(line) + ": empty list");
  return out;
}
} // namespace

SweepSettings parse_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep config: " + path);
  SweepSettings sw;
  std::string base_text, raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    const auto b = s.find_first_not_of(" \t\r");
    const std::string t = b == std::string::npos ? "" : s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    if (!t.empty() && t.front() == '[') section = t.substr(1, t.size() - 2);
    if (section != "sweep") {
      base_text += raw + "\n";
      continue;
    }
    if (t.empty() || t.front() == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    auto trim = [](std::string x) {
      const auto b2 = x.find_first_not_of(" \t");
      const auto e2 = x.find_last_not_of(" \t");
      return b2 == std::string::npos ? std::string() : x.substr(b2, e2 - b2 + 1);
    };
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key == "layers") sw.layers = parse_int_list(val, line);
    else if (key == "neurons") sw.neurons = parse_int_list(val, line);
    else if (key == "p") sw.ps = parse_int_list(val, line);
    else if (key == "modes") {
      sw.modes.clear();
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item == "fourier") sw.modes.push_back(DecoderMode::kFourier);
        else if (item == "plain") sw.modes.push_back(DecoderMode::kPlain);
        else throw ConfigError("line " + std::to_string(line) + ": modes must be fourier|plain");
      }
    } else if (key == "steps") sw.steps_per_cell = std::stol(val);
    else if (key == "eval_t") sw.eval_t = std::stod(val);
    else if (key == "grid_n") sw.grid_n = std::stoi(val);
    else throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                           "' in section [sweep]");
  }
  sw.base = parse_config_text(base_text);
  return sw;
}

std::vector<std::string> run_sweep(const SweepSettings& sweep, const std::string& out_dir) {
  const RunConfig& base = sweep.base;
  if (base.pde == PdeKind::kHelmholtz3D)
    throw ConfigError("run_sweep: the sweep harness evaluates the 2D interior problems");
  std::filesystem::create_directories(out_dir);

  const ProblemSpec spec = base.problem();
  const ParamCurve2D curve = ParamCurve2D::from_family(spec.curve_family);
  const FieldGrid grid = make_interior_grid(curve, sweep.eval_t, sweep.grid_n, 0.01);
  const Mat truth = interior_truth(spec, grid.points);
  const ExecPolicy pol{true, base.deterministic};

  std::vector<std::string> files;
  for (DecoderMode mode : sweep.modes) {
    for (int p : sweep.ps) {
      Mat errors(static_cast<int>(sweep.layers.size()), static_cast<int>(sweep.neurons.size()));
      for (size_t r = 0; r < sweep.layers.size(); ++r) {
        for (size_t c = 0; c < sweep.neurons.size(); ++c) {
          RunConfig cell = base;
          cell.encoder_depth = cell.decoder_depth = sweep.layers[r];
          cell.encoder_width = cell.decoder_width = sweep.neurons[c];
          cell.latent_p = p;
          cell.decoder_mode = mode;
          cell.steps = sweep.steps_per_cell;

          OperatorModel model(cell.network(), cell.seed);
          AdamState adam;
          adam.init(model.params());
          train_loop(model, spec, cell.batch_shape(), cell.schedule(), adam, cell.seed, 0,
                     cell.steps, pol, nullptr);
          const Mat field =
              eval_field(model, spec, sweep.eval_t, grid.points, cell.m_eval, cell.seed);
          errors(static_cast<int>(r), static_cast<int>(c)) = relative_l2(field, truth);
        }
      }
      const std::string name = std::string("sweep_") +
                               (mode == DecoderMode::kFourier ? "fourier" : "plain") + "_p" +
                               std::to_string(p) + ".csv";
      const std::string path = out_dir + "/" + name;
      write_sweep_table(path, sweep.layers, sweep.neurons, errors,
                        {"sweep", base.seed, config_hash(base)});
      files.push_back(path);
    }
  }
  return files;
}

} // namespace bino
