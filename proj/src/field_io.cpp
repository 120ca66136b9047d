#include "bino/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bino {

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}
} // namespace

std::string meta_comment(const FileMeta& meta) {
  std::ostringstream s;
  s << "# bino " << meta.kind << " v1 seed=" << meta.seed << " config=" << meta.config_hash;
  return s.str();
}

void write_field_file(const std::string& path, const Mat& pts, const Mat& values,
                      const Mat* truth, const FileMeta& meta) {
  if (pts.rows != values.rows) throw std::invalid_argument("write_field_file: row mismatch");
  std::ofstream out = open_out(path);
  out << meta_comment(meta) << "\n";
  out << (pts.cols == 3 ? "x,y,z,re,im" : "x,y,re,im");
  if (truth) out << ",truth_re,truth_im";
  out << "\n";
  for (int i = 0; i < pts.rows; ++i) {
    for (int d = 0; d < pts.cols; ++d) out << num(pts(i, d)) << ",";
    out << num(values(i, 0)) << "," << num(values.cols > 1 ? values(i, 1) : 0.0);
    if (truth)
      out << "," << num((*truth)(i, 0)) << "," << num(truth->cols > 1 ? (*truth)(i, 1) : 0.0);
    out << "\n";
  }
}

void write_far_field_file(const std::string& path, const std::vector<double>& thetas,
                          const std::vector<double>& phis, const Mat& values,
                          const FileMeta& meta) {
  if (static_cast<int>(thetas.size()) != values.rows || thetas.size() != phis.size())
    throw std::invalid_argument("write_far_field_file: row mismatch");
  std::ofstream out = open_out(path);
  out << meta_comment(meta) << "\n" << "theta,phi,re,im\n";
  for (int i = 0; i < values.rows; ++i)
    out << num(thetas[i]) << "," << num(phis[i]) << "," << num(values(i, 0)) << ","
        << num(values(i, 1)) << "\n";
}

void write_density_file(const std::string& path, const Mat& params, const Mat& pts,
                        const Mat& density, const FileMeta& meta) {
  std::ofstream out = open_out(path);
  out << meta_comment(meta) << "\n";
  out << (density.cols == 1 ? "alpha,x,y,v" : "alpha,x,y,v,w") << "\n";
  for (int i = 0; i < pts.rows; ++i) {
    out << num(params(i, 0));
    for (int d = 0; d < pts.cols; ++d) out << "," << num(pts(i, d));
    for (int c = 0; c < density.cols; ++c) out << "," << num(density(i, c));
    out << "\n";
  }
}

void write_sweep_table(const std::string& path, const std::vector<int>& layers,
                       const std::vector<int>& neurons, const Mat& errors,
                       const FileMeta& meta) {
  if (errors.rows != static_cast<int>(layers.size()) ||
      errors.cols != static_cast<int>(neurons.size()))
    throw std::invalid_argument("write_sweep_table: shape mismatch");
  std::ofstream out = open_out(path);
  out << meta_comment(meta) << "\n";
  out << "layers";
  for (int n : neurons) out << "," << n;
  out << "\n";
  for (size_t r = 0; r < layers.size(); ++r) {
    out << layers[r];
    for (size_t c = 0; c < neurons.size(); ++c)
      out << "," << num(errors(static_cast<int>(r), static_cast<int>(c)));
    out << "\n";
  }
}

namespace {
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}
} // namespace

FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file: " + path);
  std::string line;
  std::getline(in, line); // comment
  if (!std::getline(in, line)) throw std::runtime_error("field file truncated: " + path);
  const auto header = split_csv(line);
  FieldFile f;
  f.dim = header.size() >= 3 && header[2] == "z" ? 3 : 2;
  const bool has_truth = header.back() == "truth_im";
  std::vector<double> pts, vals, truth;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != f.dim + 2 + (has_truth ? 2 : 0))
      throw std::runtime_error("field file: bad row in " + path);
    int c = 0;
    for (int d = 0; d < f.dim; ++d) pts.push_back(std::stod(cells[c++]));
    vals.push_back(std::stod(cells[c++]));
    vals.push_back(std::stod(cells[c++]));
    if (has_truth) {
      truth.push_back(std::stod(cells[c++]));
      truth.push_back(std::stod(cells[c++]));
    }
  }
  const int n = static_cast<int>(vals.size() / 2);
  f.pts = Mat(n, f.dim, std::move(pts));
  f.values = Mat(n, 2, std::move(vals));
  if (has_truth) f.truth = Mat(n, 2, std::move(truth));
  return f;
}

Mat read_far_field_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open far-field file: " + path);
  std::string line;
  std::getline(in, line); // comment
  std::getline(in, line); // header
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw std::runtime_error("far-field file: bad row in " + path);
    vals.push_back(std::stod(cells[2]));
    vals.push_back(std::stod(cells[3]));
  }
  const int n = static_cast<int>(vals.size() / 2);
  return Mat(n, 2, std::move(vals));
}

} // namespace bino
