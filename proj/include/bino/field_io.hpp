#pragma once

#include <string>
#include <vector>

#include "bino/mat.hpp"

namespace bino {

/// Comment-line metadata stamped on every emitted file.
struct FileMeta {
  std::string kind;        // "field", "far-field", "density", "sweep", "loss-trace"
  uint64_t seed = 0;
  std::string config_hash; // hex
};

std::string meta_comment(const FileMeta& meta);

/// Delimited field file: `x,y[,z],re,im[,truth_re,truth_im]`. values has one
/// column (im written as 0) or two. truth may be null.
void write_field_file(const std::string& path, const Mat& pts, const Mat& values,
                      const Mat* truth, const FileMeta& meta);

/// `theta,phi,re,im` on a direction grid.
void write_far_field_file(const std::string& path, const std::vector<double>& thetas,
                          const std::vector<double>& phis, const Mat& values,
                          const FileMeta& meta);

/// `alpha,x,y,<channel columns>` boundary density at curve nodes.
void write_density_file(const std::string& path, const Mat& params, const Mat& pts,
                        const Mat& density, const FileMeta& meta);

/// Sweep table: rows = layer counts, columns = neuron counts.
void write_sweep_table(const std::string& path, const std::vector<int>& layers,
                       const std::vector<int>& neurons, const Mat& errors,
                       const FileMeta& meta);

struct FieldFile {
  Mat pts;
  Mat values; // [n x 2] (re, im)
  Mat truth;  // [n x 2] when present, else empty
  int dim = 0;
};
FieldFile read_field_file(const std::string& path);

/// Reads the (re, im) columns of a far-field file.
Mat read_far_field_values(const std::string& path);

} // namespace bino
