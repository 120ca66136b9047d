#pragma once

namespace bino {

/// Execution policy for the compute kernels. Every hot loop in the library
/// has an OpenMP path and a serial path; the serial path is the reference
/// the parallel one is tested against.
struct ExecPolicy {
  bool parallel = true;      // use the OpenMP kernels
  bool deterministic = true; // fixed-order reductions (bit-stable across runs)
};

namespace par {

/// Process-wide default policy. Kernels that are not handed an explicit
/// policy read this one. Single writer (CLI setup), many readers.
ExecPolicy& config();

int max_threads();

} // namespace par

} // namespace bino
