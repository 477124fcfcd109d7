#pragma once

namespace macflow {

/// Execution policy for the per-entity kernels. threads == 1 runs the loops
/// serially and gives bit-identical results across runs.
struct Exec {
  int threads = 1;
};

}  // namespace macflow
