#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ssmctl/model.hpp"

namespace ssmctl {

struct ArchiveAnalysisOptions {
  Method method = Method::JacobianPropagator;
  double epsilon = kDefaultEpsilon;
  /// Empty means every layer.
  std::vector<int> layers;
  Index exact_length_limit = kDefaultExactLengthLimit;
  /// Worker cap for (layer, direction) jobs.
  unsigned threads = 1;
};

/// Cellwise exact >= propagator comparison for one layer.
struct DominanceCheck {
  long cells_checked = 0;
  long violations = 0;
  /// Relative slack allowed for rounding.
  double tolerance = 1e-12;
};

struct LayerResult {
  int layer = 0;
  GridShape grid;
  LayerAnalysis maps;
  std::optional<DominanceCheck> dominance;  // set for jacobian-exact
};

/// Runs the selected method over every requested layer and direction.
/// UnstableSystem errors are re-raised with the layer prefixed.
std::vector<LayerResult> analyze_archive(const TensorArchive& archive,
                                         const ArchiveAnalysisOptions& options);

/// Calls fn(i) for i in [0, count) on at most `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

/// SSMCTL_THREADS if set to a positive integer, otherwise `fallback`.
unsigned thread_cap_from_env(unsigned fallback);

}  // namespace ssmctl
