#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssmctl/archive.hpp"
#include "ssmctl/scan2d.hpp"

namespace ssmctl {

/// Parameters of one layer along one scan direction, promoted to double.
struct LayerParams {
  GridShape grid;
  MatrixXd delta;               // L x D
  MatrixXd a;                   // D x N
  MatrixXd b;                   // L x N
  MatrixXd c;                   // L x N
  std::optional<VectorXd> d_feed;  // D
};

struct ModelDims {
  int layers = 0;
  Index state_dim = 0;
  Index channels = 0;
};

/// Reads dimensions from archive metadata. SchemaError if absent.
ModelDims model_dims(const TensorArchive& archive);
GridShape layer_grid(const TensorArchive& archive, int layer);

LayerParams layer_params(const TensorArchive& archive, int layer,
                         ScanDirection direction);

/// One single-input single-output system per channel d:
///   a_bar_p = exp(delta_{p,d} a_d),   b_bar_p = ZOH gain * b_p,
///   c_p = c_p^T (1 x N),              D = d_feed_d (or 0).
std::vector<TimeVaryingDiagonalSystem> layer_systems(const LayerParams& params);
std::vector<TimeVaryingDiagonalSystem> load_layer_systems(const TensorArchive& archive,
                                                          int layer,
                                                          ScanDirection direction);

enum class SynthProfile {
  Default,
  /// All output rows zero.
  ZeroC,
  /// Layer l keeps large |C| rows only on about cells / 4^l positions; the
  /// rest are damped, so deeper layers concentrate their influence.
  DepthSparse,
};

struct SynthOptions {
  std::uint64_t seed = 0;
  Index height = 4;
  Index width = 4;
  Index state_dim = 4;
  Index channels = 2;
  int layers = 1;
  SynthProfile profile = SynthProfile::Default;
};

/// Deterministic pseudo-random model. Continuous a is drawn from
/// [-4, -0.5], delta from [0.01, 0.2], b and c standard normal / sqrt(N).
/// Cell-level parameters are shared by all directions and written in each
/// direction's scan order.
TensorArchive synth_model(const SynthOptions& options);

}  // namespace ssmctl
