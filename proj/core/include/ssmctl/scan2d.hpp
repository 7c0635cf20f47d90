#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ssmctl/influence.hpp"

namespace ssmctl {

struct GridShape {
  Index height = 0;
  Index width = 0;

  Index cells() const { return height * width; }
  bool operator==(const GridShape&) const = default;
};

/// The four SS2D traversals of a patch grid:
///   Fwd        (i, j) -> i W + j          (row-major)
///   Bwd        reverse of Fwd
///   TranspFwd  (i, j) -> j H + i          (column-major)
///   TranspBwd  reverse of TranspFwd
enum class ScanDirection { Fwd, Bwd, TranspFwd, TranspBwd };

inline constexpr std::array<ScanDirection, 4> kAllDirections = {
    ScanDirection::Fwd, ScanDirection::Bwd, ScanDirection::TranspFwd,
    ScanDirection::TranspBwd};

/// Archive/file tag: fwd, bwd, tfwd, tbwd.
std::string_view direction_tag(ScanDirection d);
ScanDirection parse_direction(std::string_view tag);

struct Cell {
  Index row = 0;
  Index col = 0;
  bool operator==(const Cell&) const = default;
};

Index sequence_index(ScanDirection d, const GridShape& shape, Cell cell);
Cell cell_at(ScanDirection d, const GridShape& shape, Index position);

/// H x W x C features stored as (H W) x C with row r*W + c for cell (r, c).
struct FeatureMap {
  GridShape shape;
  MatrixXd values;
};

/// L x C sequence in scan order of `d`.
MatrixXd flatten(const FeatureMap& grid, ScanDirection d);
/// Inverse of flatten.
FeatureMap unflatten(const MatrixXd& sequence, ScanDirection d,
                     const GridShape& shape);

struct InfluenceMap {
  GridShape shape;
  MatrixXd values;  // H x W
  int layer_index = 0;
  Method method = Method::JacobianPropagator;
  std::optional<ScanDirection> direction;  // empty for aggregated maps
};

/// Throws InvalidInput unless values are H x W, finite and nonnegative.
void validate(const InfluenceMap& map);

/// map[cell] = scores[sequence_index(d, cell)].
InfluenceMap unflatten_scores(std::span<const double> scores, ScanDirection d,
                              const GridShape& shape, int layer_index = 0,
                              Method method = Method::JacobianPropagator);
InfluenceMap unflatten_scores(const InfluenceScores& scores, ScanDirection d,
                              const GridShape& shape, int layer_index = 0);

/// Cellwise mean of exactly one map per direction.
InfluenceMap aggregate_directions(std::span<const InfluenceMap> maps);

/// Per-channel systems for one scan direction, each of length H W.
using SystemProvider =
    std::function<std::vector<TimeVaryingDiagonalSystem>(ScanDirection)>;

/// Selective variant: builds the systems from the flattened feature
/// sequence of that direction.
using SelectiveSystemProvider = std::function<std::vector<TimeVaryingDiagonalSystem>(
    ScanDirection, const MatrixXd& sequence)>;

struct LayerAnalysisOptions {
  Method method = Method::JacobianPropagator;
  double epsilon = kDefaultEpsilon;
  int layer_index = 0;
  Index exact_length_limit = kDefaultExactLengthLimit;
  /// Runs a single direction; the aggregated map is then that map.
  std::optional<ScanDirection> only_direction;
  /// Directions evaluated concurrently when > 1.
  unsigned threads = 1;
};

struct LayerAnalysis {
  std::vector<InfluenceMap> directional;  // kAllDirections order
  InfluenceMap aggregated;
};

LayerAnalysis analyze_layer(const GridShape& shape, const SystemProvider& provider,
                            const LayerAnalysisOptions& options);

LayerAnalysis analyze_layer(const FeatureMap& features,
                            const SelectiveSystemProvider& provider,
                            const LayerAnalysisOptions& options);

}  // namespace ssmctl
