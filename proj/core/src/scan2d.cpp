#include "ssmctl/scan2d.hpp"

#include <cmath>
#include <future>
#include <string>

#include "ssmctl/error.hpp"

namespace ssmctl {

std::string_view direction_tag(ScanDirection d) {
  switch (d) {
    case ScanDirection::Fwd:
      return "fwd";
    case ScanDirection::Bwd:
      return "bwd";
    case ScanDirection::TranspFwd:
      return "tfwd";
    case ScanDirection::TranspBwd:
      return "tbwd";
  }
  return "unknown";
}

ScanDirection parse_direction(std::string_view tag) {
  for (ScanDirection d : kAllDirections) {
    if (direction_tag(d) == tag) return d;
  }
  throw InvalidInput("unknown scan direction '" + std::string(tag) + "'");
}

namespace {

void check_shape(const GridShape& shape) {
  if (shape.height < 1 || shape.width < 1) {
    throw ShapeError("grid height and width must be >= 1");
  }
}

}  // namespace

Index sequence_index(ScanDirection d, const GridShape& shape, Cell cell) {
  check_shape(shape);
  if (cell.row < 0 || cell.row >= shape.height || cell.col < 0 || cell.col >= shape.width) {
    throw IndexError("cell (" + std::to_string(cell.row) + ", " + std::to_string(cell.col) +
                     ") outside the grid");
  }
  const Index last = shape.cells() - 1;
  switch (d) {
    case ScanDirection::Fwd:
      return cell.row * shape.width + cell.col;
    case ScanDirection::Bwd:
      return last - (cell.row * shape.width + cell.col);
    case ScanDirection::TranspFwd:
      return cell.col * shape.height + cell.row;
    case ScanDirection::TranspBwd:
      return last - (cell.col * shape.height + cell.row);
  }
  return -1;
}

Cell cell_at(ScanDirection d, const GridShape& shape, Index position) {
  check_shape(shape);
  if (position < 0 || position >= shape.cells()) {
    throw IndexError("position " + std::to_string(position) + " outside the grid");
  }
  const Index last = shape.cells() - 1;
  switch (d) {
    case ScanDirection::Fwd:
      return {position / shape.width, position % shape.width};
    case ScanDirection::Bwd:
      return {(last - position) / shape.width, (last - position) % shape.width};
    case ScanDirection::TranspFwd:
      return {position % shape.height, position / shape.height};
    case ScanDirection::TranspBwd:
      return {(last - position) % shape.height, (last - position) / shape.height};
  }
  return {};
}

MatrixXd flatten(const FeatureMap& grid, ScanDirection d) {
  check_shape(grid.shape);
  if (grid.values.rows() != grid.shape.cells()) {
    throw ShapeError("flatten: feature rows do not match H*W");
  }
  MatrixXd seq(grid.values.rows(), grid.values.cols());
  for (Index p = 0; p < seq.rows(); ++p) {
    const Cell c = cell_at(d, grid.shape, p);
    seq.row(p) = grid.values.row(c.row * grid.shape.width + c.col);
  }
  return seq;
}

FeatureMap unflatten(const MatrixXd& sequence, ScanDirection d,
                     const GridShape& shape) {
  check_shape(shape);
  if (sequence.rows() != shape.cells()) {
    throw ShapeError("unflatten: sequence length does not match H*W");
  }
  FeatureMap grid{shape, MatrixXd(sequence.rows(), sequence.cols())};
  for (Index p = 0; p < sequence.rows(); ++p) {
    const Cell c = cell_at(d, shape, p);
    grid.values.row(c.row * shape.width + c.col) = sequence.row(p);
  }
  return grid;
}

void validate(const InfluenceMap& map) {
  if (map.values.rows() != map.shape.height || map.values.cols() != map.shape.width) {
    throw InvalidInput("influence map values do not match its grid shape");
  }
  if (!map.values.allFinite() || (map.values.size() > 0 && map.values.minCoeff() < 0.0)) {
    throw InvalidInput("influence map has negative or non-finite values");
  }
}

InfluenceMap unflatten_scores(std::span<const double> scores, ScanDirection d,
                              const GridShape& shape, int layer_index,
                              Method method) {
  check_shape(shape);
  if (static_cast<Index>(scores.size()) != shape.cells()) {
    throw ShapeError("unflatten_scores: " + std::to_string(scores.size()) +
                     " scores for a " + std::to_string(shape.height) + "x" +
                     std::to_string(shape.width) + " grid");
  }
  InfluenceMap map{shape, MatrixXd(shape.height, shape.width), layer_index,
                   method, d};
  for (Index r = 0; r < shape.height; ++r) {
    for (Index c = 0; c < shape.width; ++c) {
      map.values(r, c) = scores[static_cast<std::size_t>(sequence_index(d, shape, {r, c}))];
    }
  }
  return map;
}

InfluenceMap unflatten_scores(const InfluenceScores& scores, ScanDirection d,
                              const GridShape& shape, int layer_index) {
  return unflatten_scores(scores.scores(), d, shape, layer_index, scores.method());
}

InfluenceMap aggregate_directions(std::span<const InfluenceMap> maps) {
  if (maps.size() != kAllDirections.size()) {
    throw InvalidInput("aggregate_directions: expected 4 maps, got " +
                       std::to_string(maps.size()));
  }
  std::array<bool, 4> seen{};
  const auto& first = maps.front();
  for (const auto& m : maps) {
    if (!m.direction) throw InvalidInput("aggregate_directions: map without direction");
    auto& flag = seen[static_cast<std::size_t>(*m.direction)];
    if (flag) {
      throw InvalidInput("aggregate_directions: duplicate direction " +
                         std::string(direction_tag(*m.direction)));
    }
    flag = true;
    if (!(m.shape == first.shape) || m.layer_index != first.layer_index ||
        m.method != first.method) {
      throw InvalidInput("aggregate_directions: maps differ in shape, layer or method");
    }
    validate(m);
  }
  InfluenceMap out{first.shape, MatrixXd::Zero(first.shape.height, first.shape.width),
                   first.layer_index, first.method, std::nullopt};
  for (const auto& m : maps) out.values += m.values;
  out.values *= 0.25;
  return out;
}

namespace {

[[noreturn]] void rethrow_with_direction(ScanDirection d) {
  const std::string prefix = "direction " + std::string(direction_tag(d)) + ": ";
  try {
    throw;
  } catch (const UnstableSystem& e) {
    throw UnstableSystem(prefix + e.what(), e.position(), e.state());
  } catch (const ShapeError& e) {
    throw ShapeError(prefix + e.what());
  } catch (const ResourceLimit& e) {
    throw ResourceLimit(prefix + e.what());
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(prefix + e.what());
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(prefix + e.what());
  }
}

InfluenceMap analyze_direction(const GridShape& shape, const SystemProvider& provider,
                               const LayerAnalysisOptions& options, ScanDirection d) {
  try {
    const auto systems = provider(d);
    for (const auto& s : systems) {
      if (s.length() != shape.cells()) {
        throw ShapeError("system length " + std::to_string(s.length()) +
                         " does not match grid cells " + std::to_string(shape.cells()));
      }
    }
    const auto scores = channel_influence(systems, options.method, options.epsilon,
                                          options.exact_length_limit);
    return unflatten_scores(scores, d, shape, options.layer_index);
  } catch (...) {
    rethrow_with_direction(d);
  }
}

}  // namespace

LayerAnalysis analyze_layer(const GridShape& shape, const SystemProvider& provider,
                            const LayerAnalysisOptions& options) {
  check_shape(shape);
  LayerAnalysis out;
  if (options.only_direction) {
    out.directional.push_back(analyze_direction(shape, provider, options,
                                                *options.only_direction));
    out.aggregated = out.directional.front();
    out.aggregated.direction.reset();
    return out;
  }
  if (options.threads > 1) {
    std::vector<std::future<InfluenceMap>> jobs;
    for (ScanDirection d : kAllDirections) {
      jobs.push_back(std::async(std::launch::async, [&, d] {
        return analyze_direction(shape, provider, options, d);
      }));
    }
    for (auto& j : jobs) out.directional.push_back(j.get());
  } else {
    for (ScanDirection d : kAllDirections) {
      out.directional.push_back(analyze_direction(shape, provider, options, d));
    }
  }
  out.aggregated = aggregate_directions(out.directional);
  return out;
}

LayerAnalysis analyze_layer(const FeatureMap& features,
                            const SelectiveSystemProvider& provider,
                            const LayerAnalysisOptions& options) {
  return analyze_layer(
      features.shape,
      [&](ScanDirection d) { return provider(d, flatten(features, d)); }, options);
}

}  // namespace ssmctl
