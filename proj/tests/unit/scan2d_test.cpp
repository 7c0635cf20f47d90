#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ssmctl/error.hpp"
#include "ssmctl/scan2d.hpp"
#include "test_support.hpp"

namespace ssmctl {
namespace {

FeatureMap labeled_grid(GridShape shape) {
  FeatureMap f{shape, MatrixXd(shape.cells(), 1)};
  for (Index i = 0; i < shape.cells(); ++i) f.values(i, 0) = static_cast<double>(i + 1);
  return f;
}

std::vector<double> column(const MatrixXd& m) {
  return std::vector<double>(m.data(), m.data() + m.rows());
}

TEST(ScanOrder, SingletonGrid) {
  const GridShape one{1, 1};
  for (auto d : kAllDirections) {
    EXPECT_EQ(sequence_index(d, one, {0, 0}), 0);
    EXPECT_EQ(cell_at(d, one, 0), (Cell{0, 0}));
  }
}

TEST(ScanOrder, TwoByTwoEnumeration) {
  const auto grid = labeled_grid({2, 2});
  EXPECT_EQ(column(flatten(grid, ScanDirection::Fwd)), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(column(flatten(grid, ScanDirection::Bwd)), (std::vector<double>{4, 3, 2, 1}));
  EXPECT_EQ(column(flatten(grid, ScanDirection::TranspFwd)), (std::vector<double>{1, 3, 2, 4}));
  EXPECT_EQ(column(flatten(grid, ScanDirection::TranspBwd)), (std::vector<double>{4, 2, 3, 1}));
}

TEST(ScanOrder, RectangularTranspose) {
  // 2 x 3 grid: column-major walk visits (0,0),(1,0),(0,1),(1,1),(0,2),(1,2).
  const auto grid = labeled_grid({2, 3});
  EXPECT_EQ(column(flatten(grid, ScanDirection::TranspFwd)),
            (std::vector<double>{1, 4, 2, 5, 3, 6}));
}

TEST(ScanOrder, ExhaustiveBijection) {
  for (Index h = 1; h <= 5; ++h) {
    for (Index w = 1; w <= 5; ++w) {
      const GridShape shape{h, w};
      for (auto d : kAllDirections) {
        std::set<Index> seen;
        for (Index r = 0; r < h; ++r) {
          for (Index c = 0; c < w; ++c) {
            const Index p = sequence_index(d, shape, {r, c});
            ASSERT_GE(p, 0);
            ASSERT_LT(p, shape.cells());
            seen.insert(p);
            ASSERT_EQ(cell_at(d, shape, p), (Cell{r, c}));
          }
        }
        EXPECT_EQ(static_cast<Index>(seen.size()), shape.cells());
        const FeatureMap f{shape, MatrixXd::Random(shape.cells(), 3)};
        EXPECT_EQ(unflatten(flatten(f, d), d, shape).values, f.values);
      }
    }
  }
}

TEST(ScanOrder, ReversedPairsAreRotations) {
  for (Index h = 1; h <= 4; ++h) {
    for (Index w = 1; w <= 4; ++w) {
      const GridShape shape{h, w};
      for (Index p = 0; p < shape.cells(); ++p) {
        EXPECT_EQ(cell_at(ScanDirection::Bwd, shape, p),
                  cell_at(ScanDirection::Fwd, shape, shape.cells() - 1 - p));
        EXPECT_EQ(cell_at(ScanDirection::TranspBwd, shape, p),
                  cell_at(ScanDirection::TranspFwd, shape, shape.cells() - 1 - p));
      }
    }
  }
}

TEST(ScanOrder, TagsRoundTrip) {
  for (auto d : kAllDirections) EXPECT_EQ(parse_direction(direction_tag(d)), d);
  EXPECT_THROW(parse_direction("sideways"), InvalidInput);
  EXPECT_THROW(sequence_index(ScanDirection::Fwd, {0, 3}, {0, 0}), ShapeError);
  EXPECT_THROW(sequence_index(ScanDirection::Fwd, {2, 3}, {2, 0}), IndexError);
  EXPECT_THROW(cell_at(ScanDirection::TranspBwd, {2, 3}, 6), IndexError);
}

TEST(UnflattenScores, ConstantScores) {
  const std::vector<double> s(6, 2.5);
  for (auto d : kAllDirections) {
    const auto m = unflatten_scores(s, d, {2, 3});
    EXPECT_EQ(m.values, MatrixXd::Constant(2, 3, 2.5));
    EXPECT_EQ(m.direction, d);
  }
}

TEST(UnflattenScores, ForwardAndBackward) {
  const std::vector<double> s{1, 2, 3, 4};
  MatrixXd fwd(2, 2), bwd(2, 2);
  fwd << 1, 2, 3, 4;
  bwd << 4, 3, 2, 1;
  EXPECT_EQ(unflatten_scores(s, ScanDirection::Fwd, {2, 2}).values, fwd);
  EXPECT_EQ(unflatten_scores(s, ScanDirection::Bwd, {2, 2}).values, bwd);
}

TEST(UnflattenScores, LengthMismatch) {
  const std::vector<double> s{1, 2, 3};
  EXPECT_THROW(unflatten_scores(s, ScanDirection::Fwd, {2, 2}), ShapeError);
}

std::vector<InfluenceMap> constant_maps(GridShape shape, std::array<double, 4> values) {
  std::vector<InfluenceMap> maps;
  for (std::size_t i = 0; i < 4; ++i) {
    InfluenceMap m;
    m.shape = shape;
    m.values = MatrixXd::Constant(shape.height, shape.width, values[i]);
    m.direction = kAllDirections[i];
    maps.push_back(m);
  }
  return maps;
}

TEST(AggregateDirections, MeanOfConstants) {
  const auto agg = aggregate_directions(constant_maps({3, 2}, {1, 2, 3, 4}));
  EXPECT_EQ(agg.values, MatrixXd::Constant(3, 2, 2.5));
  EXPECT_FALSE(agg.direction.has_value());
  const auto same = aggregate_directions(constant_maps({3, 2}, {7, 7, 7, 7}));
  EXPECT_EQ(same.values, MatrixXd::Constant(3, 2, 7.0));
}

TEST(AggregateDirections, BoundsAndConservation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  auto maps = constant_maps({4, 5}, {0, 0, 0, 0});
  for (auto& m : maps) {
    for (Index i = 0; i < m.values.size(); ++i) m.values.data()[i] = pos(rng);
  }
  const auto agg = aggregate_directions(maps);
  double total = 0.0;
  for (const auto& m : maps) total += m.values.sum();
  EXPECT_NEAR(agg.values.sum(), total / 4.0, 1e-12);
  for (Index i = 0; i < agg.values.size(); ++i) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& m : maps) {
      lo = std::min(lo, m.values.data()[i]);
      hi = std::max(hi, m.values.data()[i]);
    }
    EXPECT_GE(agg.values.data()[i], lo);
    EXPECT_LE(agg.values.data()[i], hi);
  }
}

TEST(AggregateDirections, RejectsMissingOrDuplicate) {
  auto maps = constant_maps({2, 2}, {1, 2, 3, 4});
  auto three = maps;
  three.pop_back();
  EXPECT_THROW(aggregate_directions(three), InvalidInput);
  auto dup = maps;
  dup[3].direction = ScanDirection::Fwd;
  EXPECT_THROW(aggregate_directions(dup), InvalidInput);
  auto shapes = maps;
  shapes[2].shape = {1, 4};
  shapes[2].values = MatrixXd::Ones(1, 4);
  EXPECT_THROW(aggregate_directions(shapes), InvalidInput);
}

TEST(ValidateMap, RejectsBadValues) {
  InfluenceMap m;
  m.shape = {2, 2};
  m.values = MatrixXd::Ones(2, 2);
  EXPECT_NO_THROW(validate(m));
  m.values(0, 1) = -1.0;
  EXPECT_THROW(validate(m), InvalidInput);
  m.values = MatrixXd::Ones(2, 3);
  EXPECT_THROW(validate(m), InvalidInput);
}

std::vector<TimeVaryingDiagonalSystem> scalar_channel(const GridShape& shape, ScanDirection d,
                                                      double c_scale) {
  std::vector<double> a, b, c;
  for (Index p = 0; p < shape.cells(); ++p) {
    const Cell cell = cell_at(d, shape, p);
    const double id = static_cast<double>(cell.row * shape.width + cell.col);
    a.push_back(0.1 + 0.1 * id);
    b.push_back(1.0 + id);
    c.push_back(c_scale * (0.5 - id));
  }
  return {testing::scalar_system(a, b, c)};
}

TEST(AnalyzeLayer, MatchesHandComposition) {
  const GridShape shape{2, 2};
  const auto provider = [&](ScanDirection d) { return scalar_channel(shape, d, 1.0); };
  const auto result = analyze_layer(shape, provider, {});
  MatrixXd want = MatrixXd::Zero(2, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto d = kAllDirections[i];
    const auto scores = jacobian_influence_propagator(provider(d).front());
    const auto map = unflatten_scores(scores, d, shape);
    EXPECT_EQ(result.directional[i].values, map.values);
    want += map.values;
  }
  EXPECT_LE((result.aggregated.values - want / 4.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AnalyzeLayer, GramianWithZeroOutputIsZero) {
  const GridShape shape{3, 2};
  LayerAnalysisOptions o;
  o.method = Method::Gramian;
  o.epsilon = 0.0;
  const auto result =
      analyze_layer(shape, [&](ScanDirection d) { return scalar_channel(shape, d, 0.0); }, o);
  EXPECT_EQ(result.aggregated.values, MatrixXd::Zero(3, 2));
}

TEST(AnalyzeLayer, SingleDirectionHook) {
  const GridShape shape{2, 3};
  LayerAnalysisOptions o;
  o.only_direction = ScanDirection::TranspBwd;
  const auto result =
      analyze_layer(shape, [&](ScanDirection d) { return scalar_channel(shape, d, 1.0); }, o);
  ASSERT_EQ(result.directional.size(), 1u);
  EXPECT_EQ(result.aggregated.values, result.directional.front().values);
}

TEST(AnalyzeLayer, ThreadedMatchesSerial) {
  const GridShape shape{3, 3};
  const auto provider = [&](ScanDirection d) { return scalar_channel(shape, d, 1.0); };
  LayerAnalysisOptions o;
  const auto serial = analyze_layer(shape, provider, o);
  o.threads = 4;
  const auto parallel = analyze_layer(shape, provider, o);
  EXPECT_EQ(serial.aggregated.values, parallel.aggregated.values);
}

TEST(AnalyzeLayer, SelectiveProviderSeesScanOrder) {
  const auto features = labeled_grid({2, 2});
  std::vector<std::vector<double>> seen;
  const auto provider = [&](ScanDirection, const MatrixXd& seq) {
    seen.push_back(column(seq));
    std::vector<double> a(4, 0.5), b(4, 1.0), c(4, 1.0);
    return std::vector<TimeVaryingDiagonalSystem>{testing::scalar_system(a, b, c)};
  };
  analyze_layer(features, provider, {});
  ASSERT_EQ(seen.size(), 4u);
  EXPECT_EQ(seen[0], (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(seen[2], (std::vector<double>{1, 3, 2, 4}));
}

TEST(AnalyzeLayer, ErrorsNameTheDirection) {
  const GridShape shape{2, 2};
  LayerAnalysisOptions o;
  o.method = Method::Gramian;
  o.epsilon = 0.0;
  const auto provider = [&](ScanDirection) {
    return std::vector<TimeVaryingDiagonalSystem>{
        testing::scalar_system({0.5, 1.5, 0.5, 0.5}, {1, 1, 1, 1}, {1, 1, 1, 1})};
  };
  try {
    analyze_layer(shape, provider, o);
    FAIL() << "expected UnstableSystem";
  } catch (const UnstableSystem& e) {
    EXPECT_NE(std::string(e.what()).find("fwd"), std::string::npos);
    EXPECT_EQ(e.position(), 1);
  }
}

}  // namespace
}  // namespace ssmctl
