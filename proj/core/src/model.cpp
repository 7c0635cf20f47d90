#include "ssmctl/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "ssmctl/discretize.hpp"
#include "ssmctl/error.hpp"

namespace ssmctl {

namespace {

long meta_long(const TensorArchive& archive, const std::string& key) {
  auto it = archive.metadata.find(key);
  if (it == archive.metadata.end()) throw SchemaError("missing metadata key " + key);
  long v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaError("metadata key " + key + " is not an integer");
  }
  return v;
}

const Tensor& tensor(const TensorArchive& archive, const std::string& name) {
  auto it = archive.tensors.find(name);
  if (it == archive.tensors.end()) throw SchemaError("missing tensor " + name);
  return it->second;
}

MatrixXd as_matrix(const Tensor& t, Index rows, Index cols, const std::string& name) {
  if (t.element_count() != rows * cols) {
    throw SchemaError("tensor " + name + " does not have " + std::to_string(rows) +
                      "x" + std::to_string(cols) + " elements");
  }
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = t.data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

Tensor from_matrix(const MatrixXd& m) {
  Tensor t;
  t.dtype = DType::F32;
  t.shape = {m.rows(), m.cols()};
  t.data.reserve(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      t.data.push_back(static_cast<double>(static_cast<float>(m(r, c))));
    }
  }
  return t;
}

std::string layer_prefix(int layer) { return "layers." + std::to_string(layer); }

}  // namespace

ModelDims model_dims(const TensorArchive& archive) {
  return {static_cast<int>(meta_long(archive, "num_layers")),
          meta_long(archive, "state_dim"), meta_long(archive, "channels")};
}

GridShape layer_grid(const TensorArchive& archive, int layer) {
  return {meta_long(archive, layer_prefix(layer) + ".height"),
          meta_long(archive, layer_prefix(layer) + ".width")};
}

LayerParams layer_params(const TensorArchive& archive, int layer,
                         ScanDirection direction) {
  const ModelDims dims = model_dims(archive);
  if (layer < 0 || layer >= dims.layers) {
    throw SchemaError("layer " + std::to_string(layer) + " not in archive (" +
                      std::to_string(dims.layers) + " layers)");
  }
  LayerParams p;
  p.grid = layer_grid(archive, layer);
  const Index len = p.grid.cells();
  const std::string lp = layer_prefix(layer);
  const std::string dp = lp + ".dirs." + std::string(direction_tag(direction));
  p.a = as_matrix(tensor(archive, lp + ".a"), dims.channels, dims.state_dim, lp + ".a");
  p.delta = as_matrix(tensor(archive, dp + ".delta"), len, dims.channels, dp + ".delta");
  p.b = as_matrix(tensor(archive, dp + ".b"), len, dims.state_dim, dp + ".b");
  p.c = as_matrix(tensor(archive, dp + ".c"), len, dims.state_dim, dp + ".c");
  if (auto it = archive.tensors.find(lp + ".d_feed"); it != archive.tensors.end()) {
    p.d_feed = as_matrix(it->second, dims.channels, 1, lp + ".d_feed").col(0);
  }
  return p;
}

std::vector<TimeVaryingDiagonalSystem> layer_systems(const LayerParams& params) {
  const Index len = params.delta.rows();
  const Index channels = params.delta.cols();
  std::vector<TimeVaryingDiagonalSystem> systems;
  systems.reserve(static_cast<std::size_t>(channels));
  for (Index d = 0; d < channels; ++d) {
    const VectorXd a = params.a.row(d).transpose();
    std::vector<DiscretizedDiagonalStep> steps;
    steps.reserve(static_cast<std::size_t>(len));
    for (Index p = 0; p < len; ++p) {
      auto zoh = discretize_zoh_diagonal(a, params.b.row(p).transpose(), params.delta(p, d));
      MatrixXd feed = MatrixXd::Zero(1, 1);
      if (params.d_feed) feed(0, 0) = (*params.d_feed)(d);
      steps.push_back({std::move(zoh.a_bar), std::move(zoh.b_bar), params.c.row(p), feed});
    }
    systems.emplace_back(std::move(steps));
  }
  return systems;
}

std::vector<TimeVaryingDiagonalSystem> load_layer_systems(const TensorArchive& archive,
                                                          int layer,
                                                          ScanDirection direction) {
  return layer_systems(layer_params(archive, layer, direction));
}

TensorArchive synth_model(const SynthOptions& o) {
  if (o.height < 1 || o.width < 1 || o.state_dim < 1 || o.channels < 1 || o.layers < 1) {
    throw InvalidParameter("synth_model: all dimensions must be >= 1");
  }
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> a_dist(0.5, 4.0);
  std::uniform_real_distribution<double> delta_dist(0.01, 0.2);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(o.state_dim));
  const GridShape grid{o.height, o.width};
  const Index cells = grid.cells();

  TensorArchive archive;
  archive.metadata = {
      {"schema_version", kSchemaVersion},
      {"num_layers", std::to_string(o.layers)},
      {"state_dim", std::to_string(o.state_dim)},
      {"channels", std::to_string(o.channels)},
      {"num_dirs", "4"},
      {"source_hook", "synthetic"},
      {"synth_seed", std::to_string(o.seed)},
  };

  for (int layer = 0; layer < o.layers; ++layer) {
    const std::string lp = layer_prefix(layer);
    archive.metadata[lp + ".height"] = std::to_string(o.height);
    archive.metadata[lp + ".width"] = std::to_string(o.width);

    MatrixXd a(o.channels, o.state_dim);
    for (Index d = 0; d < o.channels; ++d) {
      for (Index i = 0; i < o.state_dim; ++i) a(d, i) = -a_dist(rng);
    }
    // Cell-level parameters in row-major cell order.
    MatrixXd delta(cells, o.channels), b(cells, o.state_dim), c(cells, o.state_dim);
    for (Index p = 0; p < cells; ++p) {
      for (Index d = 0; d < o.channels; ++d) delta(p, d) = delta_dist(rng);
      for (Index i = 0; i < o.state_dim; ++i) b(p, i) = normal(rng) * scale;
      for (Index i = 0; i < o.state_dim; ++i) c(p, i) = normal(rng) * scale;
    }
    if (o.profile == SynthProfile::ZeroC) c.setZero();
    if (o.profile == SynthProfile::DepthSparse) {
      Index keep = cells;
      for (int l = 0; l < layer; ++l) keep = std::max<Index>(1, keep / 4);
      std::vector<Index> order(static_cast<std::size_t>(cells));
      std::iota(order.begin(), order.end(), Index{0});
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t k = static_cast<std::size_t>(keep); k < order.size(); ++k) {
        c.row(order[k]) *= 0.01;
      }
    }

    archive.tensors[lp + ".a"] = from_matrix(a);
    for (ScanDirection dir : kAllDirections) {
      MatrixXd sd(cells, o.channels), sb(cells, o.state_dim), sc(cells, o.state_dim);
      for (Index p = 0; p < cells; ++p) {
        const Cell cell = cell_at(dir, grid, p);
        const Index src = cell.row * grid.width + cell.col;
        sd.row(p) = delta.row(src);
        sb.row(p) = b.row(src);
        sc.row(p) = c.row(src);
      }
      const std::string dp = lp + ".dirs." + std::string(direction_tag(dir));
      archive.tensors[dp + ".delta"] = from_matrix(sd);
      archive.tensors[dp + ".b"] = from_matrix(sb);
      archive.tensors[dp + ".c"] = from_matrix(sc);
    }
  }
  return archive;
}

}  // namespace ssmctl
