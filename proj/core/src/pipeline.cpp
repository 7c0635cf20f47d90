#include "ssmctl/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <thread>

#include "ssmctl/error.hpp"

namespace ssmctl {

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

unsigned thread_cap_from_env(unsigned fallback) {
  const char* raw = std::getenv("SSMCTL_THREADS");
  if (!raw) return fallback;
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(raw, raw + std::strlen(raw), v);
  if (ec != std::errc() || *ptr != '\0' || v == 0) return fallback;
  return v;
}

std::vector<LayerResult> analyze_archive(const TensorArchive& archive,
                                         const ArchiveAnalysisOptions& options) {
  const ModelDims dims = model_dims(archive);
  std::vector<int> layers = options.layers;
  if (layers.empty()) {
    for (int i = 0; i < dims.layers; ++i) layers.push_back(i);
  }
  for (int l : layers) {
    if (l < 0 || l >= dims.layers) {
      throw InvalidInput("layer " + std::to_string(l) + " not in archive (" +
                         std::to_string(dims.layers) + " layers)");
    }
  }

  const bool check_dominance = options.method == Method::JacobianExact;
  const std::size_t per_layer = kAllDirections.size();
  std::vector<InfluenceMap> maps(layers.size() * per_layer);
  std::vector<InfluenceMap> reference(check_dominance ? maps.size() : 0);

  parallel_for(maps.size(), options.threads, [&](std::size_t job) {
    const int layer = layers[job / per_layer];
    const ScanDirection dir = kAllDirections[job % per_layer];
    const GridShape grid = layer_grid(archive, layer);
    const auto systems = load_layer_systems(archive, layer, dir);
    LayerAnalysisOptions lo;
    lo.method = options.method;
    lo.epsilon = options.epsilon;
    lo.layer_index = layer;
    lo.exact_length_limit = options.exact_length_limit;
    lo.only_direction = dir;
    auto provider = [&](ScanDirection) { return systems; };
    try {
      maps[job] = analyze_layer(grid, provider, lo).directional.front();
      if (check_dominance) {
        lo.method = Method::JacobianPropagator;
        reference[job] = analyze_layer(grid, provider, lo).directional.front();
      }
    } catch (const UnstableSystem& e) {
      long pos = e.position();
      std::string where;
      if (pos >= 0) {
        const Cell c = cell_at(dir, grid, pos);
        where = " (grid cell row " + std::to_string(c.row) + ", col " +
                std::to_string(c.col) + ")";
      }
      throw UnstableSystem("layer " + std::to_string(layer) + ", " + e.what() + where,
                           pos, e.state());
    }
  });

  std::vector<LayerResult> results;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    LayerResult r;
    r.layer = layers[li];
    r.grid = layer_grid(archive, r.layer);
    auto first = maps.begin() + static_cast<std::ptrdiff_t>(li * per_layer);
    r.maps.directional.assign(first, first + static_cast<std::ptrdiff_t>(per_layer));
    r.maps.aggregated = aggregate_directions(r.maps.directional);
    if (check_dominance) {
      DominanceCheck dc;
      for (std::size_t k = 0; k < per_layer; ++k) {
        const auto& exact = maps[li * per_layer + k].values;
        const auto& prop = reference[li * per_layer + k].values;
        for (Index i = 0; i < exact.size(); ++i) {
          ++dc.cells_checked;
          if (exact.data()[i] < prop.data()[i] * (1.0 - dc.tolerance)) ++dc.violations;
        }
      }
      r.dominance = dc;
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace ssmctl
