#include "cli.hpp"

#include <chrono>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ssmctl/archive.hpp"
#include "ssmctl/error.hpp"
#include "ssmctl/influence.hpp"
#include "ssmctl/model.hpp"
#include "ssmctl/pipeline.hpp"
#include "ssmctl/report.hpp"
#include "ssmctl/validation.hpp"

namespace ssmctl::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct SynthFlags {
  std::uint64_t seed = 0;
  Index height = 4;
  Index width = 4;
  Index state_dim = 4;
  Index channels = 2;
  int layers = 1;
  std::string profile = "default";
  std::string out;
};

struct AnalyzeFlags {
  std::string archive;
  std::string method = "jacobian";
  std::string layer = "all";
  double epsilon = kDefaultEpsilon;
  std::vector<std::string> formats{"csv"};
  std::string output_dir;
  bool timings = false;
};

struct ValidateFlags {
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  bool inject_fault = false;
};

struct VanishFlags {
  Index length = 50;
  double decay = 0.9;
  bool compare = false;
  std::string out;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::byte> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open archive " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SynthOptions o;
  o.seed = f.seed;
  o.height = f.height;
  o.width = f.width;
  o.state_dim = f.state_dim;
  o.channels = f.channels;
  o.layers = f.layers;
  static const std::map<std::string, SynthProfile> profiles = {
      {"default", SynthProfile::Default},
      {"zero-c", SynthProfile::ZeroC},
      {"depth-sparse", SynthProfile::DepthSparse}};
  o.profile = profiles.at(f.profile);
  if (o.height < 1 || o.width < 1 || o.state_dim < 1 || o.channels < 1 || o.layers < 1) {
    throw UsageError("all dimensions must be >= 1");
  }
  const auto bytes = write_archive(synth_model(o));
  std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot write " + f.out);
  file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw UsageError("failed writing " + f.out);
  out << "wrote " << f.out << " (" << bytes.size() << " bytes, fnv1a64 "
      << checksum_fnv1a64(bytes) << ")\n";
  return kOk;
}

ordered_json stats_json(const MapStats& s) {
  return {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"entropy", s.entropy}};
}

/// Writes one map in every requested format and returns its report entry.
ordered_json emit_map(const InfluenceMap& map, const std::string& stem,
                      const std::vector<std::string>& formats, const fs::path& dir) {
  ordered_json entry = stats_json(map_stats(map.values));
  ordered_json files = ordered_json::array();
  for (const auto& fmt : formats) {
    const std::string name = stem + "." + fmt;
    if (fmt == "csv") {
      write_text_file(dir / name, format_csv(map.values));
    } else if (fmt == "pgm") {
      write_text_file(dir / name, format_pgm(map.values));
      entry["pgm_range"] = {map.values.minCoeff(), map.values.maxCoeff()};
    } else {
      ordered_json rows = ordered_json::array();
      for (Index r = 0; r < map.values.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Index c = 0; c < map.values.cols(); ++c) row.push_back(map.values(r, c));
        rows.push_back(std::move(row));
      }
      ordered_json doc = {{"layer", map.layer_index},
                          {"method", method_name(map.method)},
                          {"direction", map.direction ? ordered_json(direction_tag(*map.direction))
                                                      : ordered_json("mean")},
                          {"height", map.shape.height},
                          {"width", map.shape.width},
                          {"values", std::move(rows)}};
      write_text_file(dir / name, doc.dump(2) + "\n");
    }
    files.push_back(name);
  }
  entry["files"] = std::move(files);
  return entry;
}

int cmd_analyze(const AnalyzeFlags& f, std::ostream& out, std::ostream& err) {
  const auto t_load = std::chrono::steady_clock::now();
  ArchiveAnalysisOptions options;
  options.method = parse_method(f.method);
  options.epsilon = f.epsilon;
  if (!(f.epsilon >= 0.0)) throw UsageError("--epsilon must be >= 0");
  options.threads = thread_cap_from_env(std::max(1u, std::thread::hardware_concurrency()));
  if (f.layer != "all") {
    try {
      std::size_t used = 0;
      const int layer = std::stoi(f.layer, &used);
      if (used != f.layer.size()) throw std::invalid_argument(f.layer);
      options.layers.push_back(layer);
    } catch (const std::logic_error&) {
      throw UsageError("--layer must be an integer or 'all'");
    }
  }

  const auto bytes = read_bytes(f.archive);
  const TensorArchive archive = read_archive(bytes);
  const double load_ms = elapsed_ms(t_load);

  const auto t_analyze = std::chrono::steady_clock::now();
  std::vector<LayerResult> results;
  try {
    results = analyze_archive(archive, options);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  const double analyze_ms = elapsed_ms(t_analyze);

  const auto t_write = std::chrono::steady_clock::now();
  const fs::path dir(f.output_dir);
  fs::create_directories(dir);
  ordered_json report;
  report["tool"] = "ssmctl analyze";
  report["archive"] = {{"file", fs::path(f.archive).filename().string()},
                       {"fnv1a64", checksum_fnv1a64(bytes)}};
  report["method"] = method_name(options.method);
  report["epsilon"] = options.method == Method::Gramian ? ordered_json(options.epsilon)
                                                        : ordered_json(nullptr);
  report["entropy"] = "Shannon entropy, natural log, of each map normalized to unit sum";
  ordered_json layers = ordered_json::array();
  for (const auto& r : results) {
    const std::string prefix = "layer" + std::to_string(r.layer);
    ordered_json lj;
    lj["layer"] = r.layer;
    lj["grid"] = {{"height", r.grid.height}, {"width", r.grid.width}};
    lj["method"] = method_name(options.method);
    lj["epsilon"] = report["epsilon"];
    ordered_json dirs;
    for (const auto& m : r.maps.directional) {
      const std::string tag(direction_tag(*m.direction));
      dirs[tag] = emit_map(m, prefix + "_" + tag, f.formats, dir);
    }
    lj["directions"] = std::move(dirs);
    lj["aggregated"] = emit_map(r.maps.aggregated, prefix + "_mean", f.formats, dir);
    if (r.dominance) {
      lj["dominance"] = {{"reference", "jacobian"},
                         {"cells_checked", r.dominance->cells_checked},
                         {"violations", r.dominance->violations},
                         {"relative_tolerance", r.dominance->tolerance}};
    }
    layers.push_back(std::move(lj));
  }
  report["layers"] = std::move(layers);
  if (f.timings) {
    report["runtime_ms"] = {{"load", load_ms}, {"analyze", analyze_ms},
                            {"write", elapsed_ms(t_write)}};
  }
  write_text_file(dir / "report.json", report.dump(2) + "\n");
  out << "analyzed " << results.size() << " layer(s) with " << method_name(options.method)
      << "; outputs in " << dir.string() << "\n";
  for (const auto& r : results) {
    if (r.dominance && r.dominance->violations > 0) {
      err << "warning: layer " << r.layer << " has " << r.dominance->violations
          << " dominance violations\n";
    }
  }
  return kOk;
}

int cmd_validate(const ValidateFlags& f, std::ostream& out) {
  if (!(f.tolerance >= 0.0)) throw UsageError("--tolerance must be >= 0");
  ValidationOptions o;
  o.tolerance = f.tolerance;
  o.seed = f.seed;
  o.fault = f.inject_fault ? Fault::FlipTransitionSign : Fault::None;
  const auto checks = run_validation(o);
  bool ok = true;
  out << std::left << std::setw(42) << "check" << std::setw(16) << "observed"
      << std::setw(12) << "bound" << "result\n";
  for (const auto& c : checks) {
    std::ostringstream observed, bound;
    observed << std::setprecision(4) << c.observed;
    bound << std::setprecision(4) << c.bound;
    out << std::left << std::setw(42) << c.name << std::setw(16) << observed.str()
        << std::setw(12) << bound.str() << (c.passed ? "PASS" : "FAIL") << "\n";
    ok = ok && c.passed;
  }
  out << (ok ? "all checks passed\n" : "validation FAILED\n");
  return ok ? kOk : kValidationFailure;
}

int cmd_vanish_demo(const VanishFlags& f, std::ostream& out) {
  if (!(std::abs(f.decay) < 1.0)) throw UsageError("--decay must satisfy |a| < 1");
  if (f.length < 1) throw UsageError("--length must be >= 1");
  const auto system = TimeVaryingDiagonalSystem::constant(
      {VectorXd::Constant(1, f.decay), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1), MatrixXd()},
      f.length);
  const auto naive = naive_final_state_influence(system);
  std::string csv = f.compare ? "position,naive,jacobian\n" : "position,naive\n";
  std::optional<InfluenceScores> jac;
  if (f.compare) jac = jacobian_influence_propagator(system);
  for (Index p = 0; p < f.length; ++p) {
    csv += std::to_string(p) + "," + format_double(naive[p]);
    if (jac) csv += "," + format_double((*jac)[p]);
    csv += "\n";
  }
  if (f.out.empty()) {
    out << csv;
  } else {
    write_text_file(f.out, csv);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controllability-based influence analysis for state space models", "ssmctl"};
  app.require_subcommand(1);

  SynthFlags synth;
  auto* s = app.add_subcommand("synth", "Write a seeded synthetic model archive");
  s->add_option("--seed", synth.seed, "RNG seed");
  s->add_option("--height", synth.height, "Patch grid rows");
  s->add_option("--width", synth.width, "Patch grid columns");
  s->add_option("--state-dim", synth.state_dim, "State dimension N");
  s->add_option("--channels", synth.channels, "Inner channels D");
  s->add_option("--layers", synth.layers, "Number of layers");
  s->add_option("--profile", synth.profile, "Parameter profile")
      ->check(CLI::IsMember({"default", "zero-c", "depth-sparse"}));
  s->add_option("--out", synth.out, "Output .ssmz path")->required();

  AnalyzeFlags analyze;
  auto* a = app.add_subcommand("analyze", "Compute influence maps for an archive");
  a->add_option("archive,--archive", analyze.archive, "Input .ssmz archive")->required();
  a->add_option("--method", analyze.method, "Influence method")
      ->check(CLI::IsMember({"naive", "jacobian", "jacobian-exact", "gramian"}));
  a->add_option("--layer", analyze.layer, "Layer index or 'all'");
  a->add_option("--epsilon", analyze.epsilon, "Gramian regularizer");
  a->add_option("--format", analyze.formats, "Map formats: csv, pgm, json")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "pgm", "json"}));
  a->add_option("--output-dir", analyze.output_dir, "Directory for maps and report.json")
      ->required();
  a->add_flag("--timings", analyze.timings, "Include per-stage runtime in report.json");

  ValidateFlags validate;
  auto* v = app.add_subcommand("validate", "Run the numerical invariant suite");
  v->add_option("--tolerance", validate.tolerance, "Upper cap on every check's bound");
  v->add_option("--seed", validate.seed, "RNG seed for the instances");
  v->add_flag("--inject-fault", validate.inject_fault)->group("");

  VanishFlags vanish;
  auto* d = app.add_subcommand("vanish-demo", "Naive vs Jacobian scores on a constant scalar system");
  d->add_option("--length", vanish.length, "Sequence length L");
  d->add_option("--decay", vanish.decay, "Constant transition a, |a| < 1");
  d->add_flag("--compare", vanish.compare, "Add a jacobian column");
  d->add_option("--out", vanish.out, "CSV path (default: stdout)");

  std::vector<const char*> argv;
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kUsage;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (a->parsed()) return cmd_analyze(analyze, out, err);
    if (v->parsed()) return cmd_validate(validate, out);
    if (d->parsed()) return cmd_vanish_demo(vanish, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnstableSystem& e) {
    err << "error: unstable system: " << e.what() << "\n";
    return kModelError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace ssmctl::cli
