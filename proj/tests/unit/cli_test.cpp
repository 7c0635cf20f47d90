#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "ssmctl/archive.hpp"
#include "ssmctl/model.hpp"
#include "ssmctl/pipeline.hpp"
#include "ssmctl/report.hpp"
#include "test_support.hpp"

namespace ssmctl {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ssmctl");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

TEST(CliSynth, DeterministicFile) {
  const auto dir = testing::scratch_dir("cli_synth");
  const std::vector<std::string> flags{"synth", "--seed", "0", "--height", "2", "--width", "2",
                                       "--state-dim", "2", "--channels", "1", "--layers", "1"};
  auto a = flags, b = flags;
  a.insert(a.end(), {"--out", (dir / "a.ssmz").string()});
  b.insert(b.end(), {"--out", (dir / "b.ssmz").string()});
  const auto ra = run(a), rb = run(b);
  ASSERT_EQ(ra.code, cli::kOk) << ra.err;
  ASSERT_EQ(rb.code, cli::kOk);
  EXPECT_EQ(slurp(dir / "a.ssmz"), slurp(dir / "b.ssmz"));
  const auto checksum = [](const std::string& s) { return s.substr(s.find("fnv1a64")); };
  EXPECT_EQ(checksum(ra.out), checksum(rb.out));
  EXPECT_NO_THROW(read_archive_file(dir / "a.ssmz"));
}

TEST(CliSynth, MissingOutIsUsageError) {
  const auto r = run({"synth", "--seed", "1"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(CliSynth, BadDimensionsAreUsageErrors) {
  const auto dir = testing::scratch_dir("cli_synth_bad");
  EXPECT_EQ(run({"synth", "--height", "0", "--out", (dir / "m.ssmz").string()}).code,
            cli::kUsage);
  EXPECT_EQ(run({"synth", "--profile", "odd", "--out", (dir / "m.ssmz").string()}).code,
            cli::kUsage);
}

TEST(Cli, UnknownSubcommandAndNoSubcommand) {
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({}).code, cli::kUsage);
}

class CliAnalyze : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    archive_ = (dir_ / "m.ssmz").string();
    ASSERT_EQ(run({"synth", "--seed", "4", "--height", "3", "--width", "2", "--layers", "2",
                   "--out", archive_})
                  .code,
              cli::kOk);
  }
  fs::path dir_;
  std::string archive_;
};

TEST_F(CliAnalyze, WritesMapsAndReport) {
  const auto out = dir_ / "out";
  const auto r = run({"analyze", archive_, "--format", "csv,pgm,json", "--output-dir",
                      out.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  for (int layer = 0; layer < 2; ++layer) {
    for (const char* tag : {"fwd", "bwd", "tfwd", "tbwd", "mean"}) {
      for (const char* ext : {"csv", "pgm", "json"}) {
        EXPECT_TRUE(fs::exists(out / ("layer" + std::to_string(layer) + "_" + tag + "." + ext)));
      }
    }
  }
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report["method"], "jacobian");
  EXPECT_EQ(report["layers"].size(), 2u);
  EXPECT_FALSE(report.contains("runtime_ms"));
  EXPECT_TRUE(report["layers"][0]["aggregated"].contains("entropy"));
}

TEST_F(CliAnalyze, CsvMatchesInMemoryMap) {
  const auto out = dir_ / "out";
  ASSERT_EQ(run({"analyze", "--archive", archive_, "--layer", "1", "--output-dir", out.string()})
                .code,
            cli::kOk);
  ArchiveAnalysisOptions o;
  o.layers = {1};
  const auto results = analyze_archive(read_archive_file(archive_), o);
  EXPECT_EQ(read_csv_file(out / "layer1_mean.csv"), results[0].maps.aggregated.values);
  EXPECT_EQ(read_csv_file(out / "layer1_tbwd.csv"), results[0].maps.directional[3].values);
  EXPECT_FALSE(fs::exists(out / "layer0_mean.csv"));
}

TEST_F(CliAnalyze, RepeatedRunsAreByteIdentical) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run({"analyze", archive_, "--method", "gramian", "--format", "csv,json",
                 "--output-dir", a.string()})
                .code,
            cli::kOk);
  ASSERT_EQ(run({"analyze", archive_, "--method", "gramian", "--format", "csv,json",
                 "--output-dir", b.string()})
                .code,
            cli::kOk);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
  }
}

TEST_F(CliAnalyze, TimingsAreOptIn) {
  const auto out = dir_ / "out";
  ASSERT_EQ(run({"analyze", archive_, "--timings", "--output-dir", out.string()}).code, cli::kOk);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_TRUE(report.contains("runtime_ms"));
}

TEST_F(CliAnalyze, ExactReportsDominance) {
  const auto out = dir_ / "out";
  ASSERT_EQ(run({"analyze", archive_, "--method", "jacobian-exact", "--output-dir", out.string()})
                .code,
            cli::kOk);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  for (const auto& layer : report["layers"]) {
    EXPECT_EQ(layer["dominance"]["violations"], 0);
    EXPECT_EQ(layer["dominance"]["cells_checked"], 4 * 6);
  }
}

TEST_F(CliAnalyze, UsageErrors) {
  const auto out = (dir_ / "out").string();
  EXPECT_EQ(run({"analyze", archive_}).code, cli::kUsage);
  EXPECT_EQ(run({"analyze", archive_, "--method", "magic", "--output-dir", out}).code,
            cli::kUsage);
  EXPECT_EQ(run({"analyze", archive_, "--layer", "7", "--output-dir", out}).code, cli::kUsage);
  EXPECT_EQ(run({"analyze", archive_, "--layer", "x", "--output-dir", out}).code, cli::kUsage);
  EXPECT_EQ(run({"analyze", archive_, "--format", "png", "--output-dir", out}).code,
            cli::kUsage);
}

TEST_F(CliAnalyze, CorruptArchiveIsModelError) {
  auto bytes = slurp(archive_);
  bytes.resize(bytes.size() - 10);
  std::ofstream(dir_ / "cut.ssmz", std::ios::binary) << bytes;
  EXPECT_EQ(run({"analyze", (dir_ / "cut.ssmz").string(), "--output-dir",
                 (dir_ / "out").string()})
                .code,
            cli::kModelError);
}

TEST(CliGramian, ZeroOutputArchiveGivesZeroMaps) {
  const auto dir = testing::scratch_dir("cli_zero_c");
  const auto archive = (dir / "z.ssmz").string();
  ASSERT_EQ(run({"synth", "--profile", "zero-c", "--out", archive}).code, cli::kOk);
  ASSERT_EQ(run({"analyze", archive, "--method", "gramian", "--output-dir", (dir / "o").string()})
                .code,
            cli::kOk);
  for (const char* tag : {"fwd", "bwd", "tfwd", "tbwd", "mean"}) {
    const MatrixXd m = read_csv_file(dir / "o" / (std::string("layer0_") + tag + ".csv"));
    EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(CliGramian, UnstableArchiveExitsWithLocation) {
  const auto dir = testing::scratch_dir("cli_unstable");
  SynthOptions o;
  auto archive = synth_model(o);
  archive.tensors.at("layers.0.a").data[0] = 1.0;
  write_archive_file(archive, dir / "u.ssmz");
  const auto r = run({"analyze", (dir / "u.ssmz").string(), "--method", "gramian", "--epsilon",
                      "0", "--output-dir", (dir / "o").string()});
  EXPECT_EQ(r.code, cli::kModelError);
  EXPECT_NE(r.err.find("layer 0"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("position"), std::string::npos) << r.err;
}

TEST(CliValidate, DefaultPasses) {
  const auto r = run({"validate"});
  EXPECT_EQ(r.code, cli::kOk) << r.out;
  EXPECT_NE(r.out.find("jacobian.exact_vs_bruteforce"), std::string::npos);
}

TEST(CliValidate, ZeroToleranceFails) {
  EXPECT_EQ(run({"validate", "--tolerance", "0"}).code, cli::kValidationFailure);
}

TEST(CliValidate, InjectedFaultFails) {
  EXPECT_EQ(run({"validate", "--inject-fault"}).code, cli::kValidationFailure);
}

TEST(CliVanishDemo, GeometricNaiveColumn) {
  const auto r = run({"vanish-demo", "--length", "50", "--decay", "0.9"});
  ASSERT_EQ(r.code, cli::kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "position,naive");
  int p = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    EXPECT_EQ(std::stoi(line.substr(0, comma)), p);
    const double v = std::stod(line.substr(comma + 1));
    EXPECT_NEAR(std::log(v), (49 - p) * std::log(0.9), 1e-12);
    ++p;
  }
  EXPECT_EQ(p, 50);
}

TEST(CliVanishDemo, CompareContrast) {
  const auto r = run({"vanish-demo", "--compare"});
  ASSERT_EQ(r.code, cli::kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "position,naive,jacobian");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    rows.emplace_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), std::stod(line.substr(c2 + 1)));
  }
  ASSERT_EQ(rows.size(), 50u);
  EXPECT_GT(rows.front().second / rows.back().second, rows.front().first / rows.back().first);
}

TEST(CliVanishDemo, SinglePositionIsDirectTerm) {
  const auto r = run({"vanish-demo", "--length", "1", "--compare"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out, "position,naive,jacobian\n0,1,1\n");
}

TEST(CliVanishDemo, RejectsUnstableDecay) {
  EXPECT_EQ(run({"vanish-demo", "--decay", "1.0"}).code, cli::kUsage);
  EXPECT_EQ(run({"vanish-demo", "--decay", "-1.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"vanish-demo", "--length", "0"}).code, cli::kUsage);
}

TEST(CliVanishDemo, WritesFile) {
  const auto dir = testing::scratch_dir("cli_vanish");
  ASSERT_EQ(run({"vanish-demo", "--length", "3", "--out", (dir / "v.csv").string()}).code,
            cli::kOk);
  EXPECT_EQ(slurp(dir / "v.csv").substr(0, 15), "position,naive\n");
}

}  // namespace
}  // namespace ssmctl
