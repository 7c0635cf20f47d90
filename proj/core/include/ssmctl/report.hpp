#pragma once

#include <filesystem>
#include <string>

#include "ssmctl/scan2d.hpp"

namespace ssmctl {

struct MapStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// Shannon entropy (natural log) of the map normalized to unit sum; 0 for
  /// an all-zero map.
  double entropy = 0.0;
};

MapStats map_stats(const MatrixXd& values);

/// One grid row per line, comma separated, shortest round-trip decimal.
std::string format_csv(const MatrixXd& values);
MatrixXd parse_csv(const std::string& text);
MatrixXd read_csv_file(const std::filesystem::path& path);

/// Plain (P2) 16-bit PGM, min-max normalized to [0, 65535]. A constant map
/// renders as all zeros.
std::string format_pgm(const MatrixXd& values);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ssmctl
