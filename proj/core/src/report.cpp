#include "ssmctl/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "ssmctl/error.hpp"

namespace ssmctl {

MapStats map_stats(const MatrixXd& values) {
  MapStats s;
  if (values.size() == 0) return s;
  s.min = values.minCoeff();
  s.max = values.maxCoeff();
  const double total = values.sum();
  s.mean = total / static_cast<double>(values.size());
  if (total > 0.0) {
    for (Index i = 0; i < values.size(); ++i) {
      const double p = values.data()[i] / total;
      if (p > 0.0) s.entropy -= p * std::log(p);
    }
  }
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_csv(const MatrixXd& values) {
  std::string out;
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += format_double(values(r, c));
    }
    out += '\n';
  }
  return out;
}

MatrixXd parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw ParseError("CSV cell is not a number: '" + line.substr(start, end - start) + "'");
      }
      row.push_back(v);
      start = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("CSV rows have different lengths");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return MatrixXd(0, 0);
  MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

MatrixXd read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string format_pgm(const MatrixXd& values) {
  constexpr int kMaxVal = 65535;
  // Netpbm asks for lines of at most 70 characters.
  constexpr std::size_t kLineLimit = 70;
  std::string out = "P2\n" + std::to_string(values.cols()) + " " +
                    std::to_string(values.rows()) + "\n" + std::to_string(kMaxVal) + "\n";
  const double lo = values.size() ? values.minCoeff() : 0.0;
  const double hi = values.size() ? values.maxCoeff() : 0.0;
  const double span = hi - lo;
  for (Index r = 0; r < values.rows(); ++r) {
    std::string line;
    for (Index c = 0; c < values.cols(); ++c) {
      const long level =
          span > 0.0 ? std::lround((values(r, c) - lo) / span * kMaxVal) : 0L;
      const std::string token = std::to_string(level);
      if (!line.empty() && line.size() + 1 + token.size() > kLineLimit) {
        out += line + '\n';
        line.clear();
      }
      if (!line.empty()) line += ' ';
      line += token;
    }
    out += line + '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidInput("failed writing " + path.string());
}

}  // namespace ssmctl
