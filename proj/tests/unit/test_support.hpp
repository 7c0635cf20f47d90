#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "ssmctl/ssm.hpp"

namespace ssmctl::testing {

/// Random diagonal time-varying system with |a_bar| <= a_max.
inline TimeVaryingDiagonalSystem make_system(std::mt19937_64& rng, Index n, Index m,
                                             Index p, Index length, double a_max = 0.95,
                                             bool feedthrough = false) {
  std::uniform_real_distribution<double> a_dist(-a_max, a_max);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<DiscretizedDiagonalStep> steps;
  for (Index t = 0; t < length; ++t) {
    DiscretizedDiagonalStep s;
    s.a_bar = VectorXd(n);
    s.b_bar = MatrixXd(n, m);
    s.c = MatrixXd(p, n);
    s.d = MatrixXd::Zero(p, m);
    for (Index i = 0; i < n; ++i) s.a_bar(i) = a_dist(rng);
    for (Index i = 0; i < s.b_bar.size(); ++i) s.b_bar.data()[i] = unit(rng);
    for (Index i = 0; i < s.c.size(); ++i) s.c.data()[i] = unit(rng);
    if (feedthrough) {
      for (Index i = 0; i < s.d.size(); ++i) s.d.data()[i] = unit(rng);
    }
    steps.push_back(std::move(s));
  }
  return TimeVaryingDiagonalSystem(std::move(steps));
}

/// Scalar system from per-position (a, b, c).
inline TimeVaryingDiagonalSystem scalar_system(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               const std::vector<double>& c) {
  std::vector<DiscretizedDiagonalStep> steps;
  for (std::size_t t = 0; t < a.size(); ++t) {
    steps.push_back({VectorXd::Constant(1, a[t]), MatrixXd::Constant(1, 1, b[t]),
                     MatrixXd::Constant(1, 1, c[t]), MatrixXd()});
  }
  return TimeVaryingDiagonalSystem(std::move(steps));
}

/// d y_j / d u_k read off the response to a unit impulse at k, one input
/// column at a time.
inline MatrixXd impulse_jacobian(const TimeVaryingDiagonalSystem& sys, Index k, Index j) {
  MatrixXd jac(sys.output_dim(), sys.input_dim());
  for (Index col = 0; col < sys.input_dim(); ++col) {
    MatrixXd u = MatrixXd::Zero(sys.length(), sys.input_dim());
    u(k, col) = 1.0;
    jac.col(col) = recurrent_scan(sys, u).outputs[static_cast<std::size_t>(j)];
  }
  return jac;
}

inline double max_relative_error(const std::vector<double>& got,
                                 const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    const double scale = std::max(std::abs(want[i]), 1e-300);
    worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
  }
  return worst;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ssmctl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ssmctl::testing
