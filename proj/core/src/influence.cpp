#include "ssmctl/influence.hpp"

#include <cmath>
#include <string>

#include "ssmctl/error.hpp"
#include "ssmctl/gramian.hpp"

namespace ssmctl {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::Naive:
      return "naive";
    case Method::JacobianPropagator:
      return "jacobian";
    case Method::JacobianExact:
      return "jacobian-exact";
    case Method::Gramian:
      return "gramian";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Naive, Method::JacobianPropagator,
                   Method::JacobianExact, Method::Gramian}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidInput("unknown method '" + std::string(name) + "'");
}

InfluenceScores::InfluenceScores(std::vector<double> scores, Method method,
                                 double epsilon)
    : scores_(std::move(scores)), method_(method), epsilon_(epsilon) {
  for (std::size_t p = 0; p < scores_.size(); ++p) {
    if (!std::isfinite(scores_[p]) || scores_[p] < 0.0) {
      throw NumericalFailure("influence score at position " + std::to_string(p) +
                             " is not a finite nonnegative number");
    }
  }
}

InfluenceScores naive_final_state_influence(const TimeVaryingDiagonalSystem& system) {
  const Index length = system.length();
  std::vector<double> scores(static_cast<std::size_t>(length));
  VectorXd product = VectorXd::Ones(system.state_dim());
  for (Index p = length - 1; p >= 0; --p) {
    if (p + 1 < length) product = product.cwiseProduct(system.step(p + 1).a_bar);
    scores[static_cast<std::size_t>(p)] =
        (product.asDiagonal() * system.step(p).b_bar).norm();
  }
  return InfluenceScores(std::move(scores), Method::Naive);
}

MatrixXd output_jacobian(const TimeVaryingDiagonalSystem& system, Index k,
                         Index j) {
  if (k < 0 || j < k || j >= system.length()) {
    throw IndexError("output_jacobian: need 0 <= k <= j < " +
                     std::to_string(system.length()) + ", got k=" +
                     std::to_string(k) + " j=" + std::to_string(j));
  }
  const auto& source = system.step(k);
  if (j == k) return system.step(k).c * source.b_bar + source.d;
  VectorXd product = VectorXd::Ones(system.state_dim());
  for (Index i = k + 1; i <= j; ++i) {
    product = product.cwiseProduct(system.step(i).a_bar);
  }
  return system.step(j).c * (product.asDiagonal() * source.b_bar);
}

std::vector<MatrixXd> future_propagators(const TimeVaryingDiagonalSystem& system) {
  const Index length = system.length();
  std::vector<MatrixXd> props(static_cast<std::size_t>(length));
  MatrixXd running = MatrixXd::Zero(system.output_dim(), system.state_dim());
  for (Index k = length - 1; k >= 0; --k) {
    props[static_cast<std::size_t>(k)] = running;
    const auto& s = system.step(k);
    // Right multiplication: reads C_j ... A_k in operator order.
    running = (s.c + running) * s.a_bar.asDiagonal();
  }
  return props;
}

InfluenceScores jacobian_influence_propagator(const TimeVaryingDiagonalSystem& system) {
  const Index length = system.length();
  std::vector<double> scores(static_cast<std::size_t>(length));
  MatrixXd propagator = MatrixXd::Zero(system.output_dim(), system.state_dim());
  for (Index k = length - 1; k >= 0; --k) {
    const auto& s = system.step(k);
    const double direct = (s.c * s.b_bar + s.d).norm();
    const double propagated = (propagator * s.b_bar).norm();
    scores[static_cast<std::size_t>(k)] = direct + propagated;
    propagator = (s.c + propagator) * s.a_bar.asDiagonal();
  }
  return InfluenceScores(std::move(scores), Method::JacobianPropagator);
}

InfluenceScores jacobian_influence_exact(const TimeVaryingDiagonalSystem& system,
                                         Index max_length) {
  const Index length = system.length();
  if (length > max_length) {
    throw ResourceLimit("jacobian_influence_exact: length " +
                        std::to_string(length) + " exceeds limit " +
                        std::to_string(max_length));
  }
  std::vector<double> scores(static_cast<std::size_t>(length));
  VectorXd product(system.state_dim());
  MatrixXd reached(system.state_dim(), system.input_dim());
  for (Index k = 0; k < length; ++k) {
    const auto& source = system.step(k);
    double total = (source.c * source.b_bar + source.d).norm();
    product.setOnes();
    for (Index j = k + 1; j < length; ++j) {
      const auto& target = system.step(j);
      product = product.cwiseProduct(target.a_bar);
      reached.noalias() = product.asDiagonal() * source.b_bar;
      total += (target.c * reached).norm();
    }
    scores[static_cast<std::size_t>(k)] = total;
  }
  return InfluenceScores(std::move(scores), Method::JacobianExact);
}

VectorXd gap_output(const StateTrajectory& trajectory) {
  if (trajectory.outputs.empty()) {
    throw ShapeError("gap_output: empty trajectory");
  }
  VectorXd sum = VectorXd::Zero(trajectory.outputs.front().size());
  for (const auto& y : trajectory.outputs) sum += y;
  return sum / static_cast<double>(trajectory.outputs.size());
}

MatrixXd gap_jacobian_analytic(const TimeVaryingDiagonalSystem& system, Index k) {
  const Index length = system.length();
  if (k < 0 || k >= length) {
    throw IndexError("gap_jacobian_analytic: position " + std::to_string(k) +
                     " out of range");
  }
  // Only P_k is needed, so stop the backward sweep at k.
  MatrixXd propagator = MatrixXd::Zero(system.output_dim(), system.state_dim());
  for (Index i = length - 1; i > k; --i) {
    const auto& s = system.step(i);
    propagator = (s.c + propagator) * s.a_bar.asDiagonal();
  }
  const auto& s = system.step(k);
  return (s.c * s.b_bar + s.d + propagator * s.b_bar) /
         static_cast<double>(length);
}

MatrixXd finite_difference_gap_jacobian(const TimeVaryingDiagonalSystem& system,
                                        const MatrixXd& u, Index k, double h) {
  if (!(h > 0.0)) throw InvalidParameter("finite_difference_gap_jacobian: h <= 0");
  if (k < 0 || k >= system.length()) {
    throw IndexError("finite_difference_gap_jacobian: position out of range");
  }
  MatrixXd jac(system.output_dim(), system.input_dim());
  MatrixXd perturbed = u;
  for (Index m = 0; m < system.input_dim(); ++m) {
    const double original = u(k, m);
    perturbed(k, m) = original + h;
    const VectorXd plus = gap_output(recurrent_scan(system, perturbed));
    perturbed(k, m) = original - h;
    const VectorXd minus = gap_output(recurrent_scan(system, perturbed));
    perturbed(k, m) = original;
    jac.col(m) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

InfluenceScores channel_influence(std::span<const TimeVaryingDiagonalSystem> channels,
                                  Method method, double epsilon,
                                  Index exact_length_limit) {
  if (channels.empty()) throw InvalidInput("channel_influence: no channels");
  if (method == Method::Gramian) return gramian_influence(channels, epsilon);

  const Index length = channels.front().length();
  std::vector<double> mean(static_cast<std::size_t>(length), 0.0);
  for (const auto& system : channels) {
    if (system.length() != length) {
      throw ShapeError("channel_influence: channels differ in length");
    }
    const InfluenceScores s = [&] {
      switch (method) {
        case Method::Naive:
          return naive_final_state_influence(system);
        case Method::JacobianPropagator:
          return jacobian_influence_propagator(system);
        case Method::JacobianExact:
          return jacobian_influence_exact(system, exact_length_limit);
        case Method::Gramian:
          break;
      }
      throw InvalidInput("channel_influence: unsupported method");
    }();
    for (Index p = 0; p < length; ++p) mean[static_cast<std::size_t>(p)] += s[p];
  }
  for (double& v : mean) v /= static_cast<double>(channels.size());
  return InfluenceScores(std::move(mean), method);
}

}  // namespace ssmctl
