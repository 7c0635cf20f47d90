#include "ssmctl/oracle.hpp"

namespace ssmctl::oracle {

TimeVaryingDiagonalSystem random_system(std::mt19937_64& rng,
                                        const RandomSystemSpec& spec) {
  std::uniform_real_distribution<double> a_dist(-spec.a_max, spec.a_max);
  std::uniform_real_distribution<double> v_dist(-spec.scale, spec.scale);
  auto fill = [&](Index rows, Index cols) {
    MatrixXd m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = v_dist(rng);
    return m;
  };
  std::vector<DiscretizedDiagonalStep> steps;
  for (Index p = 0; p < spec.length; ++p) {
    DiscretizedDiagonalStep s;
    s.a_bar = VectorXd(spec.state_dim);
    for (Index i = 0; i < spec.state_dim; ++i) s.a_bar(i) = a_dist(rng);
    s.b_bar = fill(spec.state_dim, spec.input_dim);
    s.c = fill(spec.output_dim, spec.state_dim);
    s.d = spec.feedthrough ? fill(spec.output_dim, spec.input_dim)
                           : MatrixXd::Zero(spec.output_dim, spec.input_dim);
    steps.push_back(std::move(s));
  }
  return TimeVaryingDiagonalSystem(std::move(steps));
}

MatrixXd transition(const TimeVaryingDiagonalSystem& system, Index from, Index to) {
  const Index n = system.state_dim();
  MatrixXd product = MatrixXd::Identity(n, n);
  for (Index i = from; i <= to; ++i) {
    const MatrixXd a = system.step(i).a_bar.asDiagonal();
    product = a * product;
  }
  return product;
}

MatrixXd output_jacobian(const TimeVaryingDiagonalSystem& system, Index k, Index j) {
  const auto& src = system.step(k);
  const auto& dst = system.step(j);
  MatrixXd jac = dst.c * transition(system, k + 1, j) * src.b_bar;
  if (j == k) jac += src.d;
  return jac;
}

std::vector<double> exact_scores(const TimeVaryingDiagonalSystem& system) {
  std::vector<double> scores;
  for (Index k = 0; k < system.length(); ++k) {
    double total = 0.0;
    for (Index j = k; j < system.length(); ++j) total += output_jacobian(system, k, j).norm();
    scores.push_back(total);
  }
  return scores;
}

std::vector<double> propagated_norms(const TimeVaryingDiagonalSystem& system) {
  std::vector<double> out;
  for (Index k = 0; k < system.length(); ++k) {
    MatrixXd sum = MatrixXd::Zero(system.output_dim(), system.state_dim());
    for (Index j = k + 1; j < system.length(); ++j) {
      sum += system.step(j).c * transition(system, k + 1, j);
    }
    out.push_back((sum * system.step(k).b_bar).norm());
  }
  return out;
}

std::vector<double> propagator_scores(const TimeVaryingDiagonalSystem& system) {
  std::vector<double> out = propagated_norms(system);
  for (Index k = 0; k < system.length(); ++k) {
    const auto& s = system.step(k);
    out[static_cast<std::size_t>(k)] += (s.c * s.b_bar + s.d).norm();
  }
  return out;
}

std::vector<double> naive_scores(const TimeVaryingDiagonalSystem& system) {
  std::vector<double> out;
  const Index last = system.length() - 1;
  for (Index k = 0; k <= last; ++k) {
    out.push_back((transition(system, k + 1, last) * system.step(k).b_bar).norm());
  }
  return out;
}

VectorXd gramian_dense_sum(const VectorXd& a_bar, const MatrixXd& b_bar, long horizon) {
  const MatrixXd a = a_bar.asDiagonal();
  const MatrixXd bbt = b_bar * b_bar.transpose();
  MatrixXd power = MatrixXd::Identity(a.rows(), a.cols());
  MatrixXd w = MatrixXd::Zero(a.rows(), a.cols());
  for (long t = 0; t < horizon; ++t) {
    w += power * bbt * power.transpose();
    power = a * power;
  }
  return w.diagonal();
}

}  // namespace ssmctl::oracle
