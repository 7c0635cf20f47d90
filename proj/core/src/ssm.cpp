#include "ssmctl/ssm.hpp"

#include <cmath>
#include <string>

#include "ssmctl/error.hpp"

namespace ssmctl {

namespace {

std::string dims(const MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

DenseLTISystem::DenseLTISystem(MatrixXd A, MatrixXd B, MatrixXd C,
                               double delta, MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)),
      delta_(delta) {
  if (A_.rows() < 1 || A_.rows() != A_.cols()) {
    throw ShapeError("DenseLTISystem: A must be square and non-empty, got " +
                     dims(A_));
  }
  if (B_.rows() != A_.rows() || B_.cols() < 1) {
    throw ShapeError("DenseLTISystem: B must be N x M with M >= 1, got " +
                     dims(B_));
  }
  if (C_.cols() != A_.rows() || C_.rows() < 1) {
    throw ShapeError("DenseLTISystem: C must be P x N with P >= 1, got " +
                     dims(C_));
  }
  if (D_.size() == 0) D_ = MatrixXd::Zero(C_.rows(), B_.cols());
  if (D_.rows() != C_.rows() || D_.cols() != B_.cols()) {
    throw ShapeError("DenseLTISystem: D must be P x M, got " + dims(D_));
  }
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
    throw InvalidParameter("DenseLTISystem: delta must be positive and finite");
  }
  if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() ||
      !D_.allFinite()) {
    throw InvalidParameter("DenseLTISystem: non-finite entry");
  }
}

bool DiscretizedDiagonalStep::stable() const {
  return a_bar.size() == 0 || a_bar.cwiseAbs().maxCoeff() < 1.0;
}

TimeVaryingDiagonalSystem::TimeVaryingDiagonalSystem(
    std::vector<DiscretizedDiagonalStep> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty()) {
    throw ShapeError("TimeVaryingDiagonalSystem: length must be >= 1");
  }
  const auto& first = steps_.front();
  state_dim_ = first.a_bar.size();
  input_dim_ = first.b_bar.cols();
  output_dim_ = first.c.rows();
  if (state_dim_ < 1 || input_dim_ < 1 || output_dim_ < 1) {
    throw ShapeError("TimeVaryingDiagonalSystem: N, M, P must be >= 1");
  }
  for (std::size_t p = 0; p < steps_.size(); ++p) {
    auto& s = steps_[p];
    if (s.d.size() == 0) s.d = MatrixXd::Zero(output_dim_, input_dim_);
    if (s.a_bar.size() != state_dim_ || s.b_bar.rows() != state_dim_ ||
        s.b_bar.cols() != input_dim_ || s.c.rows() != output_dim_ ||
        s.c.cols() != state_dim_ || s.d.rows() != output_dim_ ||
        s.d.cols() != input_dim_) {
      throw ShapeError("TimeVaryingDiagonalSystem: step " + std::to_string(p) +
                       " does not share N, M, P with step 0");
    }
    if (!s.a_bar.allFinite() || !s.b_bar.allFinite() || !s.c.allFinite() ||
        !s.d.allFinite()) {
      throw InvalidParameter("TimeVaryingDiagonalSystem: non-finite entry at "
                             "step " + std::to_string(p));
    }
  }
}

TimeVaryingDiagonalSystem TimeVaryingDiagonalSystem::constant(
    const DiscretizedDiagonalStep& step, Index length) {
  if (length < 1) {
    throw ShapeError("TimeVaryingDiagonalSystem::constant: length must be >= 1");
  }
  return TimeVaryingDiagonalSystem(
      std::vector<DiscretizedDiagonalStep>(static_cast<std::size_t>(length), step));
}

bool TimeVaryingDiagonalSystem::stable() const {
  for (const auto& s : steps_) {
    if (!s.stable()) return false;
  }
  return true;
}

StateTrajectory recurrent_scan(const TimeVaryingDiagonalSystem& system,
                               const MatrixXd& u, const VectorXd& x0) {
  if (u.rows() != system.length() || u.cols() != system.input_dim()) {
    throw ShapeError("recurrent_scan: input is " + dims(u) + ", expected " +
                     std::to_string(system.length()) + "x" +
                     std::to_string(system.input_dim()));
  }
  if (x0.size() != system.state_dim()) {
    throw ShapeError("recurrent_scan: x0 has wrong length");
  }
  StateTrajectory traj;
  traj.x0 = x0;
  traj.states.reserve(static_cast<std::size_t>(system.length()));
  traj.outputs.reserve(static_cast<std::size_t>(system.length()));
  VectorXd x = x0;
  for (Index t = 0; t < system.length(); ++t) {
    const auto& s = system.step(t);
    const VectorXd ut = u.row(t).transpose();
    x = s.a_bar.cwiseProduct(x) + s.b_bar * ut;
    traj.outputs.push_back(s.c * x + s.d * ut);
    traj.states.push_back(x);
  }
  return traj;
}

StateTrajectory recurrent_scan(const TimeVaryingDiagonalSystem& system,
                               const MatrixXd& u) {
  return recurrent_scan(system, u, VectorXd::Zero(system.state_dim()));
}

std::vector<MatrixXd> convolution_kernel(const DiscreteLTISystem& lti,
                                         Index length) {
  const Index n = lti.a_bar.rows();
  if (lti.a_bar.cols() != n || lti.b_bar.rows() != n || lti.c.cols() != n) {
    throw ShapeError("convolution_kernel: inconsistent system shapes");
  }
  if (length < 1) throw ShapeError("convolution_kernel: length must be >= 1");
  std::vector<MatrixXd> kernel;
  kernel.reserve(static_cast<std::size_t>(length));
  // Carry A^t B rather than A^t so each step is one N x N by N x M product.
  MatrixXd propagated = lti.b_bar;
  for (Index t = 0; t < length; ++t) {
    kernel.push_back(lti.c * propagated);
    propagated = lti.a_bar * propagated;
  }
  return kernel;
}

MatrixXd convolve_output(const MatrixXd& u,
                         const std::vector<MatrixXd>& kernel) {
  const auto length = static_cast<Index>(kernel.size());
  if (u.rows() != length) {
    throw ShapeError("convolve_output: kernel length " + std::to_string(length) +
                     " does not match input length " + std::to_string(u.rows()));
  }
  if (length == 0) return MatrixXd(0, 0);
  const Index outputs = kernel.front().rows();
  if (kernel.front().cols() != u.cols()) {
    throw ShapeError("convolve_output: kernel input width mismatch");
  }
  MatrixXd y = MatrixXd::Zero(length, outputs);
  for (Index t = 0; t < length; ++t) {
    for (Index i = 0; i <= t; ++i) {
      y.row(t).noalias() +=
          (kernel[static_cast<std::size_t>(t - i)] * u.row(i).transpose())
              .transpose();
    }
  }
  return y;
}

}  // namespace ssmctl
