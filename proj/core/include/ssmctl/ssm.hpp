#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace ssmctl {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Continuous-time dense system x' = A x + B u, y = C x + D u, sampled at
/// timescale `delta`.
class DenseLTISystem {
 public:
  /// D defaults to a zero P x M matrix when left empty.
  DenseLTISystem(MatrixXd A, MatrixXd B, MatrixXd C, double delta,
                 MatrixXd D = MatrixXd());

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& C() const { return C_; }
  const MatrixXd& D() const { return D_; }
  double delta() const { return delta_; }

  Index state_dim() const { return A_.rows(); }
  Index input_dim() const { return B_.cols(); }
  Index output_dim() const { return C_.rows(); }

 private:
  MatrixXd A_, B_, C_, D_;
  double delta_;
};

/// Discrete LTI system (A_bar, B_bar, C, D) produced by ZOH sampling of a
/// DenseLTISystem.
struct DiscreteLTISystem {
  MatrixXd a_bar;
  MatrixXd b_bar;
  MatrixXd c;
  MatrixXd d;
};

/// One step of a diagonal time-varying recurrence:
///   x_t = diag(a_bar) x_{t-1} + b_bar u_t,   y_t = c x_t + d u_t.
struct DiscretizedDiagonalStep {
  VectorXd a_bar;  // N
  MatrixXd b_bar;  // N x M
  MatrixXd c;      // P x N
  MatrixXd d;      // P x M

  /// max_i |a_bar_i| < 1. Recorded only; nothing refuses unstable steps.
  bool stable() const;
};

/// Ordered sequence of diagonal steps sharing N, M, P. Positions are
/// 0-based throughout the library: position p in [0, length()).
class TimeVaryingDiagonalSystem {
 public:
  /// Validates shapes and finiteness. An empty `d` in any step is replaced
  /// by the P x M zero matrix.
  explicit TimeVaryingDiagonalSystem(std::vector<DiscretizedDiagonalStep> steps);

  /// Repeats one step `length` times (an LTI system).
  static TimeVaryingDiagonalSystem constant(const DiscretizedDiagonalStep& step,
                                            Index length);

  Index length() const { return static_cast<Index>(steps_.size()); }
  Index state_dim() const { return state_dim_; }
  Index input_dim() const { return input_dim_; }
  Index output_dim() const { return output_dim_; }

  const DiscretizedDiagonalStep& step(Index p) const {
    return steps_[static_cast<std::size_t>(p)];
  }
  const std::vector<DiscretizedDiagonalStep>& steps() const { return steps_; }

  bool stable() const;

 private:
  std::vector<DiscretizedDiagonalStep> steps_;
  Index state_dim_ = 0;
  Index input_dim_ = 0;
  Index output_dim_ = 0;
};

struct StateTrajectory {
  std::vector<VectorXd> states;   // x_0 .. x_{L-1} (after each input)
  std::vector<VectorXd> outputs;  // y_0 .. y_{L-1}
  VectorXd x0;                    // state before the first input
};

/// Runs the recurrence over `u` (L x M, one row per position).
StateTrajectory recurrent_scan(const TimeVaryingDiagonalSystem& system,
                               const MatrixXd& u, const VectorXd& x0);
StateTrajectory recurrent_scan(const TimeVaryingDiagonalSystem& system,
                               const MatrixXd& u);

/// kernel[t] = C A_bar^t B_bar for t = 0 .. length-1.
std::vector<MatrixXd> convolution_kernel(const DiscreteLTISystem& lti,
                                         Index length);

/// Causal convolution y_t = sum_{i<=t} kernel[t-i] u_i with zero initial
/// state; feedthrough is not part of the kernel. Returns L x P.
MatrixXd convolve_output(const MatrixXd& u, const std::vector<MatrixXd>& kernel);

}  // namespace ssmctl
