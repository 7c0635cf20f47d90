#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ssmctl/ssm.hpp"

namespace ssmctl {

enum class Method { Naive, JacobianPropagator, JacobianExact, Gramian };

/// CLI spelling: naive, jacobian, jacobian-exact, gramian.
std::string_view method_name(Method method);
Method parse_method(std::string_view name);

/// Default regularizer for the closed-form Gramian.
inline constexpr double kDefaultEpsilon = 1e-6;

/// Default O(L^2) guard for jacobian_influence_exact.
inline constexpr Index kDefaultExactLengthLimit = 4096;

/// One nonnegative finite score per sequence position.
class InfluenceScores {
 public:
  /// Throws NumericalFailure if any score is negative or not finite.
  InfluenceScores(std::vector<double> scores, Method method,
                  double epsilon = 0.0);

  const std::vector<double>& scores() const { return scores_; }
  double operator[](Index p) const { return scores_[static_cast<std::size_t>(p)]; }
  Index size() const { return static_cast<Index>(scores_.size()); }
  Method method() const { return method_; }
  double epsilon() const { return epsilon_; }

 private:
  std::vector<double> scores_;
  Method method_;
  double epsilon_;
};

/// Norm of the map from u_p to the final state x_{L-1}:
///   score(p) = || (prod_{j=p+1}^{L-1} diag(a_bar_j)) B_bar_p ||_F.
/// The last position has an empty product (identity).
InfluenceScores naive_final_state_influence(const TimeVaryingDiagonalSystem& system);

/// d y_j / d u_k with parameters held fixed (k <= j, 0-based):
///   j == k:  C_k B_k + D_k
///   j >  k:  C_j (prod_{i=k+1}^{j} diag(a_bar_i)) B_k
/// Throws IndexError for out-of-range or j < k.
MatrixXd output_jacobian(const TimeVaryingDiagonalSystem& system, Index k,
                         Index j);

/// Future-influence propagator at every position:
///   P_k = sum_{j>k} C_j prod_{i=k+1}^{j} diag(a_bar_i),   P_{L-1} = 0,
/// built backwards with P_{k-1} = (C_k + P_k) diag(a_bar_k).
/// Element k is P_out x N.
std::vector<MatrixXd> future_propagators(const TimeVaryingDiagonalSystem& system);

/// Single backward pass: score(k) = ||C_k B_k + D_k||_F + ||P_k B_k||_F.
/// O(L N max(M, P)) time, one running propagator of extra space.
InfluenceScores jacobian_influence_propagator(const TimeVaryingDiagonalSystem& system);

/// Literal sum of per-output norms:
///   score(k) = sum_{j>=k} ||d y_j / d u_k||_F.
/// Throws ResourceLimit when length() exceeds `max_length`.
InfluenceScores jacobian_influence_exact(const TimeVaryingDiagonalSystem& system,
                                         Index max_length = kDefaultExactLengthLimit);

/// Mean output over the trajectory.
VectorXd gap_output(const StateTrajectory& trajectory);

/// Jacobian of gap_output with respect to u_k:
///   (1/L) (C_k B_k + D_k + P_k B_k).
MatrixXd gap_jacobian_analytic(const TimeVaryingDiagonalSystem& system, Index k);

/// Central differences of gap_output(recurrent_scan(system, u)) over each
/// input coordinate at position k.
MatrixXd finite_difference_gap_jacobian(const TimeVaryingDiagonalSystem& system,
                                        const MatrixXd& u, Index k, double h);

/// Scores for a set of per-channel single-input systems, averaged over
/// channels. For Method::Gramian `epsilon` is the regularizer; it is ignored
/// otherwise. All channels must have the same length.
InfluenceScores channel_influence(std::span<const TimeVaryingDiagonalSystem> channels,
                                  Method method, double epsilon = kDefaultEpsilon,
                                  Index exact_length_limit = kDefaultExactLengthLimit);

}  // namespace ssmctl
