#pragma once

#include <span>

#include "ssmctl/influence.hpp"

namespace ssmctl {

/// Diagonal of sum_{t=0}^{T-1} A^t B B^T (A^T)^t for diagonal A, summed term
/// by term. Valid for any a, stable or not.
VectorXd gramian_finite_horizon(const VectorXd& a_bar, const MatrixXd& b_bar,
                                long horizon);

/// Regularized infinite-horizon diagonal:
///   w_i = ||B_{i,:}||^2 / (1 - a_i^2 + epsilon).
/// Throws UnstableSystem if any denominator is <= 0 (in particular |a_i| >= 1
/// with epsilon = 0). `position` only labels the error.
VectorXd gramian_closed_form_diag(const VectorXd& a_bar, const MatrixXd& b_bar,
                                  double epsilon, long position = -1);

struct LyapunovResidual {
  /// ||diag(a w a - w + B B^T)||_2
  double diagonal = 0.0;
  /// Frobenius mass of the off-diagonal part of B B^T, which a diagonal w
  /// cannot absorb.
  double off_diagonal = 0.0;
};

/// Residual of the discrete Lyapunov equation A W A^T - W + B B^T = 0 with
/// W = diag(w).
LyapunovResidual lyapunov_residual(const VectorXd& a_bar, const VectorXd& w,
                                   const MatrixXd& b_bar);

struct GramianDiagnostics {
  VectorXd w_finite;
  VectorXd w_closed;
  double lyapunov_residual_norm = 0.0;
  double off_diagonal_mass = 0.0;
};

/// Finite horizon against closed form (epsilon = 0) for one location.
GramianDiagnostics gramian_diagnostics(const VectorXd& a_bar,
                                       const MatrixXd& b_bar, long horizon);

/// Per-channel parameters at a single location. `b_bar` is N x M and `c` is
/// P x N; the observability weight of state i is sum_p c_{p,i}^2.
struct ChannelLocation {
  VectorXd a_bar;
  MatrixXd b_bar;
  MatrixXd c;
};

/// (1/D) sum_d sum_i c_{i,d}^2 w_{i,d}.
double gramian_influence_score(std::span<const ChannelLocation> channels,
                               double epsilon, long position = -1);

/// gramian_influence_score at every position of the per-channel systems.
InfluenceScores gramian_influence(std::span<const TimeVaryingDiagonalSystem> channels,
                                  double epsilon);

}  // namespace ssmctl
