#pragma once

#include "ssmctl/ssm.hpp"

namespace ssmctl {

struct ZohDiagonal {
  VectorXd a_bar;
  MatrixXd b_bar;
};

struct ZohDense {
  MatrixXd a_bar;
  MatrixXd b_bar;
};

/// Below this |delta * a_i| the input gain uses its series limit delta * b.
inline constexpr double kZohSmallExponent = 1e-8;

/// Zero-order hold for a diagonal state matrix given by its diagonal `a`:
///   a_bar_i = exp(delta a_i),  b_bar_i = (exp(delta a_i) - 1) / a_i * b_i.
ZohDiagonal discretize_zoh_diagonal(const VectorXd& a, const MatrixXd& b,
                                    double delta);

struct MatrixExpOptions {
  int max_terms = 30;
  /// Scaling target: ||M||_1 / 2^s <= this before the Taylor series.
  double scaled_norm = 0.5;
  /// Largest accepted dimension.
  Index max_dim = 64;
};

/// exp(M) by scaling and squaring around a truncated Taylor series. Throws
/// NumericalFailure when the series has not converged within the term
/// budget or the input is not finite.
MatrixXd matrix_exp(const MatrixXd& m, const MatrixExpOptions& options = {});

/// Dense ZOH. A_bar = exp(delta A); B_bar is read off the exponential of the
/// augmented matrix delta [[A, B], [0, 0]], so singular A needs no special
/// case.
ZohDense discretize_zoh_dense(const MatrixXd& A, const MatrixXd& B,
                              double delta,
                              const MatrixExpOptions& options = {});

DiscreteLTISystem discretize(const DenseLTISystem& system,
                             const MatrixExpOptions& options = {});

}  // namespace ssmctl
