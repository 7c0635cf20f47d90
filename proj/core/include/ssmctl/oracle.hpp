#pragma once

// Brute-force reference computations. They build every transition as a
// dense N x N matrix and multiply chains explicitly, sharing no code path
// with the fast routines in influence.hpp.

#include <cstdint>
#include <random>
#include <vector>

#include "ssmctl/ssm.hpp"

namespace ssmctl::oracle {

struct RandomSystemSpec {
  Index state_dim = 4;
  Index input_dim = 1;
  Index output_dim = 1;
  Index length = 16;
  /// a_bar drawn from [-a_max, a_max]; stable when a_max < 1.
  double a_max = 0.95;
  /// Entries of b, c, d drawn from [-scale, scale].
  double scale = 1.0;
  bool feedthrough = false;
};

TimeVaryingDiagonalSystem random_system(std::mt19937_64& rng,
                                        const RandomSystemSpec& spec);

/// A_to ... A_from as a dense product (identity when from > to).
MatrixXd transition(const TimeVaryingDiagonalSystem& system, Index from, Index to);

/// Dense d y_j / d u_k.
MatrixXd output_jacobian(const TimeVaryingDiagonalSystem& system, Index k, Index j);

/// sum_{j>=k} ||d y_j / d u_k||_F, double loop over pairs.
std::vector<double> exact_scores(const TimeVaryingDiagonalSystem& system);

/// || (sum_{j>k} C_j A_j ... A_{k+1}) B_k ||_F.
std::vector<double> propagated_norms(const TimeVaryingDiagonalSystem& system);

/// ||C_k B_k + D_k||_F + propagated_norms.
std::vector<double> propagator_scores(const TimeVaryingDiagonalSystem& system);

/// || A_{L-1} ... A_{k+1} B_k ||_F.
std::vector<double> naive_scores(const TimeVaryingDiagonalSystem& system);

/// Diagonal of sum_{t<T} A^t B B^T (A^T)^t with dense matrices.
VectorXd gramian_dense_sum(const VectorXd& a_bar, const MatrixXd& b_bar, long horizon);

}  // namespace ssmctl::oracle
