#include "ssmctl/discretize.hpp"

#include <cmath>
#include <string>

#include "ssmctl/error.hpp"

namespace ssmctl {

ZohDiagonal discretize_zoh_diagonal(const VectorXd& a, const MatrixXd& b,
                                    double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidParameter("discretize_zoh_diagonal: delta must be positive");
  }
  if (b.rows() != a.size()) {
    throw ShapeError("discretize_zoh_diagonal: b must have one row per state");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw InvalidParameter("discretize_zoh_diagonal: non-finite input");
  }
  ZohDiagonal out{VectorXd(a.size()), MatrixXd(b.rows(), b.cols())};
  for (Index i = 0; i < a.size(); ++i) {
    const double x = delta * a(i);
    out.a_bar(i) = std::exp(x);
    // expm1 keeps (e^x - 1) accurate down to the switch-over point.
    const double gain =
        std::abs(x) < kZohSmallExponent ? delta : std::expm1(x) / a(i);
    out.b_bar.row(i) = gain * b.row(i);
  }
  return out;
}

MatrixXd matrix_exp(const MatrixXd& m, const MatrixExpOptions& options) {
  if (m.rows() != m.cols()) throw ShapeError("matrix_exp: matrix not square");
  if (m.rows() > options.max_dim) {
    throw ResourceLimit("matrix_exp: dimension " + std::to_string(m.rows()) +
                        " exceeds limit " + std::to_string(options.max_dim));
  }
  if (!m.allFinite()) throw NumericalFailure("matrix_exp: non-finite input");
  const Index n = m.rows();
  if (n == 0) return m;

  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > options.scaled_norm) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / options.scaled_norm)));
  }
  const MatrixXd scaled = m / std::ldexp(1.0, squarings);

  MatrixXd sum = MatrixXd::Identity(n, n);
  MatrixXd term = MatrixXd::Identity(n, n);
  bool converged = false;
  for (int k = 1; k <= options.max_terms; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    sum += term;
    const double term_norm = term.cwiseAbs().colwise().sum().maxCoeff();
    const double sum_norm = sum.cwiseAbs().colwise().sum().maxCoeff();
    if (term_norm <= 1e-17 * sum_norm) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalFailure("matrix_exp: Taylor series did not converge in " +
                           std::to_string(options.max_terms) + " terms");
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  if (!sum.allFinite()) throw NumericalFailure("matrix_exp: overflow");
  return sum;
}

ZohDense discretize_zoh_dense(const MatrixXd& A, const MatrixXd& B,
                              double delta, const MatrixExpOptions& options) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidParameter("discretize_zoh_dense: delta must be positive");
  }
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw ShapeError("discretize_zoh_dense: A must be N x N and B N x M");
  }
  if (A.rows() > options.max_dim) {
    throw ResourceLimit("discretize_zoh_dense: state dimension " +
                        std::to_string(A.rows()) + " exceeds limit " +
                        std::to_string(options.max_dim));
  }
  const Index n = A.rows();
  const Index m = B.cols();
  // exp(delta [[A, B], [0, 0]]) = [[A_bar, B_bar], [0, I]]
  MatrixXd augmented = MatrixXd::Zero(n + m, n + m);
  augmented.topLeftCorner(n, n) = delta * A;
  augmented.topRightCorner(n, m) = delta * B;
  MatrixExpOptions aug_options = options;
  aug_options.max_dim = n + m;
  const MatrixXd phi = matrix_exp(augmented, aug_options);
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

DiscreteLTISystem discretize(const DenseLTISystem& system,
                             const MatrixExpOptions& options) {
  auto zoh = discretize_zoh_dense(system.A(), system.B(), system.delta(), options);
  return {std::move(zoh.a_bar), std::move(zoh.b_bar), system.C(), system.D()};
}

}  // namespace ssmctl
