#include "ssmctl/gramian.hpp"

#include <cmath>
#include <string>

#include "ssmctl/error.hpp"

namespace ssmctl {

VectorXd gramian_finite_horizon(const VectorXd& a_bar, const MatrixXd& b_bar,
                                long horizon) {
  if (horizon < 1) throw InvalidParameter("gramian_finite_horizon: T must be >= 1");
  if (b_bar.rows() != a_bar.size()) {
    throw ShapeError("gramian_finite_horizon: b_bar must have one row per state");
  }
  VectorXd w(a_bar.size());
  for (Index i = 0; i < a_bar.size(); ++i) {
    const double a2 = a_bar(i) * a_bar(i);
    double power = 1.0;
    double sum = 0.0;
    for (long t = 0; t < horizon; ++t) {
      sum += power;
      power *= a2;
    }
    w(i) = b_bar.row(i).squaredNorm() * sum;
  }
  return w;
}

VectorXd gramian_closed_form_diag(const VectorXd& a_bar, const MatrixXd& b_bar,
                                  double epsilon, long position) {
  if (!(epsilon >= 0.0)) {
    throw InvalidParameter("gramian_closed_form_diag: epsilon must be >= 0");
  }
  if (b_bar.rows() != a_bar.size()) {
    throw ShapeError("gramian_closed_form_diag: b_bar must have one row per state");
  }
  VectorXd w(a_bar.size());
  for (Index i = 0; i < a_bar.size(); ++i) {
    const double denom = 1.0 - a_bar(i) * a_bar(i) + epsilon;
    if (!(denom > 0.0)) {
      throw UnstableSystem(
          "closed-form Gramian invalid: |a|=" + std::to_string(std::abs(a_bar(i))) +
              " at state " + std::to_string(i) +
              (position >= 0 ? " position " + std::to_string(position) : "") +
              " (epsilon=" + std::to_string(epsilon) + ")",
          position, static_cast<long>(i));
    }
    w(i) = b_bar.row(i).squaredNorm() / denom;
  }
  return w;
}

LyapunovResidual lyapunov_residual(const VectorXd& a_bar, const VectorXd& w,
                                   const MatrixXd& b_bar) {
  if (w.size() != a_bar.size() || b_bar.rows() != a_bar.size()) {
    throw ShapeError("lyapunov_residual: inconsistent shapes");
  }
  const MatrixXd bbt = b_bar * b_bar.transpose();
  const VectorXd diag = a_bar.cwiseProduct(w).cwiseProduct(a_bar) - w +
                        bbt.diagonal();
  LyapunovResidual r;
  r.diagonal = diag.norm();
  r.off_diagonal =
      std::sqrt(std::max(0.0, bbt.squaredNorm() - bbt.diagonal().squaredNorm()));
  return r;
}

GramianDiagnostics gramian_diagnostics(const VectorXd& a_bar,
                                       const MatrixXd& b_bar, long horizon) {
  GramianDiagnostics d;
  d.w_finite = gramian_finite_horizon(a_bar, b_bar, horizon);
  d.w_closed = gramian_closed_form_diag(a_bar, b_bar, 0.0);
  const auto r = lyapunov_residual(a_bar, d.w_closed, b_bar);
  d.lyapunov_residual_norm = r.diagonal;
  d.off_diagonal_mass = r.off_diagonal;
  return d;
}

double gramian_influence_score(std::span<const ChannelLocation> channels,
                               double epsilon, long position) {
  if (channels.empty()) throw InvalidInput("gramian_influence_score: no channels");
  const Index n = channels.front().a_bar.size();
  double total = 0.0;
  for (const auto& ch : channels) {
    if (ch.a_bar.size() != n || ch.c.cols() != n) {
      throw ShapeError("gramian_influence_score: channels must share N");
    }
    const VectorXd w = gramian_closed_form_diag(ch.a_bar, ch.b_bar, epsilon, position);
    const VectorXd observability = ch.c.colwise().squaredNorm().transpose();
    total += observability.dot(w);
  }
  return total / static_cast<double>(channels.size());
}

InfluenceScores gramian_influence(std::span<const TimeVaryingDiagonalSystem> channels,
                                  double epsilon) {
  if (channels.empty()) throw InvalidInput("gramian_influence: no channels");
  const Index length = channels.front().length();
  std::vector<double> scores(static_cast<std::size_t>(length));
  std::vector<ChannelLocation> at(channels.size());
  for (Index p = 0; p < length; ++p) {
    for (std::size_t d = 0; d < channels.size(); ++d) {
      if (channels[d].length() != length) {
        throw ShapeError("gramian_influence: channels differ in length");
      }
      const auto& s = channels[d].step(p);
      at[d] = {s.a_bar, s.b_bar, s.c};
    }
    scores[static_cast<std::size_t>(p)] =
        gramian_influence_score(at, epsilon, static_cast<long>(p));
  }
  return InfluenceScores(std::move(scores), Method::Gramian, epsilon);
}

}  // namespace ssmctl
