#include "piobs/model.hpp"

#include <string>

namespace piobs {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_full_row_rank(const Eigen::Ref<const Matrix>& c, double rank_tol) {
  const int r = numerical_rank(c, rank_tol);
  if (r != c.rows()) {
    throw AssumptionError("C must have full row rank: rank(C) = " +
                          std::to_string(r) + " but p = " +
                          std::to_string(c.rows()));
  }
}

}  // namespace

StateSpaceSystem::StateSpaceSystem(Matrix a, Matrix b, Matrix c)
    : StateSpaceSystem(std::move(a), std::move(b), std::move(c),
                       -1.0) {}

StateSpaceSystem::StateSpaceSystem(Matrix a, Matrix b, Matrix c,
                                   double rank_tol)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.rows() != a_.cols()) {
    throw DimensionError("A must be square, got " + dims(a_));
  }
  if (a_.rows() == 0) throw DimensionError("A must be non-empty");
  if (b_.rows() != a_.rows()) {
    throw DimensionError("B must have n = " + std::to_string(a_.rows()) +
                         " rows, got " + dims(b_));
  }
  if (b_.cols() < 1) throw DimensionError("B must have at least one column");
  if (c_.cols() != a_.rows()) {
    throw DimensionError("C must have n = " + std::to_string(a_.rows()) +
                         " columns, got " + dims(c_));
  }
  if (c_.rows() < 1) throw DimensionError("C must have at least one row");
  require_finite(a_, "A");
  require_finite(b_, "B");
  require_finite(c_, "C");
  if (c_.rows() >= a_.rows()) {
    throw AssumptionError(
        "no unmeasured states: p = " + std::to_string(c_.rows()) +
        " outputs for n = " + std::to_string(a_.rows()) +
        " states (need p < n)");
  }
  require_full_row_rank(c_, rank_tol > 0.0
                                ? rank_tol
                                : default_rank_tol(c_.rows(), c_.cols()));
}

Matrix TransformedSystem::block_matrix() const {
  const Eigen::Index nn = T.rows();
  const Eigen::Index pp = A11.rows();
  Matrix out(nn, nn);
  out.topLeftCorner(pp, pp) = A11;
  out.topRightCorner(pp, nn - pp) = A12;
  out.bottomLeftCorner(nn - pp, pp) = A21;
  out.bottomRightCorner(nn - pp, nn - pp) = A22;
  return out;
}

Matrix TransformedSystem::input_matrix() const {
  Matrix out(G1.rows() + G2.rows(), G1.cols());
  out << G1, G2;
  return out;
}

Matrix output_normalize(const Eigen::Ref<const Matrix>& c) {
  return output_normalize(c, default_rank_tol(c.rows(), c.cols()));
}

Matrix output_normalize(const Eigen::Ref<const Matrix>& c, double rank_tol) {
  require_finite(c, "C");
  if (c.rows() > c.cols()) {
    throw AssumptionError("C has more rows than columns (" + dims(c) + ")");
  }
  require_full_row_rank(c, rank_tol);
  const Eigen::Index p = c.rows();
  const Eigen::Index n = c.cols();
  Matrix t(n, n);
  const Matrix cct = c * c.transpose();
  t.leftCols(p) = c.transpose() * solve_linear(cct, Matrix::Identity(p, p));
  if (n > p) t.rightCols(n - p) = null_space(c, rank_tol);
  return t;
}

TransformedSystem partition(const StateSpaceSystem& sys,
                            const Eigen::Ref<const Matrix>& t) {
  const int n = sys.n();
  const int p = sys.p();
  if (t.rows() != n || t.cols() != n) {
    throw DimensionError("T must be " + std::to_string(n) + "x" +
                         std::to_string(n));
  }
  require_finite(t, "T");
  TransformedSystem ts;
  ts.T = t;
  ts.t_condition = condition_number(t);
  const Matrix z = solve_linear(t, sys.A() * t);
  const Matrix g = solve_linear(t, sys.B());
  ts.A11 = z.topLeftCorner(p, p);
  ts.A12 = z.topRightCorner(p, n - p);
  ts.A21 = z.bottomLeftCorner(n - p, p);
  ts.A22 = z.bottomRightCorner(n - p, n - p);
  ts.G1 = g.topRows(p);
  ts.G2 = g.bottomRows(n - p);
  return ts;
}

ReducedSubsystem reduced(const TransformedSystem& ts) {
  ReducedSubsystem rs;
  rs.A22 = ts.A22;
  rs.A12_out = ts.A12;
  rs.D.resize(ts.A21.rows(), ts.A21.cols() + ts.G2.cols());
  rs.D << ts.A21, ts.G2;
  return rs;
}

}  // namespace piobs
