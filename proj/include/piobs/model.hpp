#pragma once

#include "piobs/numerics.hpp"

namespace piobs {

/// Continuous-time plant  x' = A x + B u,  y = C x.
///
/// Construction validates dimensions, finiteness, rank(C) = p and 1 <= p < n.
class StateSpaceSystem {
 public:
  StateSpaceSystem(Matrix a, Matrix b, Matrix c);
  StateSpaceSystem(Matrix a, Matrix b, Matrix c, double rank_tol);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }

  int n() const { return static_cast<int>(a_.rows()); }
  int m() const { return static_cast<int>(b_.cols()); }
  int p() const { return static_cast<int>(c_.rows()); }

 private:
  Matrix a_;
  Matrix b_;
  Matrix c_;
};

/// The plant in output-normalized coordinates z = T^-1 x, where C T = [I 0].
/// z1 = y is measured and z2 holds the n-p unmeasured states.
struct TransformedSystem {
  Matrix T;
  Matrix A11, A12, A21, A22;
  Matrix G1, G2;
  double t_condition = 1.0;

  int n() const { return static_cast<int>(T.rows()); }
  int p() const { return static_cast<int>(A11.rows()); }
  int m() const { return static_cast<int>(G1.cols()); }

  /// Reassembled T^-1 A T.
  Matrix block_matrix() const;
  /// Reassembled T^-1 B.
  Matrix input_matrix() const;
};

/// z2' = A22 z2 + D [y; u],  with the derived "measurement" A12 z2.
struct ReducedSubsystem {
  Matrix A22;
  Matrix A12_out;
  Matrix D;
};

/// T = [C^+ | N], with C^+ = C^T (C C^T)^-1 and N an orthonormal basis of
/// null(C). Throws AssumptionError if C lacks full row rank.
Matrix output_normalize(const Eigen::Ref<const Matrix>& c);
Matrix output_normalize(const Eigen::Ref<const Matrix>& c, double rank_tol);

TransformedSystem partition(const StateSpaceSystem& sys,
                            const Eigen::Ref<const Matrix>& t);

ReducedSubsystem reduced(const TransformedSystem& ts);

}  // namespace piobs
