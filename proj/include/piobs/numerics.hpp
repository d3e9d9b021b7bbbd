#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "piobs/errors.hpp"

namespace piobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

// Eigenvalues with multiplicity. For real input, non-real entries come in
// conjugate pairs.
using Spectrum = Eigen::VectorXcd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Default relative rank tolerance for an rows x cols matrix.
inline double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max<Eigen::Index>({rows, cols, 1})) * 1e-12;
}

/// Inversion and linear solves are refused above this condition number.
inline double max_condition_number() {
  return 1.0 / (100.0 * std::numeric_limits<double>::epsilon());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.derived().allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* name) {
  if (!all_finite(m)) {
    throw DimensionError(std::string(name) + " contains NaN or Inf entries");
  }
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(name) + " must be square, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

template <typename Scalar>
struct Svd {
  DenseMatrix<Scalar> U;     // rows x rows
  Vector singular_values;    // min(rows, cols), descending
  DenseMatrix<Scalar> V;     // cols x cols
};

namespace internal {

inline double unit_phase(double x) { return x < 0.0 ? -1.0 : 1.0; }

inline std::complex<double> unit_phase(const std::complex<double>& x) {
  const double a = std::abs(x);
  return a == 0.0 ? std::complex<double>(1.0) : x / a;
}

inline double conj_if_complex(double x) { return x; }
inline std::complex<double> conj_if_complex(const std::complex<double>& x) {
  return std::conj(x);
}

// Index of the first entry of largest magnitude.
template <typename Derived>
Eigen::Index leading_index(const Eigen::MatrixBase<Derived>& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

}  // namespace internal

/// Full SVD, M = U * Sigma * V^H. In every column of U the first entry of
/// largest magnitude is made real nonnegative; the matching column of V is
/// rotated by the same phase so the product is unchanged.
template <typename Derived>
Svd<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Mat = DenseMatrix<Scalar>;
  require_finite(m, "svd input");
  Svd<Scalar> out;
  if (m.rows() == 0 || m.cols() == 0) {
    out.U = Mat::Identity(m.rows(), m.rows());
    out.V = Mat::Identity(m.cols(), m.cols());
    out.singular_values = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Mat> solver(Mat(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.U = solver.matrixU();
  out.V = solver.matrixV();
  out.singular_values = solver.singularValues().real();
  const Eigen::Index r = out.singular_values.size();
  for (Eigen::Index j = 0; j < out.U.cols(); ++j) {
    const Scalar lead = out.U(internal::leading_index(out.U.col(j)), j);
    const Scalar phase = internal::conj_if_complex(internal::unit_phase(lead));
    out.U.col(j) *= phase;
    if (j < r) out.V.col(j) *= phase;
  }
  return out;
}

template <typename Derived>
Vector singular_values(const Eigen::MatrixBase<Derived>& m) {
  using Mat = DenseMatrix<typename Derived::Scalar>;
  if (m.rows() == 0 || m.cols() == 0) return Vector(0);
  return Eigen::JacobiSVD<Mat>(Mat(m)).singularValues().real();
}

/// Number of singular values above rel_tol * sigma_max.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol) {
  if (!(rel_tol > 0.0)) throw ConfigError("rank tolerance must be positive");
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = rel_tol * s(0);
  return static_cast<int>((s.array() > cutoff).count());
}

template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m) {
  return numerical_rank(m, default_rank_tol(m.rows(), m.cols()));
}

/// sigma_max / sigma_min of a square matrix; +inf when singular.
template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived>& m) {
  require_square(m, "condition_number input");
  if (m.rows() == 0) return 1.0;
  const Vector s = singular_values(m);
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

/// Orthonormal basis of the null space of m, one column per dimension.
/// Each column is normalized so its leading entry is nonnegative.
Matrix null_space(const Eigen::Ref<const Matrix>& m, double rel_tol);

Spectrum eig(const Eigen::Ref<const Matrix>& m);

double max_real_part(const Spectrum& s);

/// Greedy multiset match: each entry of a is paired with its nearest unused
/// entry of b. Returns the largest pair distance (+inf on size mismatch).
double match_spectra(const Spectrum& a, const Spectrum& b);

/// Smallest |a_i - b_j| over the two spectra (+inf if either is empty).
double spectral_separation(const Spectrum& a, const Spectrum& b);

Matrix invert(const Eigen::Ref<const Matrix>& m);
Matrix solve_linear(const Eigen::Ref<const Matrix>& a,
                    const Eigen::Ref<const Matrix>& b);

/// Solves A X - X B = C by complex Schur reduction of both coefficients.
/// Throws NoUniqueSolutionError when sigma(A) and sigma(B) are closer than
/// sep_tol * max(1, |A|, |B|).
Matrix solve_sylvester(const Eigen::Ref<const Matrix>& a,
                       const Eigen::Ref<const Matrix>& b,
                       const Eigen::Ref<const Matrix>& c,
                       double sep_tol = 1e-10);

/// Real block-diagonal matrix whose spectrum is `poles`. Complex pairs
/// become [[re, im], [-im, re]]; repeated blocks are chained with an
/// identity coupling so the result stays non-derogatory.
Matrix real_block_form(const std::vector<std::complex<double>>& poles);

/// True if every non-real entry has a conjugate partner within tol.
bool conjugate_closed(const std::vector<std::complex<double>>& poles,
                      double tol = 1e-12);

}  // namespace piobs
