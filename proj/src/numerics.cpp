#include "piobs/numerics.hpp"

#include <Eigen/Eigenvalues>

namespace piobs {

Matrix null_space(const Eigen::Ref<const Matrix>& m, double rel_tol) {
  const auto f = svd(m);
  const int r = numerical_rank(m, rel_tol);
  Matrix n = f.V.rightCols(m.cols() - r);
  for (Eigen::Index j = 0; j < n.cols(); ++j) {
    if (n(internal::leading_index(n.col(j)), j) < 0.0) n.col(j) *= -1.0;
  }
  return n;
}

Spectrum eig(const Eigen::Ref<const Matrix>& m) {
  require_square(m, "eig input");
  require_finite(m, "eig input");
  if (m.rows() == 0) return Spectrum(0);
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw CertificationError("eigenvalue iteration did not converge");
  }
  return solver.eigenvalues();
}

double max_real_part(const Spectrum& s) {
  if (s.size() == 0) return -std::numeric_limits<double>::infinity();
  return s.real().maxCoeff();
}

double match_spectra(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(a(i) - b(j));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

double spectral_separation(const Spectrum& a, const Spectrum& b) {
  double sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      sep = std::min(sep, std::abs(a(i) - b(j)));
    }
  }
  return sep;
}

namespace {

void require_well_conditioned(const Eigen::Ref<const Matrix>& m,
                              const char* what) {
  const double cond = condition_number(m);
  if (!(cond <= max_condition_number())) {
    throw SingularityError(std::string(what) +
                           " is singular to working precision (condition " +
                           std::to_string(cond) + ")");
  }
}

}  // namespace

Matrix invert(const Eigen::Ref<const Matrix>& m) {
  require_square(m, "invert input");
  require_finite(m, "invert input");
  require_well_conditioned(m, "matrix to invert");
  return m.partialPivLu().inverse();
}

Matrix solve_linear(const Eigen::Ref<const Matrix>& a,
                    const Eigen::Ref<const Matrix>& b) {
  require_square(a, "solve_linear coefficient");
  if (a.rows() != b.rows()) {
    throw DimensionError("solve_linear: right-hand side has " +
                         std::to_string(b.rows()) + " rows, expected " +
                         std::to_string(a.rows()));
  }
  require_finite(a, "solve_linear coefficient");
  require_finite(b, "solve_linear right-hand side");
  require_well_conditioned(a, "linear system");
  return a.partialPivLu().solve(b);
}

Matrix solve_sylvester(const Eigen::Ref<const Matrix>& a,
                       const Eigen::Ref<const Matrix>& b,
                       const Eigen::Ref<const Matrix>& c, double sep_tol) {
  require_square(a, "Sylvester A");
  require_square(b, "Sylvester B");
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw DimensionError("Sylvester C must be " + std::to_string(a.rows()) +
                         "x" + std::to_string(b.rows()));
  }
  require_finite(c, "Sylvester C");
  const Eigen::Index m = a.rows();
  const Eigen::Index n = b.rows();
  if (m == 0 || n == 0) return Matrix::Zero(m, n);

  const double scale = std::max({1.0, a.norm(), b.norm()});
  const double sep = spectral_separation(eig(a), eig(b));
  if (sep <= sep_tol * scale) {
    throw NoUniqueSolutionError(
        "Sylvester equation has no unique solution: spectra of A and B "
        "overlap (separation " + std::to_string(sep) + ")");
  }

  // A = Ua Ta Ua^H, B = Ub Tb Ub^H with Ta, Tb upper triangular.
  Eigen::ComplexSchur<Matrix> schur_a(a);
  Eigen::ComplexSchur<Matrix> schur_b(b);
  if (schur_a.info() != Eigen::Success || schur_b.info() != Eigen::Success) {
    throw CertificationError("Schur decomposition did not converge");
  }
  const ComplexMatrix& ta = schur_a.matrixT();
  const ComplexMatrix& tb = schur_b.matrixT();
  const ComplexMatrix& ua = schur_a.matrixU();
  const ComplexMatrix& ub = schur_b.matrixU();

  // Ta Y - Y Tb = F, solved one column at a time from the left.
  const ComplexMatrix f = ua.adjoint() * c.cast<std::complex<double>>() * ub;
  ComplexMatrix y(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = f.col(j);
    if (j > 0) rhs += y.leftCols(j) * tb.col(j).head(j);
    ComplexMatrix shifted = ta;
    shifted.diagonal().array() -= tb(j, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (ua * y * ub.adjoint()).real();
}

bool conjugate_closed(const std::vector<std::complex<double>>& poles,
                      double tol) {
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    const double scale = std::max(1.0, std::abs(poles[i]));
    if (std::abs(poles[i].imag()) <= tol * scale) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      if (!used[j] && std::abs(poles[j] - std::conj(poles[i])) <= tol * scale) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Matrix real_block_form(const std::vector<std::complex<double>>& poles) {
  if (!conjugate_closed(poles)) {
    throw ConfigError("pole set is not closed under complex conjugation");
  }
  // One entry per real pole or per conjugate pair (stored with imag > 0).
  std::vector<std::complex<double>> blocks;
  for (const auto& p : poles) {
    const double scale = std::max(1.0, std::abs(p));
    if (std::abs(p.imag()) <= 1e-12 * scale) {
      blocks.emplace_back(p.real(), 0.0);
    } else if (p.imag() > 0.0) {
      blocks.push_back(p);
    }
  }
  std::sort(blocks.begin(), blocks.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() < y.imag();
  });

  const Eigen::Index n = static_cast<Eigen::Index>(poles.size());
  Matrix out = Matrix::Zero(n, n);
  Eigen::Index at = 0;
  Eigen::Index prev_at = -1;
  int prev_size = 0;
  std::complex<double> prev;
  for (const auto& blk : blocks) {
    const int size = blk.imag() == 0.0 ? 1 : 2;
    if (size == 1) {
      out(at, at) = blk.real();
    } else {
      out.block(at, at, 2, 2) << blk.real(), blk.imag(), -blk.imag(),
          blk.real();
    }
    if (prev_at >= 0 && prev_size == size && blk == prev) {
      out.block(prev_at, at, size, size).setIdentity();
    }
    prev_at = at;
    prev_size = size;
    prev = blk;
    at += size;
  }
  return out;
}

}  // namespace piobs
