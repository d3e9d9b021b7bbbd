#pragma once

#include <vector>

#include "piobs/model.hpp"

namespace piobs {

inline constexpr double kDefaultStabilityMargin = 1e-8;
inline constexpr double kDefaultDetectabilityTol = 1e-8;

struct StabilityReport {
  Spectrum spectrum;
  double max_real_part = 0.0;
  bool is_hurwitz = false;
  double margin = 0.0;
};

/// Hurwitz iff every eigenvalue has real part < -margin.
StabilityReport hurwitz_check(const Eigen::Ref<const Matrix>& m,
                              double margin = kDefaultStabilityMargin);

struct PbhEntry {
  std::complex<double> eigenvalue;
  int rank = 0;
  int required_rank = 0;
};

struct DetectabilityReport {
  bool detectable = false;
  std::vector<PbhEntry> tested_eigenvalues;
  double tolerance = 0.0;
};

/// PBH test: for every eigenvalue of A with Re >= -tol, checks that
/// [C; lambda I - A] has full column rank. C must be nonzero.
DetectabilityReport pbh_detectable(const Eigen::Ref<const Matrix>& a,
                                   const Eigen::Ref<const Matrix>& c,
                                   double tol = kDefaultDetectabilityTol,
                                   double rank_tol = -1.0);

/// Same test, but a zero (or empty) output matrix is allowed; the pair is
/// then detectable iff A has no eigenvalue with Re >= -tol.
DetectabilityReport pbh_detectable_any_output(
    const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& c,
    double tol = kDefaultDetectabilityTol, double rank_tol = -1.0);

/// Cross-check that (A, C) and (A22, A12) receive the same verdict.
bool detectable_pair_equivalence(const StateSpaceSystem& sys,
                                 const TransformedSystem& ts,
                                 double tol = kDefaultDetectabilityTol);

struct NecessaryConditions {
  bool rank_G_ok = false;
  bool order_ok = false;
  int q = 0;
  int k = 0;
};

/// rank(G) = k and rank(A12) = q >= k, with k = rows of G.
NecessaryConditions necessary_conditions(const Eigen::Ref<const Matrix>& g,
                                         const Eigen::Ref<const Matrix>& a12,
                                         double rank_tol = -1.0);

}  // namespace piobs
