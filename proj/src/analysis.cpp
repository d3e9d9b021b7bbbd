#include "piobs/analysis.hpp"

namespace piobs {

StabilityReport hurwitz_check(const Eigen::Ref<const Matrix>& m,
                              double margin) {
  if (!(margin >= 0.0)) throw ConfigError("stability margin must be >= 0");
  StabilityReport r;
  r.spectrum = eig(m);
  r.max_real_part = max_real_part(r.spectrum);
  r.margin = margin;
  r.is_hurwitz = r.max_real_part < -margin;
  return r;
}

namespace {

DetectabilityReport pbh_scan(const Eigen::Ref<const Matrix>& a,
                             const Eigen::Ref<const Matrix>& c, double tol,
                             double rank_tol) {
  require_square(a, "A");
  if (c.cols() != a.rows()) {
    throw DimensionError("output matrix must have " +
                         std::to_string(a.rows()) + " columns");
  }
  const Eigen::Index q = a.rows();
  const Eigen::Index r = c.rows();
  const double rtol = rank_tol > 0.0 ? rank_tol : default_rank_tol(r + q, q);

  DetectabilityReport report;
  report.tolerance = tol;
  report.detectable = true;
  const Spectrum spectrum = eig(a);
  // Measure rank against the pair itself, not against [C; lambda I - A]:
  // when both blocks are round-off sized the stacked matrix alone would
  // promote noise to rank.
  Matrix pair(r + q, q);
  pair << c, a;
  const double pair_norm = singular_values(pair)(0);
  ComplexMatrix stacked(r + q, q);
  stacked.topRows(r) = c.cast<std::complex<double>>();
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const std::complex<double> lambda = spectrum(i);
    if (lambda.real() < -tol) continue;
    stacked.bottomRows(q) = -a.cast<std::complex<double>>();
    stacked.bottomRows(q).diagonal().array() += lambda;
    const Eigen::VectorXd sv = singular_values(stacked);
    const double floor = rtol * std::max(pair_norm, std::abs(lambda));
    const int rank = static_cast<int>((sv.array() > floor).count());
    PbhEntry entry{lambda, rank, static_cast<int>(q)};
    if (entry.rank != entry.required_rank) report.detectable = false;
    report.tested_eigenvalues.push_back(entry);
  }
  return report;
}

}  // namespace

DetectabilityReport pbh_detectable(const Eigen::Ref<const Matrix>& a,
                                   const Eigen::Ref<const Matrix>& c,
                                   double tol, double rank_tol) {
  if (c.size() == 0 || c.isZero(0.0)) {
    throw ConfigError("PBH test requires a nonzero output matrix");
  }
  return pbh_scan(a, c, tol, rank_tol);
}

DetectabilityReport pbh_detectable_any_output(
    const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& c,
    double tol, double rank_tol) {
  return pbh_scan(a, c, tol, rank_tol);
}

bool detectable_pair_equivalence(const StateSpaceSystem& sys,
                                 const TransformedSystem& ts, double tol) {
  const bool full = pbh_detectable(sys.A(), sys.C(), tol).detectable;
  const bool red = pbh_detectable_any_output(ts.A22, ts.A12, tol).detectable;
  return full == red;
}

NecessaryConditions necessary_conditions(const Eigen::Ref<const Matrix>& g,
                                         const Eigen::Ref<const Matrix>& a12,
                                         double rank_tol) {
  NecessaryConditions out;
  out.k = static_cast<int>(g.rows());
  out.q = rank_tol > 0.0 ? numerical_rank(a12, rank_tol) : numerical_rank(a12);
  const int rank_g =
      rank_tol > 0.0 ? numerical_rank(g, rank_tol) : numerical_rank(g);
  out.rank_G_ok = rank_g == out.k;
  out.order_ok = out.q >= out.k;
  return out;
}

}  // namespace piobs
