#include "piobs/synthesis.hpp"

#include <optional>
#include <random>
#include <sstream>

namespace piobs {

namespace {

double rank_tol_or_default(const std::optional<double>& tol,
                           Eigen::Index rows, Eigen::Index cols) {
  return tol.value_or(default_rank_tol(rows, cols));
}

double rank_tol_or_default(double tol, Eigen::Index rows, Eigen::Index cols) {
  return tol > 0.0 ? tol : default_rank_tol(rows, cols);
}

double max_modulus(const PoleList& poles) {
  double r = 0.0;
  for (const auto& p : poles) r = std::max(r, std::abs(p));
  return r;
}

Spectrum to_spectrum(const PoleList& poles) {
  Spectrum s(static_cast<Eigen::Index>(poles.size()));
  for (std::size_t i = 0; i < poles.size(); ++i) s(i) = poles[i];
  return s;
}

Spectrum concat(const Spectrum& a, const Spectrum& b) {
  Spectrum s(a.size() + b.size());
  s << a, b;
  return s;
}

double spectral_radius(const Eigen::Ref<const Matrix>& m) {
  const Spectrum s = eig(m);
  return s.size() == 0 ? 0.0 : s.cwiseAbs().maxCoeff();
}

void validate_poles(const PoleList& poles, std::size_t expected,
                    const char* what) {
  if (poles.size() != expected) {
    throw ConfigError(std::string(what) + ": expected " +
                      std::to_string(expected) + " poles, got " +
                      std::to_string(poles.size()));
  }
  for (const auto& p : poles) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw ConfigError(std::string(what) + ": non-finite pole");
    }
    if (!(p.real() < 0.0)) {
      throw ConfigError(std::string(what) +
                        ": every pole needs a negative real part");
    }
  }
  if (!conjugate_closed(poles)) {
    throw ConfigError(std::string(what) +
                      ": poles must be closed under conjugation");
  }
}

// Picks `count` poles from `poles` without splitting a conjugate pair. If a
// single slot is left and only pairs remain, the real part of the next pair
// fills it.
PoleList select_poles(const PoleList& poles, int count) {
  std::vector<PoleList> blocks;
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const double scale = std::max(1.0, std::abs(poles[i]));
    if (std::abs(poles[i].imag()) <= 1e-12 * scale) {
      blocks.push_back({std::complex<double>(poles[i].real(), 0.0)});
      continue;
    }
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      if (!used[j] &&
          std::abs(poles[j] - std::conj(poles[i])) <= 1e-12 * scale) {
        used[j] = true;
        break;
      }
    }
    blocks.push_back({poles[i], std::conj(poles[i])});
  }
  PoleList out;
  for (const auto& b : blocks) {
    const int left = count - static_cast<int>(out.size());
    if (left == 0) break;
    if (static_cast<int>(b.size()) <= left) {
      out.insert(out.end(), b.begin(), b.end());
    }
  }
  for (const auto& b : blocks) {
    if (static_cast<int>(out.size()) == count) break;
    if (b.size() == 2) out.emplace_back(b[0].real(), 0.0);
  }
  return out;
}

Matrix seeded_gaussian(Eigen::Index rows, Eigen::Index cols,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = normal(rng);
  }
  return w;
}

constexpr int kPlacementAttempts = 16;

struct Placement {
  Matrix K;
  double y_condition = 1.0;
};

// Output injection for an observable pair (a, c): a + K c has spectrum
// `poles`. Dual of state feedback on (a^T, c^T):
//   a^T Y - Y Lambda = -c^T W,  K = (W Y^-1)^T.
// With several outputs W is free; of the seeded draws that place the poles,
// keep the one whose column-normalized Y is best conditioned, since Y is the
// closed-loop eigenvector basis and drives both |K| and pole sensitivity.
// With one output every W gives the same K, so the first success is final.
Placement place_observable(const Matrix& a, const Matrix& c,
                           const PoleList& poles, const Tolerances& tol,
                           std::uint64_t seed) {
  const Matrix lambda = real_block_form(poles);
  const double match_tol =
      tol.spectral_match * std::max(1.0, max_modulus(poles));
  const Spectrum target = to_spectrum(poles);
  double last_condition = std::numeric_limits<double>::infinity();
  std::optional<Placement> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    const Matrix w = seeded_gaussian(
        c.rows(), a.rows(),
        seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
    const Matrix y =
        solve_sylvester(a.transpose(), lambda, -c.transpose() * w);
    last_condition = condition_number(y);
    if (!(last_condition <= max_condition_number())) continue;
    Matrix k = solve_linear(y.transpose(), w.transpose());
    if (!k.allFinite()) continue;
    if (match_spectra(eig(a + k * c), target) > match_tol) continue;
    const Vector norms = y.colwise().norm();
    const double score =
        condition_number(Matrix(y * norms.cwiseInverse().asDiagonal()));
    if (score < best_score) {
      best_score = score;
      best = Placement{std::move(k), last_condition};
    }
    if (c.rows() == 1) break;
  }
  if (best) return std::move(*best);
  std::ostringstream msg;
  msg << "pole placement failed after " << kPlacementAttempts
      << " parameter draws (last Sylvester solution condition "
      << last_condition << ")";
  throw CertificationError(msg.str());
}

Matrix resolve_phi(const SynthesisConfig& config,
                   const Eigen::Ref<const Matrix>& a22) {
  const int k = config.k;
  if (config.phi && config.phi_poles) {
    throw ConfigError("give either Phi or its poles, not both");
  }
  Matrix phi;
  if (config.phi) {
    phi = *config.phi;
    if (phi.rows() != k || phi.cols() != k) {
      throw ConfigError("Phi must be " + std::to_string(k) + "x" +
                        std::to_string(k));
    }
    if (!phi.allFinite()) throw ConfigError("Phi has non-finite entries");
  } else if (config.phi_poles) {
    validate_poles(*config.phi_poles, static_cast<std::size_t>(k),
                   "Phi poles");
    phi = real_block_form(*config.phi_poles);
  } else {
    phi = default_phi(a22, k);
  }
  if (!hurwitz_check(phi, config.tol.stability_margin).is_hurwitz) {
    throw ConfigError("Phi must be Hurwitz stable");
  }
  return phi;
}

std::string spectrum_string(const Spectrum& s) {
  std::ostringstream out;
  out << "{";
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (i) out << ", ";
    out << s(i).real();
    if (s(i).imag() != 0.0) out << (s(i).imag() > 0 ? "+" : "") << s(i).imag() << "i";
  }
  out << "}";
  return out.str();
}

}  // namespace

double default_pole_scale(const Eigen::Ref<const Matrix>& a22) {
  // The default ladder -1, -2, ..., -2r (targets then Phi) must stay clear of
  // eig(A22): the parametric placement needs disjoint spectra, and a shared
  // eigenvalue would make the composite defective. Stretch until it is.
  const Spectrum open_loop = eig(a22);
  const Eigen::Index rungs = 2 * a22.rows();
  double s = std::max(1.0, spectral_radius(a22));
  for (int attempt = 0; attempt < 200; ++attempt) {
    bool clear = true;
    for (Eigen::Index i = 1; i <= rungs && clear; ++i) {
      for (Eigen::Index j = 0; j < open_loop.size() && clear; ++j) {
        clear = std::abs(open_loop(j) + static_cast<double>(i) * s) > 1e-3 * s;
      }
    }
    if (clear) break;
    s *= 1.05;
  }
  return s;
}

PoleList default_target_poles(const Eigen::Ref<const Matrix>& a22) {
  const double s = default_pole_scale(a22);
  PoleList poles;
  for (Eigen::Index i = 1; i <= a22.rows(); ++i) {
    poles.emplace_back(-static_cast<double>(i) * s, 0.0);
  }
  return poles;
}

Matrix default_phi(const Eigen::Ref<const Matrix>& a22, int k) {
  // Continue the target ladder so the composite spectrum has no repeats.
  const double s = default_pole_scale(a22);
  const auto r = static_cast<double>(a22.rows());
  Matrix phi = Matrix::Zero(k, k);
  for (int i = 0; i < k; ++i) phi(i, i) = -(r + i + 1) * s;
  return phi;
}

Matrix composite_matrix(const Eigen::Ref<const Matrix>& a22,
                        const Eigen::Ref<const Matrix>& a12,
                        const ObserverDesign& d) {
  const Eigen::Index r = a22.rows();
  const Eigen::Index k = d.G.rows();
  Matrix m = Matrix::Zero(r + k, r + k);
  m.topLeftCorner(r, r) = a22 - d.L * a12;
  m.topRightCorner(r, k) = d.F;
  m.bottomLeftCorner(k, r) = -d.G * a12;
  return m;
}

ObservabilityStaircase observability_staircase(
    const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& c,
    double rel_tol) {
  require_square(a, "A");
  if (c.cols() != a.rows()) {
    throw DimensionError("output matrix must have " +
                         std::to_string(a.rows()) + " columns");
  }
  const Eigen::Index n = a.rows();
  const double tol = rank_tol_or_default(rel_tol, n + c.rows(), n);
  const double threshold = tol * std::max(a.norm(), c.norm());

  // Controllability staircase of the dual pair (A^T, C^T).
  Matrix at = a.transpose();
  Matrix z = Matrix::Identity(n, n);
  Matrix input = c.transpose();
  Eigen::Index nc = 0;
  while (nc < n && input.cols() > 0) {
    const Eigen::Index rest = n - nc;
    const auto f = svd(Matrix(input.bottomRows(rest)));
    const Eigen::Index r =
        (f.singular_values.array() > threshold).count();
    if (r == 0) break;
    at.bottomRows(rest) = f.U.transpose() * at.bottomRows(rest);
    at.rightCols(rest) = at.rightCols(rest) * f.U;
    z.rightCols(rest) = z.rightCols(rest) * f.U;
    input = at.middleCols(nc, r);
    nc += r;
  }

  ObservabilityStaircase out;
  out.U = z;
  out.observable_dim = static_cast<int>(nc);
  const Matrix rotated = z.transpose() * a * z;
  out.Ao = rotated.topLeftCorner(nc, nc);
  out.Au = rotated.bottomRightCorner(n - nc, n - nc);
  out.Co = (c * z).leftCols(nc);
  return out;
}

OutputInjection stabilizing_gain(const Eigen::Ref<const Matrix>& a22,
                                 const Eigen::Ref<const Matrix>& a12,
                                 const PoleList& target_poles,
                                 const Tolerances& tol, std::uint64_t seed) {
  require_square(a22, "A22");
  if (a12.cols() != a22.rows()) {
    throw DimensionError("A12 must have " + std::to_string(a22.rows()) +
                         " columns");
  }
  const Eigen::Index r = a22.rows();
  validate_poles(target_poles, static_cast<std::size_t>(r), "target poles");

  const auto detect = pbh_detectable_any_output(
      a22, a12, tol.detectability, tol.rank.value_or(-1.0));
  if (!detect.detectable) {
    throw ExistenceError(
        "(A22, A12) is not detectable, so no stabilizing output injection "
        "exists and no reduced-order PI observer can be built");
  }

  const auto stair = observability_staircase(
      a22, a12, rank_tol_or_default(tol.rank, r + a12.rows(), r));
  OutputInjection out;
  out.observable_dim = stair.observable_dim;
  out.unplaced_poles = eig(stair.Au);
  if (max_real_part(out.unplaced_poles) >= -tol.stability_margin) {
    throw ExistenceError("unobservable part of (A22, A12) has eigenvalues " +
                         spectrum_string(out.unplaced_poles) +
                         " outside the open left half-plane");
  }
  out.K = Matrix::Zero(r, a12.rows());
  if (stair.observable_dim == 0) return out;

  const bool observable = stair.observable_dim == r;
  const Matrix ao = observable ? Matrix(a22) : stair.Ao;
  const Matrix co = observable ? Matrix(a12) : stair.Co;
  const PoleList placed = select_poles(target_poles, stair.observable_dim);

  const double scale = std::max(1.0, spectral_radius(ao));
  const double sep = spectral_separation(eig(ao), to_spectrum(placed));
  if (sep <= tol.pole_separation * scale) {
    std::ostringstream msg;
    msg << "target poles lie within " << sep
        << " of the open-loop spectrum " << spectrum_string(eig(ao))
        << "; move the targets away from these eigenvalues";
    throw PoleSeparationError(msg.str());
  }

  Placement placement = place_observable(ao, co, placed, tol, seed);
  out.y_condition = placement.y_condition;
  out.K = observable
              ? placement.K
              : Matrix(stair.U.leftCols(stair.observable_dim) * placement.K);
  return out;
}

RankFactorization rank_factorize(const Eigen::Ref<const Matrix>& a12,
                                 double rank_tol) {
  const Eigen::Index p = a12.rows();
  const Eigen::Index c = a12.cols();
  const double tol = rank_tol_or_default(rank_tol, p, c);
  RankFactorization out;
  out.q = numerical_rank(a12, tol);
  if (out.q == 0) {
    out.P = Matrix::Identity(p, p);
    out.Q = Matrix::Identity(c, c);
    return out;
  }
  const auto f = svd(a12);
  Vector scale = Vector::Ones(p);
  scale.head(out.q) = f.singular_values.head(out.q);
  out.P = f.U * scale.asDiagonal();
  out.Q = f.V.transpose();
  out.p_condition = condition_number(out.P);
  out.q_condition = condition_number(out.Q);
  return out;
}

ObserverDesign build_observer(const Eigen::Ref<const Matrix>& a22,
                              const Eigen::Ref<const Matrix>& a12,
                              const Eigen::Ref<const Matrix>& k_gain,
                              const RankFactorization& factors,
                              const SynthesisConfig& config) {
  require_square(a22, "A22");
  const Eigen::Index r = a22.rows();
  const Eigen::Index p = a12.rows();
  if (a12.cols() != r || k_gain.rows() != r || k_gain.cols() != p ||
      factors.P.rows() != p || factors.Q.rows() != r) {
    throw DimensionError("inconsistent block dimensions in build_observer");
  }
  const int k = config.k;
  if (k < 1) throw ConfigError("integrator dimension k must be >= 1");
  if (k > factors.q) {
    throw OrderError("k = " + std::to_string(k) + " exceeds rank(A12) = " +
                     std::to_string(factors.q) +
                     "; a PI observer needs rank(G) = k <= rank(A12)");
  }
  const Matrix phi = resolve_phi(config, a22);

  ObserverDesign d;
  d.G = invert(factors.P).topRows(k);
  const Matrix x = invert(factors.Q).leftCols(k) * (-phi);
  d.L = x * d.G - k_gain;
  d.F = -(a22 - d.L * a12) * x - x * d.G * a12 * x;

  d.certificate.K = k_gain;
  d.certificate.P = factors.P;
  d.certificate.Q = factors.Q;
  d.certificate.X = x;
  d.certificate.Phi = phi;
  d.certificate.q = factors.q;
  d.certificate.k = k;
  d.condition_numbers.P = factors.p_condition;
  d.condition_numbers.Q = factors.q_condition;

  const double residual =
      (d.G * a12 * x + phi).cwiseAbs().rowwise().sum().maxCoeff();
  if (!(residual <= config.tol.identity_residual)) {
    std::ostringstream msg;
    msg << "integrator identity G A12 X = -Phi violated by " << residual
        << " (cond P = " << factors.p_condition
        << ", cond Q = " << factors.q_condition << ")";
    throw CertificationError(msg.str());
  }
  const double g_tol = config.tol.rank.value_or(default_rank_tol(k, p));
  if (numerical_rank(d.G, g_tol) != k) {
    throw CertificationError("synthesized G is rank deficient");
  }

  const Matrix comp = composite_matrix(a22, a12, d);
  const auto stability = hurwitz_check(comp, config.tol.stability_margin);
  d.composite_spectrum = stability.spectrum;
  if (!stability.is_hurwitz) {
    std::ostringstream msg;
    msg << "composite error matrix is not Hurwitz (max real part "
        << stability.max_real_part << ")";
    throw CertificationError(msg.str());
  }
  const Spectrum expected =
      concat(eig(a22 + k_gain * a12), eig(phi));
  const double scale =
      std::max(1.0, d.composite_spectrum.cwiseAbs().maxCoeff());
  const double mismatch = match_spectra(d.composite_spectrum, expected);
  if (!(mismatch <= config.tol.spectral_match * scale)) {
    std::ostringstream msg;
    msg << "composite spectrum " << spectrum_string(d.composite_spectrum)
        << " does not split into the injection and Phi spectra "
        << spectrum_string(expected) << " (mismatch " << mismatch
        << ", cond P = " << factors.p_condition
        << ", cond Q = " << factors.q_condition << ")";
    throw CertificationError(msg.str());
  }
  return d;
}

ObserverDesign design(const StateSpaceSystem& sys,
                      const SynthesisConfig& config) {
  const int n = sys.n();
  const int p = sys.p();
  const Matrix t = output_normalize(
      sys.C(), rank_tol_or_default(config.tol.rank, p, n));
  const TransformedSystem ts = partition(sys, t);

  // Existence gate: detectability of (A22, A12), cross-checked on (A, C).
  const double rank_tol = config.tol.rank.value_or(-1.0);
  const bool reduced_ok =
      pbh_detectable_any_output(ts.A22, ts.A12, config.tol.detectability,
                                rank_tol)
          .detectable;
  const bool full_ok =
      pbh_detectable(sys.A(), sys.C(), config.tol.detectability, rank_tol)
          .detectable;
  if (!reduced_ok && !full_ok) {
    throw ExistenceError(
        "(A, C) is not detectable: a reduced-order PI observer cannot be "
        "constructed for this plant");
  }
  if (reduced_ok != full_ok) {
    throw CertificationError(
        "detectability verdicts for (A, C) and (A22, A12) disagree; the "
        "system is too close to the detectability boundary");
  }

  if (config.k < 1) throw ConfigError("integrator dimension k must be >= 1");
  const int q = numerical_rank(
      ts.A12, rank_tol_or_default(config.tol.rank, p, n - p));
  if (config.k > q) {
    throw OrderError("k = " + std::to_string(config.k) +
                     " exceeds rank(A12) = " + std::to_string(q) +
                     "; a PI observer needs rank(G) = k <= rank(A12)");
  }

  const PoleList targets =
      config.target_poles ? *config.target_poles : default_target_poles(ts.A22);
  const OutputInjection inj =
      stabilizing_gain(ts.A22, ts.A12, targets, config.tol, config.seed);
  const RankFactorization factors =
      rank_factorize(ts.A12, rank_tol_or_default(config.tol.rank, p, n - p));

  ObserverDesign d = build_observer(ts.A22, ts.A12, inj.K, factors, config);
  d.T = t;
  d.certificate.unplaced_poles = inj.unplaced_poles;
  d.condition_numbers.T = ts.t_condition;
  d.condition_numbers.Y = inj.y_condition;
  return d;
}

}  // namespace piobs
