#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "piobs/analysis.hpp"

namespace piobs {

using PoleList = std::vector<std::complex<double>>;

struct Tolerances {
  // Relative rank tolerance; unset means default_rank_tol(rows, cols).
  std::optional<double> rank;
  double stability_margin = kDefaultStabilityMargin;
  double detectability = kDefaultDetectabilityTol;
  // Minimum distance between target poles and the open-loop spectrum,
  // relative to max(1, spectral radius).
  double pole_separation = 1e-6;
  // Eigenvalue agreement required by the spectral certificates, relative
  // to max(1, |lambda|).
  double spectral_match = 1e-6;
  // |G A12 X + Phi| bound for the integrator identity.
  double identity_residual = 1e-9;
};

struct SynthesisConfig {
  int k = 1;
  // n-p poles for A22 + K A12; default {-1, ..., -(n-p)} * default_pole_scale.
  std::optional<PoleList> target_poles;
  // Either an explicit Hurwitz Phi or its poles; if neither is given,
  // Phi = diag(-(n-p+1), ..., -(n-p+k)) * default_pole_scale.
  std::optional<Matrix> phi;
  std::optional<PoleList> phi_poles;
  Tolerances tol;
  std::uint64_t seed = 0;
};

/// Output-injection gain K with A22 + K A12 Hurwitz.
struct OutputInjection {
  Matrix K;
  // Eigenvalues of the unobservable part, kept as they are.
  Spectrum unplaced_poles;
  int observable_dim = 0;
  double y_condition = 1.0;
};

/// A12 = P [I_q 0; 0 0] Q.
struct RankFactorization {
  Matrix P;
  Matrix Q;
  int q = 0;
  double p_condition = 1.0;
  double q_condition = 1.0;
};

struct SynthesisCertificate {
  Matrix K, P, Q, X, Phi;
  int q = 0;
  int k = 0;
  Spectrum unplaced_poles;
};

struct ConditionNumbers {
  double T = 1.0;
  double P = 1.0;
  double Q = 1.0;
  double Y = 1.0;
};

/// Reduced-order PI observer
///   zhat2' = (A22 - L A12) zhat2 + L y1 + D u1 + F w,
///   w'     = G (y1 - A12 zhat2).
struct ObserverDesign {
  Matrix L;  // (n-p) x p
  Matrix F;  // (n-p) x k
  Matrix G;  // k x p
  Matrix T;  // n x n, empty when built without a plant
  SynthesisCertificate certificate;
  Spectrum composite_spectrum;
  ConditionNumbers condition_numbers;

  int reduced_order() const { return static_cast<int>(L.rows()); }
  int k() const { return static_cast<int>(G.rows()); }
  int p() const { return static_cast<int>(L.cols()); }
};

/// The (n-p+k) square matrix [[A22 - L A12, F], [-G A12, 0]] that governs
/// the estimation error and the integral state.
Matrix composite_matrix(const Eigen::Ref<const Matrix>& a22,
                        const Eigen::Ref<const Matrix>& a12,
                        const ObserverDesign& design);

/// Observability staircase of (A, C): an orthogonal U = [Uo Uu] with
/// U^T A U = [[Ao, 0], [*, Au]] and C U = [Co, 0].
struct ObservabilityStaircase {
  Matrix U;
  int observable_dim = 0;
  Matrix Ao, Au, Co;
};

ObservabilityStaircase observability_staircase(
    const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& c,
    double rel_tol = -1.0);

/// Places the observable part of (A22, A12) at target_poles by the
/// parametric Sylvester method on the dual pair; the unobservable part is
/// kept and must already be stable.
OutputInjection stabilizing_gain(const Eigen::Ref<const Matrix>& a22,
                                 const Eigen::Ref<const Matrix>& a12,
                                 const PoleList& target_poles,
                                 const Tolerances& tol = {},
                                 std::uint64_t seed = 0);

RankFactorization rank_factorize(const Eigen::Ref<const Matrix>& a12,
                                 double rank_tol = -1.0);

/// Assembles G, X, L, F from a stabilizing K and a rank factorization of
/// A12, then certifies the result. Throws OrderError if k > q,
/// ConfigError for k < 1 or a non-Hurwitz Phi, CertificationError if any
/// numerical check fails.
ObserverDesign build_observer(const Eigen::Ref<const Matrix>& a22,
                              const Eigen::Ref<const Matrix>& a12,
                              const Eigen::Ref<const Matrix>& k_gain,
                              const RankFactorization& factors,
                              const SynthesisConfig& config);

/// Full pipeline: existence gate, output injection, rank factorization and
/// observer assembly. Throws ExistenceError if (A, C) is not detectable.
ObserverDesign design(const StateSpaceSystem& sys,
                      const SynthesisConfig& config = {});

/// Spectral scale used by the default pole choices: max(1, rho(A22)),
/// stretched by 5% steps until the ladder -1, ..., -2(n-p) clears eig(A22).
double default_pole_scale(const Eigen::Ref<const Matrix>& a22);

PoleList default_target_poles(const Eigen::Ref<const Matrix>& a22);

Matrix default_phi(const Eigen::Ref<const Matrix>& a22, int k);

}  // namespace piobs
