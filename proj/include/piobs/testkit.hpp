#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "piobs/model.hpp"

namespace piobs::testkit {

enum class SystemKind { kDetectable, kUndetectablePlanted, kObservable, kHurwitz };

SystemKind parse_kind(const std::string& name);
std::string kind_name(SystemKind kind);

struct GeneratorSpec {
  int n = 4;
  int m = 1;
  int p = 1;
  // Generated systems keep rank(A12) >= k where the kind allows it.
  int k = 1;
  std::uint64_t seed = 0;
  SystemKind kind = SystemKind::kDetectable;
};

/// Random plant with a known detectability verdict. Built in observability
/// staircase form [[Ao, 0], [*, Au]], C = [Co, 0], then scrambled by a
/// random orthogonal similarity. Au is Hurwitz for the detectable kinds and
/// carries an eigenvalue at +1 for kUndetectablePlanted.
StateSpaceSystem gen_system(const GeneratorSpec& spec);

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng);

/// Haar-distributed orthogonal matrix (QR of a Gaussian, sign-fixed).
Matrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng);

/// exp(M t) by scaling and squaring of a truncated Taylor series.
Matrix expm_oracle(const Eigen::Ref<const Matrix>& m, double t);

}  // namespace piobs::testkit
