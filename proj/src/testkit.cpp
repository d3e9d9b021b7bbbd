#include "piobs/testkit.hpp"

#include <cmath>

namespace piobs::testkit {

SystemKind parse_kind(const std::string& name) {
  if (name == "detectable") return SystemKind::kDetectable;
  if (name == "undetectable_planted") return SystemKind::kUndetectablePlanted;
  if (name == "observable") return SystemKind::kObservable;
  if (name == "hurwitz") return SystemKind::kHurwitz;
  throw ConfigError("unknown system kind '" + name + "'");
}

std::string kind_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::kDetectable: return "detectable";
    case SystemKind::kUndetectablePlanted: return "undetectable_planted";
    case SystemKind::kObservable: return "observable";
    case SystemKind::kHurwitz: return "hurwitz";
  }
  return "?";
}

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Matrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  const Matrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

namespace {

// Lower triangular with the given diagonal and Gaussian strict lower part.
Matrix lower_with_diagonal(const Vector& diag, std::mt19937_64& rng) {
  const Eigen::Index n = diag.size();
  Matrix m = 0.5 * random_gaussian(n, n, rng);
  m = m.triangularView<Eigen::StrictlyLower>();
  m.diagonal() = diag;
  return m;
}

Vector stable_diagonal(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-3.0, -0.5);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = uni(rng);
  return d;
}

}  // namespace

StateSpaceSystem gen_system(const GeneratorSpec& spec) {
  const int n = spec.n, m = spec.m, p = spec.p;
  if (p < 1 || p >= n || m < 1 || spec.k < 0) {
    throw ConfigError("generator needs 1 <= p < n, m >= 1 and k >= 0");
  }
  std::mt19937_64 rng(spec.seed);
  const auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  if (spec.kind == SystemKind::kHurwitz) {
    const Matrix core = lower_with_diagonal(stable_diagonal(n, rng), rng);
    const Matrix s = random_orthogonal(n, rng);
    Matrix c = random_gaussian(p, n, rng);
    const Matrix b = random_gaussian(n, m, rng);
    return StateSpaceSystem(s * core * s.transpose(), b, std::move(c));
  }

  // Unobservable block size. Keeping it <= n - p - k leaves room for
  // rank(A12) >= k; it never exceeds n - p so Co can have full row rank.
  const int room = std::max(0, n - p - spec.k);
  int n_u = 0;
  switch (spec.kind) {
    case SystemKind::kObservable: n_u = 0; break;
    case SystemKind::kDetectable: n_u = uniform_int(0, room); break;
    case SystemKind::kUndetectablePlanted:
      n_u = uniform_int(1, std::max(1, room));
      break;
    case SystemKind::kHurwitz: break;
  }
  const int n_o = n - n_u;

  Matrix a = Matrix::Zero(n, n);
  a.topLeftCorner(n_o, n_o) =
      random_gaussian(n_o, n_o, rng) / std::sqrt(static_cast<double>(n_o));
  if (n_u > 0) {
    Vector diag = stable_diagonal(n_u, rng);
    if (spec.kind == SystemKind::kUndetectablePlanted) diag(0) = 1.0;
    a.bottomLeftCorner(n_u, n_o) = 0.5 * random_gaussian(n_u, n_o, rng);
    a.bottomRightCorner(n_u, n_u) = lower_with_diagonal(diag, rng);
  }
  Matrix c = Matrix::Zero(p, n);
  c.leftCols(n_o) = random_gaussian(p, n_o, rng);
  const Matrix b = random_gaussian(n, m, rng);
  const Matrix s = random_orthogonal(n, rng);
  return StateSpaceSystem(s * a * s.transpose(), s * b, c * s.transpose());
}

Matrix expm_oracle(const Eigen::Ref<const Matrix>& m, double t) {
  require_square(m, "expm input");
  const Eigen::Index n = m.rows();
  const Matrix a = m * t;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  // |scaled| <= 1/2, so 20 Taylor terms are below 1e-25 relative.
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int j = 1; j <= 20; ++j) {
    term = term * scaled / static_cast<double>(j);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace piobs::testkit
