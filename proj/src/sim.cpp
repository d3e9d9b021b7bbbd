#include "piobs/sim.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "piobs/testkit.hpp"

namespace piobs {

ObserverRealization realize(const ObserverDesign& design,
                            const TransformedSystem& ts) {
  const Eigen::Index r = ts.A22.rows();
  const Eigen::Index p = ts.A11.rows();
  const Eigen::Index k = design.G.rows();
  if (design.L.rows() != r || design.L.cols() != p || design.F.rows() != r ||
      design.F.cols() != k || design.G.cols() != p) {
    throw DimensionError(
        "observer design does not match the system dimensions (n - p = " +
        std::to_string(r) + ", p = " + std::to_string(p) + ")");
  }
  const Matrix& l = design.L;
  const Matrix& g = design.G;
  ObserverRealization o;
  o.Av = ts.A22 - l * ts.A12;
  o.Bvy = o.Av * l - l * ts.A11 + ts.A21 + design.F * g;
  o.Bvu = ts.G2 - l * ts.G1;
  o.Fv = design.F;
  o.Awv = -g * ts.A12;
  o.Awy = -g * ts.A11 - g * ts.A12 * l;
  o.Awu = -g * ts.G1;
  o.L = l;
  o.G = g;
  o.T = ts.T;
  return o;
}

InputSignal InputSignal::zero() { return InputSignal(); }

InputSignal InputSignal::step(double amplitude, double t0) {
  InputSignal s;
  s.kind_ = Kind::kStep;
  s.amplitude_ = amplitude;
  s.param_ = t0;
  return s;
}

InputSignal InputSignal::sine(double amplitude, double frequency) {
  InputSignal s;
  s.kind_ = Kind::kSine;
  s.amplitude_ = amplitude;
  s.param_ = frequency;
  return s;
}

InputSignal InputSignal::table(std::vector<double> times, Matrix values) {
  if (static_cast<Eigen::Index>(times.size()) != values.rows()) {
    throw ConfigError("input table: one value row per breakpoint required");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ConfigError("input table: breakpoints must increase strictly");
    }
  }
  InputSignal s;
  s.kind_ = Kind::kTable;
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

InputSignal InputSignal::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input CSV '" + path + "'");
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (times.empty() && rows.empty()) continue;  // header
      throw ConfigError("input CSV: non-numeric row '" + line + "'");
    }
    if (vals.size() < 2) throw ConfigError("input CSV: need t and >= 1 value");
    if (!rows.empty() && vals.size() != rows.front().size() + 1) {
      throw ConfigError("input CSV: ragged row '" + line + "'");
    }
    times.push_back(vals.front());
    rows.emplace_back(vals.begin() + 1, vals.end());
  }
  if (rows.empty()) throw ConfigError("input CSV '" + path + "' has no rows");
  Matrix values(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) values(i, j) = rows[i][j];
  }
  return table(std::move(times), std::move(values));
}

Vector InputSignal::operator()(double t, int m) const {
  switch (kind_) {
    case Kind::kZero:
      return Vector::Zero(m);
    case Kind::kStep:
      return Vector::Constant(m, t >= param_ ? amplitude_ : 0.0);
    case Kind::kSine:
      return Vector::Constant(m, amplitude_ * std::sin(param_ * t));
    case Kind::kTable: {
      if (values_.cols() != m) {
        throw DimensionError("input table has " +
                             std::to_string(values_.cols()) +
                             " channels, plant has " + std::to_string(m));
      }
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      if (it == times_.begin()) return Vector::Zero(m);
      return values_.row(std::distance(times_.begin(), it) - 1).transpose();
    }
  }
  return Vector::Zero(m);
}

namespace {

// Coupled plant/observer state [x; v; w] evolves as M s + N u.
struct CoupledSystem {
  Matrix M;
  Matrix N;
};

CoupledSystem couple(const StateSpaceSystem& sys,
                     const ObserverRealization& o) {
  const Eigen::Index n = sys.n(), r = o.reduced_order(), k = o.k();
  CoupledSystem cs;
  cs.M = Matrix::Zero(n + r + k, n + r + k);
  cs.M.topLeftCorner(n, n) = sys.A();
  cs.M.block(n, 0, r, n) = o.Bvy * sys.C();
  cs.M.block(n, n, r, r) = o.Av;
  cs.M.block(n, n + r, r, k) = o.Fv;
  cs.M.block(n + r, 0, k, n) = o.Awy * sys.C();
  cs.M.block(n + r, n, k, r) = o.Awv;
  cs.N.resize(n + r + k, sys.m());
  cs.N << sys.B(), o.Bvu, o.Awu;
  return cs;
}

}  // namespace

double default_time_step(const StateSpaceSystem& sys,
                         const ObserverRealization& obs) {
  const Spectrum s = eig(couple(sys, obs).M);
  const double rho = s.size() ? s.cwiseAbs().maxCoeff() : 0.0;
  return std::min(1e-3, 0.1 / std::max(1.0, rho));
}

SimulationTrace simulate(const StateSpaceSystem& sys,
                         const TransformedSystem& ts,
                         const ObserverRealization& obs,
                         const SimulationSetup& setup) {
  const int n = sys.n(), p = sys.p(), m = sys.m();
  const int r = obs.reduced_order(), k = obs.k();
  if (obs.n() != n || obs.p() != p || obs.m() != m || ts.n() != n) {
    throw DimensionError("observer realization does not match the plant");
  }
  if (setup.x0.size() != n || setup.z2hat0.size() != r ||
      setup.omega0.size() != k) {
    throw DimensionError("initial conditions need sizes n = " +
                         std::to_string(n) + ", n - p = " + std::to_string(r) +
                         ", k = " + std::to_string(k));
  }
  if (!(setup.dt > 0.0) || !(setup.tf >= setup.dt)) {
    throw ConfigError("simulation needs dt > 0 and tf >= dt");
  }
  const long steps = std::lround(setup.tf / setup.dt);
  const double h = setup.dt;

  const CoupledSystem cs = couple(sys, obs);
  const auto f = [&](double t, const Vector& s) -> Vector {
    return cs.M * s + cs.N * setup.input(t, m);
  };
  const Eigen::PartialPivLU<Matrix> t_lu(ts.T);

  SimulationTrace tr;
  tr.t.reserve(steps + 1);
  tr.x.resize(n, steps + 1);
  tr.xhat.resize(n, steps + 1);
  tr.e.resize(r, steps + 1);
  tr.omega.resize(k, steps + 1);

  Vector s(n + r + k);
  {
    const Vector y0 = sys.C() * setup.x0;
    s << setup.x0, setup.z2hat0 - obs.L * y0, setup.omega0 - obs.G * y0;
  }
  const auto record = [&](long i, double t) {
    const Vector x = s.head(n);
    const Vector y = sys.C() * x;
    const Vector z2hat = s.segment(n, r) + obs.L * y;
    Vector z(n);
    z << y, z2hat;
    tr.t.push_back(t);
    tr.x.col(i) = x;
    tr.xhat.col(i) = ts.T * z;
    tr.e.col(i) = z2hat - t_lu.solve(x).tail(r);
    tr.omega.col(i) = s.tail(k) + obs.G * y;
  };

  record(0, 0.0);
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * h;
    const Vector k1 = f(t, s);
    const Vector k2 = f(t + 0.5 * h, s + 0.5 * h * k1);
    const Vector k3 = f(t + 0.5 * h, s + 0.5 * h * k2);
    const Vector k4 = f(t + h, s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!s.allFinite()) {
      throw DivergenceError(
          "simulation diverged at step " + std::to_string(i + 1), i + 1);
    }
    record(i + 1, static_cast<double>(i + 1) * h);
  }
  tr.e_norm = tr.e.colwise().norm().transpose();
  tr.omega_norm = tr.omega.colwise().norm().transpose();
  return tr;
}

double error_dynamics_check(const ObserverDesign& design,
                            const TransformedSystem& ts,
                            const SimulationTrace& trace) {
  const Matrix comp = composite_matrix(ts.A22, ts.A12, design);
  const Eigen::Index r = trace.e.rows();
  const Eigen::Index k = trace.omega.rows();
  if (comp.rows() != r + k) {
    throw DimensionError("trace does not match the design");
  }
  Vector s0(r + k);
  s0 << trace.e.col(0), trace.omega.col(0);
  double worst = 0.0;
  Vector s(r + k);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    s << trace.e.col(i), trace.omega.col(i);
    const Vector ref = testkit::expm_oracle(comp, trace.t[i]) * s0;
    worst = std::max(worst, (s - ref).norm());
  }
  return worst;
}

double fitted_decay_rate(const SimulationTrace& trace) {
  const Vector total = trace.e_norm + trace.omega_norm;
  if (total.size() < 4 || total.maxCoeff() == 0.0) return std::nan("");
  const double floor = 1e-10 * total.maxCoeff();
  std::vector<double> ts, ls;
  for (Eigen::Index i = total.size() / 2; i < total.size(); ++i) {
    if (total(i) > floor) {
      ts.push_back(trace.t[i]);
      ls.push_back(std::log(total(i)));
    }
  }
  if (ts.size() < 2) return std::nan("");
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += ls[i];
  }
  mt /= ts.size();
  ml /= ts.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (ls[i] - ml);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  return den > 0.0 ? num / den : std::nan("");
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  const Eigen::Index n = trace.x.rows();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",xhat_" << i;
  out << ",e_norm,omega_norm\n";
  const auto old_precision = out.precision(17);
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    out << trace.t[j];
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << trace.x(i, c);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << trace.xhat(i, c);
    out << ',' << trace.e_norm(c) << ',' << trace.omega_norm(c) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace piobs
