#pragma once

#include <string>
#include <vector>

#include "piobs/synthesis.hpp"

namespace piobs {

/// Derivative-free form of the observer. With v = zhat2 - L y and
/// w = omega - G y:
///   v' = Av v + Bvy y + Bvu u + Fv w
///   w' = Awv v + Awy y + Awu u
/// and zhat2 = v + L y, omega = w + G y, xhat = T [y; zhat2].
struct ObserverRealization {
  Matrix Av, Bvy, Bvu, Fv;
  Matrix Awv, Awy, Awu;
  Matrix L, G, T;

  int n() const { return static_cast<int>(T.rows()); }
  int p() const { return static_cast<int>(L.cols()); }
  int m() const { return static_cast<int>(Bvu.cols()); }
  int reduced_order() const { return static_cast<int>(Av.rows()); }
  int k() const { return static_cast<int>(Awv.rows()); }
};

ObserverRealization realize(const ObserverDesign& design,
                            const TransformedSystem& ts);

/// Input signal u(t), applied identically to every input channel unless
/// read from a table.
class InputSignal {
 public:
  enum class Kind { kZero, kStep, kSine, kTable };

  static InputSignal zero();
  /// u(t) = amplitude for t >= t0, else 0.
  static InputSignal step(double amplitude, double t0);
  /// u(t) = amplitude * sin(frequency * t), frequency in rad/s.
  static InputSignal sine(double amplitude, double frequency);
  /// Piecewise constant: row i holds from times[i] until times[i+1]; zero
  /// before the first breakpoint. values has one row per breakpoint.
  static InputSignal table(std::vector<double> times, Matrix values);
  /// Parses "t,u_1,...,u_m" rows (an optional non-numeric header is skipped).
  static InputSignal from_csv(const std::string& path);

  Vector operator()(double t, int m) const;
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::kZero;
  double amplitude_ = 0.0;
  double param_ = 0.0;
  std::vector<double> times_;
  Matrix values_;
};

struct SimulationTrace {
  std::vector<double> t;
  Matrix x;       // n x steps
  Matrix xhat;    // n x steps
  Matrix e;       // (n-p) x steps, zhat2 - z2
  Matrix omega;   // k x steps
  Vector e_norm;
  Vector omega_norm;

  std::size_t size() const { return t.size(); }
};

struct SimulationSetup {
  Vector x0;
  Vector z2hat0;
  Vector omega0;
  double dt = 1e-3;
  double tf = 1.0;
  InputSignal input = InputSignal::zero();
};

/// Fixed-step RK4 on the coupled plant and observer. The grid is
/// t_i = i * dt for i = 0..round(tf / dt).
SimulationTrace simulate(const StateSpaceSystem& sys,
                         const TransformedSystem& ts,
                         const ObserverRealization& obs,
                         const SimulationSetup& setup);

/// dt = min(1e-3, 0.1 / max(1, rho)) for rho the spectral radius of the
/// coupled plant-observer matrix.
double default_time_step(const StateSpaceSystem& sys,
                         const ObserverRealization& obs);

/// Largest |[e; omega](t) - expm(composite t) [e; omega](0)| over the trace.
double error_dynamics_check(const ObserverDesign& design,
                            const TransformedSystem& ts,
                            const SimulationTrace& trace);

/// Least-squares slope of log(|e| + |omega|) over the second half of the
/// trace, or NaN when the norms reach zero.
double fitted_decay_rate(const SimulationTrace& trace);

void write_trace_csv(const SimulationTrace& trace, std::ostream& out);

}  // namespace piobs
