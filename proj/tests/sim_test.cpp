#include "piobs/sim.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "piobs/testkit.hpp"

namespace piobs {
namespace {

using cd = std::complex<double>;

Matrix mat(int rows, int cols, std::initializer_list<double> v) {
  Matrix m(rows, cols);
  auto it = v.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

struct Demo {
  StateSpaceSystem sys;
  TransformedSystem ts;
  ObserverDesign design;
  ObserverRealization obs;
};

Demo scalar_chain() {
  StateSpaceSystem sys(mat(2, 2, {0, 1, 0, 1}), mat(2, 1, {0, 1}),
                       mat(1, 2, {1, 0}));
  SynthesisConfig cfg;
  cfg.target_poles = PoleList{cd(-2, 0)};
  cfg.phi = Matrix::Constant(1, 1, -1.0);
  auto d = design(sys, cfg);
  auto ts = partition(sys, d.T);
  auto obs = realize(d, ts);
  return {std::move(sys), std::move(ts), std::move(d), std::move(obs)};
}

SimulationSetup demo_setup(double dt, double tf) {
  SimulationSetup s;
  s.x0 = Eigen::Vector2d(0, 1);
  s.z2hat0 = Vector::Zero(1);
  s.omega0 = Vector::Zero(1);
  s.dt = dt;
  s.tf = tf;
  return s;
}

TEST(RealizeTest, ScalarChainCoefficients) {
  const auto demo = scalar_chain();
  const auto& o = demo.obs;
  EXPECT_NEAR(o.Av(0, 0), -3.0, 1e-12);
  EXPECT_NEAR(o.Bvy(0, 0), -10.0, 1e-12);
  EXPECT_NEAR(o.Bvu(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(o.Fv(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(o.Awv(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(o.Awy(0, 0), -4.0, 1e-12);
  EXPECT_NEAR(o.Awu(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(o.L(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(o.G(0, 0), 1.0, 1e-12);
}

TEST(RealizeTest, ZeroGainsReduceToOpenLoopCopy) {
  auto demo = scalar_chain();
  ObserverDesign d = demo.design;
  d.L.setZero();
  d.G.setZero();
  d.F.setZero();
  const auto o = realize(d, demo.ts);
  EXPECT_EQ(o.Av, demo.ts.A22);
  EXPECT_EQ(o.Bvy, demo.ts.A21);
  EXPECT_EQ(o.Bvu, demo.ts.G2);
  EXPECT_EQ(o.Awv.norm() + o.Awy.norm() + o.Awu.norm(), 0.0);
}

TEST(RealizeTest, IntegratorCouplingIsMinusGA12) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    testkit::GeneratorSpec spec;
    spec.n = 4 + static_cast<int>(seed % 3);
    spec.p = 2;
    spec.seed = seed;
    const auto sys = testkit::gen_system(spec);
    const auto d = design(sys);
    const auto ts = partition(sys, d.T);
    EXPECT_EQ(realize(d, ts).Awv, Matrix(-d.G * ts.A12));
  }
}

TEST(RealizeTest, DimensionMismatch) {
  const auto demo = scalar_chain();
  ObserverDesign d = demo.design;
  d.L = Matrix::Zero(2, 1);
  EXPECT_THROW(realize(d, demo.ts), DimensionError);
}

TEST(SimulateTest, ScalarChainConverges) {
  const auto demo = scalar_chain();
  const auto tr = simulate(demo.sys, demo.ts, demo.obs, demo_setup(1e-3, 5.0));
  ASSERT_EQ(tr.size(), 5001u);
  EXPECT_DOUBLE_EQ(tr.t.back(), 5.0);
  EXPECT_NEAR(tr.e_norm(0), 1.0, 1e-15);
  EXPECT_LE(tr.e_norm(5000), 5e-2 * tr.e_norm(0));
}

TEST(SimulateTest, ErrorDynamicsIgnoreInput) {
  const auto demo = scalar_chain();
  auto setup = demo_setup(1e-3, 5.0);
  const auto free = simulate(demo.sys, demo.ts, demo.obs, setup);
  setup.input = InputSignal::sine(1.0, 1.0);
  const auto driven = simulate(demo.sys, demo.ts, demo.obs, setup);
  EXPECT_LE((free.e - driven.e).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((free.omega - driven.omega).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT((free.x - driven.x).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(SimulateTest, ZeroInitialErrorStaysZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    testkit::GeneratorSpec spec;
    spec.p = 1 + static_cast<int>(seed % 3);
    spec.n = spec.p + 1 + static_cast<int>((seed / 3) % std::min(spec.p, 2));
    spec.m = 2;
    spec.seed = seed;
    spec.kind = testkit::SystemKind::kHurwitz;
    const auto sys = testkit::gen_system(spec);
    const auto d = design(sys);
    const auto ts = partition(sys, d.T);
    const auto obs = realize(d, ts);
    SimulationSetup s;
    s.x0 = Vector::LinSpaced(sys.n(), -1.0, 2.0);
    s.z2hat0 = Vector(solve_linear(ts.T, s.x0)).tail(sys.n() - sys.p());
    s.omega0 = Vector::Zero(d.k());
    s.dt = 1e-2;
    s.tf = 5.0;
    s.input = InputSignal::step(2.0, 1.0);
    const auto tr = simulate(sys, ts, obs, s);
    EXPECT_LE(tr.e_norm.maxCoeff(), 1e-9);
    EXPECT_LE(tr.omega_norm.maxCoeff(), 1e-9);
  }
}

TEST(SimulateTest, RecoveryAndMeasuredStates) {
  const auto demo = scalar_chain();
  const auto tr = simulate(demo.sys, demo.ts, demo.obs, demo_setup(1e-2, 3.0));
  const double t_norm = demo.ts.T.norm();
  const Eigen::PartialPivLU<Matrix> lu(demo.ts.T);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    EXPECT_LE((tr.xhat.col(c) - tr.x.col(c)).norm(),
              t_norm * tr.e_norm(c) + 1e-12);
    const Vector z = lu.solve(tr.x.col(c));
    EXPECT_LE((z.head(1) - demo.sys.C() * tr.x.col(c)).norm(), 1e-12);
  }
}

TEST(SimulateTest, Errors) {
  const auto demo = scalar_chain();
  auto s = demo_setup(0.0, 1.0);
  EXPECT_THROW(simulate(demo.sys, demo.ts, demo.obs, s), ConfigError);
  s = demo_setup(1e-2, 1.0);
  s.x0 = Vector::Zero(3);
  EXPECT_THROW(simulate(demo.sys, demo.ts, demo.obs, s), DimensionError);
  // The plant mode e^t overflows long before t = 2000.
  s = demo_setup(0.5, 2000.0);
  try {
    simulate(demo.sys, demo.ts, demo.obs, s);
    ADD_FAILURE() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.step(), 1000);
    EXPECT_LT(e.step(), 4000);
  }
}

TEST(ErrorDynamicsTest, ScalarChainMatchesMatrixExponential) {
  const auto demo = scalar_chain();
  const auto tr = simulate(demo.sys, demo.ts, demo.obs, demo_setup(1e-3, 5.0));
  EXPECT_LE(error_dynamics_check(demo.design, demo.ts, tr), 1e-9);
}

TEST(ErrorDynamicsTest, ZeroInitialErrorGivesZeroDeviation) {
  const auto demo = scalar_chain();
  auto s = demo_setup(1e-2, 2.0);
  s.z2hat0 = Vector::Constant(1, 1.0);
  const auto tr = simulate(demo.sys, demo.ts, demo.obs, s);
  EXPECT_LE(error_dynamics_check(demo.design, demo.ts, tr), 1e-12);
}

TEST(ErrorDynamicsTest, FourthOrderConvergence) {
  const auto demo = scalar_chain();
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025}) {
    const auto tr = simulate(demo.sys, demo.ts, demo.obs, demo_setup(dt, 5.0));
    const double dev = error_dynamics_check(demo.design, demo.ts, tr);
    if (prev > 0.0) {
      EXPECT_GT(prev / dev, 12.0);
      EXPECT_LT(prev / dev, 20.0);
    }
    prev = dev;
  }
}

TEST(ErrorDynamicsTest, RandomDesignsConverge) {
  // Fast placed poles and a slow integrator block keep the transient near
  // the slowest mode; see the acceptance suite for the same family.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> fast(-6.0, -3.0), slow(-1.5, -0.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    testkit::GeneratorSpec spec;
    spec.p = 1 + static_cast<int>(seed % 3);
    spec.n = spec.p + 1 + static_cast<int>((seed / 3) % std::min(spec.p, 2));
    spec.m = 2;
    spec.seed = 300 + seed;
    spec.kind = testkit::SystemKind::kObservable;
    const auto sys = testkit::gen_system(spec);
    SynthesisConfig cfg;
    cfg.seed = seed;
    cfg.target_poles = PoleList{};
    for (int i = 0; i < sys.n() - sys.p(); ++i) cfg.target_poles->emplace_back(fast(rng), 0.0);
    cfg.phi_poles = PoleList{cd(slow(rng), 0.0)};
    const auto d = design(sys, cfg);
    const auto ts = partition(sys, d.T);
    const auto obs = realize(d, ts);
    const double alpha = max_real_part(d.composite_spectrum);
    SimulationSetup s;
    s.x0 = testkit::random_gaussian(sys.n(), 1, rng);
    s.z2hat0 = testkit::random_gaussian(sys.n() - sys.p(), 1, rng);
    s.omega0 = Vector::Zero(d.k());
    s.tf = 10.0 / std::abs(alpha);
    s.dt = std::min(default_time_step(sys, obs), s.tf / 200.0);
    const InputSignal inputs[] = {InputSignal::zero(), InputSignal::step(1.0, 0.5),
                                  InputSignal::sine(1.0, 2.0)};
    s.input = inputs[seed % 3];
    const auto tr = simulate(sys, ts, obs, s);
    const auto last = static_cast<Eigen::Index>(tr.size() - 1);
    EXPECT_LE(tr.e_norm(last), 1e-4 * tr.e_norm(0)) << "seed " << seed;
    EXPECT_LE(tr.omega_norm(last), 1e-4 * tr.e_norm(0)) << "seed " << seed;
  }
}

TEST(InputSignalTest, Kinds) {
  EXPECT_EQ(InputSignal::zero()(3.0, 2), Vector::Zero(2));
  const auto step = InputSignal::step(2.0, 1.0);
  EXPECT_EQ(step(0.5, 1)(0), 0.0);
  EXPECT_EQ(step(1.0, 1)(0), 2.0);
  EXPECT_NEAR(InputSignal::sine(3.0, 2.0)(0.25, 1)(0), 3.0 * std::sin(0.5),
              1e-15);
  const auto table =
      InputSignal::table({0.0, 1.0, 2.5}, mat(3, 2, {1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(table(-1.0, 2), Vector::Zero(2));
  EXPECT_EQ(table(0.0, 2), Eigen::Vector2d(1, 2));
  EXPECT_EQ(table(2.4, 2), Eigen::Vector2d(3, 4));
  EXPECT_EQ(table(9.0, 2), Eigen::Vector2d(5, 6));
  EXPECT_THROW(table(0.0, 3), DimensionError);
  EXPECT_THROW(InputSignal::table({1.0, 0.0}, Matrix::Zero(2, 1)), ConfigError);
}

TEST(InputSignalTest, FromCsv) {
  const std::string path = ::testing::TempDir() + "piobs_input.csv";
  {
    std::ofstream out(path);
    out << "t,u_1\n0,1.5\n2,-1\n";
  }
  const auto sig = InputSignal::from_csv(path);
  EXPECT_EQ(sig(1.0, 1)(0), 1.5);
  EXPECT_EQ(sig(3.0, 1)(0), -1.0);
  std::remove(path.c_str());
  EXPECT_THROW(InputSignal::from_csv(path), ConfigError);
}

TEST(TraceCsvTest, HeaderAndPrecision) {
  const auto demo = scalar_chain();
  const auto tr = simulate(demo.sys, demo.ts, demo.obs, demo_setup(0.1, 0.2));
  std::ostringstream out;
  write_trace_csv(tr, out);
  std::istringstream in(out.str());
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header, "t,x_1,x_2,xhat_1,xhat_2,e_norm,omega_norm");
  EXPECT_EQ(first, "0,0,1,0,0,1,0");
  // Values round-trip through text.
  const double x1 = std::stod(second.substr(second.find(',') + 1));
  EXPECT_EQ(x1, tr.x(0, 1));
}

}  // namespace
}  // namespace piobs
