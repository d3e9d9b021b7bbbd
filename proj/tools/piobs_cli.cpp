// Command-line front end: check / design / simulate / random.
//
// Exit codes: 0 success, 1 existence failure, 2 input error,
// 3 numerical certification failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "piobs/io.hpp"
#include "piobs/sim.hpp"
#include "piobs/synthesis.hpp"
#include "piobs/testkit.hpp"

namespace {

using piobs::Matrix;
using piobs::Vector;
using piobs::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitExistence = 1;
constexpr int kExitInput = 2;
constexpr int kExitCertification = 3;

struct Options {
  std::string system_path;
  std::string design_path;
  std::string config_path;
  std::string out_path;

  int k = 1;
  std::string poles;
  std::string phi_poles;
  std::optional<double> tol_rank;
  double stability_margin = piobs::kDefaultStabilityMargin;
  std::uint64_t seed = 0;

  std::optional<double> dt;
  std::optional<double> tf;
  std::string input;
  std::optional<double> amplitude;
  std::optional<double> t0;
  std::optional<double> frequency;
  std::string input_csv;
  std::string x0, z2hat0, omega0;

  int n = 4, m = 1, p = 1;
  std::string kind = "detectable";
};

void require_positive(const std::optional<double>& v, const char* name) {
  if (v && !(*v > 0.0)) {
    throw piobs::ConfigError(std::string(name) + " must be > 0");
  }
}

piobs::StateSpaceSystem load_system(const Options& o) {
  require_positive(o.tol_rank, "--tol-rank");
  return piobs::io::system_from_json(piobs::io::read_json_file(o.system_path),
                                     o.tol_rank.value_or(-1.0));
}

void emit(const Options& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
  } else {
    piobs::io::write_text_file(o.out_path, text);
  }
}

std::string spectrum_line(const piobs::Spectrum& s) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out << (i ? "  " : "") << s(i).real();
    if (s(i).imag() != 0.0) {
      out << (s(i).imag() > 0 ? "+" : "") << s(i).imag() << "i";
    }
  }
  return out.str();
}

int run_check(const Options& o) {
  const auto sys = load_system(o);
  const double rank_tol = o.tol_rank.value_or(-1.0);
  const Matrix t = o.tol_rank ? piobs::output_normalize(sys.C(), *o.tol_rank)
                              : piobs::output_normalize(sys.C());
  const auto ts = piobs::partition(sys, t);
  const auto full = piobs::pbh_detectable(sys.A(), sys.C(),
                                          piobs::kDefaultDetectabilityTol,
                                          rank_tol);
  const auto red = piobs::pbh_detectable_any_output(
      ts.A22, ts.A12, piobs::kDefaultDetectabilityTol, rank_tol);
  const int rank_c = o.tol_rank ? piobs::numerical_rank(sys.C(), *o.tol_rank)
                                : piobs::numerical_rank(sys.C());
  const int q = o.tol_rank ? piobs::numerical_rank(ts.A12, *o.tol_rank)
                           : piobs::numerical_rank(ts.A12);
  const bool detectable = red.detectable && full.detectable;

  Json report{{"n", sys.n()},
              {"m", sys.m()},
              {"p", sys.p()},
              {"rank_C", rank_c},
              {"q", q},
              {"max_k", q},
              {"detectable", detectable},
              {"reduced_pair_consistent", red.detectable == full.detectable},
              {"pbh", piobs::io::detectability_to_json(full)},
              {"pbh_reduced", piobs::io::detectability_to_json(red)}};
  if (!detectable) {
    report["verdict"] =
        "(A, C) is not detectable: a reduced-order PI observer cannot be "
        "constructed";
  } else if (q < 1) {
    report["verdict"] =
        "(A, C) is detectable but rank(A12) = 0, so no integrator "
        "dimension k >= 1 is feasible";
  } else {
    report["verdict"] = "a reduced-order PI observer exists for 1 <= k <= " +
                        std::to_string(q);
  }
  std::cout << report.dump(2) << "\n";
  if (!detectable || q < 1) return kExitExistence;
  return kExitOk;
}

piobs::SynthesisConfig synthesis_config(const Options& o) {
  require_positive(o.tol_rank, "--tol-rank");
  if (!(o.stability_margin > 0.0)) {
    throw piobs::ConfigError("--stability-margin must be > 0");
  }
  piobs::SynthesisConfig cfg;
  cfg.k = o.k;
  cfg.seed = o.seed;
  cfg.tol.rank = o.tol_rank;
  cfg.tol.stability_margin = o.stability_margin;
  if (!o.poles.empty()) cfg.target_poles = piobs::io::parse_pole_list(o.poles);
  if (!o.phi_poles.empty()) {
    cfg.phi_poles = piobs::io::parse_pole_list(o.phi_poles);
  }
  return cfg;
}

int run_design(const Options& o) {
  const auto sys = load_system(o);
  const auto d = piobs::design(sys, synthesis_config(o));
  const std::string text = piobs::io::design_to_json(d).dump(2) + "\n";
  emit(o, text);
  if (!o.out_path.empty()) {
    std::cout << "composite spectrum: " << spectrum_line(d.composite_spectrum)
              << "\n";
  }
  return kExitOk;
}

Vector vector_option(const std::string& flag, const Json& config,
                     const char* key, const Vector& fallback) {
  if (!flag.empty()) return piobs::io::parse_vector(flag);
  if (config.contains(key)) {
    const Json& j = config.at(key);
    if (!j.is_array()) {
      throw piobs::ConfigError(std::string(key) + " must be an array");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
  }
  return fallback;
}

piobs::InputSignal input_signal(const Options& o, const Json& config) {
  Json spec = config.value("input", Json::object());
  if (spec.is_string()) spec = Json{{"kind", spec}};
  const std::string kind =
      !o.input.empty() ? o.input : spec.value("kind", std::string("zero"));
  const double amplitude = o.amplitude.value_or(spec.value("amplitude", 1.0));
  if (kind == "zero") return piobs::InputSignal::zero();
  if (kind == "step") {
    return piobs::InputSignal::step(amplitude, o.t0.value_or(spec.value("t0", 0.0)));
  }
  if (kind == "sine") {
    return piobs::InputSignal::sine(
        amplitude, o.frequency.value_or(spec.value("frequency", 1.0)));
  }
  if (kind == "csv") {
    const std::string path =
        !o.input_csv.empty() ? o.input_csv : spec.value("path", std::string());
    if (path.empty()) throw piobs::ConfigError("--input csv needs --input-csv");
    return piobs::InputSignal::from_csv(path);
  }
  throw piobs::ConfigError("unknown input kind '" + kind + "'");
}

int run_simulate(const Options& o) {
  const auto sys = load_system(o);
  const auto d =
      piobs::io::design_from_json(piobs::io::read_json_file(o.design_path));
  const Json config = o.config_path.empty()
                          ? Json::object()
                          : piobs::io::read_json_file(o.config_path);
  const auto ts = piobs::partition(sys, d.T);
  const auto obs = piobs::realize(d, ts);

  const Matrix comp = piobs::composite_matrix(ts.A22, ts.A12, d);
  const double slowest = piobs::max_real_part(piobs::eig(comp));

  piobs::SimulationSetup setup;
  setup.x0 = vector_option(o.x0, config, "x0", Vector::Ones(sys.n()));
  setup.z2hat0 = vector_option(o.z2hat0, config, "z2hat0",
                               Vector::Zero(obs.reduced_order()));
  setup.omega0 = vector_option(o.omega0, config, "omega0", Vector::Zero(obs.k()));
  setup.dt = o.dt ? *o.dt
                  : config.value("dt", piobs::default_time_step(sys, obs));
  const double default_tf = slowest < 0.0 ? 10.0 / std::abs(slowest) : 10.0;
  setup.tf = o.tf ? *o.tf : config.value("tf", default_tf);
  setup.input = input_signal(o, config);

  const auto trace = piobs::simulate(sys, ts, obs, setup);
  std::ostringstream csv;
  piobs::write_trace_csv(trace, csv);
  piobs::io::write_text_file(o.out_path.empty() ? "trace.csv" : o.out_path,
                             csv.str());

  const auto last = static_cast<Eigen::Index>(trace.size() - 1);
  Json summary{{"steps", static_cast<long>(trace.size() - 1)},
               {"dt", setup.dt},
               {"tf", trace.t.back()},
               {"initial_e_norm", trace.e_norm(0)},
               {"initial_omega_norm", trace.omega_norm(0)},
               {"final_e_norm", trace.e_norm(last)},
               {"final_omega_norm", trace.omega_norm(last)},
               {"slowest_composite_real_part", slowest}};
  const double rate = piobs::fitted_decay_rate(trace);
  summary["fitted_decay_rate"] = std::isfinite(rate) ? Json(rate) : Json();
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int run_random(const Options& o) {
  piobs::testkit::GeneratorSpec spec;
  spec.n = o.n;
  spec.m = o.m;
  spec.p = o.p;
  spec.k = o.k;
  spec.seed = o.seed;
  spec.kind = piobs::testkit::parse_kind(o.kind);
  const auto sys = piobs::testkit::gen_system(spec);
  emit(o, piobs::io::system_to_json(sys).dump(2) + "\n");
  return kExitOk;
}

int exit_code(piobs::ErrorKind kind) {
  switch (kind) {
    case piobs::ErrorKind::kInput: return kExitInput;
    case piobs::ErrorKind::kExistence: return kExitExistence;
    case piobs::ErrorKind::kCertification: return kExitCertification;
  }
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order proportional-integral observer design"};
  app.require_subcommand(1);
  Options o;

  const auto add_tolerances = [&o](CLI::App* sub) {
    sub->add_option("--tol-rank", o.tol_rank, "Relative rank tolerance");
  };

  auto* check = app.add_subcommand("check", "Test the existence conditions");
  check->add_option("system", o.system_path, "System JSON")->required();
  add_tolerances(check);

  auto* des = app.add_subcommand("design", "Synthesize L, F, G");
  des->add_option("system", o.system_path, "System JSON")->required();
  des->add_option("--k", o.k, "Integrator dimension");
  des->add_option("--poles", o.poles, "Poles of A22 + K A12, e.g. -1,-2+1i,-2-1i");
  des->add_option("--phi-poles", o.phi_poles, "Poles of Phi");
  des->add_option("--stability-margin", o.stability_margin);
  des->add_option("--seed", o.seed, "Seed for the pole-placement parameters");
  des->add_option("--out", o.out_path, "Design JSON path (default stdout)");
  add_tolerances(des);

  auto* sim = app.add_subcommand("simulate", "Simulate plant and observer");
  sim->add_option("system", o.system_path, "System JSON")->required();
  sim->add_option("design", o.design_path, "Design JSON")->required();
  sim->add_option("--config", o.config_path, "Simulation config JSON");
  sim->add_option("--dt", o.dt);
  sim->add_option("--tf", o.tf);
  sim->add_option("--input", o.input)
      ->check(CLI::IsMember({"zero", "step", "sine", "csv"}));
  sim->add_option("--amplitude", o.amplitude);
  sim->add_option("--t0", o.t0, "Step time");
  sim->add_option("--frequency", o.frequency, "Sine frequency in rad/s");
  sim->add_option("--input-csv", o.input_csv, "Rows t,u_1,...,u_m");
  sim->add_option("--x0", o.x0, "Plant initial state, comma separated");
  sim->add_option("--z2hat0", o.z2hat0, "Observer initial estimate");
  sim->add_option("--omega0", o.omega0, "Integral state initial value");
  sim->add_option("--out", o.out_path, "Trace CSV path (default trace.csv)");
  add_tolerances(sim);

  auto* rnd = app.add_subcommand("random", "Generate a test system");
  rnd->add_option("--n", o.n);
  rnd->add_option("--m", o.m);
  rnd->add_option("--p", o.p);
  rnd->add_option("--k", o.k);
  rnd->add_option("--seed", o.seed);
  rnd->add_option("--kind", o.kind)
      ->check(CLI::IsMember(
          {"detectable", "undetectable_planted", "observable", "hurwitz"}));
  rnd->add_option("--out", o.out_path, "System JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*check) return run_check(o);
    if (*des) return run_design(o);
    if (*sim) return run_simulate(o);
    if (*rnd) return run_random(o);
  } catch (const piobs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
