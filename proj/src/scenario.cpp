#include "ionprobe/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "ionprobe/multi_ion.hpp"
#include "ionprobe/protocols.hpp"
#include "ionprobe/reconstruction.hpp"

namespace ionprobe {

namespace {

constexpr const char* kToolVersion = "ionprobe 0.1.0";

[[noreturn]] void parse_fail(const std::string& field, const std::string& why) {
  throw std::invalid_argument("scenario parse error: field '" + field + "': " + why);
}

const Json& need(const Json& j, const std::string& key) {
  if (!j.contains(key)) parse_fail(key, "missing");
  return j.at(key);
}

double num(const Json& j, const std::string& key) {
  const Json& v = need(j, key);
  if (!v.is_number()) parse_fail(key, "expected a number");
  return v.get<double>();
}

int integer(const Json& j, const std::string& key) {
  const Json& v = need(j, key);
  if (!v.is_number_integer()) parse_fail(key, "expected an integer");
  return v.get<int>();
}

std::vector<double> num_list(const Json& j, const std::string& key) {
  const Json& v = need(j, key);
  if (!v.is_array()) parse_fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) parse_fail(key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct StateSpec {
  MotionalState state;
  bool factory;  // oracle values available
  double truncation_tail = 0.0;
};

StateSpec parse_state(const Json& scenario) {
  const Json& s = need(scenario, "state");
  const int dim = integer(scenario, "dim");
  const std::string kind = need(s, "kind").get<std::string>();
  double tail = 0.0;
  if (kind == "fock") return {fock_state(integer(s, "n"), dim), true};
  if (kind == "coherent") {
    const Complex alpha(num(s, "re"), s.contains("im") ? num(s, "im") : 0.0);
    MotionalState st = coherent_state(alpha, dim, &tail);
    return {std::move(st), true, tail};
  }
  if (kind == "thermal") {
    MotionalState st = thermal_state(num(s, "nbar"), dim, &tail);
    return {std::move(st), true, tail};
  }
  if (kind == "file") {
    MotionalState st = load_density_csv(need(s, "path").get<std::string>());
    if (st.dim() != dim) parse_fail("dim", "does not match the matrix file dimension");
    return {std::move(st), false};
  }
  parse_fail("state.kind", "unknown kind '" + kind + "'");
}

ProbeState parse_probe(const Json& params) {
  if (!params.contains("probe")) return ProbeState(+1, std::numbers::pi / 2.0);
  const Json& p = params.at("probe");
  const int sign = p.contains("sign") ? integer(p, "sign") : +1;
  const double phi = p.contains("phi") ? num(p, "phi") : std::numbers::pi / 2.0;
  return ProbeState(sign, phi);
}

DriveKind parse_drive_kind(const std::string& kind) {
  if (kind == "carrier") return DriveKind::carrier;
  if (kind == "red_sideband") return DriveKind::red_sideband;
  if (kind == "blue_sideband") return DriveKind::blue_sideband;
  parse_fail("drive.kind", "unknown kind '" + kind + "'");
}

DriveSet parse_drive(const Json& params) {
  const Json& d = need(params, "drive");
  const DriveKind kind = parse_drive_kind(need(d, "kind").get<std::string>());
  std::vector<double> etas = num_list(d, "etas");
  if (kind == DriveKind::carrier) {
    std::vector<double> weights =
        d.contains("weights") ? num_list(d, "weights") : std::vector<double>(etas.size(), 1.0);
    return DriveSet::carrier(std::move(weights), std::move(etas));
  }
  if (!d.contains("weights")) {
    if (etas.size() != 1) parse_fail("drive.weights", "required for multi-laser sidebands");
    return DriveSet::sideband_single(kind, etas[0]);
  }
  return DriveSet::sideband(kind, num_list(d, "weights"), std::move(etas));
}

MeasurementPlan parse_plan(const Json& scenario, std::uint64_t seed) {
  MeasurementPlan plan = MeasurementPlan::exact();
  plan.seed = seed;
  if (!scenario.contains("plan")) return plan;
  const Json& p = scenario.at("plan");
  if (p.contains("tau_grid")) plan.tau_grid = num_list(p, "tau_grid");
  if (p.contains("fit_order")) plan.fit_order = integer(p, "fit_order");
  if (p.contains("shots")) {
    const Json& s = p.at("shots");
    if (s.is_string()) {
      const std::string v = s.get<std::string>();
      if (v == "exact") plan.method = SlopeMethod::exact_analytic;
      else if (v == "noiseless") plan.method = SlopeMethod::fit_noiseless;
      else parse_fail("plan.shots", "expected 'exact', 'noiseless' or an integer");
    } else if (s.is_number_integer()) {
      plan.method = SlopeMethod::fit_shots;
      plan.shots_per_point = s.get<int>();
    } else {
      parse_fail("plan.shots", "expected 'exact', 'noiseless' or an integer");
    }
  }
  return plan;
}

const char* method_name(SlopeMethod m) {
  switch (m) {
    case SlopeMethod::exact_analytic: return "exact_analytic";
    case SlopeMethod::fit_noiseless: return "fit_noiseless";
    case SlopeMethod::fit_shots: return "fit_shots";
  }
  return "?";
}

struct Check {
  std::string name;
  double value, oracle, deviation, tolerance;
  bool has_oracle;
  bool pass;
};

Json check_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = c.value;
  if (c.has_oracle) {
    j["oracle"] = c.oracle;
    j["deviation"] = c.deviation;
  }
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  return j;
}

Check make_check(const std::string& name, double value, std::optional<double> oracle,
                 double tolerance) {
  Check c{name, value, 0.0, 0.0, tolerance, false, true};
  if (oracle) {
    c.has_oracle = true;
    c.oracle = *oracle;
    c.deviation = std::abs(value - *oracle);
    c.pass = c.deviation <= tolerance;
  }
  return c;
}

// One evaluated point of a task: estimate, stderr, oracle (when computable).
struct TaskPoint {
  double value = 0.0;
  double stderr_value = 0.0;
  std::optional<double> oracle;
  double default_tol = 1e-9;
  Json extra;  // task-specific payload merged into "results"
};

double default_tol_for(SlopeMethod m, double stderr_value) {
  switch (m) {
    case SlopeMethod::exact_analytic: return 1e-9;
    case SlopeMethod::fit_noiseless: return 1e-2;
    case SlopeMethod::fit_shots: return std::max(4.0 * stderr_value, 1e-9);
  }
  return 1e-9;
}

TaskPoint eval_slope(const Json& params, const StateSpec& spec, const MeasurementPlan& plan) {
  const ProbeState probe = parse_probe(params);
  const DriveSet drives = parse_drive(params);
  const InteractionHamiltonian h = build_hamiltonian(drives, spec.state.dim());
  const SlopeEstimate est = estimate_slope(h, probe, spec.state, plan);
  TaskPoint pt;
  pt.value = est.value;
  pt.stderr_value = est.stderr_value;
  if (spec.factory) pt.oracle = analytic_slope(probe, spec.state, drives);
  pt.default_tol = default_tol_for(est.method, est.stderr_value);
  pt.extra["method"] = method_name(est.method);
  pt.extra["time_convention"] = drives.time_convention == TimeConvention::omega_l_half
                                    ? "omega_l_t/2"
                                    : "eta_omega_l_t/2";
  return pt;
}

// Measured carrier means <f0(n; eta)> via the slope protocol at phi = pi/2.
std::pair<SlopeEstimate, SlopeEstimate> measure_two_eta_means(
    const MotionalState& state, double eta1, double eta2, const MeasurementPlan& plan) {
  const ProbeState probe(+1, std::numbers::pi / 2.0);
  MeasurementPlan p1 = plan, p2 = plan;
  p2.seed = mix_seed(plan.seed, 0x7eaULL);
  const auto h1 = build_carrier(DriveSet::carrier_single(eta1), state.dim());
  const auto h2 = build_carrier(DriveSet::carrier_single(eta2), state.dim());
  SlopeEstimate s1 = estimate_slope(h1, probe, state, p1);
  SlopeEstimate s2 = estimate_slope(h2, probe, state, p2);
  s1.value = -s1.value;  // slope = -<f0> at this probe
  s2.value = -s2.value;
  return {s1, s2};
}

}  // namespace

MotionalState load_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("density csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("density csv: empty file");
  int d = 0;
  if (std::sscanf(line.c_str(), "dim,%d", &d) != 1 || d < 2)
    throw std::invalid_argument("density csv: header must be 'dim,<d>' with d >= 2");
  Matrix rho(d, d);
  for (int r = 0; r < d; ++r) {
    if (!std::getline(in, line))
      throw std::invalid_argument("density csv: expected " + std::to_string(d) + " rows");
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < 2 * d; ++c) {
      if (!std::getline(ss, cell, ','))
        throw std::invalid_argument("density csv: row " + std::to_string(r) +
                                    " needs " + std::to_string(2 * d) + " entries");
      const double v = std::stod(cell);
      if (c % 2 == 0) rho(r, c / 2) = v;
      else rho(r, c / 2) += Complex(0.0, v);
    }
  }
  require_valid_density(rho, "density csv '" + path + "'");
  return {FockBasis(d), std::move(rho)};
}

void save_density_csv(const std::string& path, const Matrix& rho) {
  std::ofstream out(path);
  out << "dim," << rho.rows() << "\n";
  for (int r = 0; r < rho.rows(); ++r) {
    for (int c = 0; c < rho.cols(); ++c) {
      if (c) out << ",";
      out << fmt(rho(r, c).real()) << "," << fmt(rho(r, c).imag());
    }
    out << "\n";
  }
}

namespace {

// Evaluate the scenario's task once (no sweep). Fills results/checks.
void eval_task(const Json& scenario, const StateSpec& spec, const MeasurementPlan& plan,
               Json& results, std::vector<Check>& checks) {
  const std::string task = need(scenario, "task").get<std::string>();
  const Json params = scenario.contains("params") ? scenario.at("params") : Json::object();
  const auto tol_or = [&](double fallback) {
    return scenario.contains("tolerance") ? scenario.at("tolerance").get<double>() : fallback;
  };

  if (task == "slope") {
    const TaskPoint pt = eval_slope(params, spec, plan);
    results["slope"] = pt.value;
    results["stderr"] = pt.stderr_value;
    results.update(pt.extra);
    checks.push_back(make_check("slope", pt.value, pt.oracle, tol_or(pt.default_tol)));
    return;
  }

  if (task == "moments_two_eta" || task == "fano_mandel") {
    const auto etas = num_list(params, "etas");
    if (etas.size() != 2) parse_fail("params.etas", "expected exactly two etas");
    const auto [s1, s2] = measure_two_eta_means(spec.state, etas[0], etas[1], plan);
    const auto [m1, m2] = moments_two_eta(s1.value, etas[0], s2.value, etas[1],
                                          s1.stderr_value, s2.stderr_value);
    results["f0_means"] = {s1.value, s2.value};
    results["n_moment"] = m1.value;
    results["n2_moment"] = m2.value;
    results["n_stderr"] = m1.stderr_value;
    results["n2_stderr"] = m2.stderr_value;
    const double base_tol = tol_or(plan.method == SlopeMethod::fit_shots ? 0.25 : 0.05);
    std::optional<double> o1, o2;
    if (spec.factory) {
      o1 = number_moment(spec.state, 1);
      o2 = number_moment(spec.state, 2);
    }
    checks.push_back(make_check("n_moment", m1.value, o1, base_tol));
    checks.push_back(make_check("n2_moment", m2.value, o2, base_tol));
    if (task == "fano_mandel") {
      const FanoMandelEstimate q = fano_mandel(m1, m2);
      results["q"] = q.q;
      results["q_stderr"] = q.stderr_value;
      std::optional<double> oq;
      if (spec.factory && *o1 > 0) oq = (*o2 - *o1 * *o1) / *o1;
      checks.push_back(make_check("fano_mandel_q", q.q, oq, base_tol));
    }
    return;
  }

  if (task == "moment_engineered") {
    const int p = integer(params, "p");
    std::vector<double> etas;
    if (params.contains("etas")) etas = num_list(params, "etas");
    else etas = equispaced_etas(integer(params, "n_lasers"), num(params, "eta_max"));
    const MomentEstimate est = moment_engineered(spec.state, p, etas, plan);
    results["p"] = p;
    results["value"] = est.value;
    results["stderr"] = est.stderr_value;
    results["error_budget"] = {{"statistical", est.stat_error},
                               {"engineering_residual", est.residual_error},
                               {"truncation", est.truncation_error},
                               {"series_tail_estimate", est.series_tail_bound}};
    std::optional<double> oracle;
    if (spec.factory) oracle = number_moment(spec.state, p);
    checks.push_back(make_check("moment_p" + std::to_string(p), est.value, oracle,
                                tol_or(est.budget() + 1e-8)));
    return;
  }

  if (task == "quadrature") {
    const double phi = num(params, "phi");
    const DriveSet drives = parse_drive(params);
    const QuadratureEstimate est = quadrature_measure(spec.state, phi, drives, plan);
    results["phi"] = phi;
    results["value"] = est.value;
    results["stderr"] = est.stderr_value;
    results["f1_bias"] = est.f1_bias;
    std::optional<double> oracle;
    if (spec.factory)
      oracle = generalized_quadrature_oracle(spec.state,
                                             RealVector::Ones(spec.state.dim()), phi);
    const double dt = plan.method == SlopeMethod::fit_shots
                          ? std::max(4.0 * est.stderr_value + std::abs(est.f1_bias), 1e-9)
                          : 1e-3 + std::abs(est.f1_bias);
    checks.push_back(make_check("quadrature", est.value, oracle, tol_or(dt)));
    return;
  }

  if (task == "engineer") {
    EngineeringProblem problem;
    problem.etas = num_list(params, "etas");
    problem.target = num_list(params, "target");
    const EngineeringSolution sol = solve_weights(problem, integer(scenario, "dim"));
    results["omega_ratio"] = sol.omega_ratio;
    results["scale"] = sol.scale;
    results["condition_number"] = sol.condition_number;
    Json flips = Json::array();
    for (std::size_t j = 0; j < sol.omega_ratio.size(); ++j)
      if (sol.omega_ratio[j] < 0) flips.push_back(j);
    results["phase_flips"] = flips;  // lasers driven with a pi phase offset
    const TaylorCoeffs round_trip =
        taylor_coeffs(sol.raw_weights, problem.etas, int(problem.etas.size()) - 1);
    double worst = 0.0;
    for (int p = 0; p < round_trip.c.size(); ++p)
      worst = std::max(worst, std::abs(round_trip.c(p) - problem.target[p]));
    results["coefficient_roundtrip_error"] = worst;
    double profile_max = 0.0;
    for (int i = 0; i < sol.residual_profile.size(); ++i)
      profile_max = std::max(profile_max, sol.residual_profile(i));
    results["max_residual"] = profile_max;
    checks.push_back(make_check("coefficient_roundtrip", worst, 0.0,
                                tol_or(1e-9 * sol.condition_number)));
    return;
  }

  if (task == "nion_collective") {
    ChainConfig config;
    config.n_ions = integer(params, "n_ions");
    for (const auto& v : need(params, "dims")) config.mode_dims.push_back(v.get<int>());
    config.mode_etas = num_list(params, "etas");
    const int k = params.contains("ion") ? integer(params, "ion") : 0;
    const ProbeState probe = parse_probe(params);
    const int rest = (1 << config.n_ions) / 2;
    Matrix rho_a = Matrix::Identity(rest, rest) / double(rest);
    if (params.contains("rho_A")) {
      const std::string m = params.at("rho_A").get<std::string>();
      if (m == "ground") {
        rho_a = Matrix::Zero(rest, rest);
        rho_a(0, 0) = 1.0;
      } else if (m == "excited") {
        rho_a = Matrix::Zero(rest, rest);
        rho_a(rest - 1, rest - 1) = 1.0;
      } else if (m != "maximally_mixed") {
        parse_fail("params.rho_A", "expected ground|excited|maximally_mixed");
      }
    }
    // Product of per-mode factory states.
    Matrix rho_f = Matrix::Identity(1, 1);
    const Json& modes = need(params, "modes");
    if (static_cast<int>(modes.size()) != config.n_ions)
      parse_fail("params.modes", "one mode state per ion required");
    for (int j = 0; j < config.n_ions; ++j) {
      Json mode_scenario;
      mode_scenario["state"] = modes.at(j);
      mode_scenario["dim"] = config.mode_dims[j];
      rho_f = kron(rho_f, parse_state(mode_scenario).state.matrix);
    }
    const double analytic = collective_slope(config, k, probe, rho_a, rho_f);
    const Matrix h = build_chain_carrier(config);
    const Matrix rho0 = chain_initial_state(config, k, probe, rho_a, rho_f);
    const Propagator prop(h);
    const double hstep = 1e-4;
    const double simulated =
        (ion_excited_population(prop.evolve_matrix(rho0, hstep), config, k) -
         ion_excited_population(prop.evolve_matrix(rho0, -hstep), config, k)) /
        (2.0 * hstep);
    results["analytic_slope"] = analytic;
    results["simulated_slope"] = simulated;
    checks.push_back(make_check("collective_slope", simulated, analytic, tol_or(1e-6)));
    return;
  }

  if (task == "reconstruct") {
    const int support = integer(params, "support");
    if (support > spec.state.dim())
      parse_fail("params.support", "exceeds the state dimension");
    // Bounded-support inversion: moments of the renormalized head of the
    // distribution. The state's weight beyond the support is reported.
    double head = 0.0;
    for (int n = 0; n < support; ++n) head += spec.state.matrix(n, n).real();
    RealVector q(support);
    for (int n = 0; n < support; ++n) q(n) = spec.state.matrix(n, n).real() / head;
    const MomentVector m = distribution_to_moments(q, support - 1);
    results["support_leakage"] = 1.0 - head;
    const DistributionEstimate est = moments_to_distribution(m, support);
    results["condition_number"] = est.condition_number;
    results["negativity"] = est.negativity;
    Json probs = Json::array();
    for (int n = 0; n < est.probs.size(); ++n) probs.push_back(est.probs(n));
    results["probs"] = probs;
    double worst = 0.0;
    for (int n = 0; n < support; ++n)
      worst = std::max(worst, std::abs(est.probs(n) - q(n)));
    results["max_abs_error"] = worst;
    checks.push_back(make_check("distribution_error", worst, 0.0,
                                tol_or(1e-6 * est.condition_number)));
    return;
  }

  parse_fail("task", "unknown task '" + task + "'");
}

struct SweepRow {
  double axis_value = 0.0;
  double value = 0.0;
  double stderr_value = 0.0;
  std::optional<double> oracle;
  double deviation = 0.0;
  bool pass = true;
};

Json apply_axis(const Json& scenario, const std::string& axis, double v) {
  Json s = scenario;
  const std::string task = need(scenario, "task").get<std::string>();
  if (axis == "phi") {
    if (task == "slope") s["params"]["probe"]["phi"] = v;
    else if (task == "quadrature") s["params"]["phi"] = v;
    else parse_fail("sweep.axis", "phi sweeps need a slope or quadrature task");
  } else if (axis == "eta") {
    if (task != "slope" && task != "quadrature")
      parse_fail("sweep.axis", "eta sweeps need a slope or quadrature task");
    if (!s["params"].contains("drive") || need(s["params"], "drive")
            .at("etas").size() != 1)
      parse_fail("sweep.axis", "eta sweeps need a single-laser drive");
    s["params"]["drive"]["etas"] = {v};
  } else if (axis == "shots") {
    if (v < 1) parse_fail("sweep.values", "shots must be >= 1");
    s["plan"]["shots"] = static_cast<int>(v);
  } else if (axis == "tau_max") {
    if (!(v > 0) || v > 0.2) parse_fail("sweep.values", "tau_max must lie in (0, 0.2]");
    Json grid = Json::array();
    for (double t : MeasurementPlan::default_grid()) grid.push_back(t * v / 0.15);
    s["plan"]["tau_grid"] = grid;
    if (!s["plan"].contains("shots")) s["plan"]["shots"] = "noiseless";
  } else {
    parse_fail("sweep.axis", "unknown axis '" + axis + "'");
  }
  return s;
}

SweepRow run_sweep_row(const Json& scenario, const std::string& axis, double v,
                       std::uint64_t row_seed) {
  const Json row_scenario = apply_axis(scenario, axis, v);
  const StateSpec spec = parse_state(row_scenario);
  const MeasurementPlan plan = parse_plan(row_scenario, row_seed);
  Json results;
  std::vector<Check> checks;
  eval_task(row_scenario, spec, plan, results, checks);
  SweepRow row;
  row.axis_value = v;
  if (!checks.empty()) {
    row.value = checks.front().value;
    row.pass = true;
    for (const Check& c : checks) row.pass = row.pass && c.pass;
    if (checks.front().has_oracle) {
      row.oracle = checks.front().oracle;
      row.deviation = checks.front().deviation;
    }
  }
  if (results.contains("stderr")) row.stderr_value = results.at("stderr").get<double>();
  else if (results.contains("n_stderr")) row.stderr_value = results.at("n_stderr").get<double>();
  return row;
}

}  // namespace

ScenarioOutcome run_scenario(const Json& scenario, const CliOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioOutcome out;
  const std::uint64_t seed = options.seed_override
                                 ? *options.seed_override
                                 : (scenario.contains("seed")
                                        ? scenario.at("seed").get<std::uint64_t>()
                                        : 0ULL);

  Json report;
  report["tool"] = kToolVersion;
  report["name"] = scenario.contains("name") ? scenario.at("name") : Json("unnamed");
  report["scenario"] = scenario;
  report["effective_seed"] = seed;

  const std::string task = need(scenario, "task").get<std::string>();
  Json results;
  std::vector<Check> checks;
  if (task != "engineer") {
    const StateSpec spec = parse_state(scenario);
    if (spec.truncation_tail > 1e-8)
      report["warnings"] = {std::string("state truncation tail ") +
                            fmt(spec.truncation_tail) + " above 1e-8"};
    const MeasurementPlan plan = parse_plan(scenario, seed);
    eval_task(scenario, spec, plan, results, checks);
  } else {
    const MeasurementPlan plan = parse_plan(scenario, seed);
    StateSpec dummy{fock_state(0, 2), false};
    eval_task(scenario, dummy, plan, results, checks);
  }
  report["results"] = results;
  Json checks_json = Json::array();
  bool all_pass = true;
  for (const Check& c : checks) {
    checks_json.push_back(check_json(c));
    all_pass = all_pass && c.pass;
  }
  report["checks"] = checks_json;

  if (scenario.contains("sweep")) {
    const Json& sweep = scenario.at("sweep");
    const std::string axis = need(sweep, "axis").get<std::string>();
    const std::vector<double> values = num_list(sweep, "values");
    std::vector<SweepRow> rows(values.size());
    const int threads = std::max(1, options.threads);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&](int start) {
      for (std::size_t i = start; i < values.size(); i += threads) {
        try {
          rows[i] = run_sweep_row(scenario, axis, values[i], mix_seed(seed, i));
        } catch (...) {
          std::scoped_lock lk(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::ostringstream csv;
    csv << "axis,value,stderr,oracle,deviation,pass\n";
    Json sweep_rows = Json::array();
    for (const SweepRow& r : rows) {
      csv << fmt(r.axis_value) << "," << fmt(r.value) << "," << fmt(r.stderr_value) << ",";
      if (r.oracle) csv << fmt(*r.oracle) << "," << fmt(r.deviation);
      else csv << ",";
      csv << "," << (r.pass ? "1" : "0") << "\n";
      all_pass = all_pass && r.pass;
      Json jr;
      jr["axis"] = r.axis_value;
      jr["value"] = r.value;
      jr["stderr"] = r.stderr_value;
      if (r.oracle) {
        jr["oracle"] = *r.oracle;
        jr["deviation"] = r.deviation;
      }
      jr["pass"] = r.pass;
      sweep_rows.push_back(jr);
    }
    Json sweep_report;
    sweep_report["axis"] = axis;
    sweep_report["rows"] = sweep_rows;
    report["sweep"] = sweep_report;
    out.sweep_csv = csv.str();
  }

  report["pass"] = all_pass;
  const auto t1 = std::chrono::steady_clock::now();
  const auto now = std::chrono::system_clock::now();
  const std::time_t now_t = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%FT%TZ", std::gmtime(&now_t));
  Json timing;
  timing["timestamp"] = stamp;
  timing["elapsed_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  report["timing"] = timing;

  out.report = std::move(report);
  out.all_pass = all_pass;
  return out;
}

ScenarioOutcome run_scenario_file(const std::string& path, const CliOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
  Json scenario;
  try {
    scenario = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("scenario '" + path + "' is not valid JSON: " + e.what());
  }
  return run_scenario(scenario, options);
}

}  // namespace ionprobe
