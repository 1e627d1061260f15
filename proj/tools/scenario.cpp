#include "scenario.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "frontforge/cauchy.hpp"
#include "frontforge/diagnostics.hpp"
#include "frontforge/error.hpp"
#include "frontforge/nonlocal_operator.hpp"
#include "frontforge/tw_solver.hpp"

namespace frontforge::cli {

namespace {

using json = nlohmann::json;

void check_keys(const json& block, const std::set<std::string>& allowed, const std::string& name) {
  if (!block.is_object()) throw ConfigError(name + " must be an object");
  for (const auto& [key, value] : block.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + name);
}

template <typename T>
T value_or(const json& block, const char* key, T fallback) {
  auto it = block.find(key);
  if (it == block.end() || it->is_null()) return fallback;
  return it->get<T>();
}

template <typename T>
std::optional<T> optional_value(const json& block, const char* key) {
  auto it = block.find(key);
  if (it == block.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <typename T>
T required(const json& block, const char* key, const std::string& name) {
  auto it = block.find(key);
  if (it == block.end() || it->is_null()) throw ConfigError(name + "." + key + " is required");
  return it->get<T>();
}

Measure parse_measure(const json& b) {
  check_keys(b, {"kind", "s", "amplitude", "support_radius", "epsilon", "restrict_radius", "outer_cut",
                 "nodes", "values", "sigma"},
             "measure");
  const auto kind = required<std::string>(b, "kind", "measure");
  const double amplitude = value_or(b, "amplitude", 1.0);
  Measure m = [&] {
    if (kind == "fractional")
      return Measure::fractional(required<double>(b, "s", "measure"), amplitude,
                                 optional_value<double>(b, "outer_cut"));
    if (kind == "uniform") return Measure::uniform(value_or(b, "support_radius", 1.0), amplitude);
    if (kind == "gaussian") {
      const double sigma = value_or(b, "sigma", 1.0);
      if (!(sigma > 0.0)) throw ConfigError("measure.sigma must be positive");
      const double radius = value_or(b, "support_radius", 8.0 * sigma);
      return Measure::density(
          [amplitude, sigma](double z) { return amplitude * std::exp(-0.5 * z * z / (sigma * sigma)); },
          radius);
    }
    if (kind == "tabulated")
      return Measure::tabulated(required<std::vector<double>>(b, "nodes", "measure"),
                                required<std::vector<double>>(b, "values", "measure"));
    throw ConfigError("measure.kind must be fractional, uniform, gaussian or tabulated");
  }();
  if (const double eps = value_or(b, "epsilon", 0.0); eps > 0.0) m = m.truncated(eps);
  if (auto r = optional_value<double>(b, "restrict_radius")) m = m.restricted(*r);
  return m;
}

Nonlinearity parse_nonlinearity(const json& b) {
  check_keys(b, {"kind", "theta", "beta", "shift", "cutoff_n", "exponent", "scale"}, "nonlinearity");
  const auto kind = required<std::string>(b, "kind", "nonlinearity");
  Nonlinearity nl = [&] {
    if (kind == "cubic") return Nonlinearity::cubic(required<double>(b, "theta", "nonlinearity"));
    if (kind == "ignition")
      return Nonlinearity::ignition(required<double>(b, "theta", "nonlinearity"),
                                    value_or(b, "exponent", 2.0), value_or(b, "scale", 1.0));
    if (kind == "allee") return Nonlinearity::allee(required<double>(b, "beta", "nonlinearity"));
    if (kind == "kpp") return Nonlinearity::allee(1.0);
    throw ConfigError("nonlinearity.kind must be cubic, ignition, allee or kpp");
  }();
  if (const double tau = value_or(b, "shift", 0.0); tau != 0.0) nl = nl.with_shift(tau);
  if (auto n = optional_value<int>(b, "cutoff_n")) nl = nl.ignition_cutoff(*n);
  return nl;
}

Task parse_task(const std::string& name) {
  if (name == "solve") return Task::Solve;
  if (name == "continue") return Task::Continue;
  if (name == "bounds") return Task::Bounds;
  if (name == "evolve") return Task::Evolve;
  if (name == "classify") return Task::Classify;
  if (name == "validate") return Task::Validate;
  throw ConfigError("task must be one of solve, continue, bounds, evolve, classify, validate");
}

ScenarioOptions parse_options(const json& b) {
  check_keys(b, {"phase_level", "tol", "max_iter", "epsilon", "width", "eps0", "factor", "floor", "ladder",
                 "chen", "lower_bound_radius", "audit_t_max", "audit_dt", "initial", "x0", "horizon",
                 "dt", "level", "samples", "snapshot_every", "window", "stop_at_window", "burn_in"},
             "options");
  ScenarioOptions o;
  o.phase_level = optional_value<double>(b, "phase_level");
  o.tol = value_or(b, "tol", o.tol);
  o.max_iter = value_or(b, "max_iter", o.max_iter);
  o.epsilon = value_or(b, "epsilon", o.epsilon);
  o.width = optional_value<double>(b, "width");
  o.eps0 = value_or(b, "eps0", o.eps0);
  o.factor = value_or(b, "factor", o.factor);
  o.floor = optional_value<double>(b, "floor");
  o.ladder = value_or(b, "ladder", o.ladder);
  o.chen = value_or(b, "chen", o.chen);
  o.lower_bound_radius = optional_value<double>(b, "lower_bound_radius");
  o.audit_t_max = value_or(b, "audit_t_max", o.audit_t_max);
  o.audit_dt = value_or(b, "audit_dt", o.audit_dt);
  o.initial = value_or(b, "initial", o.initial);
  o.x0 = optional_value<double>(b, "x0");
  o.horizon = value_or(b, "horizon", o.horizon);
  o.dt = optional_value<double>(b, "dt");
  o.level = value_or(b, "level", o.level);
  o.samples = value_or(b, "samples", o.samples);
  o.snapshot_every = value_or(b, "snapshot_every", o.snapshot_every);
  o.window = optional_value<double>(b, "window");
  o.stop_at_window = value_or(b, "stop_at_window", o.stop_at_window);
  o.burn_in = value_or(b, "burn_in", o.burn_in);

  if (!(o.tol > 0.0) || o.max_iter < 1) throw ConfigError("options.tol and options.max_iter must be positive");
  if (o.epsilon < 0.0) throw ConfigError("options.epsilon must be >= 0");
  if (!(o.factor > 0.0 && o.factor < 1.0) || !(o.eps0 > 0.0))
    throw ConfigError("options.eps0 must be positive and options.factor in (0, 1)");
  if (o.ladder.empty()) throw ConfigError("options.ladder must not be empty");
  if (o.initial != "heaviside" && o.initial != "front")
    throw ConfigError("options.initial must be heaviside or front");
  if (!(o.horizon >= 0.0) || o.samples < 1 || o.snapshot_every < 0)
    throw ConfigError("options.horizon, samples and snapshot_every out of range");
  if (!(o.level > 0.0 && o.level < 1.0)) throw ConfigError("options.level must lie in (0, 1)");
  if (!(o.burn_in >= 0.0 && o.burn_in < 1.0)) throw ConfigError("options.burn_in must lie in [0, 1)");
  if (!(o.audit_dt > 0.0)) throw ConfigError("options.audit_dt must be positive");
  return o;
}

std::string csv(double v) { return fmt::format("{:.17g}", v); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json diagnostics_json(const DiagnosticsRecord& d) {
  return {{"identity1", opt(d.identity1)},
          {"identity2", opt(d.identity2)},
          {"identity3", opt(d.identity3)},
          {"identity4", opt(d.identity4)},
          {"sigma0", opt(d.sigma0)},
          {"cbar", opt(d.cbar)},
          {"clow", opt(d.clow)},
          {"decay_rate_fit", opt(d.decay_rate_fit)},
          {"decay_rate_theory", opt(d.decay_rate_theory)},
          {"w_convex", d.w_convex ? json(*d.w_convex) : json(nullptr)},
          {"ign_identity", opt(d.ign_identity)}};
}

std::string profile_csv(const Profile& p) {
  std::string out = "x,u\n";
  for (int i = 0; i < p.grid.nodes(); ++i) out += csv(p.grid.x(i)) + "," + csv(p[i]) + "\n";
  return out;
}

NewtonOptions newton_options(const ScenarioOptions& o) {
  NewtonOptions n;
  n.phase_level = o.phase_level;
  n.tol = o.tol;
  n.max_iter = o.max_iter;
  n.epsilon = o.epsilon;
  n.width = o.width;
  return n;
}

class Run {
 public:
  Run(const Scenario& sc, RunResult& result) : sc_(sc), result_(result) {}

  void add(const std::string& name, std::string contents) { result_.artifacts[name] = std::move(contents); }
  void add(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }

  // Writes front.csv and front.json; returns false when the front did not converge.
  bool emit_front(FrontSolution& sol, json extra = json::object()) {
    const Measure& m = sc_.measure;
    const Nonlinearity& nl = sc_.nonlinearity;
    json checks = nullptr;
    json diag_error = nullptr;
    if (sol.converged()) {
      try {
        DiagnosticsOptions d;
        d.chen = sc_.options.chen;
        d.lower_bound_radius = sc_.options.lower_bound_radius;
        fill_diagnostics(sol, m, nl, d);
      } catch (const Error& e) {
        diag_error = e.what();
      }
      if (sol.epsilon > 0.0 ? m.truncated(sol.epsilon).finite_mass() : m.finite_mass()) {
        const IdentityChecks ic = identity_checks(sol, m, nl);
        checks = {{"residual1", ic.residual1}, {"relative1", ic.relative1()},
                  {"residual2", ic.residual2}, {"residual3", ic.residual3},
                  {"residual4", ic.residual4}, {"energy", ic.energy},
                  {"integral", ic.integral}};
      }
    }
    json j = {{"c", sol.speed},
              {"residual_norm", sol.residual_norm},
              {"iterations", sol.iterations},
              {"epsilon", sol.epsilon},
              {"status", to_string(sol.status)},
              {"identity_checks", checks},
              {"diagnostics", diagnostics_json(sol.diagnostics)}};
    if (!diag_error.is_null()) j["diagnostics_error"] = diag_error;
    for (auto& [k, v] : extra.items()) j[k] = v;
    add("front.csv", profile_csv(sol.profile));
    add("front.json", j);
    return sol.converged();
  }

  FrontSolution solve_front(json& extra) {
    const Nonlinearity& nl = sc_.nonlinearity;
    if (nl.declared_class() == ReactionClass::Monostable) {
      MonostableReport rep = monostable_speed(sc_.measure, nl, sc_.grid, sc_.options.ladder, std::nullopt,
                                              newton_options(sc_.options));
      json ladder = json::array();
      for (std::size_t i = 0; i < rep.ladder.size(); ++i)
        ladder.push_back({{"n", rep.ladder[i]}, {"c", rep.speeds[i]}});
      extra["ladder"] = ladder;
      extra["c_star"] = rep.c_star;
      extra["pulled"] = rep.pulled;
      extra["ladder_monotone"] = !rep.violation.has_value();
      return rep.fronts.back();
    }
    return newton_solve(sc_.measure, nl, sc_.grid, newton_options(sc_.options));
  }

  int solve() {
    json extra = json::object();
    FrontSolution sol = solve_front(extra);
    return emit_front(sol, extra) ? kOk : kNoConvergence;
  }

  int continuation() {
    ContinuationSchedule schedule{sc_.options.eps0, sc_.options.factor, sc_.options.floor};
    ContinuationReport rep =
        continue_in_epsilon(sc_.measure, sc_.nonlinearity, sc_.grid, schedule, newton_options(sc_.options));
    json stages = json::array();
    for (std::size_t k = 0; k < rep.stages.size(); ++k)
      stages.push_back({{"epsilon", rep.schedule[k]},
                        {"c", rep.stages[k].speed},
                        {"iterations", rep.stages[k].iterations},
                        {"residual_norm", rep.stages[k].residual_norm},
                        {"status", to_string(rep.stages[k].status)}});
    add("continuation.json", json{{"stages", stages},
                                  {"converged", rep.converged},
                                  {"extrapolated", opt(rep.extrapolated)},
                                  {"failed_stage", rep.failed_stage ? json(*rep.failed_stage) : json(nullptr)},
                                  {"warning", rep.warning ? json(*rep.warning) : json(nullptr)}});
    if (rep.stages.empty()) return kNoConvergence;
    FrontSolution last = rep.stages.back();
    const bool ok = emit_front(last);
    return ok && !rep.failed_stage ? kOk : kNoConvergence;
  }

  int bounds() {
    const Measure& m = sc_.measure;
    const Nonlinearity& nl = sc_.nonlinearity;
    FrontSolution sol = newton_solve(m, nl, sc_.grid, newton_options(sc_.options));
    if (!sol.converged()) {
      emit_front(sol);
      return kNoConvergence;
    }
    const ChenConstants k = chen_upper_bound(m, nl);
    json audit = nullptr;
    try {
      const SupersolutionAudit a = supersolution_audit(k, m, nl, sc_.options.audit_t_max, sc_.options.audit_dt);
      audit = {{"min_slack", a.min_slack}, {"worst_t", a.worst_t}, {"worst_xi", a.worst_xi},
               {"samples", a.samples}};
    } catch (const Error& e) {
      audit = {{"error", e.what()}};
    }
    const double radius = sc_.options.lower_bound_radius.value_or(
        m.bounded_support() ? m.outer_radius() : 10.0);
    const TruncatedBound lb = truncated_lower_bound(m, nl, sc_.grid, radius, sol.epsilon,
                                                    newton_options(sc_.options), sol);
    const bool sandwich = lb.c_low <= sol.speed && sol.speed <= k.cbar;
    add("bounds.json", json{{"c", sol.speed},
                            {"c_low", lb.c_low},
                            {"radius", radius},
                            {"tau", lb.tau},
                            {"gamma", lb.gamma},
                            {"cbar", k.cbar},
                            {"sigma0", k.sigma0},
                            {"rho", k.rho},
                            {"m_rho", k.m_rho},
                            {"R_rho", k.R_rho},
                            {"M_rho", k.M_rho},
                            {"identity_defect", k.identity_defect()},
                            {"audit", audit},
                            {"sandwich_holds", sandwich}});
    emit_front(sol);
    return sandwich ? kOk : kValidationFailed;
  }

  std::optional<Trajectory> trajectory() {
    const ScenarioOptions& o = sc_.options;
    std::optional<Profile> u0;
    if (o.initial == "front") {
      FrontSolution sol = newton_solve(sc_.measure, sc_.nonlinearity, sc_.grid, newton_options(o));
      if (!sol.converged()) {
        emit_front(sol);
        return std::nullopt;
      }
      u0 = sol.profile;
    } else {
      u0 = heaviside_ramp(sc_.grid, o.x0.value_or(-0.5 * sc_.grid.half_length()));
    }
    EvolveOptions e;
    e.horizon = o.horizon;
    e.dt = o.dt;
    e.level = o.level;
    e.samples = o.samples;
    e.keep_states = o.snapshot_every > 0;
    e.window = o.window;
    e.stop_at_window = o.stop_at_window;
    Trajectory tr = evolve(*u0, sc_.measure, sc_.nonlinearity, e);

    std::string rows = "t,x_lambda\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) rows += csv(tr.times[k]) + "," + csv(tr.positions[k]) + "\n";
    add("trajectory.csv", std::move(rows));
    if (o.snapshot_every > 0) {
      std::string snap = "t,x,u\n";
      for (std::size_t k = 0; k < tr.states.size(); k += static_cast<std::size_t>(o.snapshot_every))
        for (int i = 0; i < sc_.grid.nodes(); ++i)
          snap += csv(tr.times[k]) + "," + csv(sc_.grid.x(i)) + "," + csv(tr.states[k][i]) + "\n";
      add("states.csv", std::move(snap));
    }
    return tr;
  }

  int evolve_task() { return trajectory() ? kOk : kNoConvergence; }

  int classify() {
    std::optional<Trajectory> tr = trajectory();
    if (!tr) return kNoConvergence;
    const RegimeVerdict v = classify_spreading(*tr, sc_.options.burn_in);
    json predicted = nullptr;
    if (auto s = sc_.measure.fractional_exponent(); s && *s < 1.0) {
      const Nonlinearity& nl = sc_.nonlinearity;
      std::optional<RegimePrediction> p;
      if (nl.declared_class() == ReactionClass::Monostable && nl.beta())
        p = regime_prediction(*s, *nl.beta());
      else if (nl.declared_class() == ReactionClass::Bistable)
        p = bistable_regime_prediction(*s);
      if (p) predicted = {{"tag", to_string(p->tag)}, {"exponent", opt(p->exponent)}};
    }
    add("verdict.json", json{{"tag", to_string(v.tag)},
                             {"value", v.value},
                             {"r2", v.r2},
                             {"loglog_slope", v.loglog_slope},
                             {"r2_linear", v.r2_linear},
                             {"r2_loglog", v.r2_loglog},
                             {"samples", v.samples},
                             {"predicted", predicted}});
    return kOk;
  }

  int validate() {
    const Measure& m = sc_.measure;
    const Nonlinearity& nl = sc_.nonlinearity;
    json checks = json::array();
    bool all = true;
    auto check = [&](const std::string& name, bool passed, json detail) {
      checks.push_back({{"name", name}, {"passed", passed}, {"detail", std::move(detail)}});
      all = all && passed;
    };

    const MomentSummary mom = m.moments();
    check("levy_integrability", std::isfinite(mom.m_levy), {{"m_levy", mom.m_levy}});
    const Classification cls = nl.classify();
    check("declared_class", cls.cls == nl.declared_class(),
          {{"declared", to_string(nl.declared_class())}, {"classified", to_string(cls.cls)}});
    if (nl.declared_class() == ReactionClass::Bistable)
      check("not_well_balanced", !cls.well_balanced, {{"integral", cls.integral}});
    if (nl.declared_class() == ReactionClass::Ignition)
      check("first_moment_finite", mom.m_first.has_value(), {{"m_first", opt(mom.m_first)}});
    const auto warning = nonexistence_warning(m, nl);
    check("existence_hypotheses", !warning, warning ? json(*warning) : json(nullptr));
    try {
      const DiscreteOperator op(m, sc_.grid, sc_.options.epsilon);
      check("grid_resolution", true, {{"spacing", sc_.grid.spacing()}, {"reach", op.reach()}});
    } catch (const Error& e) {
      check("grid_resolution", false, e.what());
    }
    add("validation.json", json{{"passed", all}, {"checks", checks}});
    return all ? kOk : kValidationFailed;
  }

  void dump_jacobian() {
    const AffineOperator a = jacobian(sc_.measure, sc_.grid, sc_.options.epsilon);
    std::string out;
    for (Eigen::Index i = 0; i < a.matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.matrix.cols(); ++j) {
        if (j) out += ',';
        out += csv(a.matrix(i, j));
      }
      out += '\n';
    }
    add("jacobian.csv", std::move(out));
  }

 private:
  const Scenario& sc_;
  RunResult& result_;
};

bool numerical_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::StageFailed:
    case ErrorCode::NoBracket:
    case ErrorCode::OvershootDetected:
    case ErrorCode::WindowExceeded:
    case ErrorCode::NotMonotoneLadder:
      return true;
    default:
      return false;
  }
}

void write_artifacts(const Scenario& sc, RunResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(result.directory);
  json files = json::array();
  for (const auto& [name, contents] : result.artifacts) {
    std::ofstream out(result.directory / name, std::ios::binary);
    out << contents;
    if (!out) throw std::runtime_error("cannot write " + (result.directory / name).string());
    files.push_back({{"name", name}, {"bytes", contents.size()}, {"sha256", sha256_hex(contents)}});
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  const json manifest = {{"config_sha256", sha256_hex(sc.text)},
                         {"task", to_string(sc.task)},
                         {"exit_code", result.exit_code},
                         {"files", files},
                         {"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now))}};
  std::ofstream out(result.directory / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write manifest");
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::Solve: return "solve";
    case Task::Continue: return "continue";
    case Task::Bounds: return "bounds";
    case Task::Evolve: return "evolve";
    case Task::Classify: return "classify";
    case Task::Validate: return "validate";
  }
  return "unknown";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

Scenario parse_scenario(const std::string& text) {
  try {
    json config = json::parse(text);
    check_keys(config, {"measure", "nonlinearity", "grid", "task", "options", "output"}, "config");
    const json& grid = config.at("grid");
    check_keys(grid, {"L", "N"}, "grid");
    return Scenario{text,
                    config,
                    parse_measure(config.at("measure")),
                    parse_nonlinearity(config.at("nonlinearity")),
                    Grid(required<double>(grid, "L", "grid"), required<int>(grid, "N", "grid")),
                    parse_task(required<std::string>(config, "task", "config")),
                    parse_options(config.value("options", json::object())),
                    value_or<std::string>(config, "output", "frontforge_out")};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
  RunResult result;
  result.directory = options.output.value_or(sc.output);
  Run run(sc, result);
  try {
    switch (sc.task) {
      case Task::Solve: result.exit_code = run.solve(); break;
      case Task::Continue: result.exit_code = run.continuation(); break;
      case Task::Bounds: result.exit_code = run.bounds(); break;
      case Task::Evolve: result.exit_code = run.evolve_task(); break;
      case Task::Classify: result.exit_code = run.classify(); break;
      case Task::Validate: result.exit_code = run.validate(); break;
    }
    if (options.dump_jacobian) run.dump_jacobian();
  } catch (const Error& e) {
    result.message = e.what();
    if (!numerical_failure(e.code())) {
      result.exit_code = kConfigError;
      result.artifacts.clear();
      return result;
    }
    result.exit_code = kNoConvergence;
  }
  if (result.exit_code == kNoConvergence && result.message.empty()) result.message = "solver did not converge";
  if (result.exit_code == kValidationFailed && result.message.empty()) result.message = "validation failed";
  write_artifacts(sc, result);
  return result;
}

}  // namespace frontforge::cli
