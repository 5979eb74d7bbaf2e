#pragma once

// Run configuration: a JSON document selecting one subcommand and its
// parameters. Parsing is strict -- unknown keys are rejected with their full
// path, ranges are validated, and every omitted field gets an explicit
// default, so a run is fully determined by (config, seed).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "taseplab/harness.hpp"
#include "taseplab/scalar_law.hpp"

namespace taseplab {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfgdetail {

inline void reject_unknown(const json& j, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) { ok = true; break; }
    if (!ok) throw ConfigError("unknown key: " + path + "." + it.key());
  }
}

template <class T>
T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for key: ") + key);
  }
}

inline double range_checked(const json& j, const std::string& path, const char* key, double def,
                            double lo, double hi) {
  double v = get_or<double>(j, key, def);
  if (!(v >= lo && v <= hi))
    throw ConfigError(path + "." + key + ": value " + std::to_string(v) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

}  // namespace cfgdetail

inline Profile parse_profile(const json& j, const std::string& path) {
  using namespace cfgdetail;
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(path + ": profile needs a kind");
  std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") {
      reject_unknown(j, path, {"kind", "value"});
      return Profile::constant(range_checked(j, path, "value", 0.5, 0.0, 1.0));
    }
    if (kind == "riemann") {
      reject_unknown(j, path, {"kind", "lambda", "rho"});
      return Profile::riemann(range_checked(j, path, "lambda", 0.5, 0.0, 1.0),
                              range_checked(j, path, "rho", 0.5, 0.0, 1.0));
    }
    if (kind == "bump") {
      reject_unknown(j, path, {"kind", "base", "amplitude", "halfwidth", "points"});
      return Profile::bump(get_or<double>(j, "base", 0.5), get_or<double>(j, "amplitude", 0.3),
                           get_or<double>(j, "halfwidth", 8.0), get_or<int>(j, "points", 4001));
    }
    if (kind == "piecewise") {
      reject_unknown(j, path, {"kind", "breakpoints", "values"});
      return Profile::piecewise(get_or<std::vector<double>>(j, "breakpoints", {}),
                                get_or<std::vector<double>>(j, "values", {}));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".kind: unknown profile kind '" + kind + "'");
}

inline json profile_to_json(const Profile& p) {
  json j;
  switch (p.kind()) {
    case ProfileKind::Constant:
      j["kind"] = "constant";
      j["value"] = p.param0();
      break;
    case ProfileKind::Riemann:
      j["kind"] = "riemann";
      j["lambda"] = p.param0();
      j["rho"] = p.param1();
      break;
    case ProfileKind::Bump:
      j["kind"] = "bump";
      j["base"] = p.param0();
      j["amplitude"] = p.param1();
      break;
    case ProfileKind::Piecewise:
      j["kind"] = "piecewise";
      j["breakpoints"] = p.breakpoints();
      j["values"] = p.values_left();
      break;
  }
  return j;
}

inline InitialSpec parse_initial(const json& j, const std::string& path) {
  using namespace cfgdetail;
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(path + ": initial needs a kind");
  std::string kind = j.at("kind").get<std::string>();
  InitialSpec spec;
  if (kind == "local-equilibrium") {
    reject_unknown(j, path, {"kind", "profile"});
    spec.kind = InitialKind::LocalEquilibrium;
    spec.profile = j.contains("profile") ? parse_profile(j.at("profile"), path + ".profile")
                                         : Profile::bump(0.5, 0.3);
    return spec;
  }
  if (kind == "riemann") {
    reject_unknown(j, path, {"kind", "lambda", "rho"});
    spec.kind = InitialKind::Riemann;
    spec.lambda = range_checked(j, path, "lambda", 0.5, 0.0, 1.0);
    spec.rho = range_checked(j, path, "rho", 0.5, 0.0, 1.0);
    return spec;
  }
  if (kind == "step") {
    reject_unknown(j, path, {"kind", "k"});
    spec.kind = InitialKind::Step;
    spec.step_k = get_or<std::int64_t>(j, "k", 0);
    return spec;
  }
  throw ConfigError(path + ".kind: unknown initial kind '" + kind + "'");
}

struct PdeConfig {
  Profile profile = Profile::riemann(0.8, 0.2);
  std::vector<double> t_values = {0.5, 1.0};
  double x_min = -2.0, x_max = 2.0;
  int x_count = 401;
};

struct LppConfig {
  std::string mode = "ld_bound";  // ld_bound | lower_tail
  double w = 1.0, r = 1.0, t = 4.5;
  double alpha = 1.0, beta = 1.0, big_b = 1.0;
  std::vector<std::int64_t> ns = {20, 40, 80};
  int reps = 100000;
  double c_max = 20.0, c_step = 1.0, eps = 0.05;
};

struct SimulateConfig {
  InitialSpec initial;
  std::int64_t window_left = -200, window_right = 200;
  double horizon = 50.0;
  int snapshots = 10;
  bool track_second_class = true;
  std::int64_t x0 = 0;
  std::int64_t scale_n = 1;
};

struct VerifyConfig {
  std::int64_t halfwidth = 100;
  double horizon = 50.0;
  int snapshots = 20;
  int seeds = 100;
};

struct ExperimentConfig {
  std::string kind = "fluctuation";  // fluctuation | uniform_law | density
  ExperimentPlan plan;
  // density comparison parameters
  std::int64_t density_n = 1000;
  double block_lo = -1.5, block_hi = 1.5, block_width = 0.1;
  int density_replicas = 60;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  std::string out = "out";
  int parallelism = int(std::thread::hardware_concurrency());
  PdeConfig pde;
  LppConfig lpp;
  SimulateConfig simulate;
  VerifyConfig verify;
  ExperimentConfig experiment;
};

inline RunConfig parse_config(const json& j) {
  using namespace cfgdetail;
  reject_unknown(j, "config",
                 {"command", "seed", "out", "parallelism", "pde", "lpp", "simulate", "verify",
                  "experiment"});
  RunConfig c;
  if (!j.contains("command")) throw ConfigError("config.command is required");
  c.command = j.at("command").get<std::string>();
  if (c.command != "pde" && c.command != "lpp" && c.command != "simulate" &&
      c.command != "verify" && c.command != "experiment")
    throw ConfigError("config.command: unknown command '" + c.command + "'");
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.out = get_or<std::string>(j, "out", "out");
  c.parallelism = get_or<int>(j, "parallelism", c.parallelism);
  if (c.parallelism < 1) throw ConfigError("config.parallelism must be >= 1");

  if (j.contains("pde")) {
    const json& p = j.at("pde");
    reject_unknown(p, "pde", {"profile", "t_values", "x_min", "x_max", "x_count"});
    if (p.contains("profile")) c.pde.profile = parse_profile(p.at("profile"), "pde.profile");
    c.pde.t_values = get_or<std::vector<double>>(p, "t_values", c.pde.t_values);
    for (double t : c.pde.t_values)
      if (!(t > 0)) throw ConfigError("pde.t_values: times must be positive");
    c.pde.x_min = get_or<double>(p, "x_min", c.pde.x_min);
    c.pde.x_max = get_or<double>(p, "x_max", c.pde.x_max);
    c.pde.x_count = get_or<int>(p, "x_count", c.pde.x_count);
    if (!(c.pde.x_min < c.pde.x_max) || c.pde.x_count < 2)
      throw ConfigError("pde: bad x grid");
  }

  if (j.contains("lpp")) {
    const json& p = j.at("lpp");
    reject_unknown(p, "lpp",
                   {"mode", "w", "r", "t", "alpha", "beta", "B", "ns", "reps", "c_max", "c_step",
                    "eps"});
    c.lpp.mode = get_or<std::string>(p, "mode", c.lpp.mode);
    if (c.lpp.mode != "ld_bound" && c.lpp.mode != "lower_tail")
      throw ConfigError("lpp.mode: unknown mode '" + c.lpp.mode + "'");
    c.lpp.w = get_or<double>(p, "w", c.lpp.w);
    c.lpp.r = get_or<double>(p, "r", c.lpp.r);
    c.lpp.t = get_or<double>(p, "t", c.lpp.t);
    c.lpp.alpha = get_or<double>(p, "alpha", c.lpp.alpha);
    c.lpp.beta = get_or<double>(p, "beta", c.lpp.beta);
    c.lpp.big_b = get_or<double>(p, "B", c.lpp.big_b);
    c.lpp.ns = get_or<std::vector<std::int64_t>>(p, "ns", c.lpp.ns);
    c.lpp.reps = get_or<int>(p, "reps", c.lpp.reps);
    c.lpp.c_max = get_or<double>(p, "c_max", c.lpp.c_max);
    c.lpp.c_step = get_or<double>(p, "c_step", c.lpp.c_step);
    c.lpp.eps = get_or<double>(p, "eps", c.lpp.eps);
    if (c.lpp.ns.empty()) throw ConfigError("lpp.ns: need at least one size");
    if (c.lpp.reps < 0) throw ConfigError("lpp.reps must be nonnegative");
  }

  if (j.contains("simulate")) {
    const json& p = j.at("simulate");
    reject_unknown(p, "simulate",
                   {"initial", "window_left", "window_right", "horizon", "snapshots",
                    "track_second_class", "x0", "n"});
    if (p.contains("initial"))
      c.simulate.initial = parse_initial(p.at("initial"), "simulate.initial");
    c.simulate.window_left = get_or<std::int64_t>(p, "window_left", c.simulate.window_left);
    c.simulate.window_right = get_or<std::int64_t>(p, "window_right", c.simulate.window_right);
    c.simulate.horizon = get_or<double>(p, "horizon", c.simulate.horizon);
    c.simulate.snapshots = get_or<int>(p, "snapshots", c.simulate.snapshots);
    c.simulate.track_second_class =
        get_or<bool>(p, "track_second_class", c.simulate.track_second_class);
    c.simulate.x0 = get_or<std::int64_t>(p, "x0", c.simulate.x0);
    c.simulate.scale_n = get_or<std::int64_t>(p, "n", c.simulate.scale_n);
    if (!(c.simulate.window_left < 0 && 0 < c.simulate.window_right))
      throw ConfigError("simulate: window must straddle the origin");
    if (!(c.simulate.horizon > 0) || c.simulate.snapshots < 1)
      throw ConfigError("simulate: bad horizon or snapshot count");
  }

  if (j.contains("verify")) {
    const json& p = j.at("verify");
    reject_unknown(p, "verify", {"halfwidth", "horizon", "snapshots", "seeds"});
    c.verify.halfwidth = get_or<std::int64_t>(p, "halfwidth", c.verify.halfwidth);
    c.verify.horizon = get_or<double>(p, "horizon", c.verify.horizon);
    c.verify.snapshots = get_or<int>(p, "snapshots", c.verify.snapshots);
    c.verify.seeds = get_or<int>(p, "seeds", c.verify.seeds);
    if (c.verify.halfwidth < 2 || !(c.verify.horizon > 0) || c.verify.snapshots < 1 ||
        c.verify.seeds < 1)
      throw ConfigError("verify: bad plan");
  }

  if (j.contains("experiment")) {
    const json& p = j.at("experiment");
    reject_unknown(p, "experiment",
                   {"kind", "initial", "t", "scales", "replicas", "spread", "n", "block_lo",
                    "block_hi", "block_width", "density_replicas"});
    c.experiment.kind = get_or<std::string>(p, "kind", c.experiment.kind);
    if (c.experiment.kind != "fluctuation" && c.experiment.kind != "uniform_law" &&
        c.experiment.kind != "density")
      throw ConfigError("experiment.kind: unknown kind '" + c.experiment.kind + "'");
    if (p.contains("initial"))
      c.experiment.plan.initial = parse_initial(p.at("initial"), "experiment.initial");
    else if (c.experiment.kind == "fluctuation") {
      c.experiment.plan.initial.kind = InitialKind::LocalEquilibrium;
      c.experiment.plan.initial.profile = Profile::bump(0.5, 0.3);
    }
    c.experiment.plan.t = get_or<double>(p, "t", c.experiment.plan.t);
    c.experiment.plan.scales =
        get_or<std::vector<std::int64_t>>(p, "scales", c.experiment.plan.scales);
    c.experiment.plan.replicas =
        get_or<std::vector<std::int64_t>>(p, "replicas", c.experiment.plan.replicas);
    std::string spread = get_or<std::string>(p, "spread", "iqr");
    if (spread == "iqr") c.experiment.plan.spread = SpreadStat::Iqr;
    else if (spread == "sd") c.experiment.plan.spread = SpreadStat::Sd;
    else throw ConfigError("experiment.spread: expected 'iqr' or 'sd'");
    c.experiment.density_n = get_or<std::int64_t>(p, "n", c.experiment.density_n);
    c.experiment.block_lo = get_or<double>(p, "block_lo", c.experiment.block_lo);
    c.experiment.block_hi = get_or<double>(p, "block_hi", c.experiment.block_hi);
    c.experiment.block_width = get_or<double>(p, "block_width", c.experiment.block_width);
    c.experiment.density_replicas = get_or<int>(p, "density_replicas", c.experiment.density_replicas);
    if (c.experiment.kind == "fluctuation" && c.experiment.plan.scales.empty())
      throw ConfigError("experiment.scales: need at least one scale");
    if (c.experiment.plan.scales.size() != c.experiment.plan.replicas.size())
      throw ConfigError("experiment: scales and replicas must align");
  }

  c.experiment.plan.seed_base = c.seed;
  c.experiment.plan.parallelism = c.parallelism;
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace taseplab
