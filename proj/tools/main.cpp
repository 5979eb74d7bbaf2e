// Command-line front end. Subcommands mirror the library's five entry points;
// a JSON config document supplies parameters, flags override the common ones.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taseplab/cli.hpp"
#include "taseplab/config.hpp"

namespace {

struct FlagOverrides {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int parallelism = 0;
  std::vector<std::int64_t> scales;
  std::vector<std::int64_t> replicas;
  std::int64_t window_left = 0, window_right = 0;
  bool window_set = false;
};

void add_common(CLI::App* sub, FlagOverrides& f) {
  sub->add_option("-c,--config", f.config_path, "JSON config document");
  sub->add_option("--seed", f.seed, "master seed (u64)")->each([&](std::string) {
    f.seed_set = true;
  });
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--parallelism", f.parallelism, "worker threads");
  sub->add_option("--scale", f.scales, "override experiment scale grid");
  sub->add_option("--replicas", f.replicas, "override experiment replica counts");
  sub->add_option("--window-left", f.window_left, "simulate: left site bound")
      ->each([&](std::string) { f.window_set = true; });
  sub->add_option("--window-right", f.window_right, "simulate: right site bound")
      ->each([&](std::string) { f.window_set = true; });
}

int run(const std::string& command, const FlagOverrides& f) {
  using namespace taseplab;
  json doc;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot read config: %s\n", f.config_path.c_str());
      return kExitIo;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      doc = json::parse(ss.str());
    } catch (const json::exception& e) {
      std::fprintf(stderr, "error: config is not valid JSON: %s\n", e.what());
      return kExitUsage;
    }
  } else {
    doc = json::object();
  }
  if (doc.contains("command")) {
    if (doc.at("command") != command) {
      std::fprintf(stderr, "error: config command '%s' does not match subcommand '%s'\n",
                   doc.at("command").get<std::string>().c_str(), command.c_str());
      return kExitUsage;
    }
  } else {
    doc["command"] = command;
  }

  RunConfig cfg;
  try {
    cfg = parse_config(doc);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  }
  if (f.seed_set) {
    cfg.seed = f.seed;
    cfg.experiment.plan.seed_base = f.seed;
  }
  if (!f.out.empty()) cfg.out = f.out;
  if (f.parallelism > 0) {
    cfg.parallelism = f.parallelism;
    cfg.experiment.plan.parallelism = f.parallelism;
  }
  if (!f.scales.empty()) cfg.experiment.plan.scales = f.scales;
  if (!f.replicas.empty()) cfg.experiment.plan.replicas = f.replicas;
  if (f.window_set) {
    if (f.window_left != 0) cfg.simulate.window_left = f.window_left;
    if (f.window_right != 0) cfg.simulate.window_right = f.window_right;
    if (!(cfg.simulate.window_left < 0 && 0 < cfg.simulate.window_right)) {
      std::fprintf(stderr, "error: simulate window must straddle the origin\n");
      return kExitUsage;
    }
  }
  if (cfg.experiment.plan.scales.size() != cfg.experiment.plan.replicas.size()) {
    std::fprintf(stderr, "error: --scale and --replicas must have matching lengths\n");
    return kExitUsage;
  }
  if (cfg.command == "experiment" && cfg.experiment.plan.scales.empty()) {
    std::fprintf(stderr, "error: experiment needs at least one scale\n");
    return kExitUsage;
  }

  try {
    return dispatch(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TASEP / last-passage / Hopf-Lax laboratory"};
  app.require_subcommand(1);
  FlagOverrides flags;
  const char* names[] = {"pde", "lpp", "simulate", "verify", "experiment"};
  const char* descs[] = {"solve the conservation law and export the solution",
                         "last-passage tail tables and bound checks",
                         "run the exclusion process and export trajectories",
                         "run the exact coupling-identity suites",
                         "run Monte Carlo experiment plans and fits"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], descs[i]), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : taseplab::kExitUsage;
  }
  return run(app.get_subcommands().front()->get_name(), flags);
}
