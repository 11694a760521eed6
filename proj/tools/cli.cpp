#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "config.hpp"

namespace lyon::cli {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string scaling_out;
  bool json = false;
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
};

std::size_t resolve_threads(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("LYON_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << contents;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

std::string default_scaling_path(const std::string& out) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + "_scaling.csv")).string();
}

RunConfig load(const Options& opt) {
  RunConfig cfg = load_config(opt.config);
  if (opt.seed) cfg.master_seed = *opt.seed;
  cfg.threads = resolve_threads(opt.threads);
  return cfg;
}

int cmd_oracle(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt.config);
  const OracleSolution sol = solve_lfp(cfg.instance);
  if (opt.json) {
    out << to_json(sol).dump(2) << '\n';
    return kExitOk;
  }
  out << "p* = (";
  for (std::size_t k = 0; k < sol.p_star.size(); ++k) {
    out << (k ? ", " : "") << format_number(sol.p_star[k]);
  }
  out << ")\nr* = " << format_number(sol.r_star) << "\ny* = " << format_number(sol.y_star)
      << "\nsupport = {";
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    out << (i ? ", " : "") << sol.support[i] + 1;
  }
  out << "}\n";
  return kExitOk;
}

int cmd_run(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load(opt);
  const AggregateResult result = run_batch(cfg);
  const std::string csv = run_csv(result, cfg.instance.num_arms());
  if (opt.out.empty()) {
    out << csv;
  } else {
    write_file(opt.out, csv);
  }
  if (opt.json) out << to_json(result).dump(2) << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load(opt);
  if (cfg.budgets.size() < 3) throw ConfigError("need >= 3 budgets for a sweep");
  const AggregateResult result = run_batch(cfg);
  const std::vector<ScalingReport> reports = sweep_scaling(result);
  write_file(opt.out, run_csv(result, cfg.instance.num_arms()));
  const std::string scaling_path =
      opt.scaling_out.empty() ? default_scaling_path(opt.out) : opt.scaling_out;
  write_file(scaling_path, scaling_csv(reports));
  for (const ScalingReport& rep : reports) {
    out << rep.policy << ": log-log regret slope " << format_number(rep.loglog_slope) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budgeted bandits with a penalty constraint: oracle, policies, experiments"};
  app.require_subcommand(1);
  Options opt;

  auto* oracle = app.add_subcommand("oracle", "Solve for the optimal stationary randomized policy");
  oracle->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  oracle->add_flag("--json", opt.json, "Print the solution as JSON");

  auto* run_cmd = app.add_subcommand("run", "Run every (policy, budget) cell and write CSV");
  run_cmd->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", opt.out, "Result CSV path (stdout if omitted)");
  run_cmd->add_flag("--json", opt.json, "Also print aggregates as JSON");
  run_cmd->add_option("--threads", opt.threads, "Worker threads (LYON_THREADS fallback)");
  run_cmd->add_option("--seed", opt.seed, "Override the config's master seed");

  auto* sweep = app.add_subcommand("sweep", "Run a budget sweep and fit regret scaling");
  sweep->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  sweep->add_option("--out", opt.out, "Result CSV path")->required();
  sweep->add_option("--scaling-out", opt.scaling_out, "Scaling CSV path (default <out>_scaling.csv)");
  sweep->add_option("--threads", opt.threads, "Worker threads (LYON_THREADS fallback)");
  sweep->add_option("--seed", opt.seed, "Override the config's master seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (oracle->parsed()) return cmd_oracle(opt, out);
    if (run_cmd->parsed()) return cmd_run(opt, out);
    return cmd_sweep(opt, out);
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace lyon::cli
