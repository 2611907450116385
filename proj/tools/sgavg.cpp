// sgavg: batch driver for the parametrically driven sine-Gordon laboratory.
//
//   sgavg delta --forcing cosine
//   sgavg simulate --config run.ini
//   sgavg compare --pair full8-avg9 --forcing cosine --eps 0.05,0.025,0.0125 --prep raw
//   sgavg kink-residual --model avg9 --delta 1.0 --c 0.5 --dx 0.05
//   sgavg sweep --config sweep.ini --jobs 4
//   sgavg dsg-audit

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "sgavg/app.hpp"

namespace {

struct Flag {
  std::string key;
  std::string value;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Parametrically driven sine-Gordon equations and their averaged dynamics"};
  cli.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  unsigned jobs = 1;
  std::vector<Flag> flags;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file");
    sub->add_option("--set", overrides, "Override a config value, table.key=value")->take_all();
    sub->add_option("--out", out_dir, "Output directory");
  };
  // Flags that map one-to-one onto config keys.
  auto mapped = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags.push_back({key, v}); },
                                          help);
  };

  auto* delta = cli.add_subcommand("delta", "Print Delta = <f_{-1}^2>, invariant checks and one period of f, f1, f2");
  common(delta);
  mapped(delta, "--forcing", "forcing.kind", "cosine | square | series");
  mapped(delta, "--amplitude", "forcing.amplitude", "Forcing amplitude");
  mapped(delta, "--period", "forcing.period", "Forcing period");

  auto* simulate = cli.add_subcommand("simulate", "Integrate one model and write snapshots and records");
  common(simulate);
  mapped(simulate, "--model", "model", "full1 | full8 | full10 | full13 | avg7 | avg9 | avg12 | avg13 | freewave");
  mapped(simulate, "--epsilon", "epsilon", "Small parameter");
  mapped(simulate, "--delta", "delta", "Delta for averaged models");
  mapped(simulate, "--forcing", "forcing.kind", "cosine | square | series");
  mapped(simulate, "--t-end", "plan.t_end", "Final time");
  mapped(simulate, "--dt", "plan.dt", "Time step");
  mapped(simulate, "--scheme", "plan.scheme", "leapfrog | rk4");
  mapped(simulate, "--c", "initial.c", "Kink velocity");

  auto* compare = cli.add_subcommand("compare", "Full versus averaged error over a list of epsilon");
  common(compare);
  mapped(compare, "--pair", "compare.pair", "full1-avg7 | full8-avg9 | full10-avg12 | full13-avg13");
  mapped(compare, "--forcing", "forcing.kind", "cosine | square | series");
  mapped(compare, "--eps", "compare.eps", "Comma-separated epsilon list");
  mapped(compare, "--prep", "compare.prep", "raw | transform");
  mapped(compare, "--t-end", "plan.t_end", "Final time");
  mapped(compare, "--init", "initial.kind", "kink | pulse");

  auto* residual = cli.add_subcommand("kink-residual", "Residual of an analytic kink under refinement");
  common(residual);
  mapped(residual, "--model", "model", "avg7 | avg9 | avg12");
  mapped(residual, "--delta", "delta", "Delta");
  mapped(residual, "--c", "initial.c", "Kink velocity");
  mapped(residual, "--dx", "grid.dx", "Coarsest spacing");
  mapped(residual, "--epsilon", "epsilon", "Small parameter (avg7)");
  mapped(residual, "--coeffs", "initial.coeffs", "oracle | paper (avg12)");

  auto* sweep = cli.add_subcommand("sweep", "Run a scenario over a list of parameter values");
  common(sweep);
  sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  mapped(sweep, "--parameter", "sweep.parameter", "Config key to vary");
  mapped(sweep, "--values", "sweep.values", "Comma-separated values");

  auto* audit = cli.add_subcommand("dsg-audit", "Audit the double sine-Gordon kink coefficients");
  common(audit);
  mapped(audit, "--deltas", "audit.deltas", "Comma-separated Delta list");

  CLI11_PARSE(cli, argc, argv);

  const CLI::App* chosen = cli.get_subcommands().front();
  try {
    sgavg::RunConfig cfg;
    if (!config_path.empty()) cfg = sgavg::RunConfig::from_file(config_path);
    cfg.set("scenario", chosen->get_name());
    for (const auto& f : flags) cfg.set(f.key, f.value);
    for (const auto& o : overrides) cfg.apply_override(o);
    if (!out_dir.empty()) cfg.set("output_dir", out_dir);
    return sgavg::app::run(cfg, std::cout, std::cerr, jobs);
  } catch (const sgavg::ConfigError& e) {
    std::cerr << "validation," << e.field() << ',' << sgavg::app::sanitize(e.what()) << '\n';
    return sgavg::app::kValidation;
  }
}
