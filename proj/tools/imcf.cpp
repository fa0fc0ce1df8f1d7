#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "imcf/driver.hpp"
#include "imcf/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string output_dir;
  long long seed = -1;
  bool quiet = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("config", args.config_path, "run configuration file")->required();
  sub->add_option("--output-dir", args.output_dir, "override [output] dir");
  sub->add_option("--seed", args.seed, "override [checks] seed");
  sub->add_flag("--quiet", args.quiet, "suppress progress output");
}

imcf::RunConfig load(const CommonArgs& args) {
  imcf::RunConfig cfg = imcf::parse_config_file(args.config_path);
  if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inverse mean curvature flow lab"};
  app.require_subcommand(1);

  CommonArgs run_args, check_args, oracle_args, lifespan_args;
  double t_eval = 0.0;

  CLI::App* run_cmd = app.add_subcommand("run", "integrate the flow and write the trace");
  add_common(run_cmd, run_args);
  CLI::App* check_cmd =
      app.add_subcommand("check", "run the model-level condition checkers");
  add_common(check_cmd, check_args);
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-compare", "run the PDE against the homogeneous ODE oracle");
  add_common(oracle_cmd, oracle_args);
  CLI::App* lifespan_cmd =
      app.add_subcommand("lifespan", "check the remaining-lifespan bound at a flow time");
  add_common(lifespan_cmd, lifespan_args);
  lifespan_cmd->add_option("--t", t_eval, "flow time at which to evaluate the bound")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return imcf::cmd_run(load(run_args), run_args.quiet);
    if (check_cmd->parsed()) return imcf::cmd_check(load(check_args), check_args.quiet);
    if (oracle_cmd->parsed())
      return imcf::cmd_oracle_compare(load(oracle_args), oracle_args.quiet);
    if (lifespan_cmd->parsed())
      return imcf::cmd_lifespan(load(lifespan_args), t_eval, lifespan_args.quiet);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return imcf::exit_code_for(e);
  }
  return 2;
}
