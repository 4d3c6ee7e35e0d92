#include <iostream>

#include <CLI11.hpp>

#include "pm/runner.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> jobs;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Override the configured seed");
  sub->add_option("--out", f.out, "Output directory (default: $PMARKET_OUT or ./out)");
  sub->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

pm::RunConfig resolve(const CommonFlags& f) {
  pm::RunConfig c = pm::load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.jobs) c.jobs = *f.jobs;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategic model-selection markets: dynamics, equilibria and entry"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, entry_flags;
  auto* run = app.add_subcommand("run", "Best-response dynamics on one instance");
  add_common(run, run_flags);
  auto* sweep = app.add_subcommand("sweep", "Dynamics over a grid of instances");
  add_common(sweep, sweep_flags);
  auto* entry = app.add_subcommand("entry", "Train an entrant and evaluate the market after entry");
  add_common(entry, entry_flags);

  pm::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify-fixtures", "Re-derive every fixture expectation");
  verify->add_option("--fixtures", verify_opts.fixtures_dir, "Directory with index.json (default: builtin registry)");
  verify->add_option("--only", verify_opts.only, "Restrict to these fixtures");
  verify->add_flag("--strict", verify_opts.strict, "Count known discrepancies as failures");

  std::string export_dir;
  auto* list = app.add_subcommand("list-fixtures", "List builtin fixtures");
  list->add_option("--export", export_dir, "Write each fixture as JSON into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return pm::cmd_run(resolve(run_flags), std::cout);
    if (*sweep) return pm::cmd_sweep(resolve(sweep_flags), std::cout);
    if (*entry) return pm::cmd_entry(resolve(entry_flags), std::cout);
    if (*verify) return pm::cmd_verify_fixtures(verify_opts, std::cout);
    if (*list) return pm::cmd_list_fixtures(export_dir, std::cout);
  } catch (const pm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
