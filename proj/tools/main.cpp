#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "hubtrack/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tracking control of the driven 1D Hubbard ring"};
  app.require_subcommand(1);

  hubtrack::CommandOptions opts;
  std::string config, out = ".", observable;
  std::uint64_t seed = 0;
  std::size_t stride = 0;

  const std::map<std::string, std::string> help{
      {"ground", "ground state energy and bond expectation"},
      {"drive", "propagate under the configured pulse"},
      {"track", "track a target current"},
      {"track-observable", "track the rate of change of an observable"},
      {"multiplicity-demo", "track a driven current whose field crosses pi/2"},
      {"filter-sweep", "low-pass the tracking field and re-drive at each cut-off"}};

  for (const auto& name : hubtrack::command_names()) {
    const auto it = help.find(name);
    auto* sub = app.add_subcommand(name, it == help.end() ? "" : it->second);
    // existence is checked by the loader so a missing file maps to the IO exit code
    sub->add_option("--config", config, "JSON experiment configuration");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed of the eigensolver start vector");
    sub->add_option("--threads", opts.threads, "OpenMP threads (0 keeps the default)");
    sub->add_option("--snapshot-stride", stride, "store every n-th state (0 disables)");
    if (name == "track-observable") {
      sub->add_option("--observable", observable, "current, doublon, bond-real or number");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(hubtrack::ExitCode::Parameter);
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--config")) opts.config = config;
  opts.out_dir = out;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--snapshot-stride")) opts.snapshot_stride = stride;
  if (sub->get_option_no_throw("--observable") && sub->count("--observable")) {
    opts.observable = observable;
  }
  return static_cast<int>(hubtrack::run_command(sub->get_name(), opts));
}
