#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hive/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stationary laws and Monte Carlo simulation of honey-bee colony size"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  unsigned threads = 1;

  for (const auto& name : hive::cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    auto* cfg = sub->add_option("--config", config_path, "JSON run configuration");
    if (name != "validate") cfg->required();
    sub->add_option("--out-dir", out_dir, "directory for output files");
    sub->add_option("--seed-override", seed_override, "replace the configured seed");
    sub->add_option("--threads", threads, "worker threads for ensembles")->check(CLI::Range(1u, 1024u));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hive::cli::kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto result = hive::cli::run_command(name, config_path, {out_dir, threads}, seed_override);
    std::cout << name << ": " << result.summary << '\n';
    return result.exit_code;
  } catch (const hive::Error& e) {
    std::cerr << "hivesim " << name << ": " << e.what() << '\n';
    return hive::cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "hivesim " << name << ": " << e.what() << '\n';
    return hive::cli::kModelError;
  }
}
