#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "catoptrica/config.hpp"
#include "catoptrica/runner.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out;
  std::string format;
  std::string signs;
  int threads = 1;
  bool numeric = false;
  bool corrupt = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON run description")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output path (overrides the config)");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--signs", o.signs,
                  "'all' sweeps every normal/ray sign combination")
      ->check(CLI::IsMember({"all"}));
  cmd->add_option("--threads", o.threads, "worker threads")
      ->check(CLI::Range(1, 4096));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflected line congruences, wavefronts and focal sets for a "
               "point source and a translation-invariant mirror"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* reflect = app.add_subcommand(
      "reflect", "Sweep the reflected lines over the (u, v) grid");
  CLI::App* focal = app.add_subcommand(
      "focal", "Closed-form focal curve and surface over the grid");
  focal->add_flag("--numeric", opts.numeric,
                  "append finite-difference focal root rows");
  CLI::App* wavefront = app.add_subcommand(
      "wavefront", "Integrate the wavefront distance function over the grid");
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the self-check battery against the vector-algebra oracle");
  verify->add_flag("--corrupt-reflection", opts.corrupt, "")->group("");
  for (CLI::App* cmd : {reflect, focal, wavefront, verify}) {
    add_common(cmd, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Fold CLI11's fine-grained exit codes into the documented contract:
    // 0 for --help, 1 for any usage error.
    return app.exit(e) == 0 ? 0 : 1;
  }

  using catoptrica::cli::Command;
  Command cmd = Command::reflect;
  if (focal->parsed()) cmd = Command::focal;
  if (wavefront->parsed()) cmd = Command::wavefront;
  if (verify->parsed()) cmd = Command::verify;

  catoptrica::cli::RunConfig cfg;
  try {
    std::ifstream in(opts.config_path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    if (!in) {
      std::cerr << "error: cannot read " << opts.config_path << "\n";
      return 1;
    }
    cfg = catoptrica::cli::parse_config(text.str());
  } catch (const catoptrica::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  catoptrica::cli::RunOptions run_opts;
  run_opts.numeric = opts.numeric;
  run_opts.signs_all = opts.signs == "all";
  run_opts.out = opts.out;
  if (opts.format == "csv") run_opts.format = catoptrica::cli::OutputFormat::csv;
  if (opts.format == "json")
    run_opts.format = catoptrica::cli::OutputFormat::json;
  run_opts.threads = opts.threads;
  run_opts.corrupt_reflection = opts.corrupt;

  return catoptrica::cli::run(cmd, cfg, run_opts, std::cout);
}
