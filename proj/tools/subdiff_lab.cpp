// subdiff-lab: command-line front end for the experiment runners.

#include "subdiff.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int exit_code(sd_status s) {
  switch (s) {
    case SD_OK: return 0;
    case SD_ERR_CONFIG: return 1;
    case SD_ERR_ACCEPTANCE: return 2;
    default: return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-average subdifferential experiments"};
  app.require_subcommand(1, 1);

  std::string config, out_dir;
  int threads = 1;
  std::uint64_t seed = 0;

  for (const char* name : {"rate-m", "rate-d", "peeling", "landscape", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
    sub->add_option("--seed", seed, "override the config seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const bool has_seed = sub->count("--seed") > 0;
  const sd_status s = sd_run_experiment(sub->get_name().c_str(), config.c_str(), out_dir.c_str(), threads,
                                        has_seed ? 1 : 0, seed);
  if (s == SD_OK) {
    std::printf("%s: wrote %s/records.csv, fit.json, config.echo.json\n", sub->get_name().c_str(), out_dir.c_str());
  } else {
    std::fprintf(stderr, "%s: %s: %s\n", sub->get_name().c_str(), sd_status_string(s), sd_last_error());
  }
  return exit_code(s);
}
