#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isomtau/config.hpp"

using namespace isomtau;

namespace {

struct CommonOpts {
  std::string config_file;
  std::string out_dir = ".";
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_file, "run configuration (JSON)")->required();
  sub->add_option("--out", opts.out_dir, "output directory");
  sub->add_option("--format", opts.format, "trajectory format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", opts.seed, "override the config seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

RunConfig load(const CommonOpts& opts) {
  RunConfig cfg = load_config(opts.config_file);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (!opts.format.empty()) cfg.format = opts.format;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isomtau - isomonodromic tau functions, classical action, and their identities"};
  app.require_subcommand(1);

  CommonOpts integrate_opts, verify_opts, series_opts, schlesinger_opts;
  CLI::App* sub_integrate =
      app.add_subcommand("integrate", "integrate a system along a complex-time path");
  add_common(sub_integrate, integrate_opts);
  CLI::App* sub_verify = app.add_subcommand("verify", "run the named identity checks");
  add_common(sub_verify, verify_opts);
  CLI::App* sub_series =
      app.add_subcommand("series", "dump local-frame coefficients and recursion residuals");
  add_common(sub_series, series_opts);
  CLI::App* sub_schlesinger = app.add_subcommand(
      "schlesinger", "integrate/verify a Schlesinger model (dispatches on the config)");
  add_common(sub_schlesinger, schlesinger_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_integrate->parsed()) {
      return cmd_integrate(load(integrate_opts), integrate_opts.out_dir);
    }
    if (sub_verify->parsed()) {
      return cmd_verify(load(verify_opts), verify_opts.out_dir);
    }
    if (sub_series->parsed()) {
      return cmd_series(load(series_opts), series_opts.out_dir);
    }
    if (sub_schlesinger->parsed()) {
      RunConfig cfg = load(schlesinger_opts);
      if (!cfg.schlesinger) {
        std::cerr << "schlesinger: config system must be \"schlesinger\"\n";
        return 2;
      }
      if (!cfg.checks.empty()) return cmd_verify(cfg, schlesinger_opts.out_dir);
      return cmd_integrate(cfg, schlesinger_opts.out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
