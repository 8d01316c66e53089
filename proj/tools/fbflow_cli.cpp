#include "fbflow/fbflow.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

struct Options {
  std::string config;
  std::string out;
  unsigned long long seed = 1;
  double grid = 0.0;
  int order = -1;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "seed for randomized checks");
  sub->add_option("--grid", o.grid, "grid spacing override")->check(CLI::PositiveNumber);
}

int run(const std::string& subcommand, const Options& o) {
  fbf_config* cfg = nullptr;
  if (fbf_config_load(o.config.c_str(), &cfg) != FBF_OK) {
    std::fprintf(stderr, "config: %s\n", fbf_last_error());
    return 2;
  }
  if (o.grid > 0.0 && fbf_config_set_grid(cfg, o.grid) != FBF_OK) {
    std::fprintf(stderr, "grid: %s\n", fbf_last_error());
    fbf_config_destroy(cfg);
    return 2;
  }
  fbf_result* res = nullptr;
  const fbf_status st =
      fbf_run(cfg, subcommand.c_str(), o.out.empty() ? nullptr : o.out.c_str(), o.seed, o.order, &res);
  fbf_config_destroy(cfg);
  if (st != FBF_OK) {
    std::fprintf(stderr, "%s: %s\n", fbf_status_string(st), fbf_last_error());
    return 2;
  }
  std::printf("%s\n", fbf_result_summary(res));
  const int code = fbf_result_exit_code(res);
  fbf_result_destroy(res);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-domain free boundary solver"};
  app.require_subcommand(1);

  Options opt;
  auto* check = app.add_subcommand("check-conditions", "audit conditions (E), (A), (B), (A2) on the boundary");
  auto* evolve = app.add_subcommand("evolve", "run the fixed-domain evolution");
  auto* oracle = app.add_subcommand("oracle-test", "check analytic oracles");
  auto* seed = app.add_subcommand("taylor-seed", "dump Taylor coefficients of the formal solution");
  for (auto* s : {check, evolve, oracle, seed}) add_common(s, opt);
  seed->add_option("--order", opt.order, "Taylor order K")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (auto* s : app.get_subcommands()) return run(s->get_name(), opt);
  return 2;
}
