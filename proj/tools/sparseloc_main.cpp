#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sparseloc/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"verification lab for sparse pinning and entropy contraction experiments"};
  app.require_subcommand(1);

  std::string measure_path, check_name, graph_path, config_path;
  sparseloc::CliOptions opt;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "global seed; child seeds are derived per task");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--csv", opt.csv_path, "write per-step CSV to this path");
    sub->add_option("--mode", opt.mode, "exact|mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    sub->add_option("--threads", opt.threads, "worker threads for sampling commands")
        ->check(CLI::PositiveNumber);
  };

  auto* influence = app.add_subcommand(
      "influence", "covariance / correlation / influence matrices of a measure file");
  influence->add_option("measure", measure_path, "measure JSON file")->required();

  auto* verify = app.add_subcommand(
      "verify",
      "run a named check suite: kyfan, conjugate, lipschitz, stability, entropic, "
      "residual, decomposition, dv");
  verify->add_option("check", check_name, "check name")->required();
  add_common(verify);

  auto* conserve =
      app.add_subcommand("conserve", "entropy conservation experiment on a graph file");
  conserve->add_option("graph", graph_path, "graph file (\"n m\" header plus edge lines)")
      ->required();
  add_common(conserve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    sparseloc::RunReport rep;
    if (influence->parsed()) {
      rep = sparseloc::cmd_influence(measure_path);
    } else {
      opt.seed_set = false;
      for (auto* sub : {verify, conserve})
        if (sub->parsed() && sub->count("--seed") > 0) opt.seed_set = true;
      opt.seed = seed;
      sparseloc::json cfg = config_path.empty() ? sparseloc::json::object()
                                                : sparseloc::load_json_or_usage(config_path);
      rep = verify->parsed() ? sparseloc::cmd_verify(check_name, cfg, opt)
                             : sparseloc::cmd_conserve(graph_path, cfg, opt);
    }
    std::cout << sparseloc::run_report_to_json(rep).dump(2) << "\n";
    return rep.ok ? 0 : 1;
  } catch (const sparseloc::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
