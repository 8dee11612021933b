#include <CLI11.hpp>

#include "psched/cli.hpp"

using namespace psched;

int main(int argc, char** argv) {
  CLI::App app{"Production-maintenance scheduling: compact MINLP and branch-and-price"};
  app.require_subcommand(1);

  GenCommand gen;
  std::string layout = "one-group-20", complexity = "low", mults;
  long seed = 0;
  auto* g = app.add_subcommand("gen", "generate random instances");
  g->add_option("--seed", seed, "base seed");
  g->add_option("--periods", gen.config.periods, "horizon length");
  g->add_option("--layout", layout)->check(CLI::IsMember({"one-group-20", "two-groups-10", "custom"}));
  g->add_option("--mults", mults, "custom layout multiplicities, e.g. 2,3");
  g->add_option("--complexity", complexity)->check(CLI::IsMember({"low", "high"}));
  g->add_option("--rho", gen.config.rho, "demand load factor in (0, 1.2]");
  g->add_option("--count", gen.count, "instances per configuration");
  g->add_option("--out", gen.out_dir, "output directory");

  SolveCommand solve;
  bool no_early = false, no_heur = false, no_farley = false;
  int parallel = 0;
  auto* s = app.add_subcommand("solve", "solve one instance");
  s->add_option("instance", solve.instance_path)->required();
  s->add_option("--method", solve.method)->check(CLI::IsMember({"compact", "dw"}));
  s->add_option("--time-limit", solve.limits.time, "seconds");
  s->add_option("--node-limit", solve.limits.nodes);
  s->add_option("--gap-tol", solve.limits.gap);
  s->add_option("--out", solve.out_dir);
  s->add_option("--parallel", parallel, "pricing threads (dw)");
  s->add_flag("--no-early-branching", no_early);
  s->add_flag("--no-rmp-heuristic", no_heur);
  s->add_flag("--no-farley", no_farley);

  std::string vinst, vsched;
  auto* v = app.add_subcommand("validate", "check a schedule against an instance");
  v->add_option("instance", vinst)->required();
  v->add_option("schedule", vsched)->required();

  BenchCommand bench;
  auto* b = app.add_subcommand("bench", "run both methods over an instance directory");
  b->add_option("dir", bench.instance_dir)->required();
  b->add_option("--time-limit", bench.limits.time);
  b->add_option("--out", bench.out_dir);
  b->add_option("--parallel", bench.parallel, "concurrent instances");

  CLI11_PARSE(app, argc, argv);

  if (g->parsed()) {
    gen.config.seed = static_cast<std::uint64_t>(seed);
    if (layout == "one-group-20")
      gen.config.layout = Layout::OneGroup20;
    else if (layout == "two-groups-10")
      gen.config.layout = Layout::TwoGroups10;
    else {
      gen.config.layout = Layout::Custom;
      std::stringstream ss(mults);
      std::string tok;
      while (std::getline(ss, tok, ',')) gen.config.custom_multiplicities.push_back(std::stoi(tok));
    }
    gen.config.complexity = complexity == "low" ? Complexity::Low : Complexity::High;
    return cmd_generate(gen);
  }
  if (s->parsed()) {
    solve.bp.early_branching = !no_early;
    solve.bp.rmp_heuristic = !no_heur;
    solve.bp.farley = !no_farley;
    solve.bp.parallel = parallel;
    return cmd_solve(solve);
  }
  if (v->parsed()) return cmd_validate(vinst, vsched);
  if (b->parsed()) return cmd_bench(bench);
  return 2;
}
