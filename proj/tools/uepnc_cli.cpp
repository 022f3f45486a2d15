// Experiment runner: each subcommand writes headered CSV files to --out.

#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "uepnc/experiments.hpp"
#include "uepnc/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Flags {
  std::string scenario;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::string direct;
  std::string view = "evaluation";
};

void add_common(CLI::App* cmd, Flags& f, bool needs_scenario) {
  auto* opt = cmd->add_option("--scenario", f.scenario, "Scenario JSON file")
                  ->check(CLI::ExistingFile);
  if (needs_scenario) opt->required();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed (overrides the scenario)");
  cmd->add_option("--trials", f.trials, "Monte Carlo trials per point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--direct", f.direct, "Direct solver")
      ->check(CLI::IsMember({"off", "exhaustive", "genetic"}));
  cmd->add_option("--erasure-view", f.view, "Erasure model for evaluation")
      ->check(CLI::IsMember({"allocator", "evaluation"}))
      ->capture_default_str();
}

uepnc::RunOptions run_options(const Flags& f) {
  uepnc::RunOptions o;
  o.seed = f.seed;
  o.trials = f.trials;
  if (f.direct == "off") o.direct = uepnc::DirectChoice::kOff;
  if (f.direct == "exhaustive") o.direct = uepnc::DirectChoice::kExhaustive;
  if (f.direct == "genetic") o.direct = uepnc::DirectChoice::kGenetic;
  o.view = f.view == "allocator" ? uepnc::ErasureView::kAllocator
                                 : uepnc::ErasureView::kEvaluation;
  return o;
}

uepnc::Scenario validation_scenario(const Flags& f) {
  if (!f.scenario.empty()) return uepnc::load_scenario(f.scenario);
  // The validation grid does not depend on the stream; any preset carries it.
  return uepnc::preset_scenario(uepnc::StreamPreset::kA, uepnc::DeliveryMode::kSingleCell);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expanding-window RLNC resource allocation experiments"};
  app.require_subcommand(1);
  Flags flags;

  using Runner = uepnc::ExperimentResult (*)(const uepnc::Scenario&, const uepnc::RunOptions&);
  const std::map<std::string, std::pair<std::string, Runner>> commands{
      {"validate-approx", {"Analytic vs Monte Carlo decoding probability", uepnc::run_validate_approx}},
      {"sweep-rbp", {"Heuristic vs direct profit-cost ratio over N_RBP", uepnc::run_rbp_sweep}},
      {"coverage-sc", {"Single-cell recovery curves and coverage radii", uepnc::run_coverage_sc}},
      {"psnr-map-sfn", {"SFN maximum-PSNR map and recovery fractions", uepnc::run_psnr_map_sfn}},
      {"solve", {"Solve one scenario with every solver", uepnc::run_solve}},
  };
  for (const auto& [name, entry] : commands) {
    add_common(app.add_subcommand(name, entry.first), flags, name != "validate-approx");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const uepnc::Scenario scenario = name == "validate-approx"
                                         ? validation_scenario(flags)
                                         : uepnc::load_scenario(flags.scenario);
    const auto result = commands.at(name).second(scenario, run_options(flags));
    for (const auto& path : result.write_all(flags.out)) std::cout << path.string() << '\n';
    for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
    std::cerr << result.id << " finished in " << result.runtime_s << " s\n";
    return result.infeasible ? kExitInfeasible : kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
