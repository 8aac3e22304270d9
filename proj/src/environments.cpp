#include <algorithm>

#include "rmirl/gridworld.hpp"
#include "shipped_grids.hpp"

namespace rmirl {

namespace {

// Rows are indexed by machine state, columns follow the alphabet order.
RewardMachine tabulated_rm(const Alphabet& alphabet, std::vector<double> reward_values,
                           const std::vector<std::vector<RmState>>& targets,
                           const std::vector<std::vector<double>>& rewards) {
  std::vector<RmState> transitions;
  std::vector<std::size_t> reward_indices;
  for (std::size_t y = 0; y < targets.size(); ++y) {
    for (Symbol s = 0; s < alphabet.size(); ++s) {
      transitions.push_back(targets[y][s]);
      auto it = std::find(reward_values.begin(), reward_values.end(), rewards[y][s]);
      reward_indices.push_back(static_cast<std::size_t>(it - reward_values.begin()));
    }
  }
  return RewardMachine(targets.size(), alphabet, std::move(reward_values), std::move(transitions),
                       std::move(reward_indices));
}

// Symbols: eps, t (towel), w (water), l (lava), r (recharge).
// States: 0 dry, 1 wet, 2 finished. Recharging while wet ends the task unpaid.
RewardMachine recharge_rm(const Alphabet& a) {
  return tabulated_rm(a, {0.0, 1.0},
                      {{0, 0, 1, 2, 2},
                       {1, 0, 1, 2, 2},
                       {2, 2, 2, 2, 2}},
                      {{0, 0, 0, 0, 1},
                       {0, 0, 0, 0, 0},
                       {0, 0, 0, 0, 0}});
}

// Symbols: eps, c (coffee), o (office), * (decoration).
// States: 0 empty-handed, 1 holding coffee, 2 finished.
RewardMachine coffee_rm(const Alphabet& a) {
  return tabulated_rm(a, {0.0, 1.0},
                      {{0, 1, 0, 2},
                       {1, 1, 2, 2},
                       {2, 2, 2, 2}},
                      {{0, 0, 0, 0},
                       {0, 0, 1, 0},
                       {0, 0, 0, 0}});
}

// Symbols: eps, c (strong coffee), k (weak coffee), o (office), * (decoration).
// States: 0 empty-handed, 1 strong, 2 weak, 3 finished.
RewardMachine multi_coffee_rm(const Alphabet& a) {
  return tabulated_rm(a, {0.0, 1.0, 2.0},
                      {{0, 1, 2, 0, 3},
                       {1, 1, 1, 3, 3},
                       {2, 2, 2, 3, 3},
                       {3, 3, 3, 3, 3}},
                      {{0, 0, 0, 0, 0},
                       {0, 0, 0, 2, 0},
                       {0, 0, 0, 1, 0},
                       {0, 0, 0, 0, 0}});
}

Environment assemble(std::string name, const char* grid_text, RewardMachine (*true_rm)(const Alphabet&)) {
  GridSpec grid = parse_grid(grid_text);
  LabeledMdp mdp = compile_grid(grid);
  RewardMachine rm = true_rm(mdp.alphabet());
  return Environment{std::move(name), std::move(grid), std::move(mdp), std::move(rm)};
}

}  // namespace

std::vector<std::string> environment_names() { return {"recharge", "coffee", "multi_coffee"}; }

Environment make_env(std::string_view name) {
  if (name == "recharge") return assemble("recharge", shipped::kRechargeGrid, recharge_rm);
  if (name == "coffee") return assemble("coffee", shipped::kCoffeeGrid, coffee_rm);
  if (name == "multi_coffee") return assemble("multi_coffee", shipped::kMultiCoffeeGrid, multi_coffee_rm);
  throw Error(Errc::UnknownEnvironment, "unknown environment '" + std::string(name) + "'");
}

}  // namespace rmirl
