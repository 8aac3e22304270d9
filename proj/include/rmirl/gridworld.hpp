#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmirl/labeled_mdp.hpp"
#include "rmirl/reward_machine.hpp"

namespace rmirl {

enum class Move : ActionId { Up = 0, Down = 1, Right = 2, Left = 3 };
inline constexpr std::size_t kNumMoves = 4;

struct Cell {
  std::size_t x = 0;
  std::size_t y = 0;
  bool operator==(const Cell&) const = default;
};

/// A rectangular board. `cells` holds one symbol name per cell, row-major
/// with row 0 at the top. Moving off the board leaves the agent in place; a
/// move slips to each orthogonal direction with probability slip / 2.
struct GridSpec {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::string> cells;
  Cell start;
  double slip = 0.0;
  /// Character used in the board text for each non-blank symbol, in
  /// alphabet order.
  std::vector<std::pair<char, std::string>> legend;

  std::size_t index(Cell cell) const noexcept { return cell.y * width + cell.x; }
  Cell cell(std::size_t index) const noexcept { return {index % width, index / width}; }
};

/// Header line `slip=<p> legend=<char>:<symbol>,...` followed by the board;
/// `.` is blank, `S` is the (blank) start cell.
GridSpec parse_grid(std::string_view text);
std::string serialize_grid(const GridSpec& grid);

/// eps followed by the legend symbols.
Alphabet grid_alphabet(const GridSpec& grid);
LabeledMdp compile_grid(const GridSpec& grid);

struct Environment {
  std::string name;
  GridSpec grid;
  LabeledMdp mdp;
  RewardMachine true_rm;
};

/// recharge, coffee or multi_coffee; throws UnknownEnvironment.
Environment make_env(std::string_view name);
std::vector<std::string> environment_names();

/// Boltzmann expert rollouts on the true product: `runs` episodes of exactly
/// `ep_len` steps from the initial state.
Demonstration generate_demonstration(const LabeledMdp& mdp, const RewardMachine& true_rm, double alpha_expert,
                                     std::size_t runs, std::size_t ep_len, double gamma, Rng& rng);

struct ReturnEstimate {
  /// Mean per-episode sum of true rewards (undiscounted).
  double average_return = 0.0;
  std::size_t episodes = 0;
  std::size_t episode_length = 0;
};

/// Greedy policy on M x inferred, scored with the true machine run on the
/// same label stream.
ReturnEstimate evaluate_agent(const LabeledMdp& mdp, const RewardMachine& true_rm, const RewardMachine& inferred,
                              std::size_t episodes, std::size_t ep_len, double gamma, Rng& rng);

/// Boltzmann expert on M x true, same accounting as evaluate_agent.
ReturnEstimate expert_baseline(const LabeledMdp& mdp, const RewardMachine& true_rm, double alpha_expert,
                               std::size_t episodes, std::size_t ep_len, double gamma, Rng& rng);

struct EvalReport {
  double expert_avg_return = 0.0;
  double agent_avg_return = 0.0;
  std::size_t episodes = 0;
  std::size_t episode_length = 0;
};

/// key=value lines: r_e, r_a, episodes, ep_len.
std::string format_report(const EvalReport& report);
EvalReport parse_report(std::string_view text);

}  // namespace rmirl
