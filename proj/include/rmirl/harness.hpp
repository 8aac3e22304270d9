#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmirl/anneal.hpp"
#include "rmirl/gridworld.hpp"

namespace rmirl {

/// Raised for bad flags, config files or out-of-range settings (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string env;
  std::string grid_path;
  std::string true_rm_path;
  AnnealConfig anneal;
  std::size_t runs = 100;
  std::size_t ep_len = 100;
  std::size_t eval_episodes = 100;
  double alpha_expert = 50.0;
  std::size_t chains = 3;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  /// Inputs of the individual stages; empty means the default under out_dir.
  std::string demo_path;
  std::string rm_path;
};

/// Per-environment defaults from the experiment table (coffee for custom grids).
RunConfig default_config(std::string_view env);

/// Ordered key=value settings named like the long CLI flags (without "--").
using Settings = std::vector<std::pair<std::string, std::string>>;

/// Reads `key=value` lines; blank lines and lines starting with '#' are skipped.
Settings read_settings(std::istream& in);

/// Applies defaults for the selected environment, then every setting in order.
RunConfig resolve_config(const Settings& settings);

/// The effective configuration as settings, suitable for read_settings.
Settings effective_settings(const RunConfig& config);

/// Numbers may be written as decimals or as fractions like 1/12.
double parse_number(std::string_view text);

struct Problem {
  std::string name;
  LabeledMdp mdp;
  std::optional<RewardMachine> true_rm;
  std::vector<double> reward_values;
};

/// Resolves --env or --grid (+ --true-rm) into an MDP and, when known, the
/// true machine.
Problem load_problem(const RunConfig& config);

struct InferenceResult {
  std::vector<AnnealResult> chains;
  std::size_t best_chain = 0;

  const AnnealResult& best() const { return chains[best_chain]; }
};

/// Independent chains with private generators; the winner has the highest
/// hypothesis score (ties go to the lower chain index).
InferenceResult infer_reward_machine(const LabeledMdp& mdp, const Demonstration& demo, const AnnealConfig& config,
                                     std::size_t chains, bool parallel = true);

/// Graphviz rendering: one node per reachable state, edges labeled
/// "sym1 ∨ sym2 | r"; an edge taken on every symbol shows only its reward.
std::string export_dot(const RewardMachine& rm);

/// Reward collected along a label trace from the initial state.
double trace_return(const RewardMachine& rm, std::span<const Symbol> trace);

/// Stage outputs written under config.out_dir.
struct StagePaths {
  std::string demo;
  std::string rm;
  std::string report;
  std::string dot;
  std::string summary;
  std::vector<std::string> traces;
};
StagePaths stage_paths(const RunConfig& config);

std::size_t cmd_demo(const RunConfig& config, std::ostream& log);
InferenceResult cmd_infer(const RunConfig& config, std::ostream& log);
EvalReport cmd_eval(const RunConfig& config, std::ostream& log);
std::string cmd_export_dot(const RunConfig& config, std::ostream& out);

struct PipelineResult {
  std::size_t triples = 0;
  InferenceResult inference;
  EvalReport report;
};
PipelineResult cmd_pipeline(const RunConfig& config, std::ostream& log);

}  // namespace rmirl
