#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmirl/alphabet.hpp"

namespace rmirl {

/// Reward-machine state index. State 0 is always the initial state.
using RmState = std::size_t;

/// A deterministic reward machine (Y, y_I, Sigma, Gamma, tau, rho) stored as
/// two dense n x m matrices in row-major order: `transitions` holds target
/// states and `reward_indices` holds indices into the finite reward set.
///
/// Gamma must contain 0 and have at least two distinct values.
class RewardMachine {
 public:
  static constexpr RmState kInitial = 0;

  RewardMachine(std::size_t num_states, Alphabet alphabet, std::vector<double> reward_values,
                std::vector<RmState> transitions, std::vector<std::size_t> reward_indices);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_symbols() const noexcept { return alphabet_.size(); }
  /// Number of entries in each of the two matrices (n * m).
  std::size_t num_entries() const noexcept { return transitions_.size(); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<double>& reward_values() const noexcept { return reward_values_; }
  std::size_t zero_reward_index() const noexcept { return zero_index_; }

  RmState next(RmState state, Symbol symbol) const noexcept {
    return transitions_[state * alphabet_.size() + symbol];
  }
  double reward(RmState state, Symbol symbol) const noexcept {
    return reward_values_[reward_indices_[state * alphabet_.size() + symbol]];
  }
  std::size_t reward_index(RmState state, Symbol symbol) const noexcept {
    return reward_indices_[state * alphabet_.size() + symbol];
  }

  std::span<const RmState> transitions() const noexcept { return transitions_; }
  std::span<const std::size_t> reward_indices() const noexcept { return reward_indices_; }

  bool operator==(const RewardMachine&) const = default;

 private:
  std::size_t num_states_;
  Alphabet alphabet_;
  std::vector<double> reward_values_;
  std::size_t zero_index_;
  std::vector<RmState> transitions_;
  std::vector<std::size_t> reward_indices_;
};

struct RmStep {
  RmState state;
  double reward;
};

/// Checked single transition; throws BadState / UnknownSymbol.
RmStep rm_step(const RewardMachine& rm, RmState state, Symbol symbol);

/// Left fold of the transition function from the initial state.
RmState run_trace(const RewardMachine& rm, std::span<const Symbol> trace);
RmState run_trace(const RewardMachine& rm, RmState from, std::span<const Symbol> trace);

enum class Validity { Valid, Unreachable, Trivial };

struct ValidityReport {
  Validity status = Validity::Valid;
  /// States not reachable from the initial state, ascending.
  std::vector<RmState> unreachable;

  bool valid() const noexcept { return status == Validity::Valid; }
};

/// BFS reachability from the initial state, then the all-zero-reward check.
/// Unreachability is reported in preference to triviality.
ValidityReport check_valid(const RewardMachine& rm);

/// Rejections allowed before a sampler gives up with ResampleLimitExceeded.
inline constexpr std::size_t kResampleLimit = 100000;

/// How the blank column is treated by the samplers. Fixed keeps every
/// (y, eps) entry a zero-reward self-loop, so unlabeled cells never move the
/// machine; Learned samples it like any other symbol. Alphabets without eps
/// behave the same under both.
enum class BlankMode { Learned, Fixed };

RewardMachine random_valid_rm(std::size_t num_states, const Alphabet& alphabet,
                              const std::vector<double>& reward_values, Rng& rng,
                              BlankMode blank = BlankMode::Learned);

/// One raw perturbation without validity filtering: each entry of t and r is
/// independently redrawn with probability `p` to a different uniform value;
/// when nothing was selected, one entry chosen uniformly is changed. Entries
/// with no alternative value (t when n = 1) and frozen blank entries are never
/// selected. Throws DegenerateSpace when nothing can change.
RewardMachine perturb_entries(const RewardMachine& rm, double p, Rng& rng, BlankMode blank = BlankMode::Learned);

/// Neighbor proposal: perturb_entries redrawn from `rm` until valid.
RewardMachine propose_neighbor(const RewardMachine& rm, double p, Rng& rng, BlankMode blank = BlankMode::Learned);

/// Isomorphism-invariant encoding of the reachable part of `rm`. States are
/// renumbered in BFS discovery order, scanning symbols in alphabet order.
std::string canonicalize(const RewardMachine& rm);

/// Rebuilds a machine from a canonical encoding over the given alphabet and
/// reward set.
RewardMachine decode_canonical(std::string_view encoding, const Alphabet& alphabet,
                               const std::vector<double>& reward_values);

struct PriorParams {
  /// Probability that an entry of t is a self-transition.
  double self_transition = 3.0 / 5.0;
  /// Probability that an entry of r is zero.
  double zero_reward = 3.0 / 4.0;
};

/// Log of the unnormalized prior
///   p_r^i ((1-p_r)/(G-1))^(nm-i) p_t^j ((1-p_t)/(n-1))^(nm-j)
/// with i zero-reward entries and j self-transitions. For n = 1 the
/// transition factor is omitted since every transition is forced.
double log_prior_unnormalized(const RewardMachine& rm, const PriorParams& prior);

/// JSON-shaped text: n, alphabet, rewards, t (1-based), r (reward values).
std::string format_rm(const RewardMachine& rm);
RewardMachine parse_rm(std::string_view text);

}  // namespace rmirl
