#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rmirl/alphabet.hpp"
#include "rmirl/error.hpp"
#include "rmirl/reward_machine.hpp"
#include "rmirl/solver.hpp"

namespace rmirl {

using StateId = std::size_t;

struct Successor {
  StateId state;
  double probability;
};

/// Finite reward-free MDP whose states carry one symbol each. The transition
/// tensor is dense, indexed [s][a][s'].
class LabeledMdp {
 public:
  LabeledMdp(std::size_t num_states, std::size_t num_actions, StateId initial_state,
             std::vector<double> transition, Alphabet alphabet, std::vector<Symbol> labels);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  StateId initial_state() const noexcept { return initial_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  Symbol label(StateId state) const noexcept { return labels_[state]; }
  std::span<const Symbol> labels() const noexcept { return labels_; }

  double probability(StateId from, ActionId action, StateId to) const noexcept {
    return transition_[(from * num_actions_ + action) * num_states_ + to];
  }
  std::span<const double> row(StateId from, ActionId action) const noexcept {
    return {transition_.data() + (from * num_actions_ + action) * num_states_, num_states_};
  }
  /// Non-zero entries of a row in ascending state order.
  std::span<const Successor> successors(StateId from, ActionId action) const noexcept {
    const std::size_t r = from * num_actions_ + action;
    return {successors_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  StateId initial_;
  std::vector<double> transition_;
  Alphabet alphabet_;
  std::vector<Symbol> labels_;
  std::vector<std::size_t> offsets_;
  std::vector<Successor> successors_;
};

struct Violation {
  Errc kind;
  std::size_t state = 0;
  std::size_t action = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Row sums (within 1e-12) and non-negativity, label membership, initial
/// state range.
ValidationReport validate_labeled_mdp(const LabeledMdp& mdp);

/// Draws s' ~ T(s, a, .).
StateId sample_next(const LabeledMdp& mdp, StateId state, ActionId action, Rng& rng);

/// Samples an index from a probability vector.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

/// Synchronous product M x R. Joint state (s, y) has index s * n + y.
/// Rewards of realized transitions are rho(y, L(s')).
class ProductMdp {
 public:
  ProductMdp(FiniteMdp mdp, std::size_t mdp_states, std::size_t rm_states, std::size_t initial,
             std::vector<Symbol> labels, std::vector<double> rm_rewards, std::size_t num_symbols);

  const FiniteMdp& mdp() const noexcept { return mdp_; }
  std::size_t num_states() const noexcept { return mdp_.num_states(); }
  std::size_t num_actions() const noexcept { return mdp_.num_actions(); }
  std::size_t initial() const noexcept { return initial_; }
  std::size_t rm_states() const noexcept { return rm_states_; }

  std::size_t joint(StateId state, RmState rm_state) const noexcept { return state * rm_states_ + rm_state; }
  StateId mdp_state(std::size_t joint) const noexcept { return joint / rm_states_; }
  RmState rm_state(std::size_t joint) const noexcept { return joint % rm_states_; }

  /// T'((s,y), a, (s',y')); zero unless y' = tau(y, L(s')).
  double probability(std::size_t from, ActionId action, std::size_t to) const noexcept;
  /// R'((s,y), a, (s',y')) = rho(y, L(s')).
  double reward(std::size_t from, ActionId action, std::size_t to) const noexcept;

 private:
  FiniteMdp mdp_;
  std::size_t mdp_states_;
  std::size_t rm_states_;
  std::size_t initial_;
  std::vector<Symbol> labels_;
  std::vector<double> rm_rewards_;
  std::size_t num_symbols_;
};

/// Throws AlphabetMismatch unless both share the same alphabet.
ProductMdp build_product(const LabeledMdp& mdp, const RewardMachine& rm);

struct Step {
  StateId state;
  ActionId action;
};

using Episode = std::vector<Step>;

/// Episodes of consecutive (state, action) pairs. Label histories are not
/// stored; they follow from the labels of the states entered.
struct Demonstration {
  std::vector<Episode> episodes;

  std::size_t size() const noexcept;
};

/// (s, lambda, a): lambda lists the labels of the states entered since the
/// episode began. The initial state's label is not part of it.
struct DemonstrationTriple {
  StateId state;
  std::vector<Symbol> history;
  ActionId action;
};

std::vector<DemonstrationTriple> to_triples(const Demonstration& demo, const LabeledMdp& mdp);

struct JointStep {
  std::size_t joint_state;
  ActionId action;
};

/// Streams each episode through the machine once, resetting to the initial
/// RM state at every episode start.
std::vector<JointStep> project_demonstration(const Demonstration& demo, const LabeledMdp& mdp,
                                             const RewardMachine& rm);

/// Same projection over explicit triples. An empty history starts an episode;
/// a history extending the previous one by one symbol advances incrementally.
std::vector<JointStep> project_triples(std::span<const DemonstrationTriple> triples, const RewardMachine& rm);

/// Throws BadIndex if any step refers to a state or action outside `mdp`.
void check_demonstration(const Demonstration& demo, const LabeledMdp& mdp);

/// Line format: `episode <k>` headers followed by `s=<state> a=<action>`.
void write_demonstration(std::ostream& out, const Demonstration& demo);
Demonstration read_demonstration(std::istream& in);

}  // namespace rmirl
