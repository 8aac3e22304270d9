#pragma once

#include <string>
#include <vector>

#include "rmirl/gridworld.hpp"
#include "rmirl/labeled_mdp.hpp"
#include "rmirl/reward_machine.hpp"

namespace rmirl::testing {

inline Alphabet coffee_alphabet() { return Alphabet({"eps", "c", "o", "*"}); }

// The supplementary coffee machine: y0 empty-handed, y1 holding, y2 done.
inline RewardMachine coffee_rm() {
  return RewardMachine(3, coffee_alphabet(), {0.0, 1.0},
                       {0, 1, 0, 2,
                        1, 1, 2, 2,
                        2, 2, 2, 2},
                       {0, 0, 0, 0,
                        0, 0, 1, 0,
                        0, 0, 0, 0});
}

inline RewardMachine make_rm(std::size_t n, const Alphabet& alphabet, std::vector<double> rewards,
                             std::vector<RmState> t, std::vector<std::size_t> r) {
  return RewardMachine(n, alphabet, std::move(rewards), std::move(t), std::move(r));
}

// Deterministic MDP from a successor table next[s][a].
inline LabeledMdp deterministic_mdp(const std::vector<std::vector<StateId>>& next, const Alphabet& alphabet,
                                    std::vector<Symbol> labels, StateId initial = 0) {
  const std::size_t n = next.size();
  const std::size_t a = next.front().size();
  std::vector<double> transition(n * a * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t act = 0; act < a; ++act) transition[(s * a + act) * n + next[s][act]] = 1.0;
  }
  return LabeledMdp(n, a, initial, std::move(transition), alphabet, std::move(labels));
}

}  // namespace rmirl::testing
