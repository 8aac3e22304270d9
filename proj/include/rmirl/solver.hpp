#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rmirl {

using ActionId = std::size_t;

/// One realized transition of a finite MDP row.
struct Outcome {
  std::size_t next;
  double probability;
  double reward;
};

/// Finite MDP in compressed-row form: row (s, a) lists its non-zero
/// outcomes. Rows are laid out state-major, `row = s * num_actions + a`.
class FiniteMdp {
 public:
  FiniteMdp() = default;
  FiniteMdp(std::size_t num_states, std::size_t num_actions, std::vector<std::size_t> row_offsets,
            std::vector<Outcome> outcomes);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::span<const Outcome> outcomes(std::size_t state, ActionId action) const noexcept {
    const std::size_t row = state * num_actions_ + action;
    return {outcomes_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
  }

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Outcome> outcomes_;
};

/// Optimal discounted action values, row-major by state.
struct QTable {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> values;
  double discount = 0.0;
  double tolerance = 0.0;

  double operator()(std::size_t state, ActionId action) const noexcept {
    return values[state * num_actions + action];
  }
  std::span<const double> row(std::size_t state) const noexcept {
    return {values.data() + state * num_actions, num_actions};
  }
};

struct Solution {
  /// Greedy action per state; ties go to the lowest action index.
  std::vector<ActionId> policy;
  QTable q;
  std::size_t improvement_rounds = 0;
};

/// Policy iteration with iterative evaluation. The returned table has a
/// Bellman optimality residual of at most `tolerance`.
/// Throws NonFiniteValue if an intermediate value stops being finite.
Solution policy_iteration(const FiniteMdp& mdp, double discount, double tolerance = 1e-9);

/// max_{s,a} |Q(s,a) - sum_{s'} P(s'|s,a) (r + discount * max_{a'} Q(s',a'))|
double bellman_residual(const FiniteMdp& mdp, const QTable& q, double discount);

/// Lowest-index argmax of a row.
ActionId greedy_action(std::span<const double> q_row) noexcept;

/// log sum_i exp(values_i), shifted by the maximum.
double log_sum_exp(std::span<const double> values) noexcept;

/// Softmax of alpha * q_row, evaluated with max-subtraction.
std::vector<double> boltzmann_distribution(std::span<const double> q_row, double alpha);

}  // namespace rmirl
