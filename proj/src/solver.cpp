#include "rmirl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmirl/error.hpp"

namespace rmirl {

FiniteMdp::FiniteMdp(std::size_t num_states, std::size_t num_actions, std::vector<std::size_t> row_offsets,
                     std::vector<Outcome> outcomes)
    : num_states_(num_states),
      num_actions_(num_actions),
      offsets_(std::move(row_offsets)),
      outcomes_(std::move(outcomes)) {
  if (num_actions_ == 0) throw Error(Errc::InvalidArgument, "MDP needs at least one action");
  if (offsets_.size() != num_states_ * num_actions_ + 1 || offsets_.front() != 0 ||
      offsets_.back() != outcomes_.size() || !std::is_sorted(offsets_.begin(), offsets_.end())) {
    throw Error(Errc::InvalidArgument, "row offsets do not describe the outcome list");
  }
  for (const Outcome& outcome : outcomes_) {
    if (outcome.next >= num_states_) throw Error(Errc::BadIndex, "outcome state out of range");
  }
}

namespace {

double backup(const FiniteMdp& mdp, const std::vector<double>& values, std::size_t state, ActionId action,
              double discount) noexcept {
  double total = 0.0;
  for (const Outcome& outcome : mdp.outcomes(state, action)) {
    total += outcome.probability * (outcome.reward + discount * values[outcome.next]);
  }
  return total;
}

}  // namespace

Solution policy_iteration(const FiniteMdp& mdp, double discount, double tolerance) {
  if (!(discount > 0.0 && discount < 1.0)) throw Error(Errc::InvalidArgument, "discount must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");

  const std::size_t num_states = mdp.num_states();
  const std::size_t num_actions = mdp.num_actions();
  // Evaluation stops at sweep change eps and a switch needs a gain above
  // margin; the final residual is then at most discount * (eps + margin).
  const double eval_tolerance = 0.5 * tolerance;
  const double switch_margin = 0.5 * tolerance;

  std::vector<ActionId> policy(num_states, 0);
  std::vector<double> values(num_states, 0.0);
  std::vector<double> updated(num_states, 0.0);
  std::vector<double> q_row(num_actions);
  std::size_t rounds = 0;

  while (true) {
    while (true) {
      double change = 0.0;
      for (std::size_t s = 0; s < num_states; ++s) {
        updated[s] = backup(mdp, values, s, policy[s], discount);
        change = std::max(change, std::abs(updated[s] - values[s]));
      }
      values.swap(updated);
      if (!std::isfinite(change)) throw Error(Errc::NonFiniteValue, "policy evaluation diverged");
      if (change <= eval_tolerance) break;
    }

    ++rounds;
    bool stable = true;
    for (std::size_t s = 0; s < num_states; ++s) {
      for (ActionId a = 0; a < num_actions; ++a) q_row[a] = backup(mdp, values, s, a, discount);
      const ActionId best = greedy_action(q_row);
      if (q_row[best] > q_row[policy[s]] + switch_margin) {
        policy[s] = best;
        stable = false;
      }
    }
    if (stable) break;
  }

  Solution solution;
  solution.improvement_rounds = rounds;
  solution.q = QTable{num_states, num_actions, std::vector<double>(num_states * num_actions), discount, tolerance};
  solution.policy.resize(num_states);
  for (std::size_t s = 0; s < num_states; ++s) {
    for (ActionId a = 0; a < num_actions; ++a) {
      const double q = backup(mdp, values, s, a, discount);
      if (!std::isfinite(q)) throw Error(Errc::NonFiniteValue, "non-finite action value");
      solution.q.values[s * num_actions + a] = q;
    }
    solution.policy[s] = greedy_action(solution.q.row(s));
  }
  return solution;
}

double bellman_residual(const FiniteMdp& mdp, const QTable& q, double discount) {
  if (q.num_states != mdp.num_states() || q.num_actions != mdp.num_actions()) {
    throw Error(Errc::MissingQ, "Q table shape does not match the MDP");
  }
  std::vector<double> best(mdp.num_states());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    const auto row = q.row(s);
    best[s] = *std::max_element(row.begin(), row.end());
  }
  double residual = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      residual = std::max(residual, std::abs(q(s, a) - backup(mdp, best, s, a, discount)));
    }
  }
  return residual;
}

ActionId greedy_action(std::span<const double> q_row) noexcept {
  ActionId best = 0;
  for (ActionId a = 1; a < q_row.size(); ++a) {
    if (q_row[a] > q_row[best]) best = a;
  }
  return best;
}

double log_sum_exp(std::span<const double> values) noexcept {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += std::exp(v - peak);
  return peak + std::log(total);
}

std::vector<double> boltzmann_distribution(std::span<const double> q_row, double alpha) {
  if (!(alpha >= 0.0)) throw Error(Errc::InvalidArgument, "rationality must be non-negative");
  std::vector<double> weights(q_row.size());
  if (q_row.empty()) return weights;
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q_row.size(); ++i) {
    weights[i] = alpha * q_row[i];
    peak = std::max(peak, weights[i]);
  }
  double total = 0.0;
  for (double& w : weights) {
    w = std::exp(w - peak);
    total += w;
  }
  for (double& w : weights) w /= total;
  return weights;
}

}  // namespace rmirl
