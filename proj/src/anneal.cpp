#include "rmirl/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rmirl/format.hpp"

namespace rmirl {

void AnnealConfig::validate() const {
  auto require = [](bool condition, const char* what) {
    if (!condition) throw Error(Errc::InvalidArgument, what);
  };
  require(alpha >= 0.0, "alpha must be non-negative");
  require(iterations >= 1, "iterations must be at least 1");
  require(temp_min > 0.0 && temp_initial >= temp_min, "need temp_initial >= temp_min > 0");
  require(temp_decay > 0.0 && temp_decay < 1.0, "temp_decay must lie in (0, 1)");
  require(perturb_min > 0.0 && perturb_initial >= perturb_min && perturb_initial <= 1.0,
          "need 1 >= perturb_initial >= perturb_min > 0");
  require(perturb_decay > 0.0 && perturb_decay < 1.0, "perturb_decay must lie in (0, 1)");
  require(decay_period >= 1, "decay_period must be at least 1");
  require(num_rm_states >= 1, "hypotheses need at least one state");
  require(prior.self_transition > 0.0 && prior.self_transition < 1.0, "p_t must lie in (0, 1)");
  require(prior.zero_reward > 0.0 && prior.zero_reward < 1.0, "p_r must lie in (0, 1)");
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  require(tolerance > 0.0, "tolerance must be positive");
  require(reward_values.size() >= 2, "reward set needs at least two values");
  require(std::find(reward_values.begin(), reward_values.end(), 0.0) != reward_values.end(),
          "reward set must contain 0");
}

double log_likelihood(std::span<const JointStep> projected, const QTable& q, double alpha) {
  // Normalizers are computed once per visited joint state.
  std::vector<double> normalizer(q.num_states, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> scaled(q.num_actions);
  double total = 0.0;
  for (const JointStep& step : projected) {
    if (step.joint_state >= q.num_states || step.action >= q.num_actions) {
      throw Error(Errc::MissingQ, "no Q value for joint state " + std::to_string(step.joint_state) + ", action " +
                                      std::to_string(step.action));
    }
    double& lse = normalizer[step.joint_state];
    if (std::isnan(lse)) {
      const auto row = q.row(step.joint_state);
      for (std::size_t a = 0; a < row.size(); ++a) scaled[a] = alpha * row[a];
      lse = log_sum_exp(scaled);
    }
    total += alpha * q(step.joint_state, step.action) - lse;
  }
  return total;
}

double acceptance_probability(double d_loglik, double d_logprior, double temperature) {
  if (!(temperature > 0.0)) throw Error(Errc::InvalidArgument, "temperature must be positive");
  const double log_ratio = d_loglik / temperature + d_logprior;
  if (std::isnan(log_ratio)) return 0.0;
  if (log_ratio >= 0.0) return 1.0;
  return std::exp(log_ratio);
}

double hypothesis_score(double loglik, double logprior, double temp_min) {
  if (!(temp_min > 0.0)) throw Error(Errc::InvalidArgument, "temperature must be positive");
  return loglik / temp_min + logprior;
}

Schedule schedules_advance(Schedule current, std::size_t iteration, const AnnealConfig& config) {
  if (iteration == 0 || iteration % config.decay_period != 0) return current;
  return {std::max(current.temperature * config.temp_decay, config.temp_min),
          std::max(current.perturbance * config.perturb_decay, config.perturb_min)};
}

HypothesisEvaluator::HypothesisEvaluator(const LabeledMdp& mdp, const Demonstration& demo,
                                         const AnnealConfig& config)
    : mdp_(mdp), demo_(demo), config_(config) {
  check_demonstration(demo_, mdp_);
}

HypothesisEvaluator::Scores HypothesisEvaluator::evaluate(const RewardMachine& rm) const {
  const ProductMdp product = build_product(mdp_, rm);
  const Solution solution = policy_iteration(product.mdp(), config_.gamma, config_.tolerance);
  const auto projected = project_demonstration(demo_, mdp_, rm);
  return {log_likelihood(projected, solution.q, config_.alpha), log_prior_unnormalized(rm, config_.prior)};
}

AnnealResult anneal(const LabeledMdp& mdp, const Demonstration& demo, const AnnealConfig& config, Rng& rng) {
  config.validate();
  if (demo.size() == 0) throw Error(Errc::InvalidArgument, "demonstration is empty");
  const HypothesisEvaluator evaluator(mdp, demo, config);

  Schedule schedule{config.temp_initial, config.perturb_initial};
  RewardMachine current = random_valid_rm(config.num_rm_states, mdp.alphabet(), config.reward_values, rng, config.blank);
  HypothesisEvaluator::Scores current_scores = evaluator.evaluate(current);

  AnnealResult result{current, hypothesis_score(current_scores.log_likelihood, current_scores.log_prior, config.temp_min),
                      current_scores.log_likelihood, current_scores.log_prior, {}};
  result.trace.records.reserve(config.iterations);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 1; i <= config.iterations; ++i) {
    RewardMachine proposal = propose_neighbor(current, schedule.perturbance, rng, config.blank);
    const HypothesisEvaluator::Scores scores = evaluator.evaluate(proposal);

    const double score = hypothesis_score(scores.log_likelihood, scores.log_prior, config.temp_min);
    if (score > result.best_score) {
      result.best = proposal;
      result.best_score = score;
      result.best_log_likelihood = scores.log_likelihood;
      result.best_log_prior = scores.log_prior;
    }

    const double accept = acceptance_probability(scores.log_likelihood - current_scores.log_likelihood,
                                                 scores.log_prior - current_scores.log_prior, schedule.temperature);
    const bool accepted = unit(rng) < accept;
    result.trace.records.push_back({i, scores.log_likelihood, scores.log_prior, schedule.temperature,
                                    schedule.perturbance, accepted, result.best_score});
    if (accepted) {
      current = std::move(proposal);
      current_scores = scores;
    }
    schedule = schedules_advance(schedule, i, config);
  }
  return result;
}

void write_trace_csv(std::ostream& out, const AnnealTrace& trace) {
  out << "iteration,loglik,logprior,temperature,perturbance,accepted,best_score\n";
  for (const TraceRecord& r : trace.records) {
    out << r.iteration << ',' << format_double(r.log_likelihood) << ',' << format_double(r.log_prior) << ','
        << format_double(r.temperature) << ',' << format_double(r.perturbance) << ',' << (r.accepted ? 1 : 0) << ','
        << format_double(r.best_score) << '\n';
  }
}

}  // namespace rmirl
