#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rmirl/labeled_mdp.hpp"
#include "rmirl/reward_machine.hpp"
#include "rmirl/solver.hpp"

namespace rmirl {

/// Parameters of one annealing chain. Defaults are the coffee column of the
/// experiment table.
struct AnnealConfig {
  double alpha = 50.0;
  std::size_t iterations = 1000;
  double temp_initial = 100000.0;
  double temp_min = 300.0;
  double temp_decay = 0.96;
  double perturb_initial = 0.5;
  double perturb_min = 1.0 / 12.0;
  double perturb_decay = 0.99;
  std::size_t decay_period = 5;
  PriorParams prior;
  std::size_t num_rm_states = 3;
  /// The finite reward set, assumed known during inference.
  std::vector<double> reward_values{0.0, 1.0};
  /// Fixed: eps entries stay zero-reward self-loops during the search.
  BlankMode blank = BlankMode::Fixed;
  double gamma = 0.95;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when a range invariant is violated.
  void validate() const;
};

struct TraceRecord {
  std::size_t iteration;
  /// Scores of the proposal evaluated at this iteration.
  double log_likelihood;
  double log_prior;
  double temperature;
  double perturbance;
  bool accepted;
  double best_score;
};

struct AnnealTrace {
  std::vector<TraceRecord> records;
};

struct AnnealResult {
  RewardMachine best;
  double best_score;
  double best_log_likelihood;
  double best_log_prior;
  AnnealTrace trace;
};

/// sum_i [alpha Q(x_i, a_i) - logsumexp_a alpha Q(x_i, a)]. Throws MissingQ
/// when a projected pair lies outside the table.
double log_likelihood(std::span<const JointStep> projected, const QTable& q, double alpha);

/// min(1, exp(d_loglik / temperature + d_logprior)).
double acceptance_probability(double d_loglik, double d_logprior, double temperature);

/// loglik / temp_min + logprior; the scale on which hypotheses compete.
double hypothesis_score(double loglik, double logprior, double temp_min);

struct Schedule {
  double temperature;
  double perturbance;
};

/// After iteration i (1-based): every decay_period iterations both values are
/// multiplied by their decay factors and floored at their minima.
Schedule schedules_advance(Schedule current, std::size_t iteration, const AnnealConfig& config);

/// Log-likelihood and log-prior of one hypothesis against a fixed demonstration.
class HypothesisEvaluator {
 public:
  HypothesisEvaluator(const LabeledMdp& mdp, const Demonstration& demo, const AnnealConfig& config);

  struct Scores {
    double log_likelihood;
    double log_prior;
  };
  Scores evaluate(const RewardMachine& rm) const;

 private:
  const LabeledMdp& mdp_;
  const Demonstration& demo_;
  const AnnealConfig& config_;
};

/// Simulated-annealing MAP search over n-state reward machines.
AnnealResult anneal(const LabeledMdp& mdp, const Demonstration& demo, const AnnealConfig& config, Rng& rng);

/// CSV with header iteration,loglik,logprior,temperature,perturbance,accepted,best_score.
void write_trace_csv(std::ostream& out, const AnnealTrace& trace);

}  // namespace rmirl
