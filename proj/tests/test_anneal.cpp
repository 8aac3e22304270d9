#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rmirl/anneal.hpp"
#include "rmirl/error.hpp"
#include "support.hpp"

namespace rmirl {
namespace {

using testing::deterministic_mdp;

// States 0 -> 1 -> 2 along action 0, action 1 stays put; state 2 is labeled g.
// The machine pays 1 on first reaching g and then sits in an absorbing state.
struct Chain {
  Alphabet alphabet{std::vector<std::string>{"eps", "g"}};
  LabeledMdp mdp = deterministic_mdp({{1, 0}, {2, 1}, {2, 2}}, alphabet, {0, 0, 1});
  RewardMachine rm{2, alphabet, {0.0, 1.0}, {0, 1, 1, 1}, {0, 1, 0, 0}};
};

double log_softmax(std::vector<double> q, std::size_t a, double alpha) {
  double z = 0.0;
  for (double v : q) z += std::exp(alpha * v);
  return alpha * q[a] - std::log(z);
}

QTable solve(const LabeledMdp& mdp, const RewardMachine& rm, double gamma) {
  return policy_iteration(build_product(mdp, rm).mdp(), gamma, 1e-12).q;
}

TEST(LogLikelihood, EmptyDemonstrationIsZero) {
  const QTable q{2, 2, {0.0, 1.0, 2.0, 3.0}, 0.9, 1e-9};
  EXPECT_EQ(log_likelihood({}, q, 50.0), 0.0);
}

TEST(LogLikelihood, UniformRow) {
  const QTable q{1, 4, {0.7, 0.7, 0.7, 0.7}, 0.9, 1e-9};
  const std::vector<JointStep> steps{{0, 2}};
  EXPECT_NEAR(log_likelihood(steps, q, 50.0), std::log(0.25), 1e-14);
}

TEST(LogLikelihood, HandSolvedChain) {
  const Chain c;
  const double gamma = 0.9;
  const double alpha = 3.0;
  // Q(0,y0) = [g, g^2], Q(1,y0) = [1, g], Q(2,y1) = [0, 0].
  const QTable q = solve(c.mdp, c.rm, gamma);
  ASSERT_NEAR(q(0, 0), gamma, 1e-9);
  ASSERT_NEAR(q(0, 1), gamma * gamma, 1e-9);
  ASSERT_NEAR(q(2, 0), 1.0, 1e-9);
  ASSERT_NEAR(q(2, 1), gamma, 1e-9);
  ASSERT_NEAR(q(5, 0), 0.0, 1e-9);

  Demonstration demo;
  demo.episodes.push_back({{0, 0}, {1, 1}, {1, 0}, {2, 0}});
  const auto projected = project_demonstration(demo, c.mdp, c.rm);
  const double expected = log_softmax({gamma, gamma * gamma}, 0, alpha) + log_softmax({1.0, gamma}, 1, alpha) +
                          log_softmax({1.0, gamma}, 0, alpha) + std::log(0.5);
  EXPECT_NEAR(log_likelihood(projected, q, alpha), expected, 1e-9);
}

TEST(LogLikelihood, MatchesProductOfBoltzmannProbabilities) {
  Rng rng(51);
  const Chain c;
  for (int trial = 0; trial < 20; ++trial) {
    const RewardMachine rm = random_valid_rm(2, c.alphabet, {0.0, 1.0}, rng);
    const QTable q = solve(c.mdp, rm, 0.95);
    const Demonstration demo = generate_demonstration(c.mdp, c.rm, 5.0, 4, 6, 0.95, rng);
    const auto projected = project_demonstration(demo, c.mdp, rm);
    double oracle = 0.0;
    for (const JointStep& s : projected) oracle += std::log(boltzmann_distribution(q.row(s.joint_state), 2.0)[s.action]);
    EXPECT_NEAR(log_likelihood(projected, q, 2.0), oracle, 1e-9);
  }
}

TEST(LogLikelihood, LargeAlphaStaysFinite) {
  const QTable q{1, 2, {40.0, 0.0}, 0.95, 1e-9};
  const std::vector<JointStep> steps{{0, 1}};
  EXPECT_NEAR(log_likelihood(steps, q, 50.0), -2000.0, 1e-9);
}

TEST(LogLikelihood, MissingQ) {
  const QTable q{1, 2, {0.0, 0.0}, 0.95, 1e-9};
  const std::vector<JointStep> steps{{3, 0}};
  try {
    log_likelihood(steps, q, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingQ);
  }
}

TEST(Acceptance, Examples) {
  EXPECT_EQ(acceptance_probability(0.0, 0.0, 10.0), 1.0);
  EXPECT_EQ(acceptance_probability(5.0, -1.0, 1.0), 1.0);
  EXPECT_NEAR(acceptance_probability(-300.0 * std::log(2.0), 0.0, 300.0), 0.5, 1e-12);
}

TEST(Acceptance, Monotone) {
  double last = 0.0;
  for (double dl = -50.0; dl <= 5.0; dl += 0.5) {
    const double p = acceptance_probability(dl, -0.3, 7.0);
    EXPECT_GE(p, last);
    last = p;
  }
  last = 0.0;
  for (double dp = -20.0; dp <= 2.0; dp += 0.25) {
    const double p = acceptance_probability(-3.0, dp, 7.0);
    EXPECT_GE(p, last);
    last = p;
  }
  last = 0.0;
  for (double t = 0.5; t < 1000.0; t *= 1.5) {
    const double p = acceptance_probability(-40.0, 0.0, t);
    EXPECT_GE(p, last);
    last = p;
  }
}

TEST(Acceptance, NonPositiveTemperature) {
  EXPECT_THROW(acceptance_probability(0.0, 0.0, 0.0), Error);
}

TEST(Score, LinearInInputs) {
  EXPECT_EQ(hypothesis_score(0.0, 0.0, 300.0), 0.0);
  const double a = hypothesis_score(-600.0, -2.0, 300.0);
  const double b = hypothesis_score(-900.0, -1.0, 300.0);
  EXPECT_NEAR(a - b, 300.0 / 300.0 - 1.0, 1e-12);
  EXPECT_NEAR(a, -4.0, 1e-12);
}

AnnealConfig recharge_schedule() {
  AnnealConfig c;
  c.temp_initial = 500000.0;
  c.temp_min = 200.0;
  c.temp_decay = 0.98;
  c.perturb_initial = 0.5;
  c.perturb_min = 1.0 / 16.0;
  c.perturb_decay = 0.99;
  c.decay_period = 5;
  return c;
}

TEST(Schedule, DecaysEveryKIterations) {
  const AnnealConfig c = recharge_schedule();
  Schedule s{c.temp_initial, c.perturb_initial};
  s = schedules_advance(s, 3, c);
  EXPECT_EQ(s.temperature, 500000.0);
  s = schedules_advance(s, 5, c);
  EXPECT_DOUBLE_EQ(s.temperature, 490000.0);
  EXPECT_DOUBLE_EQ(s.perturbance, 0.495);
}

TEST(Schedule, FloorsAtMinimum) {
  const AnnealConfig c = recharge_schedule();
  Schedule s{c.temp_min, c.perturb_min};
  for (std::size_t i = 1; i <= 100; ++i) {
    s = schedules_advance(s, i, c);
    EXPECT_EQ(s.temperature, c.temp_min);
    EXPECT_EQ(s.perturbance, c.perturb_min);
  }
}

TEST(Config, Validation) {
  AnnealConfig c;
  EXPECT_NO_THROW(c.validate());
  c.temp_decay = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = AnnealConfig{};
  c.reward_values = {1.0, 2.0};
  EXPECT_THROW(c.validate(), Error);
  c = AnnealConfig{};
  c.temp_min = c.temp_initial * 2.0;
  EXPECT_THROW(c.validate(), Error);
}

class AnnealRun : public ::testing::Test {
 protected:
  Chain c;
  Demonstration demo;
  AnnealConfig config;

  void SetUp() override {
    Rng rng(52);
    demo = generate_demonstration(c.mdp, c.rm, 50.0, 20, 6, 0.95, rng);
    config.iterations = 120;
    config.num_rm_states = 2;
    config.blank = BlankMode::Learned;
  }
};

TEST_F(AnnealRun, TraceShape) {
  Rng rng(1);
  const AnnealResult r = anneal(c.mdp, demo, config, rng);
  ASSERT_EQ(r.trace.records.size(), config.iterations);
  for (std::size_t i = 0; i < r.trace.records.size(); ++i) {
    EXPECT_EQ(r.trace.records[i].iteration, i + 1);
    if (i > 0) {
      EXPECT_GE(r.trace.records[i].best_score, r.trace.records[i - 1].best_score);
    }
  }
  EXPECT_TRUE(check_valid(r.best).valid());
}

TEST_F(AnnealRun, BestAttainsTraceMaximum) {
  Rng rng(2);
  const AnnealResult r = anneal(c.mdp, demo, config, rng);
  double trace_max = -INFINITY;
  for (const TraceRecord& rec : r.trace.records) {
    trace_max = std::max(trace_max, hypothesis_score(rec.log_likelihood, rec.log_prior, config.temp_min));
  }
  EXPECT_GE(r.best_score, trace_max);
  EXPECT_EQ(r.best_score, r.trace.records.back().best_score);
  const HypothesisEvaluator evaluator(c.mdp, demo, config);
  const auto s = evaluator.evaluate(r.best);
  EXPECT_EQ(hypothesis_score(s.log_likelihood, s.log_prior, config.temp_min), r.best_score);
}

TEST_F(AnnealRun, Reproducible) {
  Rng a(3), b(3);
  const AnnealResult ra = anneal(c.mdp, demo, config, a);
  const AnnealResult rb = anneal(c.mdp, demo, config, b);
  EXPECT_EQ(ra.best, rb.best);
  std::ostringstream ta, tb;
  write_trace_csv(ta, ra.trace);
  write_trace_csv(tb, rb.trace);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(ta.str().substr(0, ta.str().find('\n')), "iteration,loglik,logprior,temperature,perturbance,accepted,best_score");
}

TEST_F(AnnealRun, FindsTheTrueStructure) {
  Rng rng(4);
  config.iterations = 300;
  const AnnealResult r = anneal(c.mdp, demo, config, rng);
  const HypothesisEvaluator evaluator(c.mdp, demo, config);
  const auto truth = evaluator.evaluate(c.rm);
  EXPECT_GE(r.best_score, hypothesis_score(truth.log_likelihood, truth.log_prior, config.temp_min) - 1e-9);
}

TEST_F(AnnealRun, EmptyDemonstrationIsRejected) {
  Rng rng(5);
  EXPECT_THROW(anneal(c.mdp, Demonstration{}, config, rng), Error);
}

}  // namespace
}  // namespace rmirl
