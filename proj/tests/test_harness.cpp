#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rmirl/harness.hpp"
#include "support.hpp"

namespace rmirl {
namespace {

Settings settings(std::initializer_list<std::pair<std::string, std::string>> items) { return Settings(items); }

TEST(Defaults, ExperimentTable) {
  const RunConfig r = default_config("recharge");
  EXPECT_EQ(r.anneal.num_rm_states, 3u);
  EXPECT_EQ(r.runs, 1000u);
  EXPECT_EQ(r.ep_len, 25u);
  EXPECT_EQ(r.anneal.iterations, 2000u);
  EXPECT_EQ(r.anneal.temp_initial, 500000.0);
  EXPECT_EQ(r.anneal.temp_min, 200.0);
  EXPECT_EQ(r.anneal.temp_decay, 0.98);
  EXPECT_EQ(r.anneal.perturb_min, 1.0 / 16.0);
  EXPECT_EQ(r.anneal.perturb_decay, 0.99);
  EXPECT_EQ(r.anneal.decay_period, 5u);

  const RunConfig c = default_config("coffee");
  EXPECT_EQ(c.runs, 100u);
  EXPECT_EQ(c.ep_len, 100u);
  EXPECT_EQ(c.anneal.iterations, 1000u);
  EXPECT_EQ(c.anneal.temp_initial, 100000.0);
  EXPECT_EQ(c.anneal.temp_min, 300.0);
  EXPECT_EQ(c.anneal.temp_decay, 0.96);
  EXPECT_EQ(c.anneal.perturb_min, 1.0 / 12.0);

  const RunConfig m = default_config("multi_coffee");
  EXPECT_EQ(m.anneal.num_rm_states, 4u);
  EXPECT_EQ(m.runs, 300u);
  EXPECT_EQ(m.anneal.iterations, 10000u);
  EXPECT_EQ(m.anneal.temp_initial, 1000000.0);
  EXPECT_EQ(m.anneal.temp_min, 50.0);
  EXPECT_EQ(m.anneal.temp_decay, 0.99);
  EXPECT_EQ(m.anneal.perturb_decay, 0.995);
  EXPECT_EQ(m.anneal.decay_period, 10u);
  EXPECT_EQ(m.anneal.reward_values, (std::vector<double>{0.0, 1.0, 2.0}));

  for (const RunConfig* cfg : {&r, &c, &m}) {
    EXPECT_EQ(cfg->anneal.alpha, 50.0);
    EXPECT_EQ(cfg->anneal.prior.self_transition, 0.6);
    EXPECT_EQ(cfg->anneal.prior.zero_reward, 0.75);
    EXPECT_EQ(cfg->anneal.perturb_initial, 0.5);
    EXPECT_EQ(cfg->chains, 3u);
    EXPECT_EQ(cfg->eval_episodes, 100u);
    EXPECT_EQ(cfg->anneal.gamma, 0.95);
  }
  EXPECT_THROW(default_config("office"), UsageError);
}

TEST(ParseNumber, DecimalsAndFractions) {
  EXPECT_EQ(parse_number("0.25"), 0.25);
  EXPECT_EQ(parse_number("1/12"), 1.0 / 12.0);
  EXPECT_EQ(parse_number("5e5"), 500000.0);
  EXPECT_THROW(parse_number("1/0"), Error);
  EXPECT_THROW(parse_number("abc"), Error);
}

TEST(Settings, ReadsKeyValueLines) {
  std::istringstream in("# comment\n\nenv = coffee\n--iterations=50\np-min=1/8\n");
  const Settings s = read_settings(in);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (std::pair<std::string, std::string>{"env", "coffee"}));
  EXPECT_EQ(s[1].first, "iterations");
  const RunConfig c = resolve_config(s);
  EXPECT_EQ(c.anneal.iterations, 50u);
  EXPECT_EQ(c.anneal.perturb_min, 0.125);
  EXPECT_EQ(c.runs, 100u);

  std::istringstream bad("env coffee\n");
  EXPECT_THROW(read_settings(bad), UsageError);
}

TEST(Settings, LaterValuesWin) {
  const RunConfig c = resolve_config(settings({{"env", "recharge"}, {"runs", "5"}, {"runs", "7"}}));
  EXPECT_EQ(c.runs, 7u);
  EXPECT_EQ(c.ep_len, 25u);
}

TEST(Settings, UsageErrors) {
  EXPECT_THROW(resolve_config(settings({})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"grid", "x.grid"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "office"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"colour", "red"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"runs", "many"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"runs", "0"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"beta-t", "1.5"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"rewards", "1,2"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"learn-blank", "maybe"}})), UsageError);
  EXPECT_THROW(resolve_config(settings({{"env", "coffee"}, {"alpha-expert", "-1"}})), UsageError);
}

TEST(Settings, EffectiveSettingsRoundTrip) {
  const RunConfig c = resolve_config(settings(
      {{"env", "multi_coffee"}, {"seed", "9"}, {"p-min", "1/7"}, {"learn-blank", "true"}, {"out", "o"}}));
  const Settings echoed = effective_settings(c);
  const RunConfig back = resolve_config(echoed);
  EXPECT_EQ(effective_settings(back), echoed);
  EXPECT_EQ(back.anneal.perturb_min, 1.0 / 7.0);
  EXPECT_EQ(back.anneal.blank, BlankMode::Learned);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.anneal.reward_values, c.anneal.reward_values);
}

TEST(LoadProblem, EnvAndGrid) {
  const Problem p = load_problem(default_config("coffee"));
  ASSERT_TRUE(p.true_rm.has_value());
  EXPECT_EQ(p.reward_values, (std::vector<double>{0.0, 1.0}));

  const auto dir = std::filesystem::temp_directory_path() / "rmirl_harness_test";
  std::filesystem::create_directories(dir);
  const auto grid = (dir / "g.grid").string();
  std::ofstream(grid) << "slip=0 legend=c:c,o:o,*:*\nS.c\n*.o\n";
  EXPECT_THROW(load_problem(resolve_config(settings({{"grid", grid}}))), UsageError);
  const Problem custom = load_problem(resolve_config(settings({{"grid", grid}, {"rewards", "0,1"}})));
  EXPECT_EQ(custom.mdp.num_states(), 6u);
  EXPECT_FALSE(custom.true_rm.has_value());

  const auto rm = (dir / "rm.json").string();
  std::ofstream(rm) << format_rm(testing::coffee_rm());
  const Problem with_truth = load_problem(resolve_config(settings({{"grid", grid}, {"true-rm", rm}})));
  EXPECT_EQ(with_truth.reward_values, (std::vector<double>{0.0, 1.0}));

  const auto other = (dir / "other.grid").string();
  std::ofstream(other) << "slip=0 legend=c:c\nS.c\n";
  try {
    load_problem(resolve_config(settings({{"grid", other}, {"true-rm", rm}})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AlphabetMismatch);
  }
  EXPECT_THROW(load_problem(resolve_config(settings({{"grid", (dir / "missing.grid").string()}, {"rewards", "0,1"}}))),
               UsageError);
  std::filesystem::remove_all(dir);
}

TEST(ExportDot, CoffeeMachine) {
  const std::string dot = export_dot(testing::coffee_rm());
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("start -> y0;"), std::string::npos);
  EXPECT_NE(dot.find("y0 [shape=doublecircle]"), std::string::npos);
  EXPECT_NE(dot.find("y1 -> y2 [label=\"o | 1\"]"), std::string::npos);
  EXPECT_NE(dot.find("y0 -> y0 [label=\"eps ∨ o | 0\"]"), std::string::npos);
  EXPECT_NE(dot.find("y2 -> y2 [label=\"0\"]"), std::string::npos);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '{'), std::count(dot.begin(), dot.end(), '}'));
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '"') % 2, 0);
}

TEST(ExportDot, SkipsUnreachableStates) {
  const Alphabet a({"eps", "g"});
  const RewardMachine rm(3, a, {0.0, 1.0}, {0, 1, 1, 1, 2, 2}, {0, 1, 0, 0, 0, 0});
  const std::string dot = export_dot(rm);
  EXPECT_EQ(dot.find("y2"), std::string::npos);
  EXPECT_NE(dot.find("y0 -> y1 [label=\"g | 1\"]"), std::string::npos);
}

TEST(Inference, BestChainHasHighestScore) {
  const Environment env = make_env("coffee");
  Rng rng(71);
  const Demonstration demo = generate_demonstration(env.mdp, env.true_rm, 50.0, 10, 30, 0.95, rng);
  AnnealConfig config;
  config.iterations = 15;
  config.seed = 3;
  const InferenceResult parallel = infer_reward_machine(env.mdp, demo, config, 3, true);
  const InferenceResult sequential = infer_reward_machine(env.mdp, demo, config, 3, false);
  ASSERT_EQ(parallel.chains.size(), 3u);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(parallel.chains[c].best, sequential.chains[c].best);
    EXPECT_LE(parallel.chains[c].best_score, parallel.best().best_score);
  }
  EXPECT_EQ(parallel.best_chain, sequential.best_chain);
}

TEST(StagePaths, Layout) {
  RunConfig c = default_config("coffee");
  c.out_dir = "res";
  const StagePaths p = stage_paths(c);
  EXPECT_EQ(p.rm, (std::filesystem::path("res") / "rm.json").string());
  ASSERT_EQ(p.traces.size(), 3u);
  EXPECT_EQ(p.traces[0], (std::filesystem::path("res") / "trace_chain1.csv").string());
  c.demo_path = "elsewhere.txt";
  EXPECT_EQ(stage_paths(c).demo, "elsewhere.txt");
}

}  // namespace
}  // namespace rmirl
