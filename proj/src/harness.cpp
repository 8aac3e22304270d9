#include "rmirl/harness.hpp"

#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "rmirl/format.hpp"

namespace rmirl {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(Errc::InvalidArgument, "failed writing '" + path + "'");
}

std::string trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return std::string(text.substr(begin, end - begin + 1));
}

Rng stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0) {
  std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index)};
  return Rng(sequence);
}

enum Purpose : std::uint64_t { kDemoStream = 0, kChainStream = 1, kExpertStream = 2, kAgentStream = 3 };

}  // namespace

double parse_number(std::string_view text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) return parse_double(text);
  const double denominator = parse_double(text.substr(slash + 1));
  if (denominator == 0.0) throw Error(Errc::ParseError, "zero denominator in '" + std::string(text) + "'");
  return parse_double(text.substr(0, slash)) / denominator;
}

RunConfig default_config(std::string_view env) {
  RunConfig config;
  AnnealConfig& a = config.anneal;
  a.alpha = 50.0;
  a.prior = PriorParams{3.0 / 5.0, 3.0 / 4.0};
  a.gamma = 0.95;
  a.perturb_initial = 0.5;
  config.alpha_expert = a.alpha;
  config.eval_episodes = 100;
  config.chains = 3;
  if (env == "recharge") {
    config.env = "recharge";
    a.num_rm_states = 3;
    config.runs = 1000;
    config.ep_len = 25;
    a.iterations = 2000;
    a.temp_initial = 500000.0;
    a.temp_min = 200.0;
    a.temp_decay = 0.98;
    a.perturb_min = 1.0 / 16.0;
    a.perturb_decay = 0.99;
    a.decay_period = 5;
    a.reward_values = {0.0, 1.0};
  } else if (env == "coffee" || env.empty()) {
    config.env = std::string(env);
    a.num_rm_states = 3;
    config.runs = 100;
    config.ep_len = 100;
    a.iterations = 1000;
    a.temp_initial = 100000.0;
    a.temp_min = 300.0;
    a.temp_decay = 0.96;
    a.perturb_min = 1.0 / 12.0;
    a.perturb_decay = 0.99;
    a.decay_period = 5;
    a.reward_values = env.empty() ? std::vector<double>{} : std::vector<double>{0.0, 1.0};
  } else if (env == "multi_coffee") {
    config.env = "multi_coffee";
    a.num_rm_states = 4;
    config.runs = 300;
    config.ep_len = 100;
    a.iterations = 10000;
    a.temp_initial = 1000000.0;
    a.temp_min = 50.0;
    a.temp_decay = 0.99;
    a.perturb_min = 1.0 / 16.0;
    a.perturb_decay = 0.995;
    a.decay_period = 10;
    a.reward_values = {0.0, 1.0, 2.0};
  } else {
    throw UsageError("unknown environment '" + std::string(env) + "'");
  }
  return config;
}

Settings read_settings(std::istream& in) {
  Settings settings;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line);
    if (content.empty() || content[0] == '#') continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(number) + ": expected key=value");
    std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    settings.emplace_back(std::move(key), trim(std::string_view(content).substr(eq + 1)));
  }
  return settings;
}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::size_t to_count(const std::string& value) { return parse_size(value); }

bool to_flag(const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(Errc::ParseError, "expected true or false, got '" + value + "'");
}

std::vector<double> to_reward_list(const std::string& value) {
  std::vector<double> rewards;
  std::string_view rest = value;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    rewards.push_back(parse_number(trim(rest.substr(0, comma))));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return rewards;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"env", [](RunConfig& c, const std::string& v) { c.env = v; }},
      {"grid", [](RunConfig& c, const std::string& v) { c.grid_path = v; }},
      {"true-rm", [](RunConfig& c, const std::string& v) { c.true_rm_path = v; }},
      {"runs", [](RunConfig& c, const std::string& v) { c.runs = to_count(v); }},
      {"ep-len", [](RunConfig& c, const std::string& v) { c.ep_len = to_count(v); }},
      {"eval-episodes", [](RunConfig& c, const std::string& v) { c.eval_episodes = to_count(v); }},
      {"n", [](RunConfig& c, const std::string& v) { c.anneal.num_rm_states = to_count(v); }},
      {"iterations", [](RunConfig& c, const std::string& v) { c.anneal.iterations = to_count(v); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.anneal.alpha = parse_number(v); }},
      {"alpha-expert", [](RunConfig& c, const std::string& v) { c.alpha_expert = parse_number(v); }},
      {"gamma", [](RunConfig& c, const std::string& v) { c.anneal.gamma = parse_number(v); }},
      {"t0", [](RunConfig& c, const std::string& v) { c.anneal.temp_initial = parse_number(v); }},
      {"t-min", [](RunConfig& c, const std::string& v) { c.anneal.temp_min = parse_number(v); }},
      {"beta-t", [](RunConfig& c, const std::string& v) { c.anneal.temp_decay = parse_number(v); }},
      {"p0", [](RunConfig& c, const std::string& v) { c.anneal.perturb_initial = parse_number(v); }},
      {"p-min", [](RunConfig& c, const std::string& v) { c.anneal.perturb_min = parse_number(v); }},
      {"beta-p", [](RunConfig& c, const std::string& v) { c.anneal.perturb_decay = parse_number(v); }},
      {"k", [](RunConfig& c, const std::string& v) { c.anneal.decay_period = to_count(v); }},
      {"pt", [](RunConfig& c, const std::string& v) { c.anneal.prior.self_transition = parse_number(v); }},
      {"pr", [](RunConfig& c, const std::string& v) { c.anneal.prior.zero_reward = parse_number(v); }},
      {"rewards", [](RunConfig& c, const std::string& v) { c.anneal.reward_values = to_reward_list(v); }},
      {"learn-blank",
       [](RunConfig& c, const std::string& v) {
         c.anneal.blank = to_flag(v) ? BlankMode::Learned : BlankMode::Fixed;
       }},
      {"chains", [](RunConfig& c, const std::string& v) { c.chains = to_count(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_size(v); }},
      {"out", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"demo", [](RunConfig& c, const std::string& v) { c.demo_path = v; }},
      {"rm", [](RunConfig& c, const std::string& v) { c.rm_path = v; }},
  };
  return table;
}

}  // namespace

RunConfig resolve_config(const Settings& settings) {
  std::string env;
  std::string grid;
  for (const auto& [key, value] : settings) {
    if (key == "env") env = value;
    if (key == "grid") grid = value;
  }
  if (env.empty() && grid.empty()) throw UsageError("one of --env or --grid is required");
  if (!env.empty() && !grid.empty()) throw UsageError("--env and --grid are mutually exclusive");

  RunConfig config = default_config(env);
  for (const auto& [key, value] : settings) {
    auto it = setters().find(key);
    if (it == setters().end()) throw UsageError("unknown setting '" + key + "'");
    try {
      it->second(config, value);
    } catch (const Error& e) {
      throw UsageError("--" + key + ": " + e.what());
    }
  }

  AnnealConfig check = config.anneal;
  if (check.reward_values.empty()) check.reward_values = {0.0, 1.0};
  try {
    check.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (config.runs == 0 || config.ep_len == 0 || config.eval_episodes == 0 || config.chains == 0) {
    throw UsageError("runs, ep-len, eval-episodes and chains must be positive");
  }
  if (!(config.alpha_expert >= 0.0)) throw UsageError("alpha-expert must be non-negative");
  return config;
}

Settings effective_settings(const RunConfig& c) {
  const AnnealConfig& a = c.anneal;
  Settings s;
  if (!c.env.empty()) s.emplace_back("env", c.env);
  if (!c.grid_path.empty()) s.emplace_back("grid", c.grid_path);
  if (!c.true_rm_path.empty()) s.emplace_back("true-rm", c.true_rm_path);
  s.emplace_back("runs", std::to_string(c.runs));
  s.emplace_back("ep-len", std::to_string(c.ep_len));
  s.emplace_back("eval-episodes", std::to_string(c.eval_episodes));
  s.emplace_back("n", std::to_string(a.num_rm_states));
  s.emplace_back("iterations", std::to_string(a.iterations));
  s.emplace_back("alpha", format_double(a.alpha));
  s.emplace_back("alpha-expert", format_double(c.alpha_expert));
  s.emplace_back("gamma", format_double(a.gamma));
  s.emplace_back("t0", format_double(a.temp_initial));
  s.emplace_back("t-min", format_double(a.temp_min));
  s.emplace_back("beta-t", format_double(a.temp_decay));
  s.emplace_back("p0", format_double(a.perturb_initial));
  s.emplace_back("p-min", format_double(a.perturb_min));
  s.emplace_back("beta-p", format_double(a.perturb_decay));
  s.emplace_back("k", std::to_string(a.decay_period));
  s.emplace_back("pt", format_double(a.prior.self_transition));
  s.emplace_back("pr", format_double(a.prior.zero_reward));
  if (!a.reward_values.empty()) {
    std::string rewards;
    for (std::size_t i = 0; i < a.reward_values.size(); ++i) rewards += (i ? "," : "") + format_double(a.reward_values[i]);
    s.emplace_back("rewards", rewards);
  }
  s.emplace_back("learn-blank", a.blank == BlankMode::Learned ? "true" : "false");
  s.emplace_back("chains", std::to_string(c.chains));
  s.emplace_back("seed", std::to_string(c.seed));
  s.emplace_back("out", c.out_dir);
  return s;
}

Problem load_problem(const RunConfig& config) {
  if (!config.env.empty()) {
    Environment env = make_env(config.env);
    std::vector<double> rewards =
        config.anneal.reward_values.empty() ? env.true_rm.reward_values() : config.anneal.reward_values;
    return Problem{env.name, std::move(env.mdp), std::move(env.true_rm), std::move(rewards)};
  }
  GridSpec grid = parse_grid(read_file(config.grid_path));
  LabeledMdp mdp = compile_grid(grid);
  std::optional<RewardMachine> true_rm;
  if (!config.true_rm_path.empty()) {
    true_rm = parse_rm(read_file(config.true_rm_path));
    if (!(true_rm->alphabet() == mdp.alphabet())) {
      throw Error(Errc::AlphabetMismatch, "true reward machine alphabet differs from the grid's");
    }
  }
  std::vector<double> rewards = config.anneal.reward_values;
  if (rewards.empty()) {
    if (!true_rm) throw UsageError("--rewards is required when no --true-rm is given");
    rewards = true_rm->reward_values();
  }
  return Problem{config.grid_path, std::move(mdp), std::move(true_rm), std::move(rewards)};
}

InferenceResult infer_reward_machine(const LabeledMdp& mdp, const Demonstration& demo, const AnnealConfig& config,
                                     std::size_t chains, bool parallel) {
  if (chains == 0) throw Error(Errc::InvalidArgument, "need at least one chain");
  std::vector<std::optional<AnnealResult>> results(chains);
  std::vector<std::exception_ptr> failures(chains);
  auto run_chain = [&](std::size_t c) {
    try {
      Rng rng = stream(config.seed, kChainStream, c);
      results[c] = anneal(mdp, demo, config, rng);
    } catch (...) {
      failures[c] = std::current_exception();
    }
  };
  if (parallel && chains > 1) {
    std::vector<std::thread> workers;
    for (std::size_t c = 0; c < chains; ++c) workers.emplace_back(run_chain, c);
    for (auto& worker : workers) worker.join();
  } else {
    for (std::size_t c = 0; c < chains; ++c) run_chain(c);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  InferenceResult inference;
  for (auto& result : results) inference.chains.push_back(std::move(*result));
  for (std::size_t c = 1; c < chains; ++c) {
    if (inference.chains[c].best_score > inference.chains[inference.best_chain].best_score) inference.best_chain = c;
  }
  return inference;
}

double trace_return(const RewardMachine& rm, std::span<const Symbol> trace) {
  RmState state = RewardMachine::kInitial;
  double total = 0.0;
  for (Symbol symbol : trace) {
    const RmStep step = rm_step(rm, state, symbol);
    total += step.reward;
    state = step.state;
  }
  return total;
}

std::string export_dot(const RewardMachine& rm) {
  auto quote = [](const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  const ValidityReport validity = check_valid(rm);
  std::vector<bool> reachable(rm.num_states(), true);
  for (RmState s : validity.unreachable) reachable[s] = false;

  std::ostringstream out;
  out << "digraph reward_machine {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle];\n";
  out << "  start [shape=point];\n";
  for (RmState y = 0; y < rm.num_states(); ++y) {
    if (reachable[y]) out << "  y" << y << (y == RewardMachine::kInitial ? " [shape=doublecircle]" : "") << ";\n";
  }
  out << "  start -> y" << RewardMachine::kInitial << ";\n";
  for (RmState y = 0; y < rm.num_states(); ++y) {
    if (!reachable[y]) continue;
    std::vector<bool> emitted(rm.num_symbols(), false);
    for (Symbol first = 0; first < rm.num_symbols(); ++first) {
      if (emitted[first]) continue;
      const RmState target = rm.next(y, first);
      const std::size_t reward = rm.reward_index(y, first);
      std::vector<Symbol> group;
      for (Symbol s = first; s < rm.num_symbols(); ++s) {
        if (!emitted[s] && rm.next(y, s) == target && rm.reward_index(y, s) == reward) {
          group.push_back(s);
          emitted[s] = true;
        }
      }
      std::string label;
      if (group.size() < rm.num_symbols()) {
        for (std::size_t i = 0; i < group.size(); ++i) label += (i ? " ∨ " : "") + rm.alphabet().name(group[i]);
        label += " | ";
      }
      label += format_double(rm.reward_values()[reward]);
      out << "  y" << y << " -> y" << target << " [label=" << quote(label) << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

StagePaths stage_paths(const RunConfig& config) {
  const std::filesystem::path dir(config.out_dir);
  StagePaths paths;
  paths.demo = config.demo_path.empty() ? (dir / "demo.txt").string() : config.demo_path;
  paths.rm = config.rm_path.empty() ? (dir / "rm.json").string() : config.rm_path;
  paths.report = (dir / "report.txt").string();
  paths.dot = (dir / "rm.dot").string();
  paths.summary = (dir / "summary.txt").string();
  for (std::size_t c = 0; c < config.chains; ++c) {
    paths.traces.push_back((dir / ("trace_chain" + std::to_string(c + 1) + ".csv")).string());
  }
  return paths;
}

namespace {

const RewardMachine& require_true_rm(const Problem& problem) {
  if (!problem.true_rm) throw UsageError("this command needs the true reward machine (--true-rm)");
  return *problem.true_rm;
}

AnnealConfig chain_config(const RunConfig& config, const Problem& problem) {
  AnnealConfig anneal = config.anneal;
  anneal.reward_values = problem.reward_values;
  anneal.seed = config.seed;
  return anneal;
}

}  // namespace

std::size_t cmd_demo(const RunConfig& config, std::ostream& log) {
  const Problem problem = load_problem(config);
  const RewardMachine& truth = require_true_rm(problem);
  Rng rng = stream(config.seed, kDemoStream);
  const Demonstration demo = generate_demonstration(problem.mdp, truth, config.alpha_expert, config.runs,
                                                    config.ep_len, config.anneal.gamma, rng);
  std::ostringstream text;
  write_demonstration(text, demo);
  const StagePaths paths = stage_paths(config);
  write_file(paths.demo, text.str());
  log << "triples=" << demo.size() << " (" << paths.demo << ")\n";
  return demo.size();
}

InferenceResult cmd_infer(const RunConfig& config, std::ostream& log) {
  const Problem problem = load_problem(config);
  const StagePaths paths = stage_paths(config);
  std::istringstream demo_text(read_file(paths.demo));
  const Demonstration demo = read_demonstration(demo_text);
  check_demonstration(demo, problem.mdp);

  InferenceResult inference = infer_reward_machine(problem.mdp, demo, chain_config(config, problem), config.chains);
  const std::string rm_path = config.rm_path.empty() ? paths.rm : config.rm_path;
  write_file(rm_path, format_rm(inference.best().best));
  for (std::size_t c = 0; c < inference.chains.size(); ++c) {
    std::ostringstream csv;
    write_trace_csv(csv, inference.chains[c].trace);
    write_file(paths.traces[c], csv.str());
    log << "chain " << c + 1 << " best_score=" << format_double(inference.chains[c].best_score) << "\n";
  }
  log << "best_score=" << format_double(inference.best().best_score) << " (chain " << inference.best_chain + 1
      << ", " << rm_path << ")\n";
  return inference;
}

EvalReport cmd_eval(const RunConfig& config, std::ostream& log) {
  const Problem problem = load_problem(config);
  const RewardMachine& truth = require_true_rm(problem);
  const StagePaths paths = stage_paths(config);
  const RewardMachine inferred = parse_rm(read_file(paths.rm));

  Rng expert_rng = stream(config.seed, kExpertStream);
  Rng agent_rng = stream(config.seed, kAgentStream);
  const ReturnEstimate agent =
      evaluate_agent(problem.mdp, truth, inferred, config.eval_episodes, config.ep_len, config.anneal.gamma, agent_rng);
  const ReturnEstimate expert = expert_baseline(problem.mdp, truth, config.alpha_expert, config.eval_episodes,
                                                config.ep_len, config.anneal.gamma, expert_rng);
  const EvalReport report{expert.average_return, agent.average_return, config.eval_episodes, config.ep_len};
  const std::string text = format_report(report);
  write_file(paths.report, text);
  log << text;
  return report;
}

std::string cmd_export_dot(const RunConfig& config, std::ostream& out) {
  const RewardMachine rm = parse_rm(read_file(stage_paths(config).rm));
  const std::string dot = export_dot(rm);
  out << dot;
  return dot;
}

PipelineResult cmd_pipeline(const RunConfig& config, std::ostream& log) {
  PipelineResult result;
  result.triples = cmd_demo(config, log);
  result.inference = cmd_infer(config, log);
  result.report = cmd_eval(config, log);

  const StagePaths paths = stage_paths(config);
  write_file(paths.dot, export_dot(result.inference.best().best));

  const AnnealConfig& a = config.anneal;
  std::ostringstream summary;
  summary << "# results\n";
  summary << "environment=" << (config.env.empty() ? config.grid_path : config.env) << "\n";
  summary << "n=" << a.num_rm_states << "\n";
  summary << "runs=" << config.runs << "\n";
  summary << "ep_len=" << config.ep_len << "\n";
  summary << "N=" << a.iterations << "\n";
  summary << "T0=" << format_double(a.temp_initial) << "\n";
  summary << "T_min=" << format_double(a.temp_min) << "\n";
  summary << "beta_T=" << format_double(a.temp_decay) << "\n";
  summary << "p0=" << format_double(a.perturb_initial) << "\n";
  summary << "p_min=" << format_double(a.perturb_min) << "\n";
  summary << "beta_p=" << format_double(a.perturb_decay) << "\n";
  summary << "k=" << a.decay_period << "\n";
  summary << "r_e=" << format_double(result.report.expert_avg_return) << "\n";
  summary << "r_a=" << format_double(result.report.agent_avg_return) << "\n";
  summary << "best_chain=" << result.inference.best_chain + 1 << "\n";
  summary << "best_score=" << format_double(result.inference.best().best_score) << "\n";
  summary << "# effective config\n";
  for (const auto& [key, value] : effective_settings(config)) summary << key << "=" << value << "\n";
  write_file(paths.summary, summary.str());
  log << "summary: " << paths.summary << "\n";
  return result;
}

}  // namespace rmirl
