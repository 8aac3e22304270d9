#include "rmirl/reward_machine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "rmirl/error.hpp"
#include "rmirl/format.hpp"

namespace rmirl {

RewardMachine::RewardMachine(std::size_t num_states, Alphabet alphabet,
                             std::vector<double> reward_values, std::vector<RmState> transitions,
                             std::vector<std::size_t> reward_indices)
    : num_states_(num_states),
      alphabet_(std::move(alphabet)),
      reward_values_(std::move(reward_values)),
      zero_index_(0),
      transitions_(std::move(transitions)),
      reward_indices_(std::move(reward_indices)) {
  if (num_states_ == 0) throw Error(Errc::InvalidArgument, "reward machine needs at least one state");
  if (alphabet_.size() == 0) throw Error(Errc::InvalidArgument, "reward machine needs a non-empty alphabet");
  if (reward_values_.size() < 2) throw Error(Errc::InvalidArgument, "reward set must have at least two values");
  for (std::size_t i = 0; i < reward_values_.size(); ++i) {
    if (!std::isfinite(reward_values_[i])) throw Error(Errc::InvalidArgument, "non-finite reward value");
    for (std::size_t j = 0; j < i; ++j) {
      if (reward_values_[i] == reward_values_[j]) throw Error(Errc::InvalidArgument, "duplicate reward value");
    }
  }
  auto zero = std::find(reward_values_.begin(), reward_values_.end(), 0.0);
  if (zero == reward_values_.end()) throw Error(Errc::InvalidArgument, "reward set must contain 0");
  zero_index_ = static_cast<std::size_t>(zero - reward_values_.begin());

  const std::size_t entries = num_states_ * alphabet_.size();
  if (transitions_.size() != entries || reward_indices_.size() != entries) {
    throw Error(Errc::InvalidArgument, "transition/reward matrices must be n x m");
  }
  for (RmState target : transitions_) {
    if (target >= num_states_) throw Error(Errc::BadState, "transition target " + std::to_string(target) + " out of range");
  }
  for (std::size_t index : reward_indices_) {
    if (index >= reward_values_.size()) throw Error(Errc::InvalidArgument, "reward index out of range");
  }
}

RmStep rm_step(const RewardMachine& rm, RmState state, Symbol symbol) {
  if (state >= rm.num_states()) throw Error(Errc::BadState, "state " + std::to_string(state) + " out of range");
  if (symbol >= rm.num_symbols()) throw Error(Errc::UnknownSymbol, "symbol " + std::to_string(symbol) + " out of range");
  return {rm.next(state, symbol), rm.reward(state, symbol)};
}

RmState run_trace(const RewardMachine& rm, RmState from, std::span<const Symbol> trace) {
  RmState state = from;
  for (Symbol symbol : trace) state = rm_step(rm, state, symbol).state;
  return state;
}

RmState run_trace(const RewardMachine& rm, std::span<const Symbol> trace) {
  return run_trace(rm, RewardMachine::kInitial, trace);
}

namespace {

// Discovery order of states reachable from the initial state.
std::vector<RmState> bfs_order(const RewardMachine& rm) {
  std::vector<bool> seen(rm.num_states(), false);
  std::vector<RmState> order;
  std::deque<RmState> frontier{RewardMachine::kInitial};
  seen[RewardMachine::kInitial] = true;
  while (!frontier.empty()) {
    RmState state = frontier.front();
    frontier.pop_front();
    order.push_back(state);
    for (Symbol symbol = 0; symbol < rm.num_symbols(); ++symbol) {
      RmState target = rm.next(state, symbol);
      if (!seen[target]) {
        seen[target] = true;
        frontier.push_back(target);
      }
    }
  }
  return order;
}

std::size_t uniform_index(std::size_t count, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

// Uniform over {0..count-1} \ {current}; requires count >= 2.
std::size_t uniform_other(std::size_t count, std::size_t current, Rng& rng) {
  std::size_t value = uniform_index(count - 1, rng);
  return value >= current ? value + 1 : value;
}

}  // namespace

ValidityReport check_valid(const RewardMachine& rm) {
  ValidityReport report;
  std::vector<RmState> order = bfs_order(rm);
  if (order.size() < rm.num_states()) {
    std::vector<bool> seen(rm.num_states(), false);
    for (RmState state : order) seen[state] = true;
    for (RmState state = 0; state < rm.num_states(); ++state) {
      if (!seen[state]) report.unreachable.push_back(state);
    }
    report.status = Validity::Unreachable;
    return report;
  }
  const auto rewards = rm.reward_indices();
  const bool trivial = std::all_of(rewards.begin(), rewards.end(),
                                   [&](std::size_t index) { return index == rm.zero_reward_index(); });
  if (trivial) report.status = Validity::Trivial;
  return report;
}

namespace {

// Entry e (over t or r) is frozen when it belongs to the blank column.
std::optional<Symbol> frozen_column(const Alphabet& alphabet, BlankMode blank) {
  if (blank == BlankMode::Learned) return std::nullopt;
  return alphabet.find(Alphabet::kBlank);
}

void pin_blank(std::vector<RmState>& transitions, std::vector<std::size_t>& rewards, std::size_t num_states,
               std::size_t num_symbols, Symbol blank, std::size_t zero_index) {
  for (RmState y = 0; y < num_states; ++y) {
    transitions[y * num_symbols + blank] = y;
    rewards[y * num_symbols + blank] = zero_index;
  }
}

}  // namespace

RewardMachine random_valid_rm(std::size_t num_states, const Alphabet& alphabet,
                              const std::vector<double>& reward_values, Rng& rng, BlankMode blank) {
  if (num_states == 0) throw Error(Errc::InvalidArgument, "need at least one state");
  const std::size_t entries = num_states * alphabet.size();
  const auto frozen = frozen_column(alphabet, blank);
  const auto zero = std::find(reward_values.begin(), reward_values.end(), 0.0);
  for (std::size_t attempt = 0; attempt < kResampleLimit; ++attempt) {
    std::vector<RmState> transitions(entries);
    std::vector<std::size_t> rewards(entries);
    for (auto& target : transitions) target = uniform_index(num_states, rng);
    for (auto& index : rewards) index = uniform_index(reward_values.size(), rng);
    if (frozen && zero != reward_values.end()) {
      pin_blank(transitions, rewards, num_states, alphabet.size(), *frozen,
                static_cast<std::size_t>(zero - reward_values.begin()));
    }
    RewardMachine candidate(num_states, alphabet, reward_values, std::move(transitions), std::move(rewards));
    if (check_valid(candidate).valid()) return candidate;
  }
  throw Error(Errc::ResampleLimitExceeded, "no valid random reward machine after " +
                                               std::to_string(kResampleLimit) + " draws");
}

RewardMachine perturb_entries(const RewardMachine& rm, double p, Rng& rng, BlankMode blank) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidArgument, "perturbance probability must lie in [0, 1]");
  const std::size_t entries = rm.num_entries();
  const std::size_t n = rm.num_states();
  const std::size_t m = rm.num_symbols();
  const std::size_t g = rm.reward_values().size();
  std::vector<RmState> transitions(rm.transitions().begin(), rm.transitions().end());
  std::vector<std::size_t> rewards(rm.reward_indices().begin(), rm.reward_indices().end());

  // Entries [0, nm) address t, [nm, 2nm) address r.
  const auto frozen = frozen_column(rm.alphabet(), blank);
  std::vector<std::size_t> mutable_entries;
  for (std::size_t entry = 0; entry < 2 * entries; ++entry) {
    if (entry < entries && n < 2) continue;
    if (frozen && (entry % entries) % m == *frozen) continue;
    mutable_entries.push_back(entry);
  }
  if (mutable_entries.empty()) throw Error(Errc::DegenerateSpace, "no entry of the reward machine can change");

  auto change = [&](std::size_t entry) {
    if (entry < entries) {
      transitions[entry] = uniform_other(n, transitions[entry], rng);
    } else {
      rewards[entry - entries] = uniform_other(g, rewards[entry - entries], rng);
    }
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t changed = 0;
  for (std::size_t entry : mutable_entries) {
    if (unit(rng) < p) {
      change(entry);
      ++changed;
    }
  }
  if (changed == 0) change(mutable_entries[uniform_index(mutable_entries.size(), rng)]);
  return RewardMachine(n, rm.alphabet(), rm.reward_values(), std::move(transitions), std::move(rewards));
}

RewardMachine propose_neighbor(const RewardMachine& rm, double p, Rng& rng, BlankMode blank) {
  for (std::size_t attempt = 0; attempt < kResampleLimit; ++attempt) {
    RewardMachine candidate = perturb_entries(rm, p, rng, blank);
    if (check_valid(candidate).valid()) return candidate;
  }
  throw Error(Errc::ResampleLimitExceeded, "no valid neighbor after " + std::to_string(kResampleLimit) + " draws");
}

std::string canonicalize(const RewardMachine& rm) {
  const std::vector<RmState> order = bfs_order(rm);
  std::vector<std::size_t> relabel(rm.num_states(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) relabel[order[i]] = i;

  std::string out = "n=" + std::to_string(order.size()) + ";t=";
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Symbol symbol = 0; symbol < rm.num_symbols(); ++symbol) {
      if (i != 0 || symbol != 0) out += ',';
      out += std::to_string(relabel[rm.next(order[i], symbol)]);
    }
  }
  out += ";r=";
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Symbol symbol = 0; symbol < rm.num_symbols(); ++symbol) {
      if (i != 0 || symbol != 0) out += ',';
      out += format_double(rm.reward(order[i], symbol));
    }
  }
  return out;
}

namespace {

std::vector<std::string> split(std::string_view text, char separator) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = text.find(separator, begin);
    parts.emplace_back(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

std::string_view strip_key(std::string_view field, std::string_view key) {
  if (field.substr(0, key.size()) != key) throw Error(Errc::ParseError, "expected field '" + std::string(key) + "'");
  return field.substr(key.size());
}

}  // namespace

RewardMachine decode_canonical(std::string_view encoding, const Alphabet& alphabet,
                               const std::vector<double>& reward_values) {
  const auto fields = split(encoding, ';');
  if (fields.size() != 3) throw Error(Errc::ParseError, "canonical encoding needs n, t and r fields");
  const std::size_t n = parse_size(strip_key(fields[0], "n="));
  const auto t_items = split(strip_key(fields[1], "t="), ',');
  const auto r_items = split(strip_key(fields[2], "r="), ',');
  const std::size_t entries = n * alphabet.size();
  if (t_items.size() != entries || r_items.size() != entries) {
    throw Error(Errc::ParseError, "canonical encoding has the wrong number of entries");
  }
  std::vector<RmState> transitions(entries);
  std::vector<std::size_t> rewards(entries);
  for (std::size_t i = 0; i < entries; ++i) {
    transitions[i] = parse_size(t_items[i]);
    const double value = parse_double(r_items[i]);
    auto it = std::find(reward_values.begin(), reward_values.end(), value);
    if (it == reward_values.end()) throw Error(Errc::ParseError, "reward " + r_items[i] + " not in reward set");
    rewards[i] = static_cast<std::size_t>(it - reward_values.begin());
  }
  return RewardMachine(n, alphabet, reward_values, std::move(transitions), std::move(rewards));
}

double log_prior_unnormalized(const RewardMachine& rm, const PriorParams& prior) {
  const double p_t = prior.self_transition;
  const double p_r = prior.zero_reward;
  if (!(p_t > 0.0 && p_t < 1.0) || !(p_r > 0.0 && p_r < 1.0)) {
    throw Error(Errc::InvalidArgument, "prior probabilities must lie strictly between 0 and 1");
  }
  const std::size_t n = rm.num_states();
  const std::size_t m = rm.num_symbols();
  const auto g = static_cast<double>(rm.reward_values().size());
  const auto entries = static_cast<double>(n * m);

  std::size_t zero_rewards = 0;
  std::size_t self_loops = 0;
  for (RmState state = 0; state < n; ++state) {
    for (Symbol symbol = 0; symbol < m; ++symbol) {
      if (rm.reward_index(state, symbol) == rm.zero_reward_index()) ++zero_rewards;
      if (rm.next(state, symbol) == state) ++self_loops;
    }
  }
  const auto i = static_cast<double>(zero_rewards);
  double log_prior = i * std::log(p_r) + (entries - i) * std::log((1.0 - p_r) / (g - 1.0));
  if (n >= 2) {
    const auto j = static_cast<double>(self_loops);
    log_prior += j * std::log(p_t) + (entries - j) * std::log((1.0 - p_t) / static_cast<double>(n - 1));
  }
  return log_prior;
}

std::string format_rm(const RewardMachine& rm) {
  std::ostringstream out;
  const std::size_t m = rm.num_symbols();
  out << "{\n  \"n\": " << rm.num_states() << ",\n  \"alphabet\": [";
  for (Symbol symbol = 0; symbol < m; ++symbol) {
    out << (symbol ? ", " : "") << nlohmann::json(rm.alphabet().name(symbol)).dump();
  }
  out << "],\n  \"rewards\": [";
  for (std::size_t i = 0; i < rm.reward_values().size(); ++i) {
    out << (i ? ", " : "") << format_double(rm.reward_values()[i]);
  }
  auto write_matrix = [&](const char* key, auto&& cell) {
    out << "  \"" << key << "\": [\n";
    for (RmState state = 0; state < rm.num_states(); ++state) {
      out << "    [";
      for (Symbol symbol = 0; symbol < m; ++symbol) out << (symbol ? ", " : "") << cell(state, symbol);
      out << "]" << (state + 1 < rm.num_states() ? "," : "") << "\n";
    }
    out << "  ]";
  };
  out << "],\n";
  write_matrix("t", [&](RmState y, Symbol s) { return std::to_string(rm.next(y, s) + 1); });
  out << ",\n";
  write_matrix("r", [&](RmState y, Symbol s) { return format_double(rm.reward(y, s)); });
  out << "\n}\n";
  return out.str();
}

RewardMachine parse_rm(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("reward machine file: ") + e.what());
  }
  try {
    const auto n = doc.at("n").get<std::size_t>();
    Alphabet alphabet(doc.at("alphabet").get<std::vector<std::string>>());
    auto reward_values = doc.at("rewards").get<std::vector<double>>();
    const auto t = doc.at("t").get<std::vector<std::vector<long long>>>();
    const auto r = doc.at("r").get<std::vector<std::vector<double>>>();
    if (t.size() != n || r.size() != n) throw Error(Errc::ParseError, "t and r must have n rows");
    std::vector<RmState> transitions;
    std::vector<std::size_t> rewards;
    for (std::size_t state = 0; state < n; ++state) {
      if (t[state].size() != alphabet.size() || r[state].size() != alphabet.size()) {
        throw Error(Errc::ParseError, "t and r rows must have one entry per symbol");
      }
      for (Symbol symbol = 0; symbol < alphabet.size(); ++symbol) {
        const long long target = t[state][symbol];
        if (target < 1 || static_cast<std::size_t>(target) > n) {
          throw Error(Errc::BadState, "transition target " + std::to_string(target) + " outside 1.." + std::to_string(n));
        }
        transitions.push_back(static_cast<RmState>(target - 1));
        auto it = std::find(reward_values.begin(), reward_values.end(), r[state][symbol]);
        if (it == reward_values.end()) throw Error(Errc::ParseError, "reward entry not in the reward set");
        rewards.push_back(static_cast<std::size_t>(it - reward_values.begin()));
      }
    }
    return RewardMachine(n, std::move(alphabet), std::move(reward_values), std::move(transitions), std::move(rewards));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("reward machine file: ") + e.what());
  }
}

}  // namespace rmirl
