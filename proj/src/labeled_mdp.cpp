#include "rmirl/labeled_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rmirl/format.hpp"

namespace rmirl {

LabeledMdp::LabeledMdp(std::size_t num_states, std::size_t num_actions, StateId initial_state,
                       std::vector<double> transition, Alphabet alphabet, std::vector<Symbol> labels)
    : num_states_(num_states),
      num_actions_(num_actions),
      initial_(initial_state),
      transition_(std::move(transition)),
      alphabet_(std::move(alphabet)),
      labels_(std::move(labels)) {
  if (num_states_ == 0 || num_actions_ == 0) throw Error(Errc::InvalidArgument, "MDP needs states and actions");
  if (transition_.size() != num_states_ * num_actions_ * num_states_) {
    throw Error(Errc::InvalidArgument, "transition tensor must be |S| x |A| x |S|");
  }
  if (labels_.size() != num_states_) throw Error(Errc::InvalidArgument, "need one label per state");
  offsets_.reserve(num_states_ * num_actions_ + 1);
  offsets_.push_back(0);
  for (std::size_t r = 0; r < num_states_ * num_actions_; ++r) {
    for (StateId to = 0; to < num_states_; ++to) {
      const double p = transition_[r * num_states_ + to];
      if (p != 0.0) successors_.push_back({to, p});
    }
    offsets_.push_back(successors_.size());
  }
}

ValidationReport validate_labeled_mdp(const LabeledMdp& mdp) {
  ValidationReport report;
  if (mdp.initial_state() >= mdp.num_states()) {
    report.violations.push_back({Errc::BadIndex, mdp.initial_state(), 0,
                                 "initial state " + std::to_string(mdp.initial_state()) + " out of range"});
  }
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      double total = 0.0;
      bool negative = false;
      for (double p : mdp.row(s, a)) {
        total += p;
        negative = negative || p < 0.0 || !std::isfinite(p);
      }
      if (negative || std::abs(total - 1.0) > 1e-12) {
        report.violations.push_back({Errc::RowSumMismatch, s, a,
                                     "row (" + std::to_string(s) + ", " + std::to_string(a) + ") sums to " +
                                         format_double(total)});
      }
    }
    if (!mdp.alphabet().contains(mdp.label(s))) {
      report.violations.push_back({Errc::UnknownLabel, s, 0,
                                   "state " + std::to_string(s) + " has label index " +
                                       std::to_string(mdp.label(s)) + " outside the alphabet"});
    }
  }
  return report;
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cumulative += probabilities[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

StateId sample_next(const LabeledMdp& mdp, StateId state, ActionId action, Rng& rng) {
  const auto successors = mdp.successors(state, action);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  for (const Successor& next : successors) {
    cumulative += next.probability;
    if (u < cumulative) return next.state;
  }
  return successors.back().state;
}

ProductMdp::ProductMdp(FiniteMdp mdp, std::size_t mdp_states, std::size_t rm_states, std::size_t initial,
                       std::vector<Symbol> labels, std::vector<double> rm_rewards, std::size_t num_symbols)
    : mdp_(std::move(mdp)),
      mdp_states_(mdp_states),
      rm_states_(rm_states),
      initial_(initial),
      labels_(std::move(labels)),
      rm_rewards_(std::move(rm_rewards)),
      num_symbols_(num_symbols) {}

double ProductMdp::probability(std::size_t from, ActionId action, std::size_t to) const noexcept {
  for (const Outcome& outcome : mdp_.outcomes(from, action)) {
    if (outcome.next == to) return outcome.probability;
  }
  return 0.0;
}

double ProductMdp::reward(std::size_t from, ActionId /*action*/, std::size_t to) const noexcept {
  return rm_rewards_[rm_state(from) * num_symbols_ + labels_[mdp_state(to)]];
}

ProductMdp build_product(const LabeledMdp& mdp, const RewardMachine& rm) {
  if (!(mdp.alphabet() == rm.alphabet())) {
    throw Error(Errc::AlphabetMismatch, "MDP and reward machine use different alphabets");
  }
  const std::size_t n = rm.num_states();
  const std::size_t actions = mdp.num_actions();
  const std::size_t joint_states = mdp.num_states() * n;

  std::vector<std::size_t> offsets;
  offsets.reserve(joint_states * actions + 1);
  offsets.push_back(0);
  std::vector<Outcome> outcomes;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (RmState y = 0; y < n; ++y) {
      for (ActionId a = 0; a < actions; ++a) {
        for (const Successor& next : mdp.successors(s, a)) {
          const Symbol label = mdp.label(next.state);
          outcomes.push_back({next.state * n + rm.next(y, label), next.probability, rm.reward(y, label)});
        }
        offsets.push_back(outcomes.size());
      }
    }
  }
  std::vector<double> rm_rewards(n * rm.num_symbols());
  for (RmState y = 0; y < n; ++y) {
    for (Symbol sigma = 0; sigma < rm.num_symbols(); ++sigma) rm_rewards[y * rm.num_symbols() + sigma] = rm.reward(y, sigma);
  }
  return ProductMdp(FiniteMdp(joint_states, actions, std::move(offsets), std::move(outcomes)), mdp.num_states(), n,
                    mdp.initial_state() * n + RewardMachine::kInitial,
                    std::vector<Symbol>(mdp.labels().begin(), mdp.labels().end()), std::move(rm_rewards),
                    rm.num_symbols());
}

std::size_t Demonstration::size() const noexcept {
  std::size_t total = 0;
  for (const Episode& episode : episodes) total += episode.size();
  return total;
}

std::vector<DemonstrationTriple> to_triples(const Demonstration& demo, const LabeledMdp& mdp) {
  check_demonstration(demo, mdp);
  std::vector<DemonstrationTriple> triples;
  triples.reserve(demo.size());
  for (const Episode& episode : demo.episodes) {
    std::vector<Symbol> history;
    for (std::size_t k = 0; k < episode.size(); ++k) {
      if (k > 0) history.push_back(mdp.label(episode[k].state));
      triples.push_back({episode[k].state, history, episode[k].action});
    }
  }
  return triples;
}

std::vector<JointStep> project_demonstration(const Demonstration& demo, const LabeledMdp& mdp,
                                             const RewardMachine& rm) {
  if (!(mdp.alphabet() == rm.alphabet())) {
    throw Error(Errc::AlphabetMismatch, "MDP and reward machine use different alphabets");
  }
  const std::size_t n = rm.num_states();
  std::vector<JointStep> projected;
  projected.reserve(demo.size());
  for (const Episode& episode : demo.episodes) {
    RmState y = RewardMachine::kInitial;
    for (std::size_t k = 0; k < episode.size(); ++k) {
      const Step& step = episode[k];
      if (k > 0) y = rm.next(y, mdp.label(step.state));
      projected.push_back({step.state * n + y, step.action});
    }
  }
  return projected;
}

std::vector<JointStep> project_triples(std::span<const DemonstrationTriple> triples, const RewardMachine& rm) {
  const std::size_t n = rm.num_states();
  std::vector<JointStep> projected;
  projected.reserve(triples.size());
  const std::vector<Symbol>* previous = nullptr;
  RmState y = RewardMachine::kInitial;
  for (const DemonstrationTriple& triple : triples) {
    const auto& history = triple.history;
    const bool extends = previous != nullptr && history.size() == previous->size() + 1 &&
                         std::equal(previous->begin(), previous->end(), history.begin());
    if (extends) {
      y = rm_step(rm, y, history.back()).state;
    } else {
      y = run_trace(rm, history);
    }
    projected.push_back({triple.state * n + y, triple.action});
    previous = &history;
  }
  return projected;
}

void check_demonstration(const Demonstration& demo, const LabeledMdp& mdp) {
  for (std::size_t e = 0; e < demo.episodes.size(); ++e) {
    for (const Step& step : demo.episodes[e]) {
      if (step.state >= mdp.num_states() || step.action >= mdp.num_actions()) {
        throw Error(Errc::BadIndex, "episode " + std::to_string(e + 1) + " refers to state " +
                                        std::to_string(step.state) + " / action " + std::to_string(step.action) +
                                        " outside the MDP");
      }
    }
  }
}

void write_demonstration(std::ostream& out, const Demonstration& demo) {
  for (std::size_t e = 0; e < demo.episodes.size(); ++e) {
    out << "episode " << e + 1 << '\n';
    for (const Step& step : demo.episodes[e]) out << "s=" << step.state << " a=" << step.action << '\n';
  }
}

Demonstration read_demonstration(std::istream& in) {
  Demonstration demo;
  std::string line;
  std::size_t line_number = 0;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::ParseError, "demonstration line " + std::to_string(line_number) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string first, second, extra;
    fields >> first >> second;
    if (fields >> extra) fail("unexpected trailing text");
    if (first == "episode") {
      try {
        parse_size(second);
      } catch (const Error&) {
        fail("bad episode number '" + second + "'");
      }
      demo.episodes.emplace_back();
      continue;
    }
    if (first.rfind("s=", 0) != 0 || second.rfind("a=", 0) != 0) fail("expected 's=<state> a=<action>'");
    if (demo.episodes.empty()) fail("step before the first episode header");
    try {
      demo.episodes.back().push_back({parse_size(first.substr(2)), parse_size(second.substr(2))});
    } catch (const Error&) {
      fail("bad index in '" + line + "'");
    }
  }
  return demo;
}

}  // namespace rmirl
