#include "rmirl/gridworld.hpp"

#include <algorithm>
#include <sstream>

#include "rmirl/format.hpp"

namespace rmirl {

namespace {

constexpr char kBlankChar = '.';
constexpr char kStartChar = 'S';

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    begin = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void parse_header(std::string_view header, GridSpec& grid) {
  std::istringstream fields{std::string(header)};
  std::string field;
  bool have_slip = false;
  bool have_legend = false;
  while (fields >> field) {
    if (field.rfind("slip=", 0) == 0) {
      grid.slip = parse_double(std::string_view(field).substr(5));
      have_slip = true;
    } else if (field.rfind("legend=", 0) == 0) {
      std::string_view entries = std::string_view(field).substr(7);
      while (!entries.empty()) {
        const std::size_t comma = entries.find(',');
        std::string_view entry = entries.substr(0, comma);
        if (entry.size() < 3 || entry[1] != ':') {
          throw Error(Errc::ParseError, "legend entries look like <char>:<symbol>, got '" + std::string(entry) + "'");
        }
        const char c = entry[0];
        if (c == kBlankChar || c == kStartChar) throw Error(Errc::ParseError, "legend may not redefine '.' or 'S'");
        for (const auto& [existing, symbol] : grid.legend) {
          if (existing == c) throw Error(Errc::ParseError, std::string("duplicate legend character '") + c + "'");
        }
        grid.legend.emplace_back(c, std::string(entry.substr(2)));
        entries = comma == std::string_view::npos ? std::string_view{} : entries.substr(comma + 1);
      }
      have_legend = true;
    } else {
      throw Error(Errc::ParseError, "unknown grid header field '" + field + "'");
    }
  }
  if (!have_slip || !have_legend) throw Error(Errc::ParseError, "grid header needs slip= and legend=");
  if (!(grid.slip >= 0.0 && grid.slip < 1.0)) throw Error(Errc::ParseError, "slip must lie in [0, 1)");
}

}  // namespace

GridSpec parse_grid(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw Error(Errc::ParseError, "grid needs a header line and at least one row");
  GridSpec grid;
  parse_header(lines[0], grid);

  grid.height = lines.size() - 1;
  grid.width = lines[1].size();
  if (grid.width == 0) throw Error(Errc::NonRectangular, "empty grid row");
  std::size_t starts = 0;
  for (std::size_t y = 0; y < grid.height; ++y) {
    const std::string_view row = lines[y + 1];
    if (row.size() != grid.width) {
      throw Error(Errc::NonRectangular, "row " + std::to_string(y) + " has width " + std::to_string(row.size()) +
                                            ", expected " + std::to_string(grid.width));
    }
    for (std::size_t x = 0; x < grid.width; ++x) {
      const char c = row[x];
      if (c == kBlankChar) {
        grid.cells.emplace_back(Alphabet::kBlank);
      } else if (c == kStartChar) {
        grid.cells.emplace_back(Alphabet::kBlank);
        grid.start = {x, y};
        ++starts;
      } else {
        auto it = std::find_if(grid.legend.begin(), grid.legend.end(), [&](const auto& e) { return e.first == c; });
        if (it == grid.legend.end()) {
          throw Error(Errc::UnknownChar, std::string("character '") + c + "' at (" + std::to_string(x) + ", " +
                                             std::to_string(y) + ") is not in the legend");
        }
        grid.cells.push_back(it->second);
      }
    }
  }
  if (starts != 1) {
    throw Error(Errc::NoStart, "grid needs exactly one 'S', found " + std::to_string(starts));
  }
  return grid;
}

std::string serialize_grid(const GridSpec& grid) {
  std::string out = "slip=" + format_double(grid.slip) + " legend=";
  for (std::size_t i = 0; i < grid.legend.size(); ++i) {
    if (i) out += ',';
    out += grid.legend[i].first;
    out += ':';
    out += grid.legend[i].second;
  }
  out += '\n';
  for (std::size_t y = 0; y < grid.height; ++y) {
    for (std::size_t x = 0; x < grid.width; ++x) {
      const std::string& symbol = grid.cells[grid.index({x, y})];
      if (Cell{x, y} == grid.start) {
        out += kStartChar;
      } else if (symbol == Alphabet::kBlank) {
        out += kBlankChar;
      } else {
        auto it = std::find_if(grid.legend.begin(), grid.legend.end(), [&](const auto& e) { return e.second == symbol; });
        if (it == grid.legend.end()) throw Error(Errc::UnknownLabel, "cell symbol '" + symbol + "' has no legend entry");
        out += it->first;
      }
    }
    out += '\n';
  }
  return out;
}

Alphabet grid_alphabet(const GridSpec& grid) {
  std::vector<std::string> symbols{std::string(Alphabet::kBlank)};
  for (const auto& entry : grid.legend) symbols.push_back(entry.second);
  return Alphabet(std::move(symbols));
}

namespace {

Cell shifted(const GridSpec& grid, Cell from, Move move) {
  switch (move) {
    case Move::Up: return from.y > 0 ? Cell{from.x, from.y - 1} : from;
    case Move::Down: return from.y + 1 < grid.height ? Cell{from.x, from.y + 1} : from;
    case Move::Right: return from.x + 1 < grid.width ? Cell{from.x + 1, from.y} : from;
    case Move::Left: return from.x > 0 ? Cell{from.x - 1, from.y} : from;
  }
  return from;
}

std::pair<Move, Move> orthogonal(Move move) {
  if (move == Move::Up || move == Move::Down) return {Move::Right, Move::Left};
  return {Move::Up, Move::Down};
}

}  // namespace

LabeledMdp compile_grid(const GridSpec& grid) {
  const Alphabet alphabet = grid_alphabet(grid);
  const std::size_t states = grid.width * grid.height;
  if (grid.start.x >= grid.width || grid.start.y >= grid.height) throw Error(Errc::BadIndex, "start cell out of bounds");
  std::vector<double> transition(states * kNumMoves * states, 0.0);
  std::vector<Symbol> labels(states);
  for (std::size_t s = 0; s < states; ++s) {
    labels[s] = alphabet.at(grid.cells[s]);
    const Cell from = grid.cell(s);
    for (ActionId a = 0; a < kNumMoves; ++a) {
      const auto move = static_cast<Move>(a);
      double* row = transition.data() + (s * kNumMoves + a) * states;
      row[grid.index(shifted(grid, from, move))] += 1.0 - grid.slip;
      if (grid.slip > 0.0) {
        const auto [first, second] = orthogonal(move);
        row[grid.index(shifted(grid, from, first))] += 0.5 * grid.slip;
        row[grid.index(shifted(grid, from, second))] += 0.5 * grid.slip;
      }
    }
  }
  return LabeledMdp(states, kNumMoves, grid.index(grid.start), std::move(transition), alphabet, std::move(labels));
}

Demonstration generate_demonstration(const LabeledMdp& mdp, const RewardMachine& true_rm, double alpha_expert,
                                     std::size_t runs, std::size_t ep_len, double gamma, Rng& rng) {
  if (!(alpha_expert >= 0.0)) throw Error(Errc::InvalidArgument, "expert rationality must be non-negative");
  const ProductMdp product = build_product(mdp, true_rm);
  const Solution solution = policy_iteration(product.mdp(), gamma);

  Demonstration demo;
  demo.episodes.reserve(runs);
  for (std::size_t run = 0; run < runs; ++run) {
    Episode episode;
    episode.reserve(ep_len);
    StateId s = mdp.initial_state();
    RmState y = RewardMachine::kInitial;
    for (std::size_t t = 0; t < ep_len; ++t) {
      const auto probabilities = boltzmann_distribution(solution.q.row(product.joint(s, y)), alpha_expert);
      const ActionId a = sample_index(probabilities, rng);
      episode.push_back({s, a});
      s = sample_next(mdp, s, a, rng);
      y = true_rm.next(y, mdp.label(s));
    }
    demo.episodes.push_back(std::move(episode));
  }
  return demo;
}

namespace {

// Runs `episodes` rollouts; `choose(s, y_memory)` picks the action and
// `memory` is the machine whose state the controller tracks.
template <typename Choose>
ReturnEstimate rollout(const LabeledMdp& mdp, const RewardMachine& true_rm, const RewardMachine& memory,
                       std::size_t episodes, std::size_t ep_len, Rng& rng, Choose&& choose) {
  if (episodes == 0) throw Error(Errc::InvalidArgument, "need at least one evaluation episode");
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    StateId s = mdp.initial_state();
    RmState tracked = RewardMachine::kInitial;
    RmState truth = RewardMachine::kInitial;
    double episode_return = 0.0;
    for (std::size_t t = 0; t < ep_len; ++t) {
      const ActionId a = choose(s, tracked);
      s = sample_next(mdp, s, a, rng);
      const Symbol label = mdp.label(s);
      episode_return += true_rm.reward(truth, label);
      truth = true_rm.next(truth, label);
      tracked = memory.next(tracked, label);
    }
    total += episode_return;
  }
  return {total / static_cast<double>(episodes), episodes, ep_len};
}

}  // namespace

ReturnEstimate evaluate_agent(const LabeledMdp& mdp, const RewardMachine& true_rm, const RewardMachine& inferred,
                              std::size_t episodes, std::size_t ep_len, double gamma, Rng& rng) {
  if (!(true_rm.alphabet() == inferred.alphabet()) || !(mdp.alphabet() == inferred.alphabet())) {
    throw Error(Errc::AlphabetMismatch, "inferred machine, true machine and MDP must share one alphabet");
  }
  const ProductMdp product = build_product(mdp, inferred);
  const Solution solution = policy_iteration(product.mdp(), gamma);
  return rollout(mdp, true_rm, inferred, episodes, ep_len, rng,
                 [&](StateId s, RmState y) { return solution.policy[product.joint(s, y)]; });
}

ReturnEstimate expert_baseline(const LabeledMdp& mdp, const RewardMachine& true_rm, double alpha_expert,
                               std::size_t episodes, std::size_t ep_len, double gamma, Rng& rng) {
  const ProductMdp product = build_product(mdp, true_rm);
  const Solution solution = policy_iteration(product.mdp(), gamma);
  return rollout(mdp, true_rm, true_rm, episodes, ep_len, rng, [&](StateId s, RmState y) {
    return sample_index(boltzmann_distribution(solution.q.row(product.joint(s, y)), alpha_expert), rng);
  });
}

std::string format_report(const EvalReport& report) {
  return "r_e=" + format_double(report.expert_avg_return) + "\nr_a=" + format_double(report.agent_avg_return) +
         "\nepisodes=" + std::to_string(report.episodes) + "\nep_len=" + std::to_string(report.episode_length) + "\n";
}

EvalReport parse_report(std::string_view text) {
  EvalReport report;
  bool seen[4] = {false, false, false, false};
  for (std::string_view line : lines_of(text)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::ParseError, "report line without '='");
    const std::string_view key = line.substr(0, eq);
    const std::string_view value = line.substr(eq + 1);
    if (key == "r_e") {
      report.expert_avg_return = parse_double(value);
      seen[0] = true;
    } else if (key == "r_a") {
      report.agent_avg_return = parse_double(value);
      seen[1] = true;
    } else if (key == "episodes") {
      report.episodes = parse_size(value);
      seen[2] = true;
    } else if (key == "ep_len") {
      report.episode_length = parse_size(value);
      seen[3] = true;
    }
  }
  for (bool s : seen) {
    if (!s) throw Error(Errc::ParseError, "report needs r_e, r_a, episodes and ep_len");
  }
  return report;
}

}  // namespace rmirl
