// Command-line front end: demo, infer, eval, export-dot and pipeline.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "rmirl/error.hpp"
#include "rmirl/harness.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageFailure = 2;

struct Flag {
  const char* name;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"env", "shipped environment: recharge, coffee or multi_coffee"},
    {"grid", "custom grid file (instead of --env)"},
    {"true-rm", "true reward machine JSON for a custom grid"},
    {"rewards", "comma-separated reward set, e.g. 0,1"},
    {"runs", "demonstration episodes"},
    {"ep-len", "steps per episode"},
    {"eval-episodes", "evaluation episodes"},
    {"n", "reward machine states"},
    {"iterations", "annealing iterations"},
    {"alpha", "Boltzmann rationality used for inference"},
    {"alpha-expert", "Boltzmann rationality of the demonstrator"},
    {"gamma", "discount factor"},
    {"t0", "initial temperature"},
    {"t-min", "minimum temperature"},
    {"beta-t", "temperature decay"},
    {"p0", "initial perturbance"},
    {"p-min", "minimum perturbance"},
    {"beta-p", "perturbance decay"},
    {"k", "decay period"},
    {"pt", "prior self-transition probability"},
    {"pr", "prior zero-reward probability"},
    {"learn-blank", "true to let hypotheses move or pay on eps (default false)"},
    {"chains", "independent annealing chains"},
    {"seed", "master seed"},
    {"out", "output directory"},
    {"demo", "demonstration file (default <out>/demo.txt)"},
    {"rm", "reward machine file (default <out>/rm.json)"},
};

struct Options {
  std::optional<std::string> config_file;
  std::map<std::string, std::optional<std::string>> values;
};

void add_flags(CLI::App* command, Options& options) {
  command->add_option("--config", options.config_file, "key=value file applied before the flags");
  for (const Flag& flag : kFlags) {
    command->add_option(std::string("--") + flag.name, options.values[flag.name], flag.help);
  }
}

rmirl::RunConfig collect(const Options& options) {
  rmirl::Settings settings;
  if (options.config_file) {
    std::ifstream in(*options.config_file);
    if (!in) throw rmirl::UsageError("cannot open config '" + *options.config_file + "'");
    settings = rmirl::read_settings(in);
  }
  // A problem source on the command line replaces the one in the file.
  if (options.values.at("env") || options.values.at("grid")) {
    std::erase_if(settings, [](const auto& entry) { return entry.first == "env" || entry.first == "grid"; });
  }
  for (const Flag& flag : kFlags) {
    const auto& value = options.values.at(flag.name);
    if (value) settings.emplace_back(flag.name, *value);
  }
  return rmirl::resolve_config(settings);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward machine inference from demonstrations"};
  app.require_subcommand(1);

  Options options;
  CLI::App* demo = app.add_subcommand("demo", "generate an expert demonstration");
  CLI::App* infer = app.add_subcommand("infer", "infer a reward machine from a demonstration");
  CLI::App* eval = app.add_subcommand("eval", "compare expert and agent returns");
  CLI::App* dot = app.add_subcommand("export-dot", "print a reward machine as Graphviz");
  CLI::App* pipeline = app.add_subcommand("pipeline", "demo, infer, eval and export-dot in one go");
  for (CLI::App* command : {demo, infer, eval, dot, pipeline}) add_flags(command, options);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageFailure;
  }

  try {
    const rmirl::RunConfig config = collect(options);
    if (demo->parsed()) {
      rmirl::cmd_demo(config, std::cout);
    } else if (infer->parsed()) {
      rmirl::cmd_infer(config, std::cout);
    } else if (eval->parsed()) {
      rmirl::cmd_eval(config, std::cout);
    } else if (dot->parsed()) {
      rmirl::cmd_export_dot(config, std::cout);
    } else {
      rmirl::cmd_pipeline(config, std::cout);
    }
  } catch (const rmirl::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return 0;
}
