// Copyright 2026 The dplda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dplda: batch front end.
//
//   dplda train --config run.cfg --mechanism monitored-doc --seed 7 --out out/
//   dplda lp-train --docword docword.kos.txt --f 0.1
//   dplda sweep --mechanism lp --values 0.5,0.1,0.01 --seeds 1,2,3 --n-test 100
//   dplda oracle --r 0.2,0.5,0.3 --b 11,12,10 --n 2

#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_app.hpp"

namespace {

using dplda::cli::RunConfig;
using Settings = std::map<std::string, std::string>;

// Flags that map one-to-one onto config keys.
struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kRunFlags[] = {
    {"--docword", "docword", "UCI docword file for training"},
    {"--vocab", "vocab", "vocabulary file (default: <docword>.vocab sidecar)"},
    {"--test", "test", "held-out UCI docword file"},
    {"--test-vocab", "test_vocab", "vocabulary of the held-out file"},
    {"--stopwords", "stopwords", "stopword list, one word per line"},
    {"--top-v", "top_v", "keep the top-V most frequent words"},
    {"--n-test", "n_test", "hold out this many random documents"},
    {"--out", "out", "output directory"},
    {"--seed", "seed", "master seed"},
    {"--mechanism", "mechanism", "plain | monitored-word | monitored-doc | lp | laplace"},
    {"--level", "level", "privacy level for monitored runs: word | doc"},
    {"--f", "f", "flip probability (lp)"},
    {"--epsilon", "epsilon", "privacy budget (lp or laplace)"},
    {"--iters", "iters", "Gibbs iterations"},
    {"--topics", "topics", "number of topics K"},
    {"--alpha", "alpha", "document-topic prior"},
    {"--beta", "beta", "topic-word prior"},
    {"--fold-in-iters", "fold_in_iters", "fold-in sweeps per held-out document"},
    {"--encoding", "encoding", "counts | binary"},
};

constexpr FlagSpec kSweepFlags[] = {
    {"--values", "values", "comma-separated f or epsilon values"},
    {"--value-kind", "value_kind", "f | epsilon"},
    {"--seeds", "seeds", "comma-separated seeds"},
    {"--threads", "threads", "worker threads"},
};

constexpr FlagSpec kEvalFlags[] = {
    {"--model", "model", "model CSV (default: <out>/model.csv)"},
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  Settings flags;
  Settings forced;  // settings implied by the verb itself
};

template <std::size_t N>
void add_flags(Command& cmd, const FlagSpec (&specs)[N]) {
  for (const auto& s : specs) cmd.app->add_option(s.flag, cmd.flags[s.key], s.help);
}

RunConfig resolve(const Command& cmd) {
  std::vector<Settings> layers;
  if (!cmd.config_path.empty()) layers.push_back(dplda::cli::read_config_file(cmd.config_path));
  Settings flags;
  for (const auto& [k, v] : cmd.flags) {
    if (!v.empty()) flags[k] = v;
  }
  layers.push_back(flags);
  layers.push_back(cmd.forced);
  return dplda::cli::build_config(layers);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private LDA: monitored Gibbs sampling, LP-LDA and baselines"};
  app.require_subcommand(1);

  std::map<std::string, Command> commands;
  auto add = [&](const std::string& name, const std::string& help) -> Command& {
    Command& cmd = commands[name];
    cmd.app = app.add_subcommand(name, help);
    cmd.app->add_option("--config", cmd.config_path, "key=value config file")
        ->check(CLI::ExistingFile);
    return cmd;
  };

  add_flags(add("ingest", "prune and split a corpus into train/test files"), kRunFlags);
  add_flags(add("train", "train LDA (plain or monitored)"), kRunFlags);
  Command& lp = add("lp-train", "train LP-LDA on randomized-response vectors");
  add_flags(lp, kRunFlags);
  lp.forced["mechanism"] = "lp";
  Command& laplace = add("baseline-train", "train with Laplace-noised initial counts");
  add_flags(laplace, kRunFlags);
  laplace.forced["mechanism"] = "laplace";
  Command& eval = add("eval", "held-out perplexity of a saved model");
  add_flags(eval, kRunFlags);
  add_flags(eval, kEvalFlags);
  Command& sweep = add("sweep", "perplexity over f or epsilon values and seeds");
  add_flags(sweep, kRunFlags);
  add_flags(sweep, kSweepFlags);

  dplda::cli::OracleOptions oracle;
  CLI::App* oracle_app =
      app.add_subcommand("oracle", "compare the per-step bound with exhaustive enumeration");
  oracle_app->add_option("--r", oracle.r, "sampling weights r_k")->delimiter(',');
  oracle_app->add_option("--b", oracle.b, "denominators n_k + V*beta")->delimiter(',');
  oracle_app->add_option("--n", oracle.removed, "words removed by the neighbor");
  oracle_app->add_option("--instances", oracle.instances, "random instances to check");
  oracle_app->add_option("--max-n", oracle.max_removed, "largest N for random instances");
  oracle_app->add_option("--max-topics", oracle.max_topics, "largest K for random instances");
  oracle_app->add_option("--seed", oracle.seed, "seed for random instances");
  oracle_app->add_option("--out", oracle.out, "directory for oracle.csv");

  CLI11_PARSE(app, argc, argv);

  bool word_level = true;
  try {
    if (oracle_app->parsed()) return dplda::cli::cmd_oracle(oracle);
    for (auto& [name, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      RunConfig config = resolve(cmd);
      word_level = config.mechanism != dplda::cli::Mechanism::kMonitoredDoc;
      if (name == "ingest") return dplda::cli::cmd_ingest(config);
      if (name == "eval") return dplda::cli::cmd_eval(config);
      if (name == "sweep") return dplda::cli::cmd_sweep(config);
      if (name == "train" && (config.mechanism == dplda::cli::Mechanism::kLocal ||
                              config.mechanism == dplda::cli::Mechanism::kLaplace)) {
        std::cerr << "note: running " << dplda::cli::mechanism_name(config.mechanism)
                  << " through 'train'\n";
      }
      return dplda::cli::cmd_train(config);
    }
  } catch (const dplda::DegenerateCorpus& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (word_level) {
      std::cerr << "hint: a topic holds fewer words than one removal; use fewer topics, "
                   "a larger beta, or a larger corpus\n";
    } else {
      std::cerr << "hint: truncate documents to lower N_max, or use --level word\n";
    }
    return 3;
  } catch (const dplda::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const dplda::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const dplda::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
