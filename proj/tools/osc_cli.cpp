// Command-line driver for Object Scan Context place recognition.
//
//   osc extract   --dataset DIR --out DIR      Main Objects per frame (CSV)
//   osc describe  --dataset DIR --out DIR      descriptors per frame (.oscd)
//   osc match     --input DIR --out DIR        online loop detection
//   osc evaluate  (--dataset DIR | --synthetic) --out DIR [--seed N]
//   osc synthetic --out DIR [--seed N]         write a synthetic sequence
//
// Every subcommand accepts --config FILE and one flag per config key
// (e.g. --num_sectors 90), applied on top of the file.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "osc/commands.hpp"
#include "osc/config.hpp"
#include "osc/error.hpp"

namespace {

struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> overrides;
};

void AddConfigFlags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_file, "flat key = value config file");
  for (const auto& key : osc::ConfigKeys()) {
    cmd->add_option_function<std::string>(
        "--" + key,
        [&flags, key](const std::string& v) { flags.overrides[key] = v; },
        "override config field " + key);
  }
}

osc::OscConfig ResolveConfig(const ConfigFlags& flags) {
  osc::OscConfig config;
  if (!flags.config_file.empty()) config = osc::LoadConfigFile(flags.config_file);
  for (const auto& [key, value] : flags.overrides) {
    osc::SetConfigValue(config, key, value);
  }
  return osc::Validate(config);
}

int ExitCode(osc::ErrorCategory category) {
  switch (category) {
    case osc::ErrorCategory::kConfig:
      return 2;
    case osc::ErrorCategory::kIo:
      return 3;
    case osc::ErrorCategory::kFormat:
      return 4;
    case osc::ErrorCategory::kPrecondition:
      return 5;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object Scan Context place recognition"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string dataset, input, out;
  std::uint64_t seed = 0;
  bool synthetic = false;
  osc::EvaluateOptions eval;
  osc::SyntheticSequenceOptions synth;

  auto* extract = app.add_subcommand("extract", "extract Main Objects per frame");
  extract->add_option("--dataset", dataset, "KITTI-layout sequence directory")->required();
  extract->add_option("--out", out, "output directory")->required();
  AddConfigFlags(extract, flags);

  auto* describe = app.add_subcommand("describe", "build descriptors per frame");
  describe->add_option("--dataset", dataset, "KITTI-layout sequence directory")->required();
  describe->add_option("--out", out, "output directory")->required();
  AddConfigFlags(describe, flags);

  auto* match = app.add_subcommand("match", "online loop detection");
  match->add_option("--input", input,
                    "describe output directory or KITTI-layout sequence")
      ->required();
  match->add_option("--out", out, "output directory")->required();
  AddConfigFlags(match, flags);

  auto* evaluate = app.add_subcommand("evaluate", "precision-recall and pose error");
  auto* dataset_opt =
      evaluate->add_option("--dataset", dataset, "KITTI-layout sequence directory");
  auto* synthetic_flag = evaluate->add_flag(
      "--synthetic", synthetic, "evaluate on a generated sequence instead");
  dataset_opt->excludes(synthetic_flag);
  evaluate->add_option("--out", out, "output directory")->required();
  evaluate->add_option("--seed", seed, "sampling / generator seed");
  evaluate->add_option("--num_positive", eval.num_positive, "positive pairs to sample");
  evaluate->add_option("--num_negative", eval.num_negative, "negative pairs to sample");
  evaluate->add_option("--synthetic_places", synth.num_places,
                       "places in the synthetic sequence");
  AddConfigFlags(evaluate, flags);

  auto* generate = app.add_subcommand("synthetic", "write a synthetic KITTI-layout sequence");
  generate->add_option("--out", out, "output directory")->required();
  generate->add_option("--seed", seed, "generator seed");
  generate->add_option("--synthetic_places", synth.num_places, "number of places");
  AddConfigFlags(generate, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const osc::OscConfig config = ResolveConfig(flags);
    osc::RunManifest manifest;
    manifest.argv.assign(argv, argv + argc);
    manifest.config = config;
    if (*extract) {
      osc::CmdExtract(dataset, out, config, manifest);
    } else if (*describe) {
      osc::CmdDescribe(dataset, out, config, manifest);
    } else if (*match) {
      osc::CmdMatch(input, out, config, manifest);
    } else if (*evaluate) {
      if (dataset.empty() && !synthetic) {
        throw osc::Error(osc::ErrorCategory::kConfig,
                         "evaluate needs --dataset or --synthetic");
      }
      eval.dataset_dir = dataset;
      eval.synthetic = synthetic;
      eval.seed = seed;
      eval.synthetic_options = synth;
      const auto report = osc::CmdEvaluate(eval, out, config, manifest);
      std::cout << "f1_max " << report.summary.f1_max << " over "
                << report.summary.num_positive << " positive / "
                << report.summary.num_negative << " negative pairs\n";
    } else if (*generate) {
      osc::CmdSynthetic(out, seed, synth, manifest);
    }
  } catch (const osc::Error& e) {
    std::cerr << "error: " << osc::CategoryName(e.category()) << ": " << e.what()
              << '\n';
    return ExitCode(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
