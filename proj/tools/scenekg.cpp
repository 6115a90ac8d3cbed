// scenekg command-line tool.

#include <iostream>

#include <CLI11.hpp>

#include "scenekg/commands.hpp"

namespace cli = scenekg::cli;

int main(int argc, char** argv) {
  CLI::App app{"Scene knowledge graphs, sub-scene coverage and competence"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);

  std::size_t jobs = scenekg::default_jobs();

  cli::GenerateOptions gen_opts;
  std::string gen_manifest;
  std::string gen_config;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic corpus and its ground-truth manifest");
  gen->add_option("--spec", gen_opts.spec, "Generator spec (JSON)")->required();
  gen->add_option("--out", gen_opts.out, "Output corpus (.ndjson)")->required();
  gen->add_option("--manifest", gen_manifest, "Manifest path (default: manifest.json next to --out)");
  gen->add_option("--config", gen_config, "Config file");
  gen->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  cli::BuildOptions build_opts;
  std::string build_config;
  auto* build = app.add_subcommand("build", "Build scene graphs from WorldSnapshot JSON");
  build->add_option("--snapshot", build_opts.snapshots, "Snapshot file(s): JSON object, array or one object per line")
      ->required();
  build->add_option("--out", build_opts.out, "Output corpus (.ndjson)")->required();
  build->add_option("--config", build_config, "Config file");

  cli::AnalyzeOptions an_opts;
  std::string an_config;
  std::uint64_t an_n = 0;
  auto* analyze = app.add_subcommand("analyze", "Count signatures and calibrate complexity on a training corpus");
  analyze->add_option("--train", an_opts.train, "Training corpus (.ndjson)")->required();
  analyze->add_option("--config", an_config, "Config file");
  analyze->add_option("--out", an_opts.out_dir, "Output directory")->required();
  auto* n_flag = analyze->add_option("--n", an_n, "Fixed n (overrides n_policy)")->check(CLI::PositiveNumber);
  analyze->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  cli::ScoreOptions sc_opts;
  std::string sc_config;
  auto* score = app.add_subcommand("score", "Score an evaluation corpus against a trained model");
  score->add_option("--eval", sc_opts.eval, "Evaluation corpus (.ndjson)")->required();
  score->add_option("--model", sc_opts.model, "model.json from analyze")->required();
  score->add_option("--config", sc_config, "Config file");
  score->add_option("--out", sc_opts.out_dir, "Output directory")->required();
  score->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  cli::CorrelateOptions co_opts;
  auto* correlate = app.add_subcommand("correlate", "Pearson correlation of report.csv with an external metric");
  correlate->add_option("--report", co_opts.report, "report.csv from score")->required();
  correlate->add_option("--metric", co_opts.metric, "CSV with a scene_id column")->required();
  correlate->add_option("--column", co_opts.column, "Metric column (default: first non-scene_id column)");
  correlate->add_option("--report-column", co_opts.report_column, "Report column")->capture_default_str();

  cli::PatternsOptions pat_opts;
  std::string pat_config;
  auto* patterns = app.add_subcommand("patterns", "Pattern catalog utilities");
  patterns->require_subcommand(1);
  auto* check = patterns->add_subcommand("check", "Parse and validate the catalog");
  check->add_option("--config", pat_config, "Config file");
  check->add_flag("--print", pat_opts.print, "Print the canonical pattern sources");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  try {
    if (*gen) {
      gen_opts.manifest = opt_path(gen_manifest);
      gen_opts.config = opt_path(gen_config);
      gen_opts.jobs = jobs;
      cli::cmd_generate(gen_opts, std::cerr);
    } else if (*build) {
      build_opts.config = opt_path(build_config);
      cli::cmd_build(build_opts, std::cerr);
    } else if (*analyze) {
      an_opts.config = opt_path(an_config);
      if (*n_flag) an_opts.n = an_n;
      an_opts.jobs = jobs;
      cli::cmd_analyze(an_opts, std::cerr);
    } else if (*score) {
      sc_opts.config = opt_path(sc_config);
      sc_opts.jobs = jobs;
      cli::cmd_score(sc_opts, std::cerr);
    } else if (*correlate) {
      cli::cmd_correlate(co_opts, std::cout);
    } else if (*check) {
      pat_opts.config = opt_path(pat_config);
      cli::cmd_patterns_check(pat_opts, std::cout);
    }
  } catch (const scenekg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
