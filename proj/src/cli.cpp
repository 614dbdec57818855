#include "alertforge/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "alertforge/embedded_assets.hpp"
#include "alertforge/errors.hpp"
#include "alertforge/fixtures.hpp"
#include "alertforge/gan.hpp"
#include "alertforge/ingest.hpp"
#include "alertforge/json_util.hpp"
#include "alertforge/metrics.hpp"
#include "alertforge/preprocess.hpp"
#include "alertforge/stages.hpp"
#include "alertforge/version.hpp"

namespace alertforge::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ALERTFORGE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

Json meta_block(std::uint64_t seed, const Json& resolved_config) {
  Json meta;
  meta["tool_version"] = kToolVersion;
  meta["seed"] = seed;
  meta["config_hash"] = to_hex(fnv1a64(resolved_config.dump()));
  return meta;
}

void write_json(const fs::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Json load_json(const fs::path& path, bool artifact) {
  if (!fs::exists(path)) {
    if (artifact) throw MissingArtifactError("missing artifact: " + path.string());
    throw IoError("missing file: " + path.string());
  }
  Json j = Json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw IoError("invalid JSON in " + path.string());
  return j;
}

struct TargetArtifacts {
  FeatureSpace feature_space;
  std::vector<ProcessedAlert> alerts;
};

TargetArtifacts load_target_artifacts(const fs::path& dir,
                                      const std::string& target) {
  TargetArtifacts artifacts;
  const Json features = load_json(dir / (target + ".features.json"), true);
  artifacts.feature_space = FeatureSpace::from_json(features);
  const Json dataset = load_json(dir / (target + ".dataset.json"), true);
  for (const auto& row : dataset.at("alerts")) {
    artifacts.alerts.push_back(ProcessedAlert{row.at(0).get<int>(),
                                              row.at(1).get<int>(),
                                              row.at(2).get<int>(),
                                              row.at(3).get<int>()});
  }
  if (artifacts.alerts.empty()) {
    throw EmptyDatasetError("dataset artifact holds no alerts");
  }
  return artifacts;
}

std::string csv_escape(const std::string& value) {
  if (value.find(',') == std::string::npos &&
      value.find('"') == std::string::npos) {
    return value;
  }
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

int cmd_preprocess(const std::string& input, const std::string& format_name,
                   const std::string& target_filter, const std::string& team,
                   int min_alerts, const std::string& service_table_path,
                   double histogram_width, int smoothing_window,
                   const std::string& out_dir, std::uint64_t seed) {
  const ingest::LogFormat format = format_name == "csv"
                                       ? ingest::LogFormat::csv
                                       : ingest::LogFormat::json_lines;
  const preprocess::ServiceTable table =
      service_table_path.empty()
          ? preprocess::ServiceTable::bundled()
          : preprocess::ServiceTable::from_csv_file(service_table_path);
  preprocess::BinningParams params;
  params.histogram_width_seconds = histogram_width;
  params.smoothing_window_bins = smoothing_window;

  const ingest::RawCorpus corpus = ingest::parse_log(input, format, team);
  for (const auto& warning : corpus.parse_warnings) {
    std::cerr << "warning: line " << warning.line << ": " << warning.message
              << "\n";
  }
  auto segments = ingest::segment_by_target(corpus);

  Json resolved;
  resolved["command"] = "preprocess";
  resolved["format"] = format_name;
  resolved["min_alerts"] = min_alerts;
  resolved["histogram_width_seconds"] = histogram_width;
  resolved["smoothing_window_bins"] = smoothing_window;
  resolved["team"] = team;
  resolved["seed"] = seed;

  int written = 0;
  for (const auto& [ip, alerts] : segments) {
    if (!target_filter.empty() && ip != target_filter) continue;
    if (static_cast<int>(alerts.size()) < min_alerts) continue;
    const preprocess::PreprocessResult result =
        preprocess::preprocess_target(alerts, table, params);

    Json features = result.feature_space.to_json();
    features["time_bin_boundaries"] = result.binning.cut_points;
    features["_meta"] = meta_block(seed, resolved);
    write_json(fs::path(out_dir) / (ip + ".features.json"), features);

    Json dataset;
    dataset["format_version"] = 1;
    dataset["target_ip"] = ip;
    Json rows = Json::array();
    for (const auto& alert : result.dataset.source_alerts) {
      rows.push_back({alert.a, alert.d, alert.s, alert.t});
    }
    dataset["alerts"] = std::move(rows);
    dataset["_meta"] = meta_block(seed, resolved);
    write_json(fs::path(out_dir) / (ip + ".dataset.json"), dataset);

    std::cout << ip << ": " << alerts.size() << " alerts, |A|="
              << result.feature_space.vocab_size(Feature::A)
              << " |D|=" << result.feature_space.vocab_size(Feature::D)
              << " |S|=" << result.feature_space.vocab_size(Feature::S)
              << " |T|=" << result.feature_space.vocab_size(Feature::T) << "\n";
    ++written;
  }
  if (written == 0) {
    throw EmptyDatasetError("no target met the --min-alerts threshold");
  }
  return kExitOk;
}

int cmd_train(const std::string& input_dir, const std::string& target,
              gan::GanConfig config, const std::string& out_dir) {
  const TargetArtifacts artifacts =
      load_target_artifacts(fs::path(input_dir), target);
  const EncodedDataset dataset =
      encode_dataset(artifacts.feature_space, artifacts.alerts);

  const gan::TrainResult result = gan::train(dataset, config);

  const std::string stem = target + "." + gan::to_string(config.variant);
  const fs::path checkpoint_path =
      fs::path(out_dir) / (stem + ".checkpoint.json");

  Json resolved = config.to_json();
  resolved["command"] = "train";
  Json checkpoint_json = result.checkpoint.to_json();
  checkpoint_json["_meta"] = meta_block(config.seed, resolved);
  write_json(checkpoint_path, checkpoint_json);
  write_text_file(fs::path(out_dir) / (stem + ".training_log.csv"),
                  gan::training_log_csv(result.history));

  if (result.aborted) {
    std::cerr << "training aborted: " << result.abort_reason
              << " (checkpoint retained at epoch " << result.checkpoint.epoch
              << ")\n";
    return kExitNumerics;
  }
  std::cout << "trained " << stem << " for " << result.checkpoint.epoch
            << " epochs (" << result.discriminator_updates << " critic / "
            << result.generator_updates << " generator updates)\n";
  return kExitOk;
}

int cmd_sample(const std::string& checkpoint_path, std::size_t count,
               std::uint64_t seed, const std::string& out_path) {
  const gan::ModelCheckpoint checkpoint = gan::load_checkpoint(checkpoint_path);
  const std::vector<ProcessedAlert> alerts =
      gan::sample_alerts(checkpoint, count, seed);

  std::ostringstream out;
  out << "signature,service,src_ip,time_bin\n";
  const FeatureSpace& space = checkpoint.feature_space;
  for (const auto& alert : alerts) {
    out << csv_escape(space.vocab(Feature::A)[static_cast<std::size_t>(alert.a)])
        << ','
        << csv_escape(space.vocab(Feature::D)[static_cast<std::size_t>(alert.d)])
        << ','
        << csv_escape(space.vocab(Feature::S)[static_cast<std::size_t>(alert.s)])
        << ','
        << csv_escape(space.vocab(Feature::T)[static_cast<std::size_t>(alert.t)])
        << '\n';
  }
  write_text_file(out_path, out.str());
  std::cout << "wrote " << count << " samples to " << out_path << "\n";
  return kExitOk;
}

std::vector<std::string> signatures_of(const std::vector<ProcessedAlert>& alerts,
                                       const FeatureSpace& space) {
  std::vector<std::string> signatures;
  signatures.reserve(alerts.size());
  for (const auto& alert : alerts) {
    signatures.push_back(
        space.vocab(Feature::A)[static_cast<std::size_t>(alert.a)]);
  }
  return signatures;
}

int cmd_eval(const std::string& input_dir, const std::string& target,
             const std::string& checkpoint_path,
             const std::string& stage_rules_path,
             const std::string& ce_normalizer_name, std::size_t resamples,
             std::uint64_t seed, bool export_histograms,
             const std::string& out_dir) {
  const TargetArtifacts artifacts =
      load_target_artifacts(fs::path(input_dir), target);
  const gan::ModelCheckpoint checkpoint = gan::load_checkpoint(checkpoint_path);
  if (!(checkpoint.feature_space == artifacts.feature_space)) {
    throw SpecError("checkpoint feature space differs from the dataset's");
  }
  const metrics::CeNormalizer normalizer =
      ce_normalizer_name == "target" ? metrics::CeNormalizer::target
                                     : metrics::CeNormalizer::joint;
  const stages::StageTable stage_table =
      stage_rules_path.empty() ? stages::StageTable::bundled()
                               : stages::StageTable::from_csv_file(stage_rules_path);

  const std::vector<ProcessedAlert>& gt = artifacts.alerts;
  const std::vector<ProcessedAlert> generated =
      gan::sample_alerts(checkpoint, gt.size(), mix_seed(seed, 0xe7a1));

  const std::vector<metrics::IntersectionScore> scores =
      metrics::all_mtuple_scores(gt, checkpoint, resamples);

  Json resolved;
  resolved["command"] = "eval";
  resolved["ce_normalizer"] = ce_normalizer_name;
  resolved["resamples"] = resamples;
  resolved["seed"] = seed;
  resolved["config_hash_of_model"] = checkpoint.config.to_json();

  Json report;
  report["target_ip"] = target;
  report["variant"] = gan::to_string(checkpoint.config.variant);

  Json score_rows = Json::array();
  for (const auto& score : scores) {
    score_rows.push_back({{"features", metrics::feature_set_label(score.features)},
                          {"g", score.g_score},
                          {"std", score.stddev}});
  }
  report["scores"] = std::move(score_rows);

  Json ce_rows = Json::array();
  for (int yf = 0; yf < kFeatureCount; ++yf) {
    const Feature y = static_cast<Feature>(yf);
    for (const auto& subset : metrics::all_feature_subsets()) {
      if (subset.size() == 4) continue;
      bool contains_y = false;
      for (Feature f : subset) contains_y |= f == y;
      if (contains_y) continue;
      const auto gt_ce = metrics::weighted_conditional_entropy(gt, y, subset,
                                                               normalizer);
      const auto gen_ce = metrics::weighted_conditional_entropy(
          generated, y, subset, normalizer);
      ce_rows.push_back(
          {{"y", std::string(1, feature_letter(y))},
           {"x", metrics::feature_set_label(subset)},
           {"ground_truth",
            {{"weighted", gt_ce.weighted}, {"normalized", gt_ce.normalized}}},
           {"generated",
            {{"weighted", gen_ce.weighted}, {"normalized", gen_ce.normalized}}}});
    }
  }
  report["conditional_entropy"] = std::move(ce_rows);

  Json je_rows = Json::array();
  for (const auto& subset : metrics::all_feature_subsets()) {
    if (subset.size() < 2) continue;
    const auto gt_je = metrics::normalized_joint_entropy(gt, subset);
    const auto gen_je = metrics::normalized_joint_entropy(generated, subset);
    je_rows.push_back(
        {{"features", metrics::feature_set_label(subset)},
         {"ground_truth",
          {{"value", gt_je.value}, {"normalized", gt_je.normalized}}},
         {"generated",
          {{"value", gen_je.value}, {"normalized", gen_je.normalized}}}});
  }
  report["joint_entropy"] = std::move(je_rows);

  const metrics::ModeCoverage coverage = metrics::mode_coverage(gt, generated);
  report["mode_coverage"] = {{"gt_unique", coverage.gt_unique},
                             {"covered", coverage.covered.size()},
                             {"dropped", coverage.dropped.size()},
                             {"noisy", coverage.noisy.size()},
                             {"pct_dropped", coverage.pct_dropped},
                             {"noise_ratio", coverage.noise_ratio}};

  const stages::StageDistribution gt_stages = stages::stage_distribution(
      signatures_of(gt, artifacts.feature_space), stage_table);
  const stages::StageDistribution gen_stages = stages::stage_distribution(
      signatures_of(generated, artifacts.feature_space), stage_table);
  const stages::StageComparison comparison =
      stages::compare_distributions(gt_stages, gen_stages);

  Json stage_rows = Json::array();
  for (const auto& name : stages::StageTable::stage_names()) {
    stage_rows.push_back({{"stage", name},
                          {"ground_truth", gt_stages.proportions.at(name)},
                          {"generated", gen_stages.proportions.at(name)},
                          {"abs_diff", comparison.abs_diffs.at(name)}});
  }
  report["stage_comparison"] = {{"stages", std::move(stage_rows)},
                                {"total_variation", comparison.total_variation}};
  report["_meta"] = meta_block(seed, resolved);

  const std::string schema_error = validate_against_schema(
      Json::parse(embedded::kReportSchemaJson), report);
  if (!schema_error.empty()) {
    throw MetricError("report failed schema validation: " + schema_error);
  }

  const std::string stem =
      target + "." + gan::to_string(checkpoint.config.variant);
  write_json(fs::path(out_dir) / (stem + ".report.json"), report);
  write_text_file(fs::path(out_dir) / (stem + ".dependency_graph.dot"),
                  metrics::dependency_graph_dot(scores));

  std::ostringstream stage_csv;
  stage_csv << "stage,ground_truth,generated,abs_diff\n";
  for (const auto& name : stages::StageTable::stage_names()) {
    stage_csv << csv_escape(name) << ','
              << format_double(gt_stages.proportions.at(name)) << ','
              << format_double(gen_stages.proportions.at(name)) << ','
              << format_double(comparison.abs_diffs.at(name)) << '\n';
  }
  write_text_file(fs::path(out_dir) / (stem + ".stage_distribution.csv"),
                  stage_csv.str());

  if (export_histograms) {
    const metrics::FeatureSet all = {Feature::A, Feature::D, Feature::S,
                                     Feature::T};
    write_text_file(fs::path(out_dir) / (stem + ".gt_histogram.csv"),
                    metrics::histogram_to_csv(
                        metrics::build_histogram(gt, all),
                        artifacts.feature_space));
    write_text_file(fs::path(out_dir) / (stem + ".generated_histogram.csv"),
                    metrics::histogram_to_csv(
                        metrics::build_histogram(generated, all),
                        artifacts.feature_space));
  }
  std::cout << "evaluation written for " << stem << "\n";
  return kExitOk;
}

int cmd_graph(const std::string& report_path, double threshold,
              const std::string& out_path) {
  const Json report = load_json(report_path, true);
  std::vector<metrics::IntersectionScore> scores;
  for (const auto& row : report.at("scores")) {
    metrics::IntersectionScore score;
    score.features =
        metrics::feature_set_from_label(row.at("features").get<std::string>());
    score.g_score = row.at("g").get<double>();
    score.stddev = row.at("std").get<double>();
    scores.push_back(std::move(score));
  }
  write_text_file(out_path, metrics::dependency_graph_dot(scores, threshold));
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_fixture(const std::string& spec_path, const std::string& target,
                const std::string& out_path, const std::string& truth_path) {
  const fixtures::PlantedSpec spec =
      fixtures::PlantedSpec::from_json(load_json(spec_path, false));
  const fixtures::GeneratedCorpus corpus = fixtures::generate_corpus(spec);
  write_text_file(out_path, fixtures::emit_jsonl(spec, corpus, target));
  if (!truth_path.empty()) {
    write_json(truth_path, fixtures::truth_to_json(spec, corpus.truth));
  }
  std::cout << "wrote " << corpus.alerts.size() << " fixture alerts to "
            << out_path << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"alertforge: GAN-based synthesis and fidelity analysis of "
               "network intrusion alerts"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess",
                                 "Parse a log and build per-target artifacts");
  std::string pre_input, pre_format = "json_lines", pre_target, pre_team;
  std::string pre_service_table, pre_out = ".";
  int pre_min_alerts = 500;
  double pre_hist_width = 300.0;
  int pre_smooth = 5;
  std::uint64_t pre_seed = default_seed();
  pre->add_option("--input", pre_input, "alert log path")->required();
  pre->add_option("--format", pre_format, "json_lines or csv")
      ->check(CLI::IsMember({"json_lines", "csv"}));
  pre->add_option("--target", pre_target, "only this destination IP");
  pre->add_option("--team", pre_team, "keep only alerts tagged with this team");
  pre->add_option("--min-alerts", pre_min_alerts,
                  "minimum alerts per destination IP");
  pre->add_option("--service-table", pre_service_table,
                  "CSV overriding the bundled port->service table");
  pre->add_option("--histogram-width", pre_hist_width,
                  "time-binning histogram width in seconds");
  pre->add_option("--smoothing-window", pre_smooth,
                  "time-binning smoothing window in bins");
  pre->add_option("--seed", pre_seed, "seed recorded in artifacts");
  pre->add_option("--out", pre_out, "output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a model on one target");
  std::string train_input, train_target, train_variant = "wgan_gp";
  std::string train_gp_point = "interpolate", train_out = ".";
  int train_epochs = 0, train_hidden = 128, train_batch = 100;
  int train_noise = 64, train_critic_ratio = 5;
  double train_lambda = -1.0, train_lr = 5e-5;
  std::uint64_t train_seed = default_seed();
  train->add_option("--input", train_input, "preprocess output directory")
      ->required();
  train->add_option("--target", train_target, "destination IP")->required();
  train->add_option("--variant", train_variant, "wgan_gp or wgan_gpmi")
      ->check(CLI::IsMember({"wgan_gp", "wgan_gpmi"}));
  train->add_option("--epochs", train_epochs, "override the variant's epochs");
  train->add_option("--lambda", train_lambda, "gradient penalty coefficient");
  train->add_option("--lr", train_lr, "ADAM learning rate");
  train->add_option("--hidden-dim", train_hidden, "hidden layer width");
  train->add_option("--batch-size", train_batch, "minibatch size");
  train->add_option("--noise-dim", train_noise, "noise dimensionality");
  train->add_option("--critic-ratio", train_critic_ratio,
                    "discriminator updates per generator update");
  train->add_option("--gp-point", train_gp_point,
                    "gradient penalty evaluation point")
      ->check(CLI::IsMember({"interpolate", "noise"}));
  int train_mi_steps = 1;
  train->add_option("--mi-steps", train_mi_steps,
                    "statistic-network ascent steps per generator step");
  train->add_option("--seed", train_seed, "training seed");
  train->add_option("--out", train_out, "output directory")->required();

  // sample
  auto* sample = app.add_subcommand("sample", "Decode synthetic alerts to CSV");
  std::string sample_input, sample_out = "samples.csv";
  std::size_t sample_count = 1000;
  std::uint64_t sample_seed = default_seed();
  sample->add_option("--input", sample_input, "checkpoint path")->required();
  sample->add_option("--count", sample_count, "number of alerts");
  sample->add_option("--seed", sample_seed, "sampling seed");
  sample->add_option("--out", sample_out, "output CSV path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Fidelity report for a checkpoint");
  std::string eval_input, eval_target, eval_checkpoint, eval_stage_rules;
  std::string eval_ce_normalizer = "joint", eval_out = ".";
  std::size_t eval_resamples = 1000;
  std::uint64_t eval_seed = default_seed();
  bool eval_histograms = false;
  eval->add_option("--input", eval_input, "preprocess output directory")
      ->required();
  eval->add_option("--target", eval_target, "destination IP")->required();
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint path")
      ->required();
  eval->add_option("--stage-rules", eval_stage_rules,
                   "CSV overriding the bundled signature->stage rules");
  eval->add_option("--ce-normalizer", eval_ce_normalizer,
                   "conditional entropy normalizer")
      ->check(CLI::IsMember({"joint", "target"}));
  eval->add_option("--resamples", eval_resamples, "bootstrap resamples");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_flag("--histograms", eval_histograms, "export histogram CSVs");
  eval->add_option("--out", eval_out, "output directory")->required();

  // graph
  auto* graph = app.add_subcommand("graph", "Re-emit the DOT dependency graph");
  std::string graph_input, graph_out = "dependency_graph.dot";
  double graph_threshold = 0.05;
  graph->add_option("--input", graph_input, "report JSON path")->required();
  graph->add_option("--threshold", graph_threshold, "score-drop threshold");
  graph->add_option("--out", graph_out, "output DOT path")->required();

  // fixture
  auto* fixture =
      app.add_subcommand("fixture", "Generate a synthetic corpus from a spec");
  std::string fixture_spec, fixture_target = "10.0.0.22";
  std::string fixture_out = "corpus.jsonl", fixture_truth;
  fixture->add_option("--spec", fixture_spec, "planted spec JSON")->required();
  fixture->add_option("--target", fixture_target, "destination IP to emit");
  fixture->add_option("--truth", fixture_truth, "analytic truth output path");
  fixture->add_option("--out", fixture_out, "corpus output path")->required();

  std::vector<const char*> argv;
  argv.push_back("alertforge");
  for (const auto& arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (pre->parsed()) {
      return cmd_preprocess(pre_input, pre_format, pre_target, pre_team,
                            pre_min_alerts, pre_service_table, pre_hist_width,
                            pre_smooth, pre_out, pre_seed);
    }
    if (train->parsed()) {
      gan::GanConfig config;
      config.hidden_dim = train_hidden;
      config.batch_size = train_batch;
      config.noise_dim = train_noise;
      config.critic_ratio = train_critic_ratio;
      config.epochs_override = train_epochs;
      config.lambda_gp = train_lambda;
      config.lr = train_lr;
      config.seed = train_seed;
      config.variant = gan::variant_from_string(train_variant);
      config.gp_point = gan::gp_point_from_string(train_gp_point);
      config.mi_steps = train_mi_steps;
      return cmd_train(train_input, train_target, config, train_out);
    }
    if (sample->parsed()) {
      return cmd_sample(sample_input, sample_count, sample_seed, sample_out);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_input, eval_target, eval_checkpoint, eval_stage_rules,
                      eval_ce_normalizer, eval_resamples, eval_seed,
                      eval_histograms, eval_out);
    }
    if (graph->parsed()) {
      return cmd_graph(graph_input, graph_threshold, graph_out);
    }
    if (fixture->parsed()) {
      return cmd_fixture(fixture_spec, fixture_target, fixture_out,
                         fixture_truth);
    }
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const EmptyDatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingArtifact;
  } catch (const NumericsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace alertforge::cli
