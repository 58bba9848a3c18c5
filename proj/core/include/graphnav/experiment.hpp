#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "graphnav/agent.hpp"
#include "graphnav/config_file.hpp"
#include "graphnav/finetune.hpp"
#include "graphnav/pair_dataset.hpp"
#include "graphnav/topo_graph.hpp"
#include "graphnav/training.hpp"

namespace graphnav {

/// Everything a sweep needs, loadable from a flat config file. The VING_SEED
/// environment variable overrides the configured seed when set.
struct ExperimentConfig {
  std::filesystem::path source_map;
  std::vector<std::filesystem::path> target_maps;

  int corpus_episodes = 24;
  int corpus_steps = 300;
  int graph_episodes = 8;  // leading corpus slice the graphs are built from

  sim::SimParams sim;
  std::vector<int> hidden{128, 128};
  int d_max = kDefaultDMax;
  DatasetParams dataset;
  TrainParams train;
  TdTrainParams td;
  GraphBuildParams graph;
  AgentConfig agent;

  std::vector<double> buckets{5, 10, 15, 20, 25};  // goal distances, meters
  double bucket_halfwidth = 2.5;
  int trials = 10;

  // Generalization sweep.
  int target_seed_episodes = 6;
  double gen_eval_lo = 5.0;
  double gen_eval_hi = 15.0;
  int gen_trials = 10;
  FinetuneParams finetune;

  std::vector<std::string> variants{
      "waypoint",          "td-waypoint",
      "waypoint-discrete", "direct-actions",
      "direct-actions-discrete", "waypoint-no-pruning",
      "waypoint-only-positives"};

  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string commit = "unversioned";

  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_config(const ConfigFile& file);
};

struct ResultCell {
  std::string variant;
  double bucket = 0.0;
  double success_rate = 0.0;
  double mean_fraction = 0.0;
  int n = 0;

  bool operator==(const ResultCell&) const = default;
};

/// Aggregated sweep output with provenance; CSV form round-trips exactly.
struct ResultsTable {
  std::vector<ResultCell> cells;  // variant-major in config order
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string commit = "unversioned";

  bool operator==(const ResultsTable&) const = default;

  void save_csv(const std::filesystem::path& path) const;
  static ResultsTable load_csv(const std::filesystem::path& path);
};

struct EpisodeRow {
  std::string variant;
  double bucket = 0.0;
  int goal_id = 0;
  std::uint64_t seed = 0;  // simulator seed of this run
  bool success = false;
  double fraction = 0.0;
  int steps = 0;
  std::string failure_mode;
};

void save_episode_rows(const std::filesystem::path& path,
                       const std::vector<EpisodeRow>& rows);

struct AblationResult {
  ResultsTable table;
  std::vector<EpisodeRow> episodes;
};

struct AdaptationPoint {
  std::string map_name;
  double budget_fraction = 0.0;
  double minutes = 0.0;
  int practice_episodes = 0;
  double success_rate = 0.0;
  double mean_fraction = 0.0;
};

struct GeneralizationResult {
  ResultsTable table;  // variant in {ving-source, ving-target, ving-finetune},
                       // bucket = target-map index
  std::vector<EpisodeRow> episodes;
  std::vector<AdaptationPoint> curve;
  std::vector<std::string> map_names;
};

/// Trains every ablation variant on one shared corpus and evaluates all of
/// them on identical goals, start poses and simulator seeds. A variant that
/// throws is recorded as zero-success rows and the sweep continues.
AblationResult run_ablation(const ExperimentConfig& config);

/// Per target map: evaluates source models zero-shot, models trained from
/// the target seed corpus alone, and the autonomous finetuning loop — all on
/// one fixed episode set per map.
GeneralizationResult run_generalization(const ExperimentConfig& config);

/// Writes tables, per-episode rows, plot-ready curve series and a markdown
/// summary into out_dir. Null inputs are skipped.
void emit_report(const AblationResult* ablation,
                 const GeneralizationResult* generalization,
                 const std::filesystem::path& out_dir);

/// One line of a goals file: start pose plus goal position, in map meters.
struct GoalSpec {
  Pose2 start;
  double gx = 0.0;
  double gy = 0.0;
};

/// Text format: one "start_x start_y start_theta goal_x goal_y" per line;
/// '#' starts a comment.
std::vector<GoalSpec> load_goals(const std::filesystem::path& path);
void save_goals(const std::filesystem::path& path,
                const std::vector<GoalSpec>& goals);

}  // namespace graphnav
