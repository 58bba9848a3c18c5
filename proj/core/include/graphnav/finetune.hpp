#pragma once

#include <cstdint>
#include <vector>

#include "graphnav/agent.hpp"
#include "graphnav/topo_graph.hpp"
#include "graphnav/training.hpp"

namespace graphnav {

struct FinetunePhase {
  double budget_fraction = 0.0;   // configured practice share at this report
  double practice_minutes = 0.0;  // sim-minutes actually consumed so far
  int practice_episodes = 0;
  double success_rate = 0.0;
  double mean_fraction = 0.0;
  std::vector<EpisodeResult> episode_results;  // aligned with eval episodes
};

struct FinetuneParams {
  double budget_minutes = 12.0;  // sim-time of autonomous practice
  std::vector<double> report_fractions{0.0, 1.0 / 3.0, 1.0};
  int practice_step_limit = 240;
  TrainParams finetune_train;  // per finetune round; warm start, few epochs
  DatasetParams dataset;       // pair sampling over source + target corpus
  GraphBuildParams graph;
  AgentConfig agent;  // waypoint controller used for practice and evaluation
  std::uint64_t seed = 0;
};

struct FinetuneResult {
  TraversabilityModel T;
  PoseModel P;
  TopoGraph graph;           // target-corpus graph under the final models
  TrajectorySet target_set;  // seed trajectories + autonomous practice
  std::vector<FinetunePhase> phases;
};

/// Autonomous adaptation to a new map: drive toward goals sampled from the
/// target graph's own nodes, fold the resulting experience into the target
/// corpus, and periodically warm-start-finetune T and P on the combined
/// source + target data, rebuilding the target graph each round. A phase
/// report (evaluating on the supplied fixed episode set, same seeds every
/// phase) is emitted at each configured fraction of the practice budget;
/// fraction 0 is the untouched starting point.
FinetuneResult finetune_loop(const sim::WorldMap& target_map,
                             const sim::SimParams& sim_params,
                             const TrajectorySet& source_set,
                             const TrajectorySet& target_seed_set,
                             const TraversabilityModel& T0, const PoseModel& P0,
                             const std::vector<EpisodeSetup>& eval_episodes,
                             const FinetuneParams& params);

}  // namespace graphnav
