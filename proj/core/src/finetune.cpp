#include "graphnav/finetune.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "graphnav/seeding.hpp"
#include "graphnav/stats.hpp"

namespace graphnav {

namespace {

/// Source and target corpora concatenated, ids renumbered to positions so
/// pair sampling sees one coherent set.
TrajectorySet merge_sets(const TrajectorySet& a, const TrajectorySet& b) {
  TrajectorySet merged;
  merged.trajectories.reserve(a.size() + b.size());
  for (const Trajectory& t : a.trajectories) merged.trajectories.push_back(t);
  for (const Trajectory& t : b.trajectories) merged.trajectories.push_back(t);
  for (std::size_t i = 0; i < merged.trajectories.size(); ++i)
    merged.trajectories[i].id = static_cast<int>(i);
  return merged;
}

const Trajectory& traj_by_id(const TrajectorySet& set, int id) {
  const auto pos = static_cast<std::size_t>(id);
  if (pos < set.size() && set.trajectories[pos].id == id)
    return set.trajectories[pos];
  for (const Trajectory& t : set.trajectories)
    if (t.id == id) return t;
  throw std::out_of_range("trajectory id not in set");
}

struct PhaseEval {
  double success = 0.0;
  double fraction = 0.0;
  std::vector<EpisodeResult> results;
};

PhaseEval evaluate_phase(const sim::WorldMap& map,
                         const sim::SimParams& sim_params,
                         const TopoGraph& graph, const TraversabilityModel& T,
                         const PoseModel& P,
                         const std::vector<EpisodeSetup>& eval_episodes,
                         const AgentConfig& config, std::uint64_t eval_seed) {
  Agent agent(&graph, Agent::Models{&T, &P, nullptr}, config, sim_params);
  PhaseEval out;
  out.results =
      evaluate_episodes(map, sim_params, agent, eval_episodes, eval_seed);
  if (out.results.empty()) return out;
  std::vector<double> successes, fractions;
  for (const EpisodeResult& r : out.results) {
    successes.push_back(r.success ? 1.0 : 0.0);
    fractions.push_back(r.fraction);
  }
  out.success = mean(successes);
  out.fraction = mean(fractions);
  return out;
}

}  // namespace

FinetuneResult finetune_loop(const sim::WorldMap& target_map,
                             const sim::SimParams& sim_params,
                             const TrajectorySet& source_set,
                             const TrajectorySet& target_seed_set,
                             const TraversabilityModel& T0, const PoseModel& P0,
                             const std::vector<EpisodeSetup>& eval_episodes,
                             const FinetuneParams& params) {
  if (params.report_fractions.empty())
    throw std::invalid_argument("report_fractions must not be empty");
  if (!std::is_sorted(params.report_fractions.begin(),
                      params.report_fractions.end()))
    throw std::invalid_argument("report_fractions must be ascending");
  for (double f : params.report_fractions)
    if (f < 0.0 || f > 1.0)
      throw std::invalid_argument("report fractions must lie in [0, 1]");
  if (target_seed_set.trajectories.empty())
    throw std::invalid_argument("target seed corpus is empty");

  FinetuneResult result{T0, P0, TopoGraph{}, target_seed_set, {}};
  for (std::size_t i = 0; i < result.target_set.trajectories.size(); ++i)
    result.target_set.trajectories[i].id = static_cast<int>(i);
  result.graph = build_graph(result.target_set, result.T, params.graph);

  std::mt19937_64 practice_rng(mix_seed(params.seed, 0x9AC7u));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const std::uint64_t eval_seed = mix_seed(params.seed, 0xE7A1u);

  AgentConfig practice_config = params.agent;
  practice_config.step_limit = params.practice_step_limit;

  double minutes_used = 0.0;
  int episodes_done = 0;
  int records_since_finetune = 0;
  int finetune_round = 0;

  for (double fraction : params.report_fractions) {
    const double target_minutes = fraction * params.budget_minutes;

    // Practice up to this phase's share of the budget.
    int attempts = 0;
    while (minutes_used + 1e-9 < target_minutes && attempts < 1000) {
      ++attempts;
      Agent agent(&result.graph,
                  Agent::Models{&result.T, &result.P, nullptr},
                  practice_config, sim_params);
      std::uniform_int_distribution<int> pick(0, result.graph.node_count() - 1);
      const GraphNode& goal_node = result.graph.node(pick(practice_rng));
      const Trajectory& goal_traj = traj_by_id(result.target_set,
                                               goal_node.traj_id);
      if (goal_node.idx < 0 ||
          static_cast<std::size_t>(goal_node.idx) >= goal_traj.gt_poses.size())
        continue;  // no ground-truth sidecar for this node

      EpisodeSetup setup;
      setup.start = sim::sample_spawn(target_map, sim_params, practice_rng);
      setup.lighting = uni(practice_rng);
      setup.goal_pose = goal_traj.gt_poses[static_cast<std::size_t>(goal_node.idx)];
      setup.goal_obs = goal_node.obs;

      sim::Simulator simulator(
          target_map, sim_params,
          mix_seed(params.seed, 0x51E0u + static_cast<std::uint64_t>(episodes_done)));
      Trajectory practice;
      run_episode(simulator, agent, setup, &practice);
      minutes_used += static_cast<double>(practice.records.size()) *
                      sim_params.dt / 60.0;
      ++episodes_done;
      if (practice.records.size() >= 2) {
        practice.id = static_cast<int>(result.target_set.trajectories.size());
        records_since_finetune += static_cast<int>(practice.records.size());
        result.target_set.trajectories.push_back(std::move(practice));
      }
    }

    // Fold the new experience in and refresh the graph.
    if (records_since_finetune > 0) {
      const TrajectorySet combined = merge_sets(source_set, result.target_set);
      const std::uint64_t round = static_cast<std::uint64_t>(finetune_round);
      Dataset dataset = make_dataset(combined, params.dataset,
                                     mix_seed(params.seed, 0xDA7Au + round));
      TrainParams train = params.finetune_train;
      train.seed = mix_seed(params.seed, 0xF17Eu + round);
      train_supervised(result.T, result.P, combined, dataset, train);
      result.graph = build_graph(result.target_set, result.T, params.graph);
      records_since_finetune = 0;
      ++finetune_round;
    }

    PhaseEval eval =
        evaluate_phase(target_map, sim_params, result.graph, result.T,
                       result.P, eval_episodes, params.agent, eval_seed);
    result.phases.push_back({fraction, minutes_used, episodes_done,
                             eval.success, eval.fraction,
                             std::move(eval.results)});
  }
  return result;
}

}  // namespace graphnav
