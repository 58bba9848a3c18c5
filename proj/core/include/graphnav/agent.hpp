#pragma once

#include <optional>
#include <string>
#include <variant>

#include "graphnav/command_bank.hpp"
#include "graphnav/models.hpp"
#include "graphnav/simulator.hpp"
#include "graphnav/topo_graph.hpp"
#include "graphnav/trajectory.hpp"

namespace graphnav {

/// Relative pose of a waypoint in the robot frame, as predicted by P.
using PoseDelta = Pose2;

enum class ControllerKind {
  WaypointPd,
  WaypointDiscrete,
  DirectActions,
  DirectActionsDiscrete,
};

ControllerKind controller_kind_from_string(const std::string& name);
std::string to_string(ControllerKind kind);

struct PdGains {
  double k_v = 0.5;
  double k_omega = 1.0;
  double k_d = 0.1;
};

struct AgentConfig {
  ControllerKind kind = ControllerKind::WaypointPd;
  double delta_goal = 3.0;  // bins
  int replan_period = 1;    // steps between replans
  int step_limit = 400;
  PdGains gains;
  int localize_k = 5;

  /// Goal detection must be reachable at the graph's resolution.
  void validate(double graph_delta_sparsify) const;
};

/// Position-pursuit PD law: v is gated by the cosine of the heading error so
/// the robot turns in place before driving; omega damps on the heading-error
/// derivative.
class PdController {
 public:
  void reset() { has_prev_ = false; }
  sim::ControlCommand control(const PoseDelta& dp, const PdGains& gains,
                              const sim::SimParams& sim_params);

 private:
  bool has_prev_ = false;
  double prev_phi_ = 0.0;
};

struct GoalReachedSignal {};
struct AgentFailure {
  std::string mode;  // "localization_failed" or "no_path"
};
using AgentDecision =
    std::variant<sim::ControlCommand, GoalReachedSignal, AgentFailure>;

/// The deployment loop's decision maker. Owns mutable per-episode state
/// (plan cache, PD history); models and graph are shared read-only.
class Agent {
 public:
  struct Models {
    const TraversabilityModel* T = nullptr;  // always required
    const PoseModel* P = nullptr;            // waypoint-pd
    const BcModel* bc = nullptr;             // discrete / direct kinds
  };

  Agent(const TopoGraph* graph, Models models, AgentConfig config,
        sim::SimParams sim_params);

  void begin_episode(const Observation& goal_obs);
  AgentDecision act(const Observation& o_t);

  const AgentConfig& config() const { return config_; }
  const std::optional<Plan>& current_plan() const { return plan_; }

 private:
  AgentDecision act_waypoint(const Observation& o_t);
  sim::ControlCommand bank_command(const Eigen::VectorXd& logits) const;

  const TopoGraph* graph_;
  Models models_;
  AgentConfig config_;
  sim::SimParams sim_params_;
  std::optional<PairwiseScorer> scorer_;
  Observation goal_obs_;
  std::vector<std::pair<int, double>> goal_hits_;
  std::optional<Plan> plan_;
  int plan_age_ = 0;
  PdController pd_;
};

struct EpisodeResult {
  bool success = false;
  double fraction = 0.0;  // of ground-truth path completed, in [0, 1]
  int steps = 0;
  std::string failure_mode;  // empty on success
};

struct EpisodeSetup {
  sim::RobotState start;
  double lighting = 0.5;
  Pose2 goal_pose;  // ground truth, for scoring and goal-observation capture
  Observation goal_obs;
  double success_radius = 1.8;  // m of ground-truth path left when declaring
  int stuck_window = 50;        // steps without net odometric motion
  double stuck_epsilon = 0.1;   // m
};

/// Steps the simulator under the agent until goal declaration, failure,
/// stuck detection or the agent's step limit. When out_traj is given, the
/// executed experience is recorded in trajectory form (for autonomous
/// finetuning).
EpisodeResult run_episode(sim::Simulator& simulator, Agent& agent,
                          const EpisodeSetup& setup,
                          Trajectory* out_traj = nullptr);

/// Rejection-samples episodes whose ground-truth start-to-goal path length
/// lies in [d_lo, d_hi] meters. Start and goal are independent
/// collision-free spawns; episode lighting and goal-capture lighting are
/// drawn independently. Throws when the map cannot yield such a pair.
std::vector<EpisodeSetup> sample_eval_episodes(const sim::WorldMap& map,
                                               const sim::SimParams& params,
                                               int count, double d_lo,
                                               double d_hi, std::uint64_t seed);

/// Runs each episode on a fresh per-episode simulator (seed mixed with the
/// episode index) under one shared agent. Results align with the input.
std::vector<EpisodeResult> evaluate_episodes(
    const sim::WorldMap& map, const sim::SimParams& params, Agent& agent,
    const std::vector<EpisodeSetup>& episodes, std::uint64_t seed);

}  // namespace graphnav
