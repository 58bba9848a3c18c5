#include "graphnav/agent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "graphnav/seeding.hpp"

namespace graphnav {

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "waypoint" || name == "waypoint-pd")
    return ControllerKind::WaypointPd;
  if (name == "waypoint-discrete") return ControllerKind::WaypointDiscrete;
  if (name == "direct-actions") return ControllerKind::DirectActions;
  if (name == "direct-actions-discrete")
    return ControllerKind::DirectActionsDiscrete;
  throw std::invalid_argument("unknown controller kind: " + name);
}

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::WaypointPd: return "waypoint";
    case ControllerKind::WaypointDiscrete: return "waypoint-discrete";
    case ControllerKind::DirectActions: return "direct-actions";
    case ControllerKind::DirectActionsDiscrete:
      return "direct-actions-discrete";
  }
  throw std::logic_error("bad controller kind");
}

void AgentConfig::validate(double graph_delta_sparsify) const {
  if (delta_goal <= 0.0) throw std::invalid_argument("delta_goal must be > 0");
  if (delta_goal < graph_delta_sparsify)
    throw std::invalid_argument(
        "delta_goal below delta_sparsify: adjacent graph nodes would sit "
        "beyond the goal-declaration radius and the agent could circle a "
        "waypoint forever");
  if (replan_period < 1)
    throw std::invalid_argument("replan_period must be >= 1");
  if (step_limit < 1) throw std::invalid_argument("step_limit must be >= 1");
  if (localize_k < 1) throw std::invalid_argument("localize_k must be >= 1");
}

sim::ControlCommand PdController::control(const PoseDelta& dp,
                                          const PdGains& gains,
                                          const sim::SimParams& sim_params) {
  const double phi = std::atan2(dp.y, dp.x);
  const double dist = std::hypot(dp.x, dp.y);
  const double dphi =
      has_prev_ ? wrap_angle(phi - prev_phi_) / sim_params.dt : 0.0;
  prev_phi_ = phi;
  has_prev_ = true;

  const double omega = gains.k_omega * phi + gains.k_d * dphi;
  const double v = gains.k_v * dist * std::max(0.0, std::cos(phi));
  return {std::clamp(v, 0.0, sim_params.v_max),
          std::clamp(omega, -sim_params.omega_max, sim_params.omega_max)};
}

Agent::Agent(const TopoGraph* graph, Models models, AgentConfig config,
             sim::SimParams sim_params)
    : graph_(graph),
      models_(models),
      config_(config),
      sim_params_(sim_params) {
  if (models_.T == nullptr)
    throw std::invalid_argument("agent requires T for goal detection");
  const bool waypoint = config_.kind == ControllerKind::WaypointPd ||
                        config_.kind == ControllerKind::WaypointDiscrete;
  if (waypoint) {
    if (graph_ == nullptr)
      throw std::invalid_argument("waypoint controllers require a graph");
    config_.validate(graph_->delta_sparsify());
    scorer_.emplace(*models_.T);
    std::vector<const Observation*> obs;
    obs.reserve(static_cast<std::size_t>(graph_->node_count()));
    for (const GraphNode& n : graph_->nodes()) obs.push_back(&n.obs);
    scorer_->set_nodes(obs);
  } else {
    config_.validate(0.0);
  }
  if (config_.kind == ControllerKind::WaypointPd && models_.P == nullptr)
    throw std::invalid_argument("waypoint controller requires P");
  const bool needs_bc = config_.kind == ControllerKind::WaypointDiscrete ||
                        config_.kind == ControllerKind::DirectActions ||
                        config_.kind == ControllerKind::DirectActionsDiscrete;
  if (needs_bc) {
    if (models_.bc == nullptr)
      throw std::invalid_argument("controller requires a BC model");
    const bool want_discrete =
        config_.kind != ControllerKind::DirectActions;
    if (models_.bc->discrete != want_discrete)
      throw std::invalid_argument("BC model head does not match controller");
  }
}

void Agent::begin_episode(const Observation& goal_obs) {
  goal_obs_ = goal_obs;
  plan_.reset();
  plan_age_ = 0;
  pd_.reset();
  goal_hits_.clear();
  if (scorer_) {
    try {
      goal_hits_ = localize(*graph_, *scorer_, goal_obs_, config_.localize_k,
                            LocalizeDirection::ToQuery);
    } catch (const LocalizationFailed&) {
      // Leave empty: planning can still succeed through a direct
      // start -> goal edge.
    }
  }
}

sim::ControlCommand Agent::bank_command(const Eigen::VectorXd& logits) const {
  Eigen::Index best = 0;
  logits.maxCoeff(&best);
  return command_bank(sim_params_)[static_cast<std::size_t>(best)];
}

AgentDecision Agent::act(const Observation& o_t) {
  if (models_.T->expected(o_t, goal_obs_) <= config_.delta_goal)
    return GoalReachedSignal{};

  switch (config_.kind) {
    case ControllerKind::DirectActions: {
      const Eigen::VectorXd y = models_.bc->predict(o_t, goal_obs_);
      return sim::ControlCommand{
          std::clamp(y[0], 0.0, sim_params_.v_max),
          std::clamp(y[1], -sim_params_.omega_max, sim_params_.omega_max)};
    }
    case ControllerKind::DirectActionsDiscrete:
      return bank_command(models_.bc->predict(o_t, goal_obs_));
    case ControllerKind::WaypointPd:
    case ControllerKind::WaypointDiscrete:
      return act_waypoint(o_t);
  }
  throw std::logic_error("bad controller kind");
}

AgentDecision Agent::act_waypoint(const Observation& o_t) {
  if (plan_) ++plan_age_;
  if (!plan_ || plan_age_ >= config_.replan_period) {
    try {
      plan_ = plan_path_cached_goal(*graph_, *scorer_, o_t, goal_obs_,
                                    goal_hits_, config_.localize_k);
      plan_age_ = 0;
    } catch (const LocalizationFailed&) {
      return AgentFailure{"localization_failed"};
    } catch (const NoPath&) {
      return AgentFailure{"no_path"};
    }
  } else {
    // Advance along the cached plan: drop interior waypoints the model
    // already considers reached.
    auto& ids = plan_->node_ids;
    while (ids.size() > 2 && ids[1] != kGoalAnchor &&
           models_.T->expected(o_t, graph_->node(ids[1]).obs) <=
               config_.delta_goal) {
      ids.erase(ids.begin() + 1);
    }
  }

  const auto wp = next_waypoint(*plan_, *graph_);
  if (std::holds_alternative<GoalAlreadyReached>(wp)) return GoalReachedSignal{};
  const Observation& target = std::get<Observation>(wp);

  if (config_.kind == ControllerKind::WaypointDiscrete)
    return bank_command(models_.bc->predict(o_t, target));
  const PoseDelta dp = models_.P->predict(o_t, target);
  return pd_.control(dp, config_.gains, sim_params_);
}

namespace {

double remaining_gt(const sim::Simulator& simulator, const EpisodeSetup& setup) {
  return sim::ground_truth_distance(simulator.state().x, simulator.state().y,
                                    setup.goal_pose.x, setup.goal_pose.y,
                                    simulator.map());
}

double fraction_complete(double initial, double remaining) {
  if (initial <= 0.0) return 1.0;
  if (!std::isfinite(initial) || !std::isfinite(remaining)) return 0.0;
  return std::clamp(1.0 - remaining / initial, 0.0, 1.0);
}

}  // namespace

EpisodeResult run_episode(sim::Simulator& simulator, Agent& agent,
                          const EpisodeSetup& setup, Trajectory* out_traj) {
  simulator.reset(setup.start, setup.lighting);
  agent.begin_episode(setup.goal_obs);
  if (out_traj != nullptr) {
    out_traj->lighting = setup.lighting;
    out_traj->records.clear();
    out_traj->gt_poses.clear();
  }

  const double initial = remaining_gt(simulator, setup);
  EpisodeResult result;

  // Net odometric displacement over a sliding window drives stuck detection;
  // ground truth is never consulted while the episode runs.
  Pose2 odom_pose{};
  std::vector<std::pair<double, double>> odom_trace{{0.0, 0.0}};

  const int limit = agent.config().step_limit;
  for (int t = 0; t < limit; ++t) {
    const Observation obs = simulator.observe();
    const AgentDecision decision = agent.act(obs);

    if (std::holds_alternative<GoalReachedSignal>(decision)) {
      const double remaining = remaining_gt(simulator, setup);
      result.success = remaining <= setup.success_radius;
      result.fraction = fraction_complete(initial, remaining);
      result.steps = t;
      if (!result.success) result.failure_mode = "false_goal";
      return result;
    }
    if (const auto* fail = std::get_if<AgentFailure>(&decision)) {
      const double remaining = remaining_gt(simulator, setup);
      result.fraction = fraction_complete(initial, remaining);
      result.steps = t;
      result.failure_mode = fail->mode;
      return result;
    }

    const auto& cmd = std::get<sim::ControlCommand>(decision);
    const Pose2 gt_pose = simulator.state();
    const sim::OdometryDelta delta = simulator.step(cmd);
    if (out_traj != nullptr) {
      out_traj->records.push_back({obs, cmd, delta});
      out_traj->gt_poses.push_back(gt_pose);
    }

    odom_pose = compose(odom_pose, Pose2{delta.dx, delta.dy, delta.dtheta});
    odom_trace.emplace_back(odom_pose.x, odom_pose.y);
    const int steps_taken = t + 1;
    if (steps_taken >= setup.stuck_window) {
      const auto& old =
          odom_trace[static_cast<std::size_t>(steps_taken - setup.stuck_window)];
      const double moved = std::hypot(odom_pose.x - old.first,
                                      odom_pose.y - old.second);
      if (moved < setup.stuck_epsilon) {
        const double remaining = remaining_gt(simulator, setup);
        result.fraction = fraction_complete(initial, remaining);
        result.steps = steps_taken;
        result.failure_mode = "stuck";
        return result;
      }
    }
  }

  const double remaining = remaining_gt(simulator, setup);
  result.fraction = fraction_complete(initial, remaining);
  result.steps = limit;
  result.failure_mode = "timeout";
  return result;
}

std::vector<EpisodeSetup> sample_eval_episodes(const sim::WorldMap& map,
                                               const sim::SimParams& params,
                                               int count, double d_lo,
                                               double d_hi,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<EpisodeSetup> episodes;
  episodes.reserve(static_cast<std::size_t>(count));
  int attempts = 0;
  const int max_attempts = 20000 * std::max(count, 1);
  while (static_cast<int>(episodes.size()) < count) {
    if (++attempts > max_attempts)
      throw std::runtime_error(
          "could not sample start/goal pairs in the requested distance band");
    const sim::RobotState start = sim::sample_spawn(map, params, rng);
    const sim::RobotState goal = sim::sample_spawn(map, params, rng);
    const double d =
        sim::ground_truth_distance(start.x, start.y, goal.x, goal.y, map);
    if (!(d >= d_lo && d <= d_hi)) continue;
    EpisodeSetup ep;
    ep.start = start;
    ep.lighting = uni(rng);
    ep.goal_pose = goal;
    ep.goal_obs = sim::observe(goal, map, uni(rng), params);
    episodes.push_back(std::move(ep));
  }
  return episodes;
}

std::vector<EpisodeResult> evaluate_episodes(
    const sim::WorldMap& map, const sim::SimParams& params, Agent& agent,
    const std::vector<EpisodeSetup>& episodes, std::uint64_t seed) {
  std::vector<EpisodeResult> results;
  results.reserve(episodes.size());
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    sim::Simulator simulator(map, params, mix_seed(seed, i));
    results.push_back(run_episode(simulator, agent, episodes[i]));
  }
  return results;
}

}  // namespace graphnav
