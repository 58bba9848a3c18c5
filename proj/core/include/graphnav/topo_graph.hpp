#pragma once

#include <filesystem>
#include <stdexcept>
#include <variant>
#include <vector>

#include "graphnav/models.hpp"
#include "graphnav/trajectory.hpp"

namespace graphnav {

struct GraphNode {
  Observation obs;
  int traj_id = -1;  // provenance, evaluation only
  int idx = -1;
};

/// Directed weighted graph of retained observations. Immutable once built;
/// planning overlays transient start/goal anchors instead of mutating it.
class TopoGraph {
 public:
  TopoGraph() = default;
  TopoGraph(std::vector<GraphNode> nodes, double delta_sparsify,
            double delta_edge);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const GraphNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  double delta_sparsify() const { return delta_sparsify_; }
  double delta_edge() const { return delta_edge_; }

  /// Out-edges of u as (target, weight), sorted by target id.
  const std::vector<std::pair<int, double>>& out_edges(int u) const {
    return adj_[static_cast<std::size_t>(u)];
  }
  std::size_t edge_count() const;
  void add_edge(int u, int v, double w);
  /// Sorts adjacency lists by target id; called once after construction.
  void finalize();

  void save(const std::filesystem::path& path) const;
  static TopoGraph load(const std::filesystem::path& path);

 private:
  std::vector<GraphNode> nodes_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  double delta_sparsify_ = 3.0;
  double delta_edge_ = 15.0;
};

struct GraphBuildParams {
  double delta_sparsify = 3.0;
  double delta_edge = 15.0;
};

/// Two-phase construction: per-trajectory node sparsification by predicted
/// distance from the last kept node, then all-pairs edges under the
/// delta_edge cutoff. Consecutive retained nodes of a trajectory stay
/// connected even if the model scores them above the cutoff (weight clamped
/// to delta_edge so the edge-weight invariant holds).
TopoGraph build_graph(const TrajectorySet& set, const TraversabilityModel& T,
                      const GraphBuildParams& params);

struct LocalizationFailed : std::runtime_error {
  LocalizationFailed() : std::runtime_error("localization failed") {}
};
struct NoPath : std::runtime_error {
  NoPath() : std::runtime_error("no path") {}
};

enum class LocalizeDirection {
  FromQuery,  // edges query -> node (current observation)
  ToQuery,    // edges node -> query (goal observation)
};

/// k lowest-expected-distance nodes within delta_edge, sorted by
/// (weight, id). Throws LocalizationFailed when no node qualifies.
std::vector<std::pair<int, double>> localize(const TopoGraph& graph,
                                             const PairwiseScorer& scorer,
                                             const Observation& query,
                                             int k, LocalizeDirection dir);

constexpr int kStartAnchor = -1;
constexpr int kGoalAnchor = -2;

/// Node id sequence from the start anchor to the goal anchor, with the total
/// predicted cost and the goal observation (so next_waypoint can hand the
/// goal itself over when it is the next hop).
struct Plan {
  std::vector<int> node_ids;  // kStartAnchor, interior ids..., kGoalAnchor
  double cost = 0.0;
  Observation goal_obs;
};

/// Dijkstra over the graph augmented with transient anchor edges from
/// localize() plus a direct start->goal edge when the model scores it under
/// delta_edge. Ties break toward smaller node id. Throws NoPath when the
/// goal anchor is unreachable and LocalizationFailed when either anchor
/// cannot attach to the graph at all.
Plan plan_path(const TopoGraph& graph, const PairwiseScorer& scorer,
               const Observation& start_obs, const Observation& goal_obs,
               int localize_k);

/// The planning core with anchor edges supplied directly: start_edges go
/// start -> node, goal_edges node -> goal, direct (when non-null) start ->
/// goal. Model-free, which makes exhaustive optimality checks possible.
Plan plan_with_anchor_edges(const TopoGraph& graph,
                            const std::vector<std::pair<int, double>>& start_edges,
                            const std::vector<std::pair<int, double>>& goal_edges,
                            const double* direct_weight,
                            const Observation& goal_obs);

/// Variant reusing precomputed goal-side localization (the goal is fixed for
/// a whole episode while the query changes every step).
Plan plan_path_cached_goal(const TopoGraph& graph, const PairwiseScorer& scorer,
                           const Observation& start_obs,
                           const Observation& goal_obs,
                           const std::vector<std::pair<int, double>>& goal_hits,
                           int localize_k);

struct GoalAlreadyReached {};

/// Observation of the first node after the start anchor; the goal
/// observation when the plan jumps straight to the goal anchor.
/// Returns GoalAlreadyReached for a trivial single-node plan.
std::variant<Observation, GoalAlreadyReached> next_waypoint(
    const Plan& plan, const TopoGraph& graph);

}  // namespace graphnav
