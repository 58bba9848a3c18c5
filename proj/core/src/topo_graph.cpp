#include "graphnav/topo_graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>

#include "graphnav/binary_io.hpp"

namespace graphnav {

TopoGraph::TopoGraph(std::vector<GraphNode> nodes, double delta_sparsify,
                     double delta_edge)
    : nodes_(std::move(nodes)),
      adj_(nodes_.size()),
      delta_sparsify_(delta_sparsify),
      delta_edge_(delta_edge) {}

std::size_t TopoGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adj_) n += a.size();
  return n;
}

void TopoGraph::add_edge(int u, int v, double w) {
  if (u == v) throw std::invalid_argument("TopoGraph: self-edge rejected");
  adj_[static_cast<std::size_t>(u)].emplace_back(v, w);
}

void TopoGraph::finalize() {
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

void TopoGraph::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  io::write_magic(out, "GGPH");
  io::write_u8(out, 1);
  io::write_f64(out, delta_sparsify_);
  io::write_f64(out, delta_edge_);
  io::write_u64(out, nodes_.size());
  for (const auto& n : nodes_) {
    io::write_i32(out, n.traj_id);
    io::write_i32(out, n.idx);
    io::write_u32(out, static_cast<std::uint32_t>(n.obs.ray_count));
    for (float f : n.obs.frames) io::write_f32(out, f);
    io::write_f32(out, n.obs.lighting);
  }
  io::write_u64(out, edge_count());
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    for (const auto& [v, w] : adj_[u]) {
      io::write_u32(out, static_cast<std::uint32_t>(u));
      io::write_u32(out, static_cast<std::uint32_t>(v));
      io::write_f64(out, w);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TopoGraph TopoGraph::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  io::expect_magic(in, "GGPH", "graph file");
  if (io::read_u8(in) != 1) throw std::runtime_error("unsupported graph version");
  const double ds = io::read_f64(in);
  const double de = io::read_f64(in);
  const std::uint64_t n = io::read_u64(in);
  std::vector<GraphNode> nodes(n);
  for (auto& node : nodes) {
    node.traj_id = io::read_i32(in);
    node.idx = io::read_i32(in);
    node.obs.ray_count = static_cast<int>(io::read_u32(in));
    node.obs.frames.resize(static_cast<std::size_t>(4 * node.obs.ray_count));
    for (float& f : node.obs.frames) f = io::read_f32(in);
    node.obs.lighting = io::read_f32(in);
  }
  TopoGraph g(std::move(nodes), ds, de);
  const std::uint64_t m = io::read_u64(in);
  for (std::uint64_t k = 0; k < m; ++k) {
    const int u = static_cast<int>(io::read_u32(in));
    const int v = static_cast<int>(io::read_u32(in));
    const double w = io::read_f64(in);
    g.add_edge(u, v, w);
  }
  g.finalize();
  return g;
}

TopoGraph build_graph(const TrajectorySet& set, const TraversabilityModel& T,
                      const GraphBuildParams& params) {
  if (params.delta_sparsify >= params.delta_edge)
    throw std::invalid_argument(
        "build_graph: delta_sparsify must be < delta_edge");

  // Phase 1: per-trajectory sparsification. The candidate is kept once the
  // model thinks it is at least delta_sparsify steps from the last kept node.
  std::vector<GraphNode> kept;
  std::vector<std::pair<int, int>> consecutive;  // kept-index pairs, same traj
  PairwiseScorer chain_scorer(T);
  for (const auto& traj : set.trajectories) {
    if (traj.records.empty()) continue;
    std::vector<const Observation*> obs;
    obs.reserve(traj.records.size());
    for (const auto& rec : traj.records) obs.push_back(&rec.obs);
    chain_scorer.set_nodes(obs);

    std::vector<int> kept_local{0};
    int last = 0;
    const int n = static_cast<int>(traj.records.size());
    for (int i = 1; i < n; ++i) {
      const bool is_last = i == n - 1;
      if (is_last || chain_scorer.node_pair(last, i) >= params.delta_sparsify) {
        kept_local.push_back(i);
        last = i;
      }
    }
    for (std::size_t k = 0; k < kept_local.size(); ++k) {
      if (k > 0)
        consecutive.emplace_back(static_cast<int>(kept.size()) - 1,
                                 static_cast<int>(kept.size()));
      kept.push_back(GraphNode{traj.records[static_cast<std::size_t>(kept_local[k])].obs,
                               traj.id, kept_local[k]});
    }
  }

  TopoGraph graph(std::move(kept), params.delta_sparsify, params.delta_edge);
  if (graph.node_count() == 0) return graph;

  // Phase 2: all-pairs edges under the cutoff.
  std::vector<const Observation*> node_obs;
  node_obs.reserve(static_cast<std::size_t>(graph.node_count()));
  for (const auto& n : graph.nodes()) node_obs.push_back(&n.obs);
  PairwiseScorer scorer(T);
  scorer.set_nodes(node_obs);

  std::vector<std::vector<bool>> has_edge;  // only consulted for consecutive fixup
  has_edge.resize(static_cast<std::size_t>(graph.node_count()));
  for (int u = 0; u < graph.node_count(); ++u) {
    const Eigen::VectorXd w = scorer.from_node(u);
    auto& flags = has_edge[static_cast<std::size_t>(u)];
    flags.assign(static_cast<std::size_t>(graph.node_count()), false);
    for (int v = 0; v < graph.node_count(); ++v) {
      if (v == u) continue;
      if (w[v] <= params.delta_edge) {
        graph.add_edge(u, v, w[v]);
        flags[static_cast<std::size_t>(v)] = true;
      }
    }
  }
  // Consecutive retained nodes of one trajectory are always connected.
  for (const auto& [u, v] : consecutive) {
    if (!has_edge[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) {
      const double w = std::min(scorer.node_pair(u, v), params.delta_edge);
      graph.add_edge(u, v, w);
    }
  }
  graph.finalize();
  return graph;
}

std::vector<std::pair<int, double>> localize(const TopoGraph& graph,
                                             const PairwiseScorer& scorer,
                                             const Observation& query, int k,
                                             LocalizeDirection dir) {
  if (graph.node_count() == 0) throw LocalizationFailed{};
  const Eigen::VectorXd w = dir == LocalizeDirection::FromQuery
                                ? scorer.from_query(query)
                                : scorer.to_query(query);
  std::vector<std::pair<int, double>> hits;
  for (int v = 0; v < graph.node_count(); ++v)
    if (w[v] <= graph.delta_edge()) hits.emplace_back(v, w[v]);
  if (hits.empty()) throw LocalizationFailed{};
  std::sort(hits.begin(), hits.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second
                                          : a.first < b.first;
            });
  if (static_cast<int>(hits.size()) > k)
    hits.resize(static_cast<std::size_t>(k));
  return hits;
}

namespace {

Plan dijkstra_with_anchors(
    const TopoGraph& graph,
    const std::vector<std::pair<int, double>>& start_hits,
    const std::vector<std::pair<int, double>>& goal_hits,
    double direct_weight, bool has_direct, const Observation& goal_obs) {
  const int n = graph.node_count();
  const int s = n;
  const int g = n + 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(n) + 2, kInf);
  std::vector<int> prev(static_cast<std::size_t>(n) + 2, -3);

  std::vector<double> to_goal(static_cast<std::size_t>(n), kInf);
  for (const auto& [v, w] : goal_hits) to_goal[static_cast<std::size_t>(v)] = w;

  using Item = std::pair<double, int>;  // ties break toward the smaller id
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(s)] = 0.0;
  queue.emplace(0.0, s);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (u == g) break;
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    auto relax = [&](int v, double w) {
      const double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        prev[static_cast<std::size_t>(v)] = u;
        queue.emplace(nd, v);
      }
    };
    if (u == s) {
      for (const auto& [v, w] : start_hits) relax(v, w);
      if (has_direct) relax(g, direct_weight);
    } else {
      for (const auto& [v, w] : graph.out_edges(u)) relax(v, w);
      if (to_goal[static_cast<std::size_t>(u)] < kInf)
        relax(g, to_goal[static_cast<std::size_t>(u)]);
    }
  }
  if (dist[static_cast<std::size_t>(g)] == kInf) throw NoPath{};

  Plan plan;
  plan.cost = dist[static_cast<std::size_t>(g)];
  plan.goal_obs = goal_obs;
  std::vector<int> rev;
  for (int at = g; at != -3; at = prev[static_cast<std::size_t>(at)])
    rev.push_back(at);
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    if (*it == s)
      plan.node_ids.push_back(kStartAnchor);
    else if (*it == g)
      plan.node_ids.push_back(kGoalAnchor);
    else
      plan.node_ids.push_back(*it);
  }
  return plan;
}

}  // namespace

Plan plan_with_anchor_edges(
    const TopoGraph& graph,
    const std::vector<std::pair<int, double>>& start_edges,
    const std::vector<std::pair<int, double>>& goal_edges,
    const double* direct_weight, const Observation& goal_obs) {
  return dijkstra_with_anchors(graph, start_edges, goal_edges,
                               direct_weight != nullptr ? *direct_weight : 0.0,
                               direct_weight != nullptr, goal_obs);
}

Plan plan_path_cached_goal(const TopoGraph& graph, const PairwiseScorer& scorer,
                           const Observation& start_obs,
                           const Observation& goal_obs,
                           const std::vector<std::pair<int, double>>& goal_hits,
                           int localize_k) {
  std::vector<std::pair<int, double>> start_hits;
  try {
    start_hits = localize(graph, scorer, start_obs, localize_k,
                          LocalizeDirection::FromQuery);
  } catch (const LocalizationFailed&) {
    // The direct start->goal edge below may still rescue the plan.
  }
  const double direct = scorer.model().expected(start_obs, goal_obs);
  const bool has_direct = direct <= graph.delta_edge();
  if ((start_hits.empty() || goal_hits.empty()) && !has_direct)
    throw LocalizationFailed{};
  return dijkstra_with_anchors(graph, start_hits, goal_hits, direct, has_direct,
                               goal_obs);
}

Plan plan_path(const TopoGraph& graph, const PairwiseScorer& scorer,
               const Observation& start_obs, const Observation& goal_obs,
               int localize_k) {
  std::vector<std::pair<int, double>> goal_hits;
  try {
    goal_hits = localize(graph, scorer, goal_obs, localize_k,
                         LocalizeDirection::ToQuery);
  } catch (const LocalizationFailed&) {
    // Tolerated when the direct edge exists; re-checked below.
  }
  return plan_path_cached_goal(graph, scorer, start_obs, goal_obs, goal_hits,
                               localize_k);
}

std::variant<Observation, GoalAlreadyReached> next_waypoint(
    const Plan& plan, const TopoGraph& graph) {
  if (plan.node_ids.size() < 2) return GoalAlreadyReached{};
  const int next = plan.node_ids[1];
  if (next == kGoalAnchor) return plan.goal_obs;
  return graph.node(next).obs;
}

}  // namespace graphnav
