#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphnav/agent.hpp"
#include "graphnav/collect.hpp"
#include "graphnav/experiment.hpp"
#include "graphnav/finetune.hpp"
#include "graphnav/models.hpp"
#include "graphnav/pair_dataset.hpp"
#include "graphnav/seeding.hpp"
#include "graphnav/topo_graph.hpp"
#include "graphnav/training.hpp"
#include "graphnav/world_map.hpp"

namespace {

using namespace graphnav;

std::vector<int> parse_hidden(const std::string& spec) {
  std::vector<int> hidden;
  std::string cur;
  for (char ch : spec + ",") {
    if (ch == ',') {
      if (!cur.empty()) hidden.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (hidden.empty()) throw CLI::ValidationError("--hidden", "empty layer list");
  return hidden;
}

struct MakeMapArgs {
  std::filesystem::path out;
  sim::MapGenParams gen;
  std::uint32_t seed = 0;
};

int run_make_map(const MakeMapArgs& a) {
  const sim::WorldMap map = sim::generate_map(a.gen, a.seed);
  map.save(a.out);
  int traversable = 0;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.traversable_at(x, y)) ++traversable;
  std::cout << "wrote " << a.out.string() << ": " << map.width() << "x"
            << map.height() << ", " << traversable << " traversable cells, "
            << map.largest_component().size() << " in largest component\n";
  return 0;
}

struct CollectArgs {
  std::filesystem::path map_path, out_dir;
  int episodes = 24;
  int steps = 300;
  std::uint64_t seed = 0;
  std::string policy = "mix";
  bool no_noise = false;
};

int run_collect(const CollectArgs& a) {
  const sim::WorldMap map = sim::WorldMap::load(a.map_path);
  sim::SimParams sim_params;
  CollectParams params;
  params.steps = a.steps;
  params.odom_noise = !a.no_noise;
  bool mix = a.policy == "mix";
  if (!mix) params.policy = collect_policy_from_string(a.policy);
  const TrajectorySet set =
      collect_corpus(map, sim_params, params, a.episodes, a.seed, mix);
  std::filesystem::create_directories(a.out_dir);
  set.save_dir(a.out_dir);
  std::cout << "wrote " << set.size() << " trajectories ("
            << set.total_records() << " records) to " << a.out_dir.string()
            << "; coverage " << coverage(map, set) << "\n";
  return 0;
}

struct TrainArgs {
  std::filesystem::path data_dir, out_path, curves_path;
  std::string mode = "supervised";
  std::string bc = "none";
  std::string hidden = "128,128";
  int epochs = 30;
  int batch_size = 128;
  double learning_rate = 1e-4;
  int d_max = kDefaultDMax;
  int pairs_per_traj = 840;
  int window = 2 * kDefaultDMax;
  double negative_ratio = 1.0;
  double max_range = 12.0;
  double fan_deg = 170.0;
  bool only_positives = false;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  const TrajectorySet set = TrajectorySet::load_dir(a.data_dir);
  if (set.trajectories.empty() || set.trajectories[0].records.empty())
    throw std::runtime_error("no trajectory data in " + a.data_dir.string());
  const int ray_count = set.trajectories[0].records[0].obs.ray_count;
  const Normalizer norm{1.0 / a.max_range, 1.0, a.fan_deg};
  const std::vector<int> hidden = parse_hidden(a.hidden);

  DatasetParams dp;
  dp.pairs_per_traj = a.pairs_per_traj;
  dp.window = a.window;
  dp.d_max = a.d_max;
  dp.negative_ratio = a.only_positives ? 0.0 : a.negative_ratio;
  const Dataset dataset = make_dataset(set, dp, mix_seed(a.seed, 0xDA7Au));

  TrainParams tp;
  tp.epochs = a.epochs;
  tp.batch_size = a.batch_size;
  tp.learning_rate = a.learning_rate;

  ModelBundle bundle;
  LossCurves curves;
  bundle.T = TraversabilityModel::make(ray_count, norm, a.d_max, hidden,
                                       mix_seed(a.seed, 0x5701u));
  bundle.P = PoseModel::make(ray_count, norm, hidden, mix_seed(a.seed, 0x5702u));
  if (a.mode == "supervised") {
    tp.seed = mix_seed(a.seed, 0x5703u);
    curves = train_supervised(*bundle.T, *bundle.P, set, dataset, tp);
  } else if (a.mode == "td") {
    TdTrainParams td;
    td.base = tp;
    td.base.seed = mix_seed(a.seed, 0x5705u);
    curves.t_loss = train_td(*bundle.T, set, dataset.negatives, td);
    tp.seed = mix_seed(a.seed, 0x5703u);
    curves.p_loss = train_p_supervised(*bundle.P, set, dataset, tp);
  } else {
    throw CLI::ValidationError("--mode", "expected supervised or td");
  }

  if (a.bc == "continuous" || a.bc == "both") {
    BcModel m = BcModel::make(ray_count, norm, false, kBankSize, hidden,
                              mix_seed(a.seed, 0x5708u));
    TrainParams bt = tp;
    bt.seed = mix_seed(a.seed, 0x5709u);
    train_bc(m, set, dataset.positives, sim::SimParams{}, bt);
    bundle.bc = std::move(m);
  }
  if (a.bc == "discrete" || a.bc == "both") {
    BcModel m = BcModel::make(ray_count, norm, true, kBankSize, hidden,
                              mix_seed(a.seed, 0x570Au));
    TrainParams bt = tp;
    bt.seed = mix_seed(a.seed, 0x570Bu);
    train_bc(m, set, dataset.positives, sim::SimParams{}, bt);
    if (a.bc == "both") {
      // Keep both heads by saving discrete separately next to the bundle.
      ModelBundle disc;
      disc.bc = std::move(m);
      auto disc_path = a.out_path;
      disc_path.replace_extension(".discrete" +
                                  a.out_path.extension().string());
      disc.save(disc_path);
    } else {
      bundle.bc = std::move(m);
    }
  }

  bundle.save(a.out_path);
  if (!a.curves_path.empty()) {
    std::ofstream out(a.curves_path);
    out << "epoch,t_loss,p_loss\n";
    const std::size_t n = std::max(curves.t_loss.size(), curves.p_loss.size());
    for (std::size_t e = 0; e < n; ++e) {
      out << e << ',';
      if (e < curves.t_loss.size()) out << curves.t_loss[e];
      out << ',';
      if (e < curves.p_loss.size()) out << curves.p_loss[e];
      out << "\n";
    }
  }
  std::cout << "wrote " << a.out_path.string();
  if (!curves.t_loss.empty())
    std::cout << "; T loss " << curves.t_loss.front() << " -> "
              << curves.t_loss.back();
  if (!curves.p_loss.empty())
    std::cout << "; P loss " << curves.p_loss.front() << " -> "
              << curves.p_loss.back();
  std::cout << "\n";
  return 0;
}

struct BuildGraphArgs {
  std::filesystem::path data_dir, models_path, out_path;
  GraphBuildParams params;
};

int run_build_graph(const BuildGraphArgs& a) {
  const TrajectorySet set = TrajectorySet::load_dir(a.data_dir);
  const ModelBundle bundle = ModelBundle::load(a.models_path);
  if (!bundle.T) throw std::runtime_error("model bundle lacks T");
  const TopoGraph graph = build_graph(set, *bundle.T, a.params);
  graph.save(a.out_path);
  std::cout << "wrote " << a.out_path.string() << ": " << graph.node_count()
            << " nodes (" << set.total_records() << " raw), "
            << graph.edge_count() << " edges\n";
  return 0;
}

struct EvalArgs {
  std::filesystem::path map_path, graph_path, models_path, goals_path, out_path;
  std::string controller = "waypoint";
  int seeds = 10;
  std::uint64_t seed = 0;
  double delta_goal = 3.0;
  int replan_period = 1;
  int step_limit = 400;
  int localize_k = 5;
};

int run_eval(const EvalArgs& a) {
  const sim::WorldMap map = sim::WorldMap::load(a.map_path);
  const sim::SimParams sim_params;
  const ModelBundle bundle = ModelBundle::load(a.models_path);
  if (!bundle.T) throw std::runtime_error("model bundle lacks T");

  AgentConfig config;
  config.kind = controller_kind_from_string(a.controller);
  config.delta_goal = a.delta_goal;
  config.replan_period = a.replan_period;
  config.step_limit = a.step_limit;
  config.localize_k = a.localize_k;

  const bool waypoint = config.kind == ControllerKind::WaypointPd ||
                        config.kind == ControllerKind::WaypointDiscrete;
  TopoGraph graph;
  if (waypoint) {
    if (a.graph_path.empty())
      throw CLI::ValidationError("--graph", "required for waypoint controllers");
    graph = TopoGraph::load(a.graph_path);
  }
  Agent::Models models{bundle.T ? &*bundle.T : nullptr,
                       bundle.P ? &*bundle.P : nullptr,
                       bundle.bc ? &*bundle.bc : nullptr};
  Agent agent(waypoint ? &graph : nullptr, models, config, sim_params);

  const auto goals = load_goals(a.goals_path);
  std::ofstream out(a.out_path);
  if (!out) throw std::runtime_error("cannot write " + a.out_path.string());
  out << "goal_id,seed,success,fraction,steps,failure_mode\n";
  int successes = 0;
  for (std::size_t gi = 0; gi < goals.size(); ++gi) {
    const GoalSpec& g = goals[gi];
    const double goal_theta = std::atan2(g.gy - g.start.y, g.gx - g.start.x);
    for (int s = 0; s < a.seeds; ++s) {
      std::mt19937_64 rng(
          mix_seed(a.seed, (static_cast<std::uint64_t>(gi) << 20) +
                               static_cast<std::uint64_t>(s)));
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      EpisodeSetup setup;
      setup.start = g.start;
      setup.lighting = uni(rng);
      setup.goal_pose = {g.gx, g.gy, goal_theta};
      setup.goal_obs =
          sim::observe(setup.goal_pose, map, uni(rng), sim_params);
      sim::Simulator simulator(map, sim_params, rng());
      const EpisodeResult r = run_episode(simulator, agent, setup);
      if (r.success) ++successes;
      char frac[32];
      std::snprintf(frac, sizeof(frac), "%.17g", r.fraction);
      out << gi << ',' << s << ',' << (r.success ? 1 : 0) << ',' << frac << ','
          << r.steps << ',' << r.failure_mode << "\n";
    }
  }
  const int total = static_cast<int>(goals.size()) * a.seeds;
  std::cout << "wrote " << a.out_path.string() << ": " << successes << "/"
            << total << " successful episodes\n";
  return 0;
}

int run_ablate(const std::filesystem::path& config_path,
               const std::filesystem::path& out_dir) {
  const ExperimentConfig config = ExperimentConfig::from_file(config_path);
  const AblationResult result = run_ablation(config);
  emit_report(&result, nullptr, out_dir);
  std::cout << "wrote ablation report to " << out_dir.string() << "\n";
  return 0;
}

int run_generalize(const std::filesystem::path& config_path,
                   const std::filesystem::path& out_dir) {
  const ExperimentConfig config = ExperimentConfig::from_file(config_path);
  const GeneralizationResult result = run_generalization(config);
  emit_report(nullptr, &result, out_dir);
  std::cout << "wrote generalization report to " << out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological navigation from offline trajectories"};
  app.require_subcommand(1);

  MakeMapArgs mm;
  auto* make_map = app.add_subcommand("make-map", "Generate a procedural map");
  make_map->add_option("--out", mm.out, "Output map path")->required();
  make_map->add_option("--width", mm.gen.width, "Map width in cells");
  make_map->add_option("--height", mm.gen.height, "Map height in cells");
  make_map->add_option("--wall-density", mm.gen.wall_density, "Wall fraction");
  make_map->add_option("--grass-density", mm.gen.grass_density, "Tall grass fraction");
  make_map->add_option("--bush-density", mm.gen.bush_density, "Bush fraction");
  make_map->add_option("--hole-density", mm.gen.hole_density, "Hole fraction");
  make_map->add_option("--structures", mm.gen.structure_count, "Wall structures");
  make_map->add_option("--seed", mm.seed, "Generation seed");

  CollectArgs co;
  auto* collect_cmd =
      app.add_subcommand("collect", "Collect trajectories in a map");
  collect_cmd->add_option("--map", co.map_path, "Map file")->required();
  collect_cmd->add_option("--out", co.out_dir, "Output directory")->required();
  collect_cmd->add_option("--episodes", co.episodes, "Episode count");
  collect_cmd->add_option("--steps", co.steps, "Steps per episode");
  collect_cmd->add_option("--seed", co.seed, "Base seed");
  collect_cmd->add_option("--policy", co.policy,
                          "random-walk, waypoint-tour or mix");
  collect_cmd->add_flag("--no-noise", co.no_noise, "Disable odometry noise");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train T and P on a corpus");
  train_cmd->add_option("--data", tr.data_dir, "Trajectory directory")->required();
  train_cmd->add_option("--out", tr.out_path, "Output model bundle")->required();
  train_cmd->add_option("--mode", tr.mode, "supervised or td");
  train_cmd->add_option("--bc", tr.bc, "none, continuous, discrete or both");
  train_cmd->add_option("--hidden", tr.hidden, "Hidden sizes, e.g. 128,128");
  train_cmd->add_option("--epochs", tr.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", tr.batch_size, "Batch size");
  train_cmd->add_option("--learning-rate", tr.learning_rate, "Adam step size");
  train_cmd->add_option("--d-max", tr.d_max, "Distance bin count");
  train_cmd->add_option("--pairs-per-traj", tr.pairs_per_traj,
                        "Positive pairs per trajectory");
  train_cmd->add_option("--window", tr.window, "Max positive pair separation");
  train_cmd->add_option("--negative-ratio", tr.negative_ratio,
                        "Negatives per positive");
  train_cmd->add_option("--max-range", tr.max_range, "Ray range for scaling");
  train_cmd->add_option("--fan-deg", tr.fan_deg, "Sensor fan width in degrees");
  train_cmd->add_flag("--only-positives", tr.only_positives,
                      "Skip negative mining");
  train_cmd->add_option("--curves", tr.curves_path, "Loss curve CSV path");
  train_cmd->add_option("--seed", tr.seed, "Training seed");

  BuildGraphArgs bg;
  auto* build_cmd =
      app.add_subcommand("build-graph", "Build the topological graph");
  build_cmd->add_option("--data", bg.data_dir, "Trajectory directory")->required();
  build_cmd->add_option("--models", bg.models_path, "Model bundle")->required();
  build_cmd->add_option("--out", bg.out_path, "Output graph path")->required();
  build_cmd->add_option("--delta-sparsify", bg.params.delta_sparsify,
                        "Node sparsification threshold (bins)");
  build_cmd->add_option("--delta-edge", bg.params.delta_edge,
                        "Edge cutoff (bins)");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Run goal-reaching episodes");
  eval_cmd->add_option("--map", ev.map_path, "Map file")->required();
  eval_cmd->add_option("--graph", ev.graph_path, "Graph file");
  eval_cmd->add_option("--models", ev.models_path, "Model bundle")->required();
  eval_cmd->add_option("--controller", ev.controller,
                       "waypoint, waypoint-discrete, direct-actions or "
                       "direct-actions-discrete");
  eval_cmd->add_option("--goals", ev.goals_path, "Goals file")->required();
  eval_cmd->add_option("--seeds", ev.seeds, "Seeds per goal");
  eval_cmd->add_option("--seed", ev.seed, "Base seed");
  eval_cmd->add_option("--delta-goal", ev.delta_goal, "Goal threshold (bins)");
  eval_cmd->add_option("--replan-period", ev.replan_period, "Steps per replan");
  eval_cmd->add_option("--step-limit", ev.step_limit, "Episode step limit");
  eval_cmd->add_option("--localize-k", ev.localize_k, "Localization fan-out");
  eval_cmd->add_option("--out", ev.out_path, "Results CSV")->required();

  std::filesystem::path ab_config, ab_out;
  auto* ablate_cmd = app.add_subcommand("ablate", "Run the ablation sweep");
  ablate_cmd->add_option("--config", ab_config, "Experiment config")->required();
  ablate_cmd->add_option("--out", ab_out, "Report directory")->required();

  std::filesystem::path gen_config, gen_out;
  auto* gen_cmd =
      app.add_subcommand("generalize", "Run the generalization sweep");
  gen_cmd->add_option("--config", gen_config, "Experiment config")->required();
  gen_cmd->add_option("--out", gen_out, "Report directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*make_map) return run_make_map(mm);
    if (*collect_cmd) return run_collect(co);
    if (*train_cmd) return run_train(tr);
    if (*build_cmd) return run_build_graph(bg);
    if (*eval_cmd) return run_eval(ev);
    if (*ablate_cmd) return run_ablate(ab_config, ab_out);
    if (*gen_cmd) return run_generalize(gen_config, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
