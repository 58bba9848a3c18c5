#include "graphnav/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "graphnav/collect.hpp"
#include "graphnav/command_bank.hpp"
#include "graphnav/seeding.hpp"
#include "graphnav/stats.hpp"
#include "graphnav/world_map.hpp"

namespace graphnav {

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_2f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

void require_file(const std::filesystem::path& path, const char* what) {
  if (path.empty() || !std::filesystem::exists(path))
    throw std::runtime_error(std::string(what) + " not found: " + path.string());
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  return from_config(ConfigFile::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& f) {
  ExperimentConfig c;
  c.source_map = f.get_string("map.source", "");
  if (f.has("map.targets"))
    for (const std::string& s : f.get_list("map.targets"))
      c.target_maps.emplace_back(s);

  c.corpus_episodes = static_cast<int>(f.get_int("corpus.episodes", c.corpus_episodes));
  c.corpus_steps = static_cast<int>(f.get_int("corpus.steps", c.corpus_steps));
  c.graph_episodes = static_cast<int>(f.get_int("corpus.graph_episodes", c.graph_episodes));

  c.sim.dt = f.get_double("sim.dt", c.sim.dt);
  c.sim.v_max = f.get_double("sim.v_max", c.sim.v_max);
  c.sim.omega_max = f.get_double("sim.omega_max", c.sim.omega_max);
  c.sim.robot_radius = f.get_double("sim.robot_radius", c.sim.robot_radius);
  c.sim.ray_count = static_cast<int>(f.get_int("sim.ray_count", c.sim.ray_count));
  c.sim.fan_angle =
      f.get_double("sim.fan_angle_deg", c.sim.fan_angle * 180.0 / M_PI) * M_PI / 180.0;
  c.sim.max_range = f.get_double("sim.max_range", c.sim.max_range);
  c.sim.odom_noise_frac = f.get_double("sim.odom_noise_frac", c.sim.odom_noise_frac);

  if (f.has("model.hidden")) {
    c.hidden.clear();
    for (double h : f.get_double_list("model.hidden"))
      c.hidden.push_back(static_cast<int>(h));
  }
  c.d_max = static_cast<int>(f.get_int("model.d_max", c.d_max));

  c.dataset.pairs_per_traj =
      static_cast<int>(f.get_int("dataset.pairs_per_traj", c.dataset.pairs_per_traj));
  c.dataset.window = static_cast<int>(f.get_int("dataset.window", c.dataset.window));
  c.dataset.negative_ratio = f.get_double("dataset.negative_ratio", c.dataset.negative_ratio);
  c.dataset.d_max = c.d_max;

  c.train.epochs = static_cast<int>(f.get_int("train.epochs", c.train.epochs));
  c.train.batch_size = static_cast<int>(f.get_int("train.batch_size", c.train.batch_size));
  c.train.learning_rate = f.get_double("train.learning_rate", c.train.learning_rate);

  c.td.base = c.train;
  c.td.target_refresh = static_cast<int>(f.get_int("td.target_refresh", c.td.target_refresh));
  c.td.goal_window = static_cast<int>(f.get_int("td.goal_window", c.td.goal_window));
  c.td.negative_goal_prob = f.get_double("td.negative_goal_prob", c.td.negative_goal_prob);
  c.td.batches_per_epoch =
      static_cast<int>(f.get_int("td.batches_per_epoch", c.td.batches_per_epoch));

  c.graph.delta_sparsify = f.get_double("graph.delta_sparsify", c.graph.delta_sparsify);
  c.graph.delta_edge = f.get_double("graph.delta_edge", c.graph.delta_edge);

  c.agent.delta_goal = f.get_double("agent.delta_goal", c.agent.delta_goal);
  c.agent.replan_period =
      static_cast<int>(f.get_int("agent.replan_period", c.agent.replan_period));
  c.agent.step_limit = static_cast<int>(f.get_int("agent.step_limit", c.agent.step_limit));
  c.agent.gains.k_v = f.get_double("agent.k_v", c.agent.gains.k_v);
  c.agent.gains.k_omega = f.get_double("agent.k_omega", c.agent.gains.k_omega);
  c.agent.gains.k_d = f.get_double("agent.k_d", c.agent.gains.k_d);
  c.agent.localize_k = static_cast<int>(f.get_int("agent.localize_k", c.agent.localize_k));

  if (f.has("eval.buckets")) c.buckets = f.get_double_list("eval.buckets");
  c.bucket_halfwidth = f.get_double("eval.bucket_halfwidth", c.bucket_halfwidth);
  c.trials = static_cast<int>(f.get_int("eval.trials", c.trials));

  c.target_seed_episodes =
      static_cast<int>(f.get_int("generalize.seed_episodes", c.target_seed_episodes));
  c.gen_eval_lo = f.get_double("generalize.eval_lo", c.gen_eval_lo);
  c.gen_eval_hi = f.get_double("generalize.eval_hi", c.gen_eval_hi);
  c.gen_trials = static_cast<int>(f.get_int("generalize.trials", c.gen_trials));

  c.finetune.budget_minutes = f.get_double("finetune.budget_minutes", c.finetune.budget_minutes);
  c.finetune.practice_step_limit = static_cast<int>(
      f.get_int("finetune.practice_step_limit", c.finetune.practice_step_limit));
  if (f.has("finetune.report_fractions"))
    c.finetune.report_fractions = f.get_double_list("finetune.report_fractions");
  c.finetune.finetune_train = c.train;
  c.finetune.finetune_train.epochs = static_cast<int>(
      f.get_int("finetune.epochs", std::max(2, c.train.epochs / 3)));
  c.finetune.dataset = c.dataset;
  c.finetune.graph = c.graph;
  c.finetune.agent = c.agent;
  c.finetune.agent.kind = ControllerKind::WaypointPd;

  if (f.has("ablation.variants")) c.variants = f.get_list("ablation.variants");

  c.seed = static_cast<std::uint64_t>(f.get_int("seed", 0));
  if (const char* env = std::getenv("VING_SEED"))
    c.seed = std::strtoull(env, nullptr, 10);
  c.commit = f.get_string("provenance.commit", c.commit);
  c.config_hash = f.hash();

  if (!std::is_sorted(c.buckets.begin(), c.buckets.end()) ||
      std::adjacent_find(c.buckets.begin(), c.buckets.end()) != c.buckets.end())
    throw std::invalid_argument("eval.buckets must be strictly increasing");
  if (c.buckets.empty()) throw std::invalid_argument("eval.buckets is empty");
  if (c.trials < 1 || c.gen_trials < 1)
    throw std::invalid_argument("trial counts must be >= 1");
  if (!c.source_map.empty()) require_file(c.source_map, "source map");
  for (const auto& m : c.target_maps) require_file(m, "target map");
  return c;
}

void ResultsTable::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# config_hash=" << config_hash << "\n";
  out << "# seed=" << seed << "\n";
  out << "# commit=" << commit << "\n";
  out << "variant,bucket,success_rate,mean_fraction,n\n";
  for (const ResultCell& cell : cells)
    out << cell.variant << ',' << fmt_g(cell.bucket) << ','
        << fmt_g(cell.success_rate) << ',' << fmt_g(cell.mean_fraction) << ','
        << cell.n << "\n";
}

ResultsTable ResultsTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  ResultsTable table;
  std::string line;
  bool saw_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      const std::string value = line.substr(eq + 1);
      if (key == "config_hash")
        table.config_hash = std::strtoull(value.c_str(), nullptr, 10);
      else if (key == "seed")
        table.seed = std::strtoull(value.c_str(), nullptr, 10);
      else if (key == "commit")
        table.commit = value;
      continue;
    }
    if (!saw_header) {
      if (line != "variant,bucket,success_rate,mean_fraction,n")
        throw std::runtime_error(path.string() + ": unexpected header");
      saw_header = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw std::runtime_error(path.string() + ": bad row at line " +
                               std::to_string(lineno));
    ResultCell cell;
    cell.variant = fields[0];
    cell.bucket = std::stod(fields[1]);
    cell.success_rate = std::stod(fields[2]);
    cell.mean_fraction = std::stod(fields[3]);
    cell.n = std::stoi(fields[4]);
    table.cells.push_back(std::move(cell));
  }
  if (!saw_header) throw std::runtime_error(path.string() + ": missing header");
  return table;
}

void save_episode_rows(const std::filesystem::path& path,
                       const std::vector<EpisodeRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "variant,bucket,goal_id,seed,success,fraction,steps,failure_mode\n";
  for (const EpisodeRow& r : rows)
    out << r.variant << ',' << fmt_g(r.bucket) << ',' << r.goal_id << ','
        << r.seed << ',' << (r.success ? 1 : 0) << ',' << fmt_g(r.fraction)
        << ',' << r.steps << ',' << r.failure_mode << "\n";
}

namespace {

/// Builds a shared artifact at most once; a failure is remembered so every
/// dependent variant reports it instead of re-attempting the work.
template <typename T>
class Lazy {
 public:
  template <typename F>
  T& get(F&& make) {
    if (!error_.empty()) throw std::runtime_error(error_);
    if (!value_) {
      try {
        value_.emplace(make());
      } catch (const std::exception& e) {
        error_ = e.what();
        throw;
      }
    }
    return *value_;
  }

 private:
  std::optional<T> value_;
  std::string error_;
};

struct VariantSetup {
  const TopoGraph* graph = nullptr;
  Agent::Models models;
  ControllerKind kind = ControllerKind::WaypointPd;
};

struct SupervisedModels {
  TraversabilityModel T;
  PoseModel P;
};

class AblationRunner {
 public:
  explicit AblationRunner(const ExperimentConfig& config)
      : c_(config), map_(sim::WorldMap::load(c_.source_map)) {
    CollectParams cp;
    cp.steps = c_.corpus_steps;
    corpus_ = collect_corpus(map_, c_.sim, cp, c_.corpus_episodes,
                             mix_seed(c_.seed, 0xC0C0u), true);
    const auto g = static_cast<std::size_t>(
        std::clamp<int>(c_.graph_episodes, 1, static_cast<int>(corpus_.size())));
    graph_corpus_.trajectories.assign(corpus_.trajectories.begin(),
                                      corpus_.trajectories.begin() +
                                          static_cast<std::ptrdiff_t>(g));
    dataset_ = make_dataset(corpus_, c_.dataset, mix_seed(c_.seed, 0xDA7Au));
    norm_ = Normalizer{1.0 / c_.sim.max_range, 1.0,
                       c_.sim.fan_angle * 180.0 / M_PI};
  }

  const sim::WorldMap& map() const { return map_; }

  VariantSetup variant(const std::string& name) {
    if (name == "waypoint") {
      SupervisedModels& m = sup();
      return {&graph_full(), {&m.T, &m.P, nullptr}, ControllerKind::WaypointPd};
    }
    if (name == "td-waypoint") {
      SupervisedModels& m = sup();
      return {&graph_td(), {&td(), &m.P, nullptr}, ControllerKind::WaypointPd};
    }
    if (name == "waypoint-discrete") {
      SupervisedModels& m = sup();
      return {&graph_full(),
              {&m.T, nullptr, &bc_disc()},
              ControllerKind::WaypointDiscrete};
    }
    if (name == "direct-actions") {
      SupervisedModels& m = sup();
      return {nullptr,
              {&m.T, nullptr, &bc_cont()},
              ControllerKind::DirectActions};
    }
    if (name == "direct-actions-discrete") {
      SupervisedModels& m = sup();
      return {nullptr,
              {&m.T, nullptr, &bc_disc()},
              ControllerKind::DirectActionsDiscrete};
    }
    if (name == "waypoint-no-pruning") {
      SupervisedModels& m = sup();
      return {&graph_noprune(), {&m.T, &m.P, nullptr},
              ControllerKind::WaypointPd};
    }
    if (name == "waypoint-only-positives") {
      SupervisedModels& m = sup();
      return {&graph_pos(), {&only_pos(), &m.P, nullptr},
              ControllerKind::WaypointPd};
    }
    throw std::runtime_error("unknown variant: " + name);
  }

 private:
  TrainParams train_with_seed(std::uint64_t stream) const {
    TrainParams p = c_.train;
    p.seed = mix_seed(c_.seed, stream);
    return p;
  }

  SupervisedModels& sup() {
    return sup_.get([&] {
      SupervisedModels m{
          TraversabilityModel::make(c_.sim.ray_count, norm_, c_.d_max,
                                    c_.hidden, mix_seed(c_.seed, 0x5701u)),
          PoseModel::make(c_.sim.ray_count, norm_, c_.hidden,
                          mix_seed(c_.seed, 0x5702u))};
      train_supervised(m.T, m.P, corpus_, dataset_, train_with_seed(0x5703u));
      return m;
    });
  }

  TraversabilityModel& td() {
    return td_.get([&] {
      TraversabilityModel T = TraversabilityModel::make(
          c_.sim.ray_count, norm_, c_.d_max, c_.hidden,
          mix_seed(c_.seed, 0x5704u));
      TdTrainParams p = c_.td;
      p.base.seed = mix_seed(c_.seed, 0x5705u);
      train_td(T, corpus_, dataset_.negatives, p);
      return T;
    });
  }

  TraversabilityModel& only_pos() {
    return pos_.get([&] {
      TraversabilityModel T = TraversabilityModel::make(
          c_.sim.ray_count, norm_, c_.d_max, c_.hidden,
          mix_seed(c_.seed, 0x5706u));
      Dataset positives_only;
      positives_only.d_max = dataset_.d_max;
      positives_only.positives = dataset_.positives;
      train_t_supervised(T, corpus_, positives_only, train_with_seed(0x5707u));
      return T;
    });
  }

  BcModel& bc_cont() {
    return bc_cont_.get([&] {
      BcModel m = BcModel::make(c_.sim.ray_count, norm_, false, kBankSize,
                                c_.hidden, mix_seed(c_.seed, 0x5708u));
      train_bc(m, corpus_, dataset_.positives, c_.sim, train_with_seed(0x5709u));
      return m;
    });
  }

  BcModel& bc_disc() {
    return bc_disc_.get([&] {
      BcModel m = BcModel::make(c_.sim.ray_count, norm_, true, kBankSize,
                                c_.hidden, mix_seed(c_.seed, 0x570Au));
      train_bc(m, corpus_, dataset_.positives, c_.sim, train_with_seed(0x570Bu));
      return m;
    });
  }

  TopoGraph& graph_full() {
    return g_full_.get([&] { return build_graph(graph_corpus_, sup().T, c_.graph); });
  }
  TopoGraph& graph_td() {
    return g_td_.get([&] { return build_graph(graph_corpus_, td(), c_.graph); });
  }
  TopoGraph& graph_pos() {
    return g_pos_.get(
        [&] { return build_graph(graph_corpus_, only_pos(), c_.graph); });
  }
  TopoGraph& graph_noprune() {
    return g_noprune_.get([&] {
      GraphBuildParams p = c_.graph;
      p.delta_sparsify = 0.0;
      return build_graph(graph_corpus_, sup().T, p);
    });
  }

  const ExperimentConfig& c_;
  sim::WorldMap map_;
  TrajectorySet corpus_;
  TrajectorySet graph_corpus_;
  Dataset dataset_;
  Normalizer norm_;
  Lazy<SupervisedModels> sup_;
  Lazy<TraversabilityModel> td_, pos_;
  Lazy<BcModel> bc_cont_, bc_disc_;
  Lazy<TopoGraph> g_full_, g_td_, g_pos_, g_noprune_;
};

struct EvalAggregate {
  ResultCell cell;
  std::vector<EpisodeRow> rows;
};

EvalAggregate aggregate_results(const std::string& variant, double bucket,
                                int goal_id_base,
                                const std::vector<EpisodeResult>& results,
                                std::uint64_t eval_seed) {
  EvalAggregate out;
  std::vector<double> successes, fractions;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const EpisodeResult& r = results[i];
    successes.push_back(r.success ? 1.0 : 0.0);
    fractions.push_back(r.fraction);
    out.rows.push_back({variant, bucket, goal_id_base + static_cast<int>(i),
                        mix_seed(eval_seed, i), r.success, r.fraction, r.steps,
                        r.failure_mode});
  }
  out.cell = {variant, bucket, successes.empty() ? 0.0 : mean(successes),
              fractions.empty() ? 0.0 : mean(fractions),
              static_cast<int>(results.size())};
  return out;
}

EvalAggregate error_results(const std::string& variant, double bucket,
                            int goal_id_base, int n) {
  EvalAggregate out;
  out.cell = {variant, bucket, 0.0, 0.0, n};
  for (int i = 0; i < n; ++i)
    out.rows.push_back(
        {variant, bucket, goal_id_base + i, 0, false, 0.0, 0, "error"});
  return out;
}

}  // namespace

AblationResult run_ablation(const ExperimentConfig& config) {
  if (config.variants.empty())
    throw std::invalid_argument("no ablation variants configured");
  require_file(config.source_map, "source map");

  AblationRunner runner(config);

  std::vector<std::vector<EpisodeSetup>> goals;
  for (std::size_t bi = 0; bi < config.buckets.size(); ++bi) {
    const double b = config.buckets[bi];
    goals.push_back(sample_eval_episodes(
        runner.map(), config.sim, config.trials,
        std::max(0.0, b - config.bucket_halfwidth), b + config.bucket_halfwidth,
        mix_seed(config.seed, 0xB0CE00u + bi)));
  }

  AblationResult out;
  out.table.config_hash = config.config_hash;
  out.table.seed = config.seed;
  out.table.commit = config.commit;

  for (const std::string& name : config.variants) {
    std::vector<EvalAggregate> done;
    try {
      const VariantSetup vs = runner.variant(name);
      AgentConfig agent_config = config.agent;
      agent_config.kind = vs.kind;
      Agent agent(vs.graph, vs.models, agent_config, config.sim);
      for (std::size_t bi = 0; bi < config.buckets.size(); ++bi) {
        const std::uint64_t eval_seed = mix_seed(config.seed, 0xEAA100u + bi);
        const auto results = evaluate_episodes(runner.map(), config.sim, agent,
                                               goals[bi], eval_seed);
        done.push_back(aggregate_results(
            name, config.buckets[bi],
            static_cast<int>(bi) * config.trials, results, eval_seed));
      }
    } catch (const std::exception&) {
      done.clear();
      for (std::size_t bi = 0; bi < config.buckets.size(); ++bi)
        done.push_back(error_results(name, config.buckets[bi],
                                     static_cast<int>(bi) * config.trials,
                                     config.trials));
    }
    for (EvalAggregate& agg : done) {
      out.table.cells.push_back(std::move(agg.cell));
      out.episodes.insert(out.episodes.end(),
                          std::make_move_iterator(agg.rows.begin()),
                          std::make_move_iterator(agg.rows.end()));
    }
  }
  return out;
}

GeneralizationResult run_generalization(const ExperimentConfig& config) {
  if (config.target_maps.empty())
    throw std::invalid_argument("no target maps configured");
  require_file(config.source_map, "source map");

  const sim::WorldMap source_map = sim::WorldMap::load(config.source_map);
  CollectParams cp;
  cp.steps = config.corpus_steps;
  const TrajectorySet source_set =
      collect_corpus(source_map, config.sim, cp, config.corpus_episodes,
                     mix_seed(config.seed, 0xC0C0u), true);
  const Dataset source_dataset =
      make_dataset(source_set, config.dataset, mix_seed(config.seed, 0xDA7Au));
  const Normalizer norm{1.0 / config.sim.max_range, 1.0};

  TraversabilityModel T_src = TraversabilityModel::make(
      config.sim.ray_count, norm, config.d_max, config.hidden,
      mix_seed(config.seed, 0x5701u));
  PoseModel P_src = PoseModel::make(config.sim.ray_count, norm, config.hidden,
                                    mix_seed(config.seed, 0x5702u));
  TrainParams source_train = config.train;
  source_train.seed = mix_seed(config.seed, 0x5703u);
  train_supervised(T_src, P_src, source_set, source_dataset, source_train);

  GeneralizationResult out;
  out.table.config_hash = config.config_hash;
  out.table.seed = config.seed;
  out.table.commit = config.commit;

  std::vector<EvalAggregate> source_cells, target_cells, finetune_cells;

  for (std::size_t mi = 0; mi < config.target_maps.size(); ++mi) {
    const auto& map_path = config.target_maps[mi];
    const std::string map_name = map_path.stem().string();
    out.map_names.push_back(map_name);
    const double bucket = static_cast<double>(mi);
    const int goal_base = static_cast<int>(mi) * config.gen_trials;

    const sim::WorldMap target_map = sim::WorldMap::load(map_path);
    const TrajectorySet seed_set =
        collect_corpus(target_map, config.sim, cp, config.target_seed_episodes,
                       mix_seed(config.seed, 0x9E00u + mi), true);
    const auto eval_episodes = sample_eval_episodes(
        target_map, config.sim, config.gen_trials, config.gen_eval_lo,
        config.gen_eval_hi, mix_seed(config.seed, 0xE0A0u + mi));

    FinetuneParams fp = config.finetune;
    fp.seed = mix_seed(config.seed, 0xF000u + mi);
    const std::uint64_t eval_seed = mix_seed(fp.seed, 0xE7A1u);

    try {
      const FinetuneResult ft =
          finetune_loop(target_map, config.sim, source_set, seed_set, T_src,
                        P_src, eval_episodes, fp);
      source_cells.push_back(
          aggregate_results("ving-source", bucket, goal_base,
                            ft.phases.front().episode_results, eval_seed));
      finetune_cells.push_back(
          aggregate_results("ving-finetune", bucket, goal_base,
                            ft.phases.back().episode_results, eval_seed));
      for (const FinetunePhase& phase : ft.phases)
        out.curve.push_back({map_name, phase.budget_fraction,
                             phase.practice_minutes, phase.practice_episodes,
                             phase.success_rate, phase.mean_fraction});
    } catch (const std::exception&) {
      source_cells.push_back(
          error_results("ving-source", bucket, goal_base, config.gen_trials));
      finetune_cells.push_back(
          error_results("ving-finetune", bucket, goal_base, config.gen_trials));
    }

    try {
      TraversabilityModel T_t = TraversabilityModel::make(
          config.sim.ray_count, norm, config.d_max, config.hidden,
          mix_seed(config.seed, 0x7A00u + mi));
      PoseModel P_t =
          PoseModel::make(config.sim.ray_count, norm, config.hidden,
                          mix_seed(config.seed, 0x7B00u + mi));
      const Dataset target_dataset = make_dataset(
          seed_set, config.dataset, mix_seed(config.seed, 0x7C00u + mi));
      TrainParams target_train = config.train;
      target_train.seed = mix_seed(config.seed, 0x7D00u + mi);
      train_supervised(T_t, P_t, seed_set, target_dataset, target_train);
      const TopoGraph graph = build_graph(seed_set, T_t, config.graph);

      AgentConfig agent_config = config.agent;
      agent_config.kind = ControllerKind::WaypointPd;
      Agent agent(&graph, Agent::Models{&T_t, &P_t, nullptr}, agent_config,
                  config.sim);
      const auto results = evaluate_episodes(target_map, config.sim, agent,
                                             eval_episodes, eval_seed);
      target_cells.push_back(
          aggregate_results("ving-target", bucket, goal_base, results, eval_seed));
    } catch (const std::exception&) {
      target_cells.push_back(
          error_results("ving-target", bucket, goal_base, config.gen_trials));
    }
  }

  for (auto* group : {&source_cells, &target_cells, &finetune_cells}) {
    for (EvalAggregate& agg : *group) {
      out.table.cells.push_back(std::move(agg.cell));
      out.episodes.insert(out.episodes.end(),
                          std::make_move_iterator(agg.rows.begin()),
                          std::make_move_iterator(agg.rows.end()));
    }
  }
  return out;
}

namespace {

std::vector<std::string> variant_order(const ResultsTable& table) {
  std::vector<std::string> order;
  for (const ResultCell& cell : table.cells)
    if (std::find(order.begin(), order.end(), cell.variant) == order.end())
      order.push_back(cell.variant);
  return order;
}

std::vector<double> bucket_order(const ResultsTable& table) {
  std::vector<double> buckets;
  for (const ResultCell& cell : table.cells)
    if (std::find(buckets.begin(), buckets.end(), cell.bucket) == buckets.end())
      buckets.push_back(cell.bucket);
  std::sort(buckets.begin(), buckets.end());
  return buckets;
}

const ResultCell* find_cell(const ResultsTable& table,
                            const std::string& variant, double bucket) {
  for (const ResultCell& cell : table.cells)
    if (cell.variant == variant && cell.bucket == bucket) return &cell;
  return nullptr;
}

void write_markdown_table(std::ostream& out, const ResultsTable& table,
                          const std::vector<std::string>& col_names,
                          bool fractions) {
  const auto variants = variant_order(table);
  const auto buckets = bucket_order(table);
  out << "| variant |";
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (i < col_names.size())
      out << ' ' << col_names[i] << " |";
    else
      out << ' ' << fmt_g(buckets[i]) << " |";
  }
  out << "\n|---|";
  for (std::size_t i = 0; i < buckets.size(); ++i) out << "---|";
  out << "\n";
  for (const std::string& v : variants) {
    out << "| " << v << " |";
    for (double b : buckets) {
      const ResultCell* cell = find_cell(table, v, b);
      if (cell == nullptr)
        out << " - |";
      else
        out << ' '
            << fmt_2f(fractions ? cell->mean_fraction : cell->success_rate)
            << " |";
    }
    out << "\n";
  }
}

}  // namespace

void emit_report(const AblationResult* ablation,
                 const GeneralizationResult* generalization,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::vector<EpisodeRow> all_rows;
  if (ablation != nullptr) {
    ablation->table.save_csv(out_dir / "ablation_table.csv");
    all_rows.insert(all_rows.end(), ablation->episodes.begin(),
                    ablation->episodes.end());

    std::ofstream curve(out_dir / "success_vs_distance.csv");
    if (!curve) throw std::runtime_error("cannot write success_vs_distance.csv");
    curve << "variant,bucket,success_rate,mean_fraction,n\n";
    for (const ResultCell& cell : ablation->table.cells)
      curve << cell.variant << ',' << fmt_g(cell.bucket) << ','
            << fmt_g(cell.success_rate) << ',' << fmt_g(cell.mean_fraction)
            << ',' << cell.n << "\n";
  }
  if (generalization != nullptr) {
    generalization->table.save_csv(out_dir / "generalization_table.csv");
    all_rows.insert(all_rows.end(), generalization->episodes.begin(),
                    generalization->episodes.end());

    std::ofstream curve(out_dir / "adaptation_curve.csv");
    if (!curve) throw std::runtime_error("cannot write adaptation_curve.csv");
    curve << "map,budget_fraction,minutes,practice_episodes,success_rate,"
             "mean_fraction\n";
    for (const AdaptationPoint& p : generalization->curve)
      curve << p.map_name << ',' << fmt_g(p.budget_fraction) << ','
            << fmt_g(p.minutes) << ',' << p.practice_episodes << ','
            << fmt_g(p.success_rate) << ',' << fmt_g(p.mean_fraction) << "\n";
  }
  save_episode_rows(out_dir / "results.csv", all_rows);

  std::ofstream md(out_dir / "summary.md");
  if (!md) throw std::runtime_error("cannot write summary.md");
  md << "# Navigation results\n";
  if (ablation != nullptr) {
    md << "\n## Ablation: success rate by goal distance (m)\n\n";
    std::vector<std::string> cols;
    for (double b : bucket_order(ablation->table))
      cols.push_back(fmt_g(b) + " m");
    write_markdown_table(md, ablation->table, cols, false);
    md << "\n## Ablation: mean fraction of path completed\n\n";
    write_markdown_table(md, ablation->table, cols, true);
  }
  if (generalization != nullptr) {
    md << "\n## Generalization: success rate by target map\n\n";
    write_markdown_table(md, generalization->table, generalization->map_names,
                         false);
    if (!generalization->curve.empty()) {
      md << "\n## Adaptation: success against practice budget\n\n";
      md << "| map | budget fraction | minutes | episodes | success | mean "
            "fraction |\n|---|---|---|---|---|---|\n";
      for (const AdaptationPoint& p : generalization->curve)
        md << "| " << p.map_name << " | " << fmt_2f(p.budget_fraction)
           << " | " << fmt_2f(p.minutes) << " | " << p.practice_episodes
           << " | " << fmt_2f(p.success_rate) << " | "
           << fmt_2f(p.mean_fraction) << " |\n";
    }
  }
}

std::vector<GoalSpec> load_goals(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<GoalSpec> goals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    GoalSpec g;
    if (!(ss >> g.start.x)) continue;  // blank or comment-only line
    if (!(ss >> g.start.y >> g.start.theta >> g.gx >> g.gy))
      throw std::runtime_error(path.string() + ": malformed goal at line " +
                               std::to_string(lineno));
    goals.push_back(g);
  }
  return goals;
}

void save_goals(const std::filesystem::path& path,
                const std::vector<GoalSpec>& goals) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# start_x start_y start_theta goal_x goal_y\n";
  for (const GoalSpec& g : goals)
    out << fmt_g(g.start.x) << ' ' << fmt_g(g.start.y) << ' '
        << fmt_g(g.start.theta) << ' ' << fmt_g(g.gx) << ' ' << fmt_g(g.gy)
        << "\n";
}

}  // namespace graphnav
