#include "graphnav/training.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

#include "graphnav/command_bank.hpp"
#include "graphnav/seeding.hpp"

namespace graphnav {

namespace {

/// Mean cross-entropy to integer targets; writes d(loss)/d(logits).
double ce_loss_grad(const Eigen::MatrixXd& logits,
                    const std::vector<int>& targets, Eigen::MatrixXd& dlogits) {
  const Eigen::Index b = logits.rows();
  dlogits.resize(logits.rows(), logits.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < b; ++r) {
    const double m = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - m).exp();
    const double z = e.sum();
    loss += std::log(z) + m - logits(r, targets[static_cast<std::size_t>(r)]);
    dlogits.row(r) = (e / z).matrix();
    dlogits(r, targets[static_cast<std::size_t>(r)]) -= 1.0;
  }
  dlogits /= static_cast<double>(b);
  return loss / static_cast<double>(b);
}

/// Mean cross-entropy to target distributions (rows sum to 1).
double ce_loss_grad_dist(const Eigen::MatrixXd& logits,
                         const Eigen::MatrixXd& target_p,
                         Eigen::MatrixXd& dlogits) {
  const Eigen::Index b = logits.rows();
  dlogits.resize(logits.rows(), logits.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < b; ++r) {
    const double m = logits.row(r).maxCoeff();
    const Eigen::ArrayXXd e = (logits.row(r).array() - m).exp();  // 1 x bins
    const double z = e.sum();
    const Eigen::ArrayXXd logp = logits.row(r).array() - m - std::log(z);
    loss -= (target_p.row(r).array() * logp).sum();
    dlogits.row(r) = (e / z).matrix() - target_p.row(r);
  }
  dlogits /= static_cast<double>(b);
  return loss / static_cast<double>(b);
}

/// Mean squared error summed over output components; writes gradient.
double l2_loss_grad(const Eigen::MatrixXd& y, const Eigen::MatrixXd& target,
                    Eigen::MatrixXd& dy) {
  const double b = static_cast<double>(y.rows());
  dy = 2.0 * (y - target) / b;
  return (y - target).squaredNorm() / b;
}

struct IndexPair {
  int ri;
  int rj;
};

/// Replaces the lighting column with i.i.d. uniform draws so the joint
/// lighting distribution of a pair is identical for positives and negatives;
/// the nets then cannot use lighting (dis)agreement as a distance cue.
void randomize_lighting(EncodedCorpus& enc, double lighting_scale,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Eigen::Index light_col = enc.rows.cols() - 1;
  for (Eigen::Index r = 0; r < enc.rows.rows(); ++r)
    enc.rows(r, light_col) = uni(rng) * lighting_scale;
}

/// Imitates an at-rest capture for a random subset of records by copying the
/// current frame's features over the previous frame's. Goal indications and
/// post-reset queries have exactly that duplicated form.
void duplicate_frames_at_rest(EncodedCorpus& enc, int ray_count, double prob,
                              std::uint64_t seed) {
  if (prob <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Eigen::Index half = Normalizer::kFeaturesPerRay * ray_count;
  for (Eigen::Index r = 0; r < enc.rows.rows(); ++r)
    if (uni(rng) < prob)
      enc.rows.row(r).head(half) = enc.rows.row(r).segment(half, half);
}

void gather_pairs(const EncodedCorpus& enc, const std::vector<IndexPair>& pairs,
                  const std::vector<std::size_t>& order, std::size_t begin,
                  std::size_t end, Eigen::MatrixXd& x) {
  const Eigen::Index e = enc.rows.cols();
  x.resize(static_cast<Eigen::Index>(end - begin), 2 * e);
  for (std::size_t k = begin; k < end; ++k) {
    const auto& p = pairs[order[k]];
    const Eigen::Index r = static_cast<Eigen::Index>(k - begin);
    x.row(r).head(e) = enc.rows.row(p.ri);
    x.row(r).tail(e) = enc.rows.row(p.rj);
  }
}

}  // namespace

EncodedCorpus EncodedCorpus::build(const PairNet& pair,
                                   const TrajectorySet& set) {
  EncodedCorpus enc;
  const int e = pair.enc_dim();
  enc.rows.resize(static_cast<Eigen::Index>(set.total_records()), e);
  enc.traj_offset.reserve(set.size());
  // encode() needs a contiguous destination and matrix rows are strided, so
  // each row goes through a staging vector.
  Eigen::VectorXd staging(e);
  Eigen::Index r = 0;
  for (const auto& traj : set.trajectories) {
    enc.traj_offset.push_back(static_cast<int>(r));
    for (const auto& rec : traj.records) {
      if (rec.obs.ray_count != pair.ray_count)
        throw std::invalid_argument("EncodedCorpus: ray count mismatch");
      pair.norm.encode(rec.obs, staging.data());
      enc.rows.row(r) = staging;
      ++r;
    }
  }
  return enc;
}

LossCurves train_supervised(TraversabilityModel& T, PoseModel& P,
                            const TrajectorySet& set, const Dataset& dataset,
                            const TrainParams& params) {
  if (!(T.pair.norm == P.pair.norm) || T.pair.ray_count != P.pair.ray_count)
    throw std::invalid_argument("train_supervised: T and P normalizers differ");
  LossCurves curves;
  curves.t_loss = train_t_supervised(T, set, dataset, params);
  curves.p_loss = train_p_supervised(P, set, dataset, params);
  return curves;
}

std::vector<double> train_p_supervised(PoseModel& P, const TrajectorySet& set,
                                       const Dataset& dataset,
                                       const TrainParams& params) {
  if (dataset.positives.empty())
    throw std::invalid_argument("train_p_supervised: P needs positive pairs");

  EncodedCorpus enc = EncodedCorpus::build(P.pair, set);
  if (params.lighting_augment)
    randomize_lighting(enc, P.pair.norm.lighting_scale,
                       mix_seed(params.seed, 0x11A7C2));
  duplicate_frames_at_rest(enc, P.pair.ray_count, params.at_rest_prob,
                           mix_seed(params.seed, 0x0A7E52));
  std::vector<IndexPair> pairs;
  Eigen::MatrixXd targets(static_cast<Eigen::Index>(dataset.positives.size()), 3);
  Eigen::VectorXd weights(static_cast<Eigen::Index>(dataset.positives.size()));
  pairs.reserve(dataset.positives.size());
  for (const auto& s : dataset.positives) {
    pairs.push_back({enc.row(s.traj_i, s.idx_i), enc.row(s.traj_j, s.idx_j)});
    const Eigen::Index r = static_cast<Eigen::Index>(pairs.size() - 1);
    targets(r, 0) = s.delta.x;
    targets(r, 1) = s.delta.y;
    targets(r, 2) = s.delta.theta;
    weights(r) = params.pose_weight_horizon > 0.0
                     ? std::exp(-s.d / params.pose_weight_horizon)
                     : 1.0;
  }

  AdamOptimizer opt(P.pair.net.params().size(), params.learning_rate);
  std::mt19937_64 rng(mix_seed(params.seed, 0x90583));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd grad(P.pair.net.params().size());
  Eigen::MatrixXd x, y, dy, batch_target;
  Eigen::VectorXd batch_w;
  Mlp::Cache cache;

  std::vector<double> p_loss;
  p_loss.reserve(static_cast<std::size_t>(params.epochs));
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(params.batch_size));
      const Eigen::Index b = static_cast<Eigen::Index>(end - begin);
      gather_pairs(enc, pairs, order, begin, end, x);
      batch_target.resize(b, 3);
      batch_w.resize(b);
      for (std::size_t k = begin; k < end; ++k) {
        batch_target.row(static_cast<Eigen::Index>(k - begin)) =
            targets.row(static_cast<Eigen::Index>(order[k]));
        batch_w(static_cast<Eigen::Index>(k - begin)) =
            weights(static_cast<Eigen::Index>(order[k]));
      }
      const double wsum = batch_w.sum();
      y = P.pair.net.forward_cached(x, cache);
      dy = y - batch_target;
      double loss = 0.0;
      for (Eigen::Index r = 0; r < b; ++r) {
        loss += batch_w(r) * dy.row(r).squaredNorm();
        dy.row(r) *= 2.0 * batch_w(r) / wsum;
      }
      loss_sum += loss / wsum;
      ++batches;
      grad.setZero();
      P.pair.net.backward(cache, dy, grad);
      opt.step(P.pair.net.params(), grad);
    }
    p_loss.push_back(loss_sum / static_cast<double>(batches));
  }
  return p_loss;
}

std::vector<double> train_t_supervised(TraversabilityModel& T,
                                       const TrajectorySet& set,
                                       const Dataset& dataset,
                                       const TrainParams& params) {
  if (dataset.size() == 0)
    throw std::invalid_argument("train_t_supervised: empty dataset");
  EncodedCorpus enc = EncodedCorpus::build(T.pair, set);
  if (params.lighting_augment)
    randomize_lighting(enc, T.pair.norm.lighting_scale,
                       mix_seed(params.seed, 0x11A7C1));
  duplicate_frames_at_rest(enc, T.pair.ray_count, params.at_rest_prob,
                           mix_seed(params.seed, 0x0A7E51));

  std::vector<IndexPair> pairs;
  std::vector<int> bins;
  pairs.reserve(dataset.size());
  bins.reserve(dataset.size());
  auto add = [&](const PairSample& s) {
    pairs.push_back({enc.row(s.traj_i, s.idx_i), enc.row(s.traj_j, s.idx_j)});
    bins.push_back(distance_to_bin(s.d, T.d_max));
  };
  for (const auto& s : dataset.positives) add(s);
  for (const auto& s : dataset.negatives) add(s);

  // Per-label target rows: Gaussian-smeared for interior bins, hard for the
  // saturated bin (cap and negatives both mean "at least d_max").
  const int n_bins = T.d_max;
  Eigen::MatrixXd target_table = Eigen::MatrixXd::Zero(n_bins, n_bins);
  for (int b = 0; b < n_bins; ++b) {
    if (params.label_smoothing_sigma <= 0.0 || b == n_bins - 1) {
      target_table(b, b) = 1.0;
      continue;
    }
    const double inv = 1.0 / (2.0 * params.label_smoothing_sigma *
                              params.label_smoothing_sigma);
    double sum = 0.0;
    for (int k = 0; k < n_bins; ++k) {
      const double w = std::exp(-(k - b) * (k - b) * inv);
      target_table(b, k) = w;
      sum += w;
    }
    target_table.row(b) /= sum;
  }

  AdamOptimizer opt(T.pair.net.params().size(), params.learning_rate);
  std::mt19937_64 rng(mix_seed(params.seed, 0x7124));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd grad(T.pair.net.params().size());
  Eigen::MatrixXd x, logits, dlogits, batch_target;
  Mlp::Cache cache;

  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(params.epochs));
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(params.batch_size));
      gather_pairs(enc, pairs, order, begin, end, x);
      batch_target.resize(static_cast<Eigen::Index>(end - begin), n_bins);
      for (std::size_t k = begin; k < end; ++k)
        batch_target.row(static_cast<Eigen::Index>(k - begin)) =
            target_table.row(bins[order[k]]);
      logits = T.pair.net.forward_cached(x, cache);
      loss_sum += ce_loss_grad_dist(logits, batch_target, dlogits);
      ++batches;
      grad.setZero();
      T.pair.net.backward(cache, dlogits, grad);
      opt.step(T.pair.net.params(), grad);
    }
    curve.push_back(loss_sum / static_cast<double>(batches));
  }
  return curve;
}

std::vector<double> train_td(TraversabilityModel& T, const TrajectorySet& set,
                             const std::vector<PairSample>& negatives,
                             const TdTrainParams& params) {
  if (set.size() == 0) throw std::invalid_argument("train_td: no trajectories");
  EncodedCorpus enc = EncodedCorpus::build(T.pair, set);
  if (params.base.lighting_augment)
    randomize_lighting(enc, T.pair.norm.lighting_scale,
                       mix_seed(params.base.seed, 0x11A7C3));
  duplicate_frames_at_rest(enc, T.pair.ray_count, params.base.at_rest_prob,
                           mix_seed(params.base.seed, 0x0A7E53));
  const int d_max = T.d_max;

  // Transitions (traj, t) with a successor.
  std::vector<std::pair<int, int>> transitions;
  for (std::size_t t = 0; t < set.size(); ++t) {
    const int n = static_cast<int>(set.trajectories[t].size());
    for (int i = 0; i + 1 < n; ++i)
      transitions.emplace_back(static_cast<int>(t), i);
  }
  if (transitions.empty())
    throw std::invalid_argument("train_td: trajectories have no transitions");
  const bool allow_negative_goals = !negatives.empty() && set.size() >= 2;

  Mlp target_net = T.pair.net;
  AdamOptimizer opt(T.pair.net.params().size(), params.base.learning_rate);
  std::mt19937_64 rng(mix_seed(params.base.seed, 0x7D7D));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_tr(0, transitions.size() - 1);

  const int b = params.base.batch_size;
  const Eigen::Index e = enc.rows.cols();
  Eigen::MatrixXd x_student(b, 2 * e), x_target(b, 2 * e);
  Eigen::MatrixXd logits, dlogits, target_p(b, d_max);
  std::vector<bool> base_case(static_cast<std::size_t>(b));
  Eigen::VectorXd grad(T.pair.net.params().size());
  Mlp::Cache cache;

  std::vector<double> curve;
  std::int64_t steps_done = 0;
  for (int epoch = 0; epoch < params.base.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int batch = 0; batch < params.batches_per_epoch; ++batch) {
      for (int r = 0; r < b; ++r) {
        const auto [traj, t] = transitions[pick_tr(rng)];
        const int n = static_cast<int>(set.trajectories[static_cast<std::size_t>(traj)].size());
        int g_traj, g_idx;
        if (allow_negative_goals && u01(rng) < params.negative_goal_prob) {
          std::uniform_int_distribution<std::size_t> pick_other(0, set.size() - 2);
          std::size_t o = pick_other(rng);
          if (o >= static_cast<std::size_t>(traj)) ++o;
          const int no = static_cast<int>(set.trajectories[o].size());
          std::uniform_int_distribution<int> pick_idx(0, no - 1);
          g_traj = static_cast<int>(o);
          g_idx = pick_idx(rng);
        } else {
          const int hi = std::min(params.goal_window, n - 1 - t);
          std::uniform_int_distribution<int> pick_k(1, std::max(1, hi));
          g_traj = traj;
          g_idx = t + pick_k(rng);
        }
        const int r_t = enc.row(traj, t);
        const int r_t1 = enc.row(traj, t + 1);
        const int r_g = enc.row(g_traj, g_idx);
        x_student.row(r).head(e) = enc.rows.row(r_t);
        x_student.row(r).tail(e) = enc.rows.row(r_g);
        x_target.row(r).head(e) = enc.rows.row(r_t1);
        x_target.row(r).tail(e) = enc.rows.row(r_g);
        base_case[static_cast<std::size_t>(r)] = g_traj == traj && g_idx == t + 1;
      }

      // Bootstrap distributions from the frozen copy, shifted one bin up.
      const Eigen::MatrixXd boot = target_net.forward(x_target);
      for (int r = 0; r < b; ++r) {
        if (base_case[static_cast<std::size_t>(r)]) {
          target_p.row(r).setZero();
          target_p(r, 0) = 1.0;
          continue;
        }
        const double m = boot.row(r).maxCoeff();
        Eigen::ArrayXd q = (boot.row(r).array() - m).exp();
        q /= q.sum();
        target_p(r, 0) = 0.0;
        for (int k = 1; k + 1 < d_max; ++k) target_p(r, k) = q[k - 1];
        target_p(r, d_max - 1) = q[d_max - 2] + q[d_max - 1];
      }

      logits = T.pair.net.forward_cached(x_student, cache);
      loss_sum += ce_loss_grad_dist(logits, target_p, dlogits);
      grad.setZero();
      T.pair.net.backward(cache, dlogits, grad);
      opt.step(T.pair.net.params(), grad);
      ++steps_done;
      if (steps_done % params.target_refresh == 0)
        target_net.params() = T.pair.net.params();
    }
    curve.push_back(loss_sum / params.batches_per_epoch);
  }
  return curve;
}

std::vector<double> train_bc(BcModel& model, const TrajectorySet& set,
                             const std::vector<PairSample>& positives,
                             const sim::SimParams& sim_params,
                             const TrainParams& params) {
  if (positives.empty()) throw std::invalid_argument("train_bc: no positives");
  EncodedCorpus enc = EncodedCorpus::build(model.pair, set);
  if (params.lighting_augment)
    randomize_lighting(enc, model.pair.norm.lighting_scale,
                       mix_seed(params.seed, 0x11A7C4));
  duplicate_frames_at_rest(enc, model.pair.ray_count, params.at_rest_prob,
                           mix_seed(params.seed, 0x0A7E54));

  std::vector<IndexPair> pairs;
  pairs.reserve(positives.size());
  std::vector<int> classes;
  Eigen::MatrixXd targets;
  if (model.discrete) {
    classes.reserve(positives.size());
  } else {
    targets.resize(static_cast<Eigen::Index>(positives.size()), 2);
  }
  for (const auto& s : positives) {
    pairs.push_back({enc.row(s.traj_i, s.idx_i), enc.row(s.traj_j, s.idx_j)});
    const auto& cmd = set.record(s.traj_i, s.idx_i).cmd;
    const bool stop = s.d == 0;
    if (model.discrete) {
      classes.push_back(stop ? 0 : nearest_bank_command(cmd, sim_params));
    } else {
      const Eigen::Index r = static_cast<Eigen::Index>(pairs.size() - 1);
      targets(r, 0) = stop ? 0.0 : cmd.v;
      targets(r, 1) = stop ? 0.0 : cmd.omega;
    }
  }

  AdamOptimizer opt(model.pair.net.params().size(), params.learning_rate);
  std::mt19937_64 rng(mix_seed(params.seed, 0xBC0));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd grad(model.pair.net.params().size());
  Eigen::MatrixXd x, y, dy, batch_target, dlogits;
  std::vector<int> batch_classes;
  Mlp::Cache cache;

  std::vector<double> curve;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(params.batch_size));
      gather_pairs(enc, pairs, order, begin, end, x);
      y = model.pair.net.forward_cached(x, cache);
      grad.setZero();
      if (model.discrete) {
        batch_classes.clear();
        for (std::size_t k = begin; k < end; ++k)
          batch_classes.push_back(classes[order[k]]);
        loss_sum += ce_loss_grad(y, batch_classes, dlogits);
        model.pair.net.backward(cache, dlogits, grad);
      } else {
        batch_target.resize(static_cast<Eigen::Index>(end - begin), 2);
        for (std::size_t k = begin; k < end; ++k)
          batch_target.row(static_cast<Eigen::Index>(k - begin)) =
              targets.row(static_cast<Eigen::Index>(order[k]));
        loss_sum += l2_loss_grad(y, batch_target, dy);
        model.pair.net.backward(cache, dy, grad);
      }
      ++batches;
      opt.step(model.pair.net.params(), grad);
    }
    curve.push_back(loss_sum / static_cast<double>(batches));
  }
  return curve;
}

namespace {

std::vector<std::int64_t> pick_param_indices(std::int64_t total, int n,
                                             std::mt19937_64& rng) {
  std::vector<std::int64_t> all(static_cast<std::size_t>(total));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t keep =
      std::min<std::size_t>(static_cast<std::size_t>(n), all.size());
  all.resize(keep);
  return all;
}

GradCheckResult finite_diff_check(
    Mlp& net, const std::function<double()>& loss_of,
    const Eigen::VectorXd& analytic, int n_params, double h,
    std::mt19937_64& rng) {
  GradCheckResult res;
  for (std::int64_t idx : pick_param_indices(net.params().size(), n_params, rng)) {
    const double saved = net.params()[idx];
    net.params()[idx] = saved + h;
    const double lp = loss_of();
    net.params()[idx] = saved - h;
    const double lm = loss_of();
    net.params()[idx] = saved;
    const double gn = (lp - lm) / (2.0 * h);
    const double ga = analytic[idx];
    const double rel =
        std::abs(ga - gn) / std::max(std::abs(ga) + std::abs(gn), 1e-2);
    res.max_rel_error = std::max(res.max_rel_error, rel);
    ++res.checked;
  }
  return res;
}

}  // namespace

GradCheckResult grad_check_ce(Mlp& net, const Eigen::MatrixXd& x,
                              int target_bin, int n_params, double h,
                              std::mt19937_64& rng) {
  auto loss_of = [&]() {
    const Eigen::VectorXd y = net.forward(x).row(0);
    const double m = y.maxCoeff();
    return std::log((y.array() - m).exp().sum()) + m - y[target_bin];
  };
  Mlp::Cache cache;
  const Eigen::MatrixXd y = net.forward_cached(x, cache);
  Eigen::MatrixXd dy = softmax(y.row(0)).transpose();
  dy(0, target_bin) -= 1.0;
  Eigen::VectorXd analytic = Eigen::VectorXd::Zero(net.params().size());
  net.backward(cache, dy, analytic);
  return finite_diff_check(net, loss_of, analytic, n_params, h, rng);
}

GradCheckResult grad_check_l2(Mlp& net, const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& target, int n_params,
                              double h, std::mt19937_64& rng) {
  auto loss_of = [&]() {
    const Eigen::VectorXd y = net.forward(x).row(0);
    return (y - target).squaredNorm();
  };
  Mlp::Cache cache;
  const Eigen::MatrixXd y = net.forward_cached(x, cache);
  const Eigen::MatrixXd dy = 2.0 * (y.row(0).transpose() - target).transpose();
  Eigen::VectorXd analytic = Eigen::VectorXd::Zero(net.params().size());
  net.backward(cache, dy, analytic);
  return finite_diff_check(net, loss_of, analytic, n_params, h, rng);
}

Eigen::MatrixXd sample_pair_input_off_kink(const Mlp& net, int enc_dim,
                                           double kink_threshold,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::MatrixXd x(1, net.input_dim());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(0, c) = u01(rng);
    (void)enc_dim;
    if (net.min_abs_preactivation(x) >= kink_threshold) return x;
  }
  throw std::runtime_error("sample_pair_input_off_kink: could not avoid kinks");
}

}  // namespace graphnav
