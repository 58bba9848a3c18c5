#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "graphnav/models.hpp"
#include "graphnav/pair_dataset.hpp"
#include "graphnav/trajectory.hpp"

namespace graphnav {

struct TrainParams {
  int epochs = 30;
  int batch_size = 128;
  double learning_rate = 1e-4;
  // Width (in bins) of the Gaussian spread applied to interior distance
  // labels for T; gives the per-bin cross-entropy an ordinal gradient.
  // 0 = hard one-hot targets. The saturated last bin and negatives always
  // stay hard: their label means "at least d_max", not "exactly d_max".
  double label_smoothing_sigma = 0.0;
  // P's squared error is weighted exp(-d / pose_weight_horizon): the
  // controller only ever queries P at waypoint range, and unweighted far
  // pairs (|dp| up to the map diameter) otherwise dominate the gradient and
  // destroy near-field accuracy. 0 = uniform weights.
  double pose_weight_horizon = 8.0;
  // Resample the lighting channel i.i.d. at training time. Lighting is
  // constant within a trajectory, so without this the pair networks learn
  // "lighting mismatch means far" - a shortcut that scores every deployment
  // query as unreachable, since queries never share lighting with stored
  // nodes.
  bool lighting_augment = true;
  // Fraction of encoded records whose previous frame is overwritten with the
  // current one, imitating an observation captured at rest. Goal indications
  // and the first query after a reset have exactly that form, but recorded
  // corpora are almost entirely in motion; without the augmentation those
  // queries fall outside the training distribution and localization rejects
  // them.
  double at_rest_prob = 0.15;
  std::uint64_t seed = 0;
};

struct TdTrainParams {
  TrainParams base;
  int target_refresh = 500;    // optimizer steps between target-net syncs
  int goal_window = 2 * kDefaultDMax;
  double negative_goal_prob = 0.3;  // used only when negatives are available
  int batches_per_epoch = 300;
};

struct LossCurves {
  std::vector<double> t_loss;  // per-epoch mean cross-entropy of T
  std::vector<double> p_loss;  // per-epoch mean squared error of P
};

/// All corpus observations encoded once; batches gather rows by
/// (trajectory, record) index.
struct EncodedCorpus {
  Eigen::MatrixXd rows;             // (total_records, enc_dim)
  std::vector<int> traj_offset;     // first row of each trajectory

  int row(int traj, int idx) const {
    return traj_offset[static_cast<std::size_t>(traj)] + idx;
  }
  static EncodedCorpus build(const PairNet& pair, const TrajectorySet& set);
};

/// Joint supervised training per the pairwise recipe: T by cross-entropy
/// over positives and negatives with distances folded into bins, P by
/// squared error over positives only. Deterministic per seed.
LossCurves train_supervised(TraversabilityModel& T, PoseModel& P,
                            const TrajectorySet& set, const Dataset& dataset,
                            const TrainParams& params);

/// T-only variant of the above (used when no pose model is wanted, e.g. for
/// the only-positives ablation).
std::vector<double> train_t_supervised(TraversabilityModel& T,
                                       const TrajectorySet& set,
                                       const Dataset& dataset,
                                       const TrainParams& params);

/// P-only variant (used when T comes from temporal-difference training).
std::vector<double> train_p_supervised(PoseModel& P, const TrajectorySet& set,
                                       const Dataset& dataset,
                                       const TrainParams& params);

/// Temporal-difference training of T: the target distribution for
/// (o_t, o_g) is the frozen net's distribution for (o_{t+1}, o_g) shifted up
/// one bin (clamped at the last), with a one-hot bin-0 base case when o_g is
/// the very next observation. Goals are drawn from the trailing window of
/// the same trajectory, or uniformly from other trajectories when negatives
/// are supplied.
std::vector<double> train_td(TraversabilityModel& T, const TrajectorySet& set,
                             const std::vector<PairSample>& negatives,
                             const TdTrainParams& params);

/// Behavior cloning on goal-conditioned positives: continuous (v, omega)
/// regression, or classification over the command bank. d = 0 pairs are
/// relabeled as stop.
std::vector<double> train_bc(BcModel& model, const TrajectorySet& set,
                             const std::vector<PairSample>& positives,
                             const sim::SimParams& sim_params,
                             const TrainParams& params);

/// Central-difference gradient verification on a single-sample loss; x is
/// one input row. Checks `n_params` randomly chosen parameters.
struct GradCheckResult {
  double max_rel_error = 0.0;
  int checked = 0;
};

GradCheckResult grad_check_ce(Mlp& net, const Eigen::MatrixXd& x,
                              int target_bin, int n_params, double h,
                              std::mt19937_64& rng);
GradCheckResult grad_check_l2(Mlp& net, const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& target, int n_params,
                              double h, std::mt19937_64& rng);

/// Synthetic observation with plausible ray structure for gradient checks;
/// resampled until no ReLU pre-activation of `net` sits within
/// `kink_threshold` of zero.
Eigen::MatrixXd sample_pair_input_off_kink(const Mlp& net, int enc_dim,
                                           double kink_threshold,
                                           std::mt19937_64& rng);

}  // namespace graphnav
