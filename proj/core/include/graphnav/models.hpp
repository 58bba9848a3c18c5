#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "graphnav/mlp.hpp"
#include "graphnav/observation.hpp"
#include "graphnav/pair_dataset.hpp"

namespace graphnav {

/// Maps raw observations to network inputs. Each ray contributes its scaled
/// hit distance, the egocentric Cartesian hit point (distance resolved along
/// the ray's bearing, which gives the layers linear access to local
/// geometry), a group one-hot (ground / vegetation / wall), and a sub-code
/// one-hot, so equal codes map to equal features and the code ordering
/// carries no fake metric structure. The background code maps to all-zeros.
struct Normalizer {
  double range_scale = 1.0 / 12.0;  // 1 / max ray range
  double lighting_scale = 1.0;
  double fan_deg = 170.0;  // sensor fan; fixes each ray's bearing

  static constexpr int kFeaturesPerRay = 14;  // dist + x + y + 3 group + 8 sub

  int encoded_dim(int ray_count) const {
    return 2 * kFeaturesPerRay * ray_count + 1;
  }
  /// Writes encoded_dim(obs.ray_count) doubles at out.
  void encode(const Observation& obs, double* out) const;

  bool operator==(const Normalizer&) const = default;
};

/// A network over concatenated encoded observation pairs: the shared
/// substrate of T, P and the behavior-cloning baselines.
struct PairNet {
  Mlp net;
  Normalizer norm;
  int ray_count = 16;

  int enc_dim() const { return norm.encoded_dim(ray_count); }
  Eigen::VectorXd encode(const Observation& obs) const;
  /// Single pair forward; returns the output row as a vector.
  Eigen::VectorXd forward_pair(const Observation& a, const Observation& b) const;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Probability-weighted mean distance: bin k stands for distance k+1, so the
/// result lies in [1, d_max].
double expected_distance(const Eigen::VectorXd& logits);
/// Row-wise variant over a logits matrix.
Eigen::VectorXd expected_distance_rows(const Eigen::MatrixXd& logits);

/// Distance label -> bin index: bin k holds distance k+1; d = 0 pairs fold
/// into bin 0.
inline int distance_to_bin(int d, int d_max) {
  return std::clamp(d - 1, 0, d_max - 1);
}

enum class ModelKind : std::uint8_t {
  Traversability = 0,
  Pose = 1,
  BcContinuous = 2,
  BcDiscrete = 3,
};

/// T: classifier over d_max distance bins.
struct TraversabilityModel {
  PairNet pair;
  int d_max = kDefaultDMax;

  static TraversabilityModel make(int ray_count, const Normalizer& norm,
                                  int d_max, const std::vector<int>& hidden,
                                  std::uint64_t seed);
  Eigen::VectorXd logits(const Observation& a, const Observation& b) const;
  double expected(const Observation& a, const Observation& b) const;

  void save(std::ostream& out,
            const AdamOptimizer* opt = nullptr) const;
  static TraversabilityModel load(std::istream& in,
                                  std::optional<AdamOptimizer>* opt = nullptr);
};

/// P: regressor to the relative pose (dx, dy, dtheta) of the second capture
/// point in the first's frame.
struct PoseModel {
  PairNet pair;

  static PoseModel make(int ray_count, const Normalizer& norm,
                        const std::vector<int>& hidden, std::uint64_t seed);
  Pose2 predict(const Observation& a, const Observation& b) const;

  void save(std::ostream& out, const AdamOptimizer* opt = nullptr) const;
  static PoseModel load(std::istream& in,
                        std::optional<AdamOptimizer>* opt = nullptr);
};

/// Goal-conditioned behavior cloning: continuous (v, omega) regression or
/// classification over a fixed command bank.
struct BcModel {
  PairNet pair;
  bool discrete = false;

  static BcModel make(int ray_count, const Normalizer& norm, bool discrete,
                      int bank_size, const std::vector<int>& hidden,
                      std::uint64_t seed);
  Eigen::VectorXd predict(const Observation& a, const Observation& b) const;

  void save(std::ostream& out, const AdamOptimizer* opt = nullptr) const;
  static BcModel load(std::istream& in,
                      std::optional<AdamOptimizer>* opt = nullptr);
};

/// Named container written by the training CLI: "T" and "P" for the main
/// method, optionally "bc". One file holds everything an evaluation needs.
struct ModelBundle {
  std::optional<TraversabilityModel> T;
  std::optional<PoseModel> P;
  std::optional<BcModel> bc;

  void save(const std::filesystem::path& path) const;
  static ModelBundle load(const std::filesystem::path& path);
};

/// Caches first-layer half-projections of T so scoring one observation
/// against a whole node set reuses the expensive input-layer product. The
/// referenced model must outlive the scorer.
class PairwiseScorer {
 public:
  explicit PairwiseScorer(const TraversabilityModel& model);

  void set_nodes(const std::vector<const Observation*>& nodes);
  int node_count() const { return static_cast<int>(left_.rows()); }
  const TraversabilityModel& model() const { return *model_; }

  /// Expected distance nodes[u] -> nodes[v].
  double node_pair(int u, int v) const;
  /// Expected distances nodes[u] -> every node.
  Eigen::VectorXd from_node(int u) const;
  /// Expected distances q -> every node.
  Eigen::VectorXd from_query(const Observation& q) const;
  /// Expected distances every node -> q.
  Eigen::VectorXd to_query(const Observation& q) const;

 private:
  Eigen::VectorXd finish(Eigen::MatrixXd z1) const;

  const TraversabilityModel* model_;
  Eigen::MatrixXd left_;   // (n, h) first-layer projection as pair member 1
  Eigen::MatrixXd right_;  // (n, h) projection as pair member 2
};

}  // namespace graphnav
