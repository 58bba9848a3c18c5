#include "graphnav/models.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "graphnav/eigen_io.hpp"
#include "graphnav/world_map.hpp"

namespace graphnav {

void Normalizer::encode(const Observation& obs, double* out) const {
  const int pairs = 2 * obs.ray_count;  // (distance, code) per ray, two frames
  if (obs.frames.size() != static_cast<std::size_t>(2 * pairs))
    throw std::invalid_argument("Normalizer::encode: malformed observation");
  const double fan = fan_deg * M_PI / 180.0;
  double* p = out;
  for (int k = 0; k < pairs; ++k) {
    const double dist = obs.frames[static_cast<std::size_t>(2 * k)];
    const int code =
        static_cast<int>(obs.frames[static_cast<std::size_t>(2 * k + 1)]);
    const int ray = k % obs.ray_count;
    const double frac =
        obs.ray_count > 1 ? static_cast<double>(ray) / (obs.ray_count - 1) : 0.5;
    const double bearing = -0.5 * fan + fan * frac;
    p[0] = dist * range_scale;
    p[1] = dist * range_scale * std::cos(bearing);
    p[2] = dist * range_scale * std::sin(bearing);
    for (int f = 3; f < kFeaturesPerRay; ++f) p[f] = 0.0;
    if (code > 0 && code <= sim::kAppearanceCodeMax) {
      const int group = (code - 1) / 8;
      const int sub = (code - 1) % 8;
      p[3 + group] = 1.0;
      p[6 + sub] = 1.0;
    }
    p += kFeaturesPerRay;
  }
  *p = obs.lighting * lighting_scale;
}

Eigen::VectorXd PairNet::encode(const Observation& obs) const {
  if (obs.ray_count != ray_count)
    throw std::invalid_argument("PairNet::encode: ray count mismatch");
  Eigen::VectorXd x(enc_dim());
  norm.encode(obs, x.data());
  return x;
}

Eigen::VectorXd PairNet::forward_pair(const Observation& a,
                                      const Observation& b) const {
  Eigen::MatrixXd x(1, 2 * enc_dim());
  norm.encode(a, x.data());  // row-major fill is safe: one row
  norm.encode(b, x.data() + enc_dim());
  return net.forward(x).row(0);
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

double expected_distance(const Eigen::VectorXd& logits) {
  const Eigen::VectorXd p = softmax(logits);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) acc += (k + 1) * p[k];
  return acc;
}

Eigen::VectorXd expected_distance_rows(const Eigen::MatrixXd& logits) {
  Eigen::VectorXd out(logits.rows());
  Eigen::VectorXd bins(logits.cols());
  for (Eigen::Index k = 0; k < bins.size(); ++k) bins[k] = static_cast<double>(k + 1);
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    Eigen::VectorXd e = (logits.row(r).array() - m).exp();
    out[r] = e.dot(bins) / e.sum();
  }
  return out;
}

namespace {

constexpr std::uint8_t kModelVersion = 1;

PairNet make_pair_net(int ray_count, const Normalizer& norm, int out_dim,
                      const std::vector<int>& hidden, std::uint64_t seed) {
  PairNet pn;
  pn.ray_count = ray_count;
  pn.norm = norm;
  std::vector<int> sizes;
  sizes.push_back(2 * pn.enc_dim());
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out_dim);
  pn.net = Mlp(sizes);
  std::mt19937_64 rng(seed);
  pn.net.init_glorot(rng);
  return pn;
}

void save_pair_model(std::ostream& out, ModelKind kind, const PairNet& pair,
                     int d_max, const AdamOptimizer* opt) {
  io::write_magic(out, "GMDL");
  io::write_u8(out, kModelVersion);
  io::write_u8(out, static_cast<std::uint8_t>(kind));
  io::write_u32(out, static_cast<std::uint32_t>(pair.ray_count));
  io::write_i32(out, d_max);
  io::write_f64(out, pair.norm.range_scale);
  io::write_f64(out, pair.norm.lighting_scale);
  io::write_f64(out, pair.norm.fan_deg);
  pair.net.save(out);
  io::write_u8(out, opt ? 1 : 0);
  if (opt) opt->save(out);
}

struct LoadedModel {
  ModelKind kind;
  PairNet pair;
  int d_max;
  std::optional<AdamOptimizer> opt;
};

LoadedModel load_pair_model(std::istream& in) {
  io::expect_magic(in, "GMDL", "model checkpoint");
  if (io::read_u8(in) != kModelVersion)
    throw std::runtime_error("unsupported model version");
  LoadedModel m;
  m.kind = static_cast<ModelKind>(io::read_u8(in));
  m.pair.ray_count = static_cast<int>(io::read_u32(in));
  m.d_max = io::read_i32(in);
  m.pair.norm.range_scale = io::read_f64(in);
  m.pair.norm.lighting_scale = io::read_f64(in);
  m.pair.norm.fan_deg = io::read_f64(in);
  m.pair.net = Mlp::load(in);
  if (io::read_u8(in) != 0) m.opt = AdamOptimizer::load(in);
  return m;
}

void check_kind(const LoadedModel& m, ModelKind want) {
  if (m.kind != want) throw std::runtime_error("model file has wrong kind");
}

}  // namespace

TraversabilityModel TraversabilityModel::make(int ray_count,
                                              const Normalizer& norm, int d_max,
                                              const std::vector<int>& hidden,
                                              std::uint64_t seed) {
  TraversabilityModel t;
  t.d_max = d_max;
  t.pair = make_pair_net(ray_count, norm, d_max, hidden, seed);
  return t;
}

Eigen::VectorXd TraversabilityModel::logits(const Observation& a,
                                            const Observation& b) const {
  return pair.forward_pair(a, b);
}

double TraversabilityModel::expected(const Observation& a,
                                     const Observation& b) const {
  return expected_distance(logits(a, b));
}

void TraversabilityModel::save(std::ostream& out,
                               const AdamOptimizer* opt) const {
  save_pair_model(out, ModelKind::Traversability, pair, d_max, opt);
}

TraversabilityModel TraversabilityModel::load(
    std::istream& in, std::optional<AdamOptimizer>* opt) {
  LoadedModel m = load_pair_model(in);
  check_kind(m, ModelKind::Traversability);
  TraversabilityModel t;
  t.pair = std::move(m.pair);
  t.d_max = m.d_max;
  if (opt) *opt = std::move(m.opt);
  return t;
}

PoseModel PoseModel::make(int ray_count, const Normalizer& norm,
                          const std::vector<int>& hidden, std::uint64_t seed) {
  PoseModel p;
  p.pair = make_pair_net(ray_count, norm, 3, hidden, seed);
  return p;
}

Pose2 PoseModel::predict(const Observation& a, const Observation& b) const {
  const Eigen::VectorXd y = pair.forward_pair(a, b);
  return Pose2{y[0], y[1], y[2]};
}

void PoseModel::save(std::ostream& out, const AdamOptimizer* opt) const {
  save_pair_model(out, ModelKind::Pose, pair, 0, opt);
}

PoseModel PoseModel::load(std::istream& in, std::optional<AdamOptimizer>* opt) {
  LoadedModel m = load_pair_model(in);
  check_kind(m, ModelKind::Pose);
  PoseModel p;
  p.pair = std::move(m.pair);
  if (opt) *opt = std::move(m.opt);
  return p;
}

BcModel BcModel::make(int ray_count, const Normalizer& norm, bool discrete,
                      int bank_size, const std::vector<int>& hidden,
                      std::uint64_t seed) {
  BcModel b;
  b.discrete = discrete;
  b.pair = make_pair_net(ray_count, norm, discrete ? bank_size : 2, hidden, seed);
  return b;
}

Eigen::VectorXd BcModel::predict(const Observation& a,
                                 const Observation& b) const {
  return pair.forward_pair(a, b);
}

void BcModel::save(std::ostream& out, const AdamOptimizer* opt) const {
  save_pair_model(out,
                  discrete ? ModelKind::BcDiscrete : ModelKind::BcContinuous,
                  pair, 0, opt);
}

BcModel BcModel::load(std::istream& in, std::optional<AdamOptimizer>* opt) {
  LoadedModel m = load_pair_model(in);
  if (m.kind != ModelKind::BcContinuous && m.kind != ModelKind::BcDiscrete)
    throw std::runtime_error("model file has wrong kind");
  BcModel b;
  b.discrete = m.kind == ModelKind::BcDiscrete;
  b.pair = std::move(m.pair);
  if (opt) *opt = std::move(m.opt);
  return b;
}

void ModelBundle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  io::write_magic(out, "GBND");
  io::write_u8(out, kModelVersion);
  std::uint32_t count = 0;
  if (T) ++count;
  if (P) ++count;
  if (bc) ++count;
  io::write_u32(out, count);
  if (T) {
    io::write_string(out, "T");
    T->save(out);
  }
  if (P) {
    io::write_string(out, "P");
    P->save(out);
  }
  if (bc) {
    io::write_string(out, "bc");
    bc->save(out);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ModelBundle ModelBundle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  io::expect_magic(in, "GBND", "model bundle");
  if (io::read_u8(in) != kModelVersion)
    throw std::runtime_error("unsupported bundle version");
  const std::uint32_t count = io::read_u32(in);
  ModelBundle bundle;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::string name = io::read_string(in);
    if (name == "T")
      bundle.T = TraversabilityModel::load(in);
    else if (name == "P")
      bundle.P = PoseModel::load(in);
    else if (name == "bc")
      bundle.bc = BcModel::load(in);
    else
      throw std::runtime_error("unknown bundle entry: " + name);
  }
  return bundle;
}

PairwiseScorer::PairwiseScorer(const TraversabilityModel& model)
    : model_(&model) {}

void PairwiseScorer::set_nodes(const std::vector<const Observation*>& nodes) {
  const int e = model_->pair.enc_dim();
  const auto w1 = model_->pair.net.weight(0);
  const Eigen::MatrixXd w1_left = w1.leftCols(e);
  const Eigen::MatrixXd w1_right = w1.rightCols(e);
  Eigen::MatrixXd enc(static_cast<Eigen::Index>(nodes.size()), e);
  Eigen::VectorXd row(e);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i]->ray_count != model_->pair.ray_count)
      throw std::invalid_argument("PairwiseScorer: ray count mismatch");
    model_->pair.norm.encode(*nodes[i], row.data());
    enc.row(static_cast<Eigen::Index>(i)) = row;
  }
  left_ = enc * w1_left.transpose();
  right_ = enc * w1_right.transpose();
}

Eigen::VectorXd PairwiseScorer::finish(Eigen::MatrixXd z1) const {
  const auto& net = model_->pair.net;
  z1.rowwise() += net.bias(0).transpose();
  Eigen::MatrixXd a = z1.cwiseMax(0.0);
  for (int l = 1; l < net.layer_count(); ++l) {
    Eigen::MatrixXd z = a * net.weight(l).transpose();
    z.rowwise() += net.bias(l).transpose();
    if (l + 1 < net.layer_count())
      a = z.cwiseMax(0.0);
    else
      a = std::move(z);
  }
  return expected_distance_rows(a);
}

double PairwiseScorer::node_pair(int u, int v) const {
  Eigen::MatrixXd z1 = left_.row(u) + right_.row(v);
  return finish(std::move(z1))[0];
}

Eigen::VectorXd PairwiseScorer::from_node(int u) const {
  Eigen::MatrixXd z1 = right_;
  z1.rowwise() += left_.row(u);
  return finish(std::move(z1));
}

Eigen::VectorXd PairwiseScorer::from_query(const Observation& q) const {
  const int e = model_->pair.enc_dim();
  Eigen::VectorXd x = model_->pair.encode(q);
  const Eigen::RowVectorXd u =
      (model_->pair.net.weight(0).leftCols(e) * x).transpose();
  Eigen::MatrixXd z1 = right_;
  z1.rowwise() += u;
  return finish(std::move(z1));
}

Eigen::VectorXd PairwiseScorer::to_query(const Observation& q) const {
  const int e = model_->pair.enc_dim();
  Eigen::VectorXd x = model_->pair.encode(q);
  const Eigen::RowVectorXd w =
      (model_->pair.net.weight(0).rightCols(e) * x).transpose();
  Eigen::MatrixXd z1 = left_;
  z1.rowwise() += w;
  return finish(std::move(z1));
}

}  // namespace graphnav
