#include "graphnav/pair_dataset.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include "graphnav/binary_io.hpp"
#include "graphnav/seeding.hpp"

namespace graphnav {

namespace {
constexpr std::uint8_t kDatasetVersion = 1;

void write_sample(std::ostream& out, const PairSample& s) {
  io::write_i32(out, s.traj_i);
  io::write_i32(out, s.idx_i);
  io::write_i32(out, s.traj_j);
  io::write_i32(out, s.idx_j);
  io::write_i32(out, s.d);
  io::write_u8(out, static_cast<std::uint8_t>((s.is_negative ? 1 : 0) |
                                              (s.has_pose ? 2 : 0)));
  io::write_f64(out, s.delta.x);
  io::write_f64(out, s.delta.y);
  io::write_f64(out, s.delta.theta);
}

PairSample read_sample(std::istream& in) {
  PairSample s;
  s.traj_i = io::read_i32(in);
  s.idx_i = io::read_i32(in);
  s.traj_j = io::read_i32(in);
  s.idx_j = io::read_i32(in);
  s.d = io::read_i32(in);
  const std::uint8_t flags = io::read_u8(in);
  s.is_negative = (flags & 1) != 0;
  s.has_pose = (flags & 2) != 0;
  s.delta.x = io::read_f64(in);
  s.delta.y = io::read_f64(in);
  s.delta.theta = io::read_f64(in);
  return s;
}
}  // namespace

void Dataset::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  io::write_magic(out, "GDST");
  io::write_u8(out, kDatasetVersion);
  io::write_i32(out, d_max);
  io::write_u64(out, positives.size());
  io::write_u64(out, negatives.size());
  for (const auto& s : positives) write_sample(out, s);
  for (const auto& s : negatives) write_sample(out, s);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Dataset Dataset::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  io::expect_magic(in, "GDST", "pair dataset");
  if (io::read_u8(in) != kDatasetVersion)
    throw std::runtime_error("unsupported dataset version");
  Dataset ds;
  ds.d_max = io::read_i32(in);
  const std::uint64_t np = io::read_u64(in);
  const std::uint64_t nn = io::read_u64(in);
  ds.positives.reserve(np);
  ds.negatives.reserve(nn);
  for (std::uint64_t k = 0; k < np; ++k) ds.positives.push_back(read_sample(in));
  for (std::uint64_t k = 0; k < nn; ++k) ds.negatives.push_back(read_sample(in));
  return ds;
}

std::vector<PairSample> make_positives(const TrajectorySet& set,
                                       int pairs_per_traj, int window,
                                       int d_max, std::uint64_t seed) {
  if (window < 1) throw std::invalid_argument("make_positives: window must be >= 1");
  std::vector<PairSample> out;
  std::mt19937_64 rng(mix_seed(seed, 0x9051));
  for (std::size_t t = 0; t < set.trajectories.size(); ++t) {
    const auto& traj = set.trajectories[t];
    const int n = static_cast<int>(traj.size());
    if (n < 2) continue;
    std::uniform_int_distribution<int> pick_i(0, n - 1);
    for (int k = 0; k < pairs_per_traj; ++k) {
      const int i = pick_i(rng);
      const int j_hi = std::min(i + window, n - 1);
      std::uniform_int_distribution<int> pick_j(i, j_hi);
      const int j = pick_j(rng);
      PairSample s;
      s.traj_i = static_cast<int>(t);
      s.idx_i = i;
      s.traj_j = static_cast<int>(t);
      s.idx_j = j;
      s.d = std::min(j - i, d_max);
      s.is_negative = false;
      s.has_pose = true;
      s.delta = traj.odom_relative(static_cast<std::size_t>(i),
                                   static_cast<std::size_t>(j));
      out.push_back(s);
    }
  }
  return out;
}

std::vector<PairSample> make_negatives(const TrajectorySet& set, int count,
                                       int d_max, std::uint64_t seed) {
  if (set.trajectories.size() < 2)
    throw std::invalid_argument("negative mining requires >= 2 trajectories");
  std::vector<PairSample> out;
  out.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(mix_seed(seed, 0x9E61));
  std::uniform_int_distribution<std::size_t> pick_traj(
      0, set.trajectories.size() - 1);
  while (static_cast<int>(out.size()) < count) {
    const std::size_t a = pick_traj(rng);
    const std::size_t b = pick_traj(rng);
    if (a == b) continue;
    const int na = static_cast<int>(set.trajectories[a].size());
    const int nb = static_cast<int>(set.trajectories[b].size());
    if (na == 0 || nb == 0) continue;
    std::uniform_int_distribution<int> pick_ia(0, na - 1);
    std::uniform_int_distribution<int> pick_ib(0, nb - 1);
    PairSample s;
    s.traj_i = static_cast<int>(a);
    s.idx_i = pick_ia(rng);
    s.traj_j = static_cast<int>(b);
    s.idx_j = pick_ib(rng);
    s.d = d_max;
    s.is_negative = true;
    s.has_pose = false;
    out.push_back(s);
  }
  return out;
}

Dataset make_dataset(const TrajectorySet& set, const DatasetParams& params,
                     std::uint64_t seed) {
  Dataset ds;
  ds.d_max = params.d_max;
  ds.positives = make_positives(set, params.pairs_per_traj, params.window,
                                params.d_max, seed);
  const int neg_count =
      static_cast<int>(params.negative_ratio * ds.positives.size());
  if (neg_count > 0)
    ds.negatives = make_negatives(set, neg_count, params.d_max, seed);
  return ds;
}

}  // namespace graphnav
