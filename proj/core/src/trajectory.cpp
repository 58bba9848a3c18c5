#include "graphnav/trajectory.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "graphnav/binary_io.hpp"

namespace graphnav {

namespace {
constexpr std::uint8_t kTrajVersion = 1;
constexpr std::uint8_t kPosesVersion = 1;
}  // namespace

Pose2 Trajectory::odom_relative(std::size_t i, std::size_t j) const {
  if (i > j || j >= records.size())
    throw std::out_of_range("odom_relative: bad index pair");
  Pose2 acc{};
  for (std::size_t t = i; t < j; ++t) {
    const auto& d = records[t].odom;
    acc = compose(acc, Pose2{d.dx, d.dy, d.dtheta});
  }
  return acc;
}

void Trajectory::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  io::write_u8(out, kTrajVersion);
  io::write_u32(out, static_cast<std::uint32_t>(records.size()));
  const int ray_count = records.empty() ? 0 : records.front().obs.ray_count;
  io::write_u32(out, static_cast<std::uint32_t>(ray_count));
  io::write_u32(out, static_cast<std::uint32_t>(id));
  for (const auto& rec : records) {
    if (rec.obs.ray_count != ray_count ||
        rec.obs.frames.size() != static_cast<std::size_t>(4 * ray_count))
      throw std::runtime_error("trajectory record has inconsistent ray count");
    for (float f : rec.obs.frames) io::write_f32(out, f);
    io::write_f32(out, rec.obs.lighting);
    io::write_f32(out, static_cast<float>(rec.cmd.v));
    io::write_f32(out, static_cast<float>(rec.cmd.omega));
    io::write_f32(out, static_cast<float>(rec.odom.dx));
    io::write_f32(out, static_cast<float>(rec.odom.dy));
    io::write_f32(out, static_cast<float>(rec.odom.dtheta));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());

  if (!gt_poses.empty()) {
    if (gt_poses.size() != records.size())
      throw std::runtime_error("gt pose count does not match record count");
    std::filesystem::path side = path;
    side += ".poses";
    std::ofstream ps(side, std::ios::binary);
    if (!ps) throw std::runtime_error("cannot open " + side.string());
    io::write_u8(ps, kPosesVersion);
    io::write_u32(ps, static_cast<std::uint32_t>(gt_poses.size()));
    for (const auto& p : gt_poses) {
      io::write_f64(ps, p.x);
      io::write_f64(ps, p.y);
      io::write_f64(ps, p.theta);
    }
  }
}

Trajectory Trajectory::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  if (io::read_u8(in) != kTrajVersion)
    throw std::runtime_error("unsupported trajectory version: " + path.string());
  const std::uint32_t n = io::read_u32(in);
  const int ray_count = static_cast<int>(io::read_u32(in));
  Trajectory traj;
  traj.id = static_cast<int>(io::read_u32(in));
  traj.records.resize(n);
  for (auto& rec : traj.records) {
    rec.obs.ray_count = ray_count;
    rec.obs.frames.resize(static_cast<std::size_t>(4 * ray_count));
    for (float& f : rec.obs.frames) f = io::read_f32(in);
    rec.obs.lighting = io::read_f32(in);
    rec.cmd.v = io::read_f32(in);
    rec.cmd.omega = io::read_f32(in);
    rec.odom.dx = io::read_f32(in);
    rec.odom.dy = io::read_f32(in);
    rec.odom.dtheta = io::read_f32(in);
  }
  traj.lighting = traj.records.empty() ? 0.0 : traj.records.front().obs.lighting;

  std::filesystem::path side = path;
  side += ".poses";
  if (std::filesystem::exists(side)) {
    std::ifstream ps(side, std::ios::binary);
    if (!ps) throw std::runtime_error("cannot open " + side.string());
    if (io::read_u8(ps) != kPosesVersion)
      throw std::runtime_error("unsupported pose sidecar version");
    const std::uint32_t pn = io::read_u32(ps);
    if (pn != n)
      throw std::runtime_error("pose sidecar length mismatch: " + side.string());
    traj.gt_poses.resize(pn);
    for (auto& p : traj.gt_poses) {
      p.x = io::read_f64(ps);
      p.y = io::read_f64(ps);
      p.theta = io::read_f64(ps);
    }
  }
  return traj;
}

std::size_t TrajectorySet::total_records() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.records.size();
  return n;
}

TrajectorySet TrajectorySet::load_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.rfind("traj_", 0) == 0 && entry.path().extension() == ".bin")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  TrajectorySet set;
  set.trajectories.reserve(files.size());
  for (const auto& f : files) {
    Trajectory t = Trajectory::load(f);
    t.id = static_cast<int>(set.trajectories.size());
    set.trajectories.push_back(std::move(t));
  }
  return set;
}

void TrajectorySet::save_dir(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& t : trajectories) {
    char name[32];
    std::snprintf(name, sizeof(name), "traj_%05d.bin", t.id);
    t.save(dir / name);
  }
}

}  // namespace graphnav
