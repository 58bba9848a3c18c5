#pragma once

#include <Eigen/Core>

#include "graphnav/binary_io.hpp"

namespace graphnav::io {

inline void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_u64(out, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) write_f64(out, v[i]);
}

inline Eigen::VectorXd read_vector(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = read_f64(in);
  return v;
}

}  // namespace graphnav::io
