#include "graphnav/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "graphnav/eigen_io.hpp"

namespace graphnav {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs >= 2 layer sizes");
  for (int s : sizes_)
    if (s <= 0) throw std::invalid_argument("Mlp layer sizes must be positive");
  build_offsets();
  params_ = Eigen::VectorXd::Zero(param_count(sizes_));
}

std::int64_t Mlp::param_count(const std::vector<int>& sizes) {
  std::int64_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
    n += static_cast<std::int64_t>(sizes[l] + 1) * sizes[l + 1];
  return n;
}

void Mlp::build_offsets() {
  offsets_.clear();
  std::int64_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(off);
    off += static_cast<std::int64_t>(sizes_[l] + 1) * sizes_[l + 1];
  }
}

void Mlp::init_glorot(std::mt19937_64& rng) {
  for (int l = 0; l < layer_count(); ++l) {
    const int n_in = sizes_[static_cast<std::size_t>(l)];
    const int n_out = sizes_[static_cast<std::size_t>(l) + 1];
    const double bound = std::sqrt(6.0 / (n_in + n_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    auto w = weight(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    bias(l).setZero();
  }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int l) const {
  const int n_in = sizes_[static_cast<std::size_t>(l)];
  const int n_out = sizes_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + weight_offset(l), n_out, n_in};
}

Eigen::Map<Eigen::MatrixXd> Mlp::weight(int l) {
  const int n_in = sizes_[static_cast<std::size_t>(l)];
  const int n_out = sizes_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + weight_offset(l), n_out, n_in};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  const int n_in = sizes_[static_cast<std::size_t>(l)];
  const int n_out = sizes_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + weight_offset(l) +
              static_cast<std::int64_t>(n_in) * n_out,
          n_out};
}

Eigen::Map<Eigen::VectorXd> Mlp::bias(int l) {
  const int n_in = sizes_[static_cast<std::size_t>(l)];
  const int n_out = sizes_[static_cast<std::size_t>(l) + 1];
  return {params_.data() + weight_offset(l) +
              static_cast<std::int64_t>(n_in) * n_out,
          n_out};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim())
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  Eigen::MatrixXd a = x;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = a * weight(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < layer_count())
      a = z.cwiseMax(0.0);
    else
      a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward_cached(const Eigen::MatrixXd& x,
                                    Cache& cache) const {
  if (x.cols() != input_dim())
    throw std::invalid_argument("Mlp::forward_cached: input dimension mismatch");
  cache.acts.assign(1, x);
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = cache.acts.back() * weight(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < layer_count()) z = z.cwiseMax(0.0);
    cache.acts.push_back(std::move(z));
  }
  return cache.acts.back();
}

void Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dy,
                   Eigen::VectorXd& grad) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("Mlp::backward: grad size mismatch");
  Eigen::MatrixXd dz = dy;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const auto& a_prev = cache.acts[static_cast<std::size_t>(l)];
    const int n_in = sizes_[static_cast<std::size_t>(l)];
    const int n_out = sizes_[static_cast<std::size_t>(l) + 1];
    Eigen::Map<Eigen::MatrixXd> dw(grad.data() + weight_offset(l), n_out, n_in);
    Eigen::Map<Eigen::VectorXd> db(
        grad.data() + weight_offset(l) + static_cast<std::int64_t>(n_in) * n_out,
        n_out);
    dw.noalias() += dz.transpose() * a_prev;
    db += dz.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd da = dz * weight(l);
      // Post-ReLU activations are positive exactly where the unit was active.
      const auto& a = cache.acts[static_cast<std::size_t>(l)];
      dz = (a.array() > 0.0).select(da, 0.0);
    }
  }
}

double Mlp::min_abs_preactivation(const Eigen::MatrixXd& x) const {
  double min_abs = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd a = x;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = a * weight(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < layer_count()) {
      min_abs = std::min(min_abs, z.array().abs().minCoeff());
      a = z.cwiseMax(0.0);
    }
  }
  return min_abs;
}

void Mlp::save(std::ostream& out) const {
  io::write_u32(out, static_cast<std::uint32_t>(sizes_.size()));
  for (int s : sizes_) io::write_i32(out, s);
  io::write_vector(out, params_);
}

Mlp Mlp::load(std::istream& in) {
  const std::uint32_t k = io::read_u32(in);
  std::vector<int> sizes(k);
  for (auto& s : sizes) s = io::read_i32(in);
  Mlp net(sizes);
  net.params_ = io::read_vector(in);
  if (net.params_.size() != param_count(sizes))
    throw std::runtime_error("Mlp::load: parameter count mismatch");
  return net;
}

AdamOptimizer::AdamOptimizer(std::int64_t n, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_ = Eigen::VectorXd::Zero(n);
  v_ = Eigen::VectorXd::Zero(n);
}

void AdamOptimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("AdamOptimizer::step: size mismatch");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -=
      lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

void AdamOptimizer::save(std::ostream& out) const {
  io::write_f64(out, lr_);
  io::write_f64(out, beta1_);
  io::write_f64(out, beta2_);
  io::write_f64(out, eps_);
  io::write_u64(out, static_cast<std::uint64_t>(t_));
  io::write_vector(out, m_);
  io::write_vector(out, v_);
}

AdamOptimizer AdamOptimizer::load(std::istream& in) {
  AdamOptimizer opt;
  opt.lr_ = io::read_f64(in);
  opt.beta1_ = io::read_f64(in);
  opt.beta2_ = io::read_f64(in);
  opt.eps_ = io::read_f64(in);
  opt.t_ = static_cast<std::int64_t>(io::read_u64(in));
  opt.m_ = io::read_vector(in);
  opt.v_ = io::read_vector(in);
  if (opt.m_.size() != opt.v_.size())
    throw std::runtime_error("AdamOptimizer::load: moment size mismatch");
  return opt;
}

}  // namespace graphnav
