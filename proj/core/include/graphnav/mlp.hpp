#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace graphnav {

/// Fully connected net, ReLU hidden activations, linear output. All weights
/// and biases live in one flat parameter vector so the optimizer and the
/// checkpoints treat the model as a single vector. Rows of the batch
/// matrices are samples.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> sizes);  // {input, hidden..., output}

  static std::int64_t param_count(const std::vector<int>& sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  /// Uniform +-sqrt(6/(n_in+n_out)) weights, zero biases.
  void init_glorot(std::mt19937_64& rng);

  /// Weight matrix of layer l, shape (n_out, n_in), viewed into the flat
  /// parameter vector.
  Eigen::Map<const Eigen::MatrixXd> weight(int l) const;
  Eigen::Map<Eigen::MatrixXd> weight(int l);
  Eigen::Map<const Eigen::VectorXd> bias(int l) const;
  Eigen::Map<Eigen::VectorXd> bias(int l);

  /// x: (batch, input_dim) -> (batch, output_dim).
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  /// acts[0] = x, acts[l] = post-ReLU activation of hidden layer l,
  /// acts[layer_count()] = linear output.
  struct Cache {
    std::vector<Eigen::MatrixXd> acts;
  };
  Eigen::MatrixXd forward_cached(const Eigen::MatrixXd& x, Cache& cache) const;

  /// Accumulates d(loss)/d(params) into grad given d(loss)/d(output); grad
  /// must be pre-sized and is added to, not overwritten.
  void backward(const Cache& cache, const Eigen::MatrixXd& dy,
                Eigen::VectorXd& grad) const;

  /// Smallest |pre-activation| over all hidden units for the given batch;
  /// used to resample inputs too close to a ReLU kink in gradient checks.
  double min_abs_preactivation(const Eigen::MatrixXd& x) const;

  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);

 private:
  std::int64_t weight_offset(int l) const { return offsets_[static_cast<std::size_t>(l)]; }
  void build_offsets();

  std::vector<int> sizes_;
  std::vector<std::int64_t> offsets_;  // start of layer l's weight block
  Eigen::VectorXd params_;
};

/// Adam with bias correction; state is serializable so training can resume.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  explicit AdamOptimizer(std::int64_t n, double lr = 1e-4, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  std::int64_t steps() const { return t_; }
  double learning_rate() const { return lr_; }
  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }

  void save(std::ostream& out) const;
  static AdamOptimizer load(std::istream& in);

 private:
  double lr_ = 1e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

}  // namespace graphnav
