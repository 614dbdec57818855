#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace alertforge::numerics {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_data(std::size_t rows, std::size_t cols,
                          std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const;
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// One output head: out = w * h + b.
struct Head {
  Matrix w;               // out x hidden
  std::vector<double> b;  // out
};

// Two-layer MLP: h = relu(W1 x + b1), head_k = W2_k h + b2_k. A single-head
// instance models the critic (or the MI statistic head); the generator uses
// one head per alert feature.
struct MlpParams {
  Matrix w1;               // hidden x in
  std::vector<double> b1;  // hidden
  std::vector<Head> heads;

  std::size_t input_dim() const { return w1.cols(); }
  std::size_t hidden_dim() const { return w1.rows(); }
  std::size_t parameter_count() const;
};

// Per-parameter arrays mirroring MlpParams.
struct GradientSet {
  Matrix w1;
  std::vector<double> b1;
  std::vector<Head> heads;

  static GradientSet zeros_like(const MlpParams& params);
  void accumulate(const GradientSet& other, double scale = 1.0);
  void scale(double factor);
  // Frobenius norm over the concatenation of every parameter array.
  double frobenius_norm() const;
  bool all_finite() const;
};

struct ForwardCache {
  std::vector<double> input;
  std::vector<double> preact;  // W1 x + b1
  std::vector<double> hidden;  // relu(preact)
};

// Head outputs for one sample; cache captures what backward needs.
std::vector<std::vector<double>> mlp_forward(const MlpParams& params,
                                             std::span<const double> x,
                                             ForwardCache* cache = nullptr);

// Exact reverse-mode gradients for one sample. Accumulates into `grads`
// (pre-sized via zeros_like) and optionally emits d(loss)/d(input).
void mlp_backward(const MlpParams& params, const ForwardCache& cache,
                  const std::vector<std::vector<double>>& head_grads,
                  GradientSet& grads, std::vector<double>* input_grad = nullptr);

// d D/dx for a single-head scalar MLP; returns D(x).
double critic_value_and_input_grad(const MlpParams& params,
                                   std::span<const double> x,
                                   std::vector<double>& input_grad);

struct GradPenaltyResult {
  double penalty = 0.0;
  bool zero_gradient = false;  // |grad| was exactly 0; subgradient fallback
};

// penalty = lambda * (|grad_x D(x_hat)| - 1)^2 and its exact parameter
// gradient. Uses the closed-form second-order expressions valid for the
// fixed relu two-layer critic (relu'' = 0 away from the kink), so b1 and b2
// receive no contribution. Accumulates into `grads`.
GradPenaltyResult grad_penalty_param_grads(const MlpParams& critic,
                                           std::span<const double> x_hat,
                                           double lambda, GradientSet& grads);

struct AdamState {
  GradientSet m;
  GradientSet v;
  std::uint64_t step = 0;
  double lr = 5e-5;
  double beta1 = 0.5;
  double beta2 = 0.8;
  double epsilon = 1e-8;

  static AdamState for_params(const MlpParams& params, double lr, double beta1,
                              double beta2);
};

// Standard bias-corrected ADAM descent step. Throws NumericsError on
// non-finite gradient entries.
void adam_step(MlpParams& params, const GradientSet& grads, AdamState& state);

// Adaptive clipping of the mutual-information gradient against the
// adversarial gradient: g_a + min(|g_a|, |g_m|) * g_m / |g_m|, with
// |.| the global Frobenius norm; returns g_a when g_m vanishes.
GradientSet clip_combine(const GradientSet& g_a, const GradientSet& g_m);

}  // namespace alertforge::numerics
