#pragma once

#include <vector>

#include "alertforge/numerics.hpp"

namespace alertforge::numerics {

// Batched counterparts of the per-sample MLP operations. Kernels parallelize
// over independent output rows/entries with OpenMP; every output element is
// produced by a single fixed-order inner loop, so results are bit-identical
// for any thread count and match the serial per-sample path when the
// per-entry summation order coincides (it does: samples are always reduced
// in index order).

// out = a * b^T, a: n x k, b: m x k -> n x m.
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);

// out = a^T * b, a: n x k, b: n x m -> k x m. Inner loop runs over the n
// samples in index order.
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);

// out (+)= a * b, a: n x k, b: k x m -> n x m.
void matmul_nn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate);

// Column sums of a (n x m) -> m, samples reduced in index order.
void column_sums(const Matrix& a, std::vector<double>& out);

struct BatchCache {
  Matrix input;   // n x in
  Matrix preact;  // n x hidden
  Matrix hidden;  // n x hidden
};

// Row i of each output matrix is mlp_forward of row i of x.
std::vector<Matrix> batch_forward(const MlpParams& params, const Matrix& x,
                                  BatchCache* cache = nullptr);

// Accumulates parameter gradients over the whole batch (sample order) into
// `grads`; optionally emits per-row input gradients.
void batch_backward(const MlpParams& params, const BatchCache& cache,
                    const std::vector<Matrix>& head_grads, GradientSet& grads,
                    Matrix* input_grads = nullptr);

// Row-wise critic values and input gradients for a single-head scalar MLP.
void batch_critic_values_and_input_grads(const MlpParams& params,
                                         const Matrix& x,
                                         std::vector<double>& values,
                                         Matrix& input_grads);

struct BatchPenaltyResult {
  double mean_penalty = 0.0;
  std::size_t zero_gradient_rows = 0;
};

// Mean gradient penalty over the rows of x_hat plus its exact parameter
// gradient, matching grad_penalty_param_grads averaged over rows.
BatchPenaltyResult batch_grad_penalty(const MlpParams& critic,
                                      const Matrix& x_hat, double lambda,
                                      GradientSet& grads);

}  // namespace alertforge::numerics
