#include "alertforge/batch.hpp"

#include <cmath>

#include "alertforge/errors.hpp"

namespace alertforge::numerics {

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: inner dims differ");
  out = Matrix(a.rows(), b.rows());
  const std::size_t k = a.cols();
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* a_row = a.row(r);
    double* out_row = out.row(r);
    for (std::size_t c = 0; c < b.rows(); ++c) {
      const double* b_row = b.row(c);
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum += a_row[i] * b_row[i];
      out_row[c] = sum;
    }
  }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: sample counts differ");
  out = Matrix(a.cols(), b.cols());
  const std::size_t n = a.rows();
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < a.cols(); ++r) {
    double* out_row = out.row(r);
    for (std::size_t s = 0; s < n; ++s) {
      const double av = a(s, r);
      if (av == 0.0) continue;
      const double* b_row = b.row(s);
      for (std::size_t c = 0; c < b.cols(); ++c) out_row[c] += av * b_row[c];
    }
  }
}

void matmul_nn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  if (a.cols() != b.rows()) throw ShapeError("matmul_nn: inner dims differ");
  if (!accumulate || out.rows() != a.rows() || out.cols() != b.cols()) {
    out = Matrix(a.rows(), b.cols());
  }
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* a_row = a.row(r);
    double* out_row = out.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double av = a_row[i];
      if (av == 0.0) continue;
      const double* b_row = b.row(i);
      for (std::size_t c = 0; c < b.cols(); ++c) out_row[c] += av * b_row[c];
    }
  }
}

void column_sums(const Matrix& a, std::vector<double>& out) {
  out.assign(a.cols(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t s = 0; s < a.rows(); ++s) sum += a(s, c);
    out[c] = sum;
  }
}

std::vector<Matrix> batch_forward(const MlpParams& params, const Matrix& x,
                                  BatchCache* cache) {
  if (x.cols() != params.input_dim()) {
    throw ShapeError("batch input width does not match network");
  }
  const std::size_t n = x.rows();
  const std::size_t hidden = params.hidden_dim();
  const std::size_t in = params.input_dim();

  Matrix preact(n, hidden);
  Matrix activated(n, hidden);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < n; ++r) {
    const double* x_row = x.row(r);
    double* pre_row = preact.row(r);
    double* act_row = activated.row(r);
    for (std::size_t h = 0; h < hidden; ++h) {
      const double* w_row = params.w1.row(h);
      double sum = params.b1[h];
      for (std::size_t i = 0; i < in; ++i) sum += w_row[i] * x_row[i];
      pre_row[h] = sum;
      act_row[h] = sum > 0.0 ? sum : 0.0;
    }
  }

  std::vector<Matrix> outputs;
  outputs.reserve(params.heads.size());
  for (const auto& head : params.heads) {
    Matrix out(n, head.b.size());
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
      const double* act_row = activated.row(r);
      double* out_row = out.row(r);
      for (std::size_t o = 0; o < head.b.size(); ++o) {
        const double* w_row = head.w.row(o);
        double sum = head.b[o];
        for (std::size_t h = 0; h < hidden; ++h) sum += w_row[h] * act_row[h];
        out_row[o] = sum;
      }
    }
    outputs.push_back(std::move(out));
  }

  if (cache != nullptr) {
    cache->input = x;
    cache->preact = std::move(preact);
    cache->hidden = std::move(activated);
  }
  return outputs;
}

void batch_backward(const MlpParams& params, const BatchCache& cache,
                    const std::vector<Matrix>& head_grads, GradientSet& grads,
                    Matrix* input_grads) {
  if (head_grads.size() != params.heads.size()) {
    throw ShapeError("head gradient count mismatch");
  }
  const std::size_t n = cache.input.rows();
  const std::size_t hidden = params.hidden_dim();
  const std::size_t in = params.input_dim();

  // d(loss)/d(preact), relu gate applied; contributions ordered by head then
  // output unit, matching the per-sample path.
  Matrix d_pre(n, hidden);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < n; ++r) {
    double* d_row = d_pre.row(r);
    for (std::size_t k = 0; k < params.heads.size(); ++k) {
      const auto& head = params.heads[k];
      const double* g_row = head_grads[k].row(r);
      for (std::size_t o = 0; o < head.b.size(); ++o) {
        const double g = g_row[o];
        if (g == 0.0) continue;
        const double* w_row = head.w.row(o);
        for (std::size_t h = 0; h < hidden; ++h) d_row[h] += g * w_row[h];
      }
    }
    const double* pre_row = cache.preact.row(r);
    for (std::size_t h = 0; h < hidden; ++h) {
      if (pre_row[h] <= 0.0) d_row[h] = 0.0;
    }
  }

  for (std::size_t k = 0; k < params.heads.size(); ++k) {
    const auto& head = params.heads[k];
    auto& gw = grads.heads[k].w;
    auto& gb = grads.heads[k].b;
#pragma omp parallel for schedule(static)
    for (std::size_t o = 0; o < head.b.size(); ++o) {
      double* gw_row = gw.row(o);
      double gb_sum = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        const double g = head_grads[k](s, o);
        gb_sum += g;
        if (g == 0.0) continue;
        const double* act_row = cache.hidden.row(s);
        for (std::size_t h = 0; h < hidden; ++h) gw_row[h] += g * act_row[h];
      }
      gb[o] += gb_sum;
    }
  }

#pragma omp parallel for schedule(static)
  for (std::size_t h = 0; h < hidden; ++h) {
    double* gw1_row = grads.w1.row(h);
    double gb1_sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double g = d_pre(s, h);
      gb1_sum += g;
      if (g == 0.0) continue;
      const double* x_row = cache.input.row(s);
      for (std::size_t i = 0; i < in; ++i) gw1_row[i] += g * x_row[i];
    }
    grads.b1[h] += gb1_sum;
  }

  if (input_grads != nullptr) {
    *input_grads = Matrix(n, in);
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
      const double* d_row = d_pre.row(r);
      double* out_row = input_grads->row(r);
      for (std::size_t h = 0; h < hidden; ++h) {
        const double g = d_row[h];
        if (g == 0.0) continue;
        const double* w1_row = params.w1.row(h);
        for (std::size_t i = 0; i < in; ++i) out_row[i] += g * w1_row[i];
      }
    }
  }
}

void batch_critic_values_and_input_grads(const MlpParams& params,
                                         const Matrix& x,
                                         std::vector<double>& values,
                                         Matrix& input_grads) {
  if (params.heads.size() != 1 || params.heads[0].b.size() != 1) {
    throw ShapeError("critic must have a single scalar head");
  }
  const std::size_t n = x.rows();
  const std::size_t hidden = params.hidden_dim();
  const std::size_t in = params.input_dim();
  const double* w2 = params.heads[0].w.row(0);

  values.assign(n, 0.0);
  input_grads = Matrix(n, in);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < n; ++r) {
    const double* x_row = x.row(r);
    double* grad_row = input_grads.row(r);
    double value = params.heads[0].b[0];
    for (std::size_t h = 0; h < hidden; ++h) {
      const double* w1_row = params.w1.row(h);
      double pre = params.b1[h];
      for (std::size_t i = 0; i < in; ++i) pre += w1_row[i] * x_row[i];
      if (pre <= 0.0) continue;
      value += w2[h] * pre;
      const double u = w2[h];
      for (std::size_t i = 0; i < in; ++i) grad_row[i] += u * w1_row[i];
    }
    values[r] = value;
  }
}

BatchPenaltyResult batch_grad_penalty(const MlpParams& critic,
                                      const Matrix& x_hat, double lambda,
                                      GradientSet& grads) {
  if (critic.heads.size() != 1 || critic.heads[0].b.size() != 1) {
    throw ShapeError("gradient penalty requires a single scalar head");
  }
  const std::size_t n = x_hat.rows();
  const std::size_t hidden = critic.hidden_dim();
  const std::size_t in = critic.input_dim();
  const double* w2 = critic.heads[0].w.row(0);
  const double inv_n = 1.0 / static_cast<double>(n);

  // Per-row relu masks and scaled penalty directions; parameter gradients
  // are then reduced over rows in index order.
  Matrix mask(n, hidden);
  Matrix q(n, in);
  std::vector<double> penalties(n, 0.0);
  std::vector<unsigned char> zero_rows(n, 0);

#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < n; ++r) {
    const double* x_row = x_hat.row(r);
    double* mask_row = mask.row(r);
    double* q_row = q.row(r);
    std::vector<double> g(in, 0.0);
    for (std::size_t h = 0; h < hidden; ++h) {
      const double* w1_row = critic.w1.row(h);
      double pre = critic.b1[h];
      for (std::size_t i = 0; i < in; ++i) pre += w1_row[i] * x_row[i];
      if (pre <= 0.0) continue;
      mask_row[h] = 1.0;
      const double u = w2[h];
      for (std::size_t i = 0; i < in; ++i) g[i] += u * w1_row[i];
    }
    double norm_sq = 0.0;
    for (double v : g) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) {
      penalties[r] = lambda;
      zero_rows[r] = 1;
      continue;
    }
    penalties[r] = lambda * (norm - 1.0) * (norm - 1.0);
    const double coeff = 2.0 * lambda * (norm - 1.0) / norm * inv_n;
    for (std::size_t i = 0; i < in; ++i) q_row[i] = coeff * g[i];
  }

  BatchPenaltyResult result;
  double penalty_sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    penalty_sum += penalties[r];
    result.zero_gradient_rows += zero_rows[r];
  }
  result.mean_penalty = penalty_sum * inv_n;

  // gW1[h] += mask[.,h] * w2[h] outer q; gw2[h] += mask[.,h] * (W1[h] . q).
#pragma omp parallel for schedule(static)
  for (std::size_t h = 0; h < hidden; ++h) {
    const double* w1_row = critic.w1.row(h);
    double* gw1_row = grads.w1.row(h);
    double gw2_sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (mask(r, h) == 0.0) continue;
      const double* q_row = q.row(r);
      double dot = 0.0;
      for (std::size_t i = 0; i < in; ++i) {
        gw1_row[i] += w2[h] * q_row[i];
        dot += w1_row[i] * q_row[i];
      }
      gw2_sum += dot;
    }
    grads.heads[0].w.row(0)[h] += gw2_sum;
  }
  return result;
}

}  // namespace alertforge::numerics
