#include "alertforge/numerics.hpp"

#include <cmath>

#include "alertforge/errors.hpp"

namespace alertforge::numerics {

Matrix Matrix::from_data(std::size_t rows, std::size_t cols,
                         std::vector<double> data) {
  if (data.size() != rows * cols) {
    throw ShapeError("matrix data size does not match dimensions");
  }
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = w1.size() + b1.size();
  for (const auto& head : heads) n += head.w.size() + head.b.size();
  return n;
}

GradientSet GradientSet::zeros_like(const MlpParams& params) {
  GradientSet g;
  g.w1 = Matrix(params.w1.rows(), params.w1.cols());
  g.b1.assign(params.b1.size(), 0.0);
  g.heads.reserve(params.heads.size());
  for (const auto& head : params.heads) {
    g.heads.push_back({Matrix(head.w.rows(), head.w.cols()),
                       std::vector<double>(head.b.size(), 0.0)});
  }
  return g;
}

void GradientSet::accumulate(const GradientSet& other, double scale) {
  if (w1.size() != other.w1.size() || heads.size() != other.heads.size()) {
    throw ShapeError("gradient sets are not shape-congruent");
  }
  for (std::size_t i = 0; i < w1.size(); ++i) {
    w1.data()[i] += scale * other.w1.data()[i];
  }
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += scale * other.b1[i];
  for (std::size_t k = 0; k < heads.size(); ++k) {
    for (std::size_t i = 0; i < heads[k].w.size(); ++i) {
      heads[k].w.data()[i] += scale * other.heads[k].w.data()[i];
    }
    for (std::size_t i = 0; i < heads[k].b.size(); ++i) {
      heads[k].b[i] += scale * other.heads[k].b[i];
    }
  }
}

void GradientSet::scale(double factor) {
  for (double& v : w1.data()) v *= factor;
  for (double& v : b1) v *= factor;
  for (auto& head : heads) {
    for (double& v : head.w.data()) v *= factor;
    for (double& v : head.b) v *= factor;
  }
}

double GradientSet::frobenius_norm() const {
  double sum = 0.0;
  for (double v : w1.data()) sum += v * v;
  for (double v : b1) sum += v * v;
  for (const auto& head : heads) {
    for (double v : head.w.data()) sum += v * v;
    for (double v : head.b) sum += v * v;
  }
  return std::sqrt(sum);
}

bool GradientSet::all_finite() const {
  if (!w1.all_finite()) return false;
  for (double v : b1) {
    if (!std::isfinite(v)) return false;
  }
  for (const auto& head : heads) {
    if (!head.w.all_finite()) return false;
    for (double v : head.b) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::vector<std::vector<double>> mlp_forward(const MlpParams& params,
                                             std::span<const double> x,
                                             ForwardCache* cache) {
  if (x.size() != params.input_dim()) {
    throw ShapeError("input length does not match network input dimension");
  }
  const std::size_t hidden = params.hidden_dim();
  std::vector<double> preact(hidden);
  for (std::size_t h = 0; h < hidden; ++h) {
    const double* w_row = params.w1.row(h);
    double sum = params.b1[h];
    for (std::size_t i = 0; i < x.size(); ++i) sum += w_row[i] * x[i];
    preact[h] = sum;
  }
  std::vector<double> activated(hidden);
  for (std::size_t h = 0; h < hidden; ++h) {
    activated[h] = preact[h] > 0.0 ? preact[h] : 0.0;
  }

  std::vector<std::vector<double>> outputs;
  outputs.reserve(params.heads.size());
  for (const auto& head : params.heads) {
    std::vector<double> out(head.b);
    for (std::size_t o = 0; o < out.size(); ++o) {
      const double* w_row = head.w.row(o);
      double sum = out[o];
      for (std::size_t h = 0; h < hidden; ++h) sum += w_row[h] * activated[h];
      out[o] = sum;
    }
    outputs.push_back(std::move(out));
  }

  if (cache != nullptr) {
    cache->input.assign(x.begin(), x.end());
    cache->preact = std::move(preact);
    cache->hidden = std::move(activated);
  }
  return outputs;
}

void mlp_backward(const MlpParams& params, const ForwardCache& cache,
                  const std::vector<std::vector<double>>& head_grads,
                  GradientSet& grads, std::vector<double>* input_grad) {
  if (head_grads.size() != params.heads.size()) {
    throw ShapeError("head gradient count mismatch");
  }
  const std::size_t hidden = params.hidden_dim();
  const std::size_t in = params.input_dim();
  std::vector<double> d_hidden(hidden, 0.0);

  for (std::size_t k = 0; k < params.heads.size(); ++k) {
    const auto& head = params.heads[k];
    const auto& dout = head_grads[k];
    if (dout.size() != head.b.size()) {
      throw ShapeError("head gradient length mismatch");
    }
    auto& gw = grads.heads[k].w;
    auto& gb = grads.heads[k].b;
    for (std::size_t o = 0; o < dout.size(); ++o) {
      const double g = dout[o];
      gb[o] += g;
      double* gw_row = gw.row(o);
      const double* w_row = head.w.row(o);
      for (std::size_t h = 0; h < hidden; ++h) {
        gw_row[h] += g * cache.hidden[h];
        d_hidden[h] += g * w_row[h];
      }
    }
  }

  if (input_grad != nullptr) input_grad->assign(in, 0.0);
  for (std::size_t h = 0; h < hidden; ++h) {
    if (cache.preact[h] <= 0.0) continue;
    const double g = d_hidden[h];
    grads.b1[h] += g;
    double* gw1_row = grads.w1.row(h);
    const double* w1_row = params.w1.row(h);
    for (std::size_t i = 0; i < in; ++i) {
      gw1_row[i] += g * cache.input[i];
      if (input_grad != nullptr) (*input_grad)[i] += g * w1_row[i];
    }
  }
}

double critic_value_and_input_grad(const MlpParams& params,
                                   std::span<const double> x,
                                   std::vector<double>& input_grad) {
  if (params.heads.size() != 1 || params.heads[0].b.size() != 1) {
    throw ShapeError("critic must have a single scalar head");
  }
  ForwardCache cache;
  const auto outputs = mlp_forward(params, x, &cache);

  // d D/dx = W1^T (w2 ⊙ relu'(preact))
  const std::size_t hidden = params.hidden_dim();
  const std::size_t in = params.input_dim();
  const double* w2 = params.heads[0].w.row(0);
  input_grad.assign(in, 0.0);
  for (std::size_t h = 0; h < hidden; ++h) {
    if (cache.preact[h] <= 0.0) continue;
    const double u = w2[h];
    const double* w1_row = params.w1.row(h);
    for (std::size_t i = 0; i < in; ++i) input_grad[i] += u * w1_row[i];
  }
  return outputs[0][0];
}

GradPenaltyResult grad_penalty_param_grads(const MlpParams& critic,
                                           std::span<const double> x_hat,
                                           double lambda, GradientSet& grads) {
  if (critic.heads.size() != 1 || critic.heads[0].b.size() != 1) {
    throw ShapeError("gradient penalty requires a single scalar head");
  }
  ForwardCache cache;
  mlp_forward(critic, x_hat, &cache);

  const std::size_t hidden = critic.hidden_dim();
  const std::size_t in = critic.input_dim();
  const double* w2 = critic.heads[0].w.row(0);

  // g = W1^T u with u = w2 ⊙ relu'(preact).
  std::vector<double> u(hidden, 0.0);
  std::vector<double> g(in, 0.0);
  for (std::size_t h = 0; h < hidden; ++h) {
    if (cache.preact[h] <= 0.0) continue;
    u[h] = w2[h];
    const double* w1_row = critic.w1.row(h);
    for (std::size_t i = 0; i < in; ++i) g[i] += u[h] * w1_row[i];
  }

  double norm_sq = 0.0;
  for (double v : g) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);

  GradPenaltyResult result;
  if (norm == 0.0) {
    // (|g| - 1)^2 == 1; the norm is non-differentiable here, take the zero
    // subgradient for the parameter direction.
    result.penalty = lambda;
    result.zero_gradient = true;
    return result;
  }
  result.penalty = lambda * (norm - 1.0) * (norm - 1.0);

  // dP/dg = 2 lambda (|g| - 1) g / |g|; relu'' = 0 away from the kink, so
  // W1 picks up u q^T, w2 picks up relu' ⊙ (W1 q), and the biases get nothing.
  const double coeff = 2.0 * lambda * (norm - 1.0) / norm;
  std::vector<double> q(in);
  for (std::size_t i = 0; i < in; ++i) q[i] = coeff * g[i];

  double* gw2 = grads.heads[0].w.row(0);
  for (std::size_t h = 0; h < hidden; ++h) {
    if (cache.preact[h] <= 0.0) continue;
    const double* w1_row = critic.w1.row(h);
    double* gw1_row = grads.w1.row(h);
    double dot = 0.0;
    for (std::size_t i = 0; i < in; ++i) {
      gw1_row[i] += u[h] * q[i];
      dot += w1_row[i] * q[i];
    }
    gw2[h] += dot;
  }
  return result;
}

AdamState AdamState::for_params(const MlpParams& params, double lr, double beta1,
                                double beta2) {
  AdamState state;
  state.m = GradientSet::zeros_like(params);
  state.v = GradientSet::zeros_like(params);
  state.lr = lr;
  state.beta1 = beta1;
  state.beta2 = beta2;
  return state;
}

namespace {

void adam_update_array(double* param, double* m, double* v, const double* grad,
                       std::size_t n, const AdamState& state, double bias1,
                       double bias2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * grad[i];
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    param[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace

void adam_step(MlpParams& params, const GradientSet& grads, AdamState& state) {
  if (!grads.all_finite()) {
    throw NumericsError("non-finite gradient entries in adam_step");
  }
  if (grads.w1.rows() != params.w1.rows() || grads.w1.cols() != params.w1.cols() ||
      grads.heads.size() != params.heads.size()) {
    throw ShapeError("gradients do not match parameter shapes");
  }
  state.step += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  adam_update_array(params.w1.data().data(), state.m.w1.data().data(),
                    state.v.w1.data().data(), grads.w1.data().data(),
                    params.w1.size(), state, bias1, bias2);
  adam_update_array(params.b1.data(), state.m.b1.data(), state.v.b1.data(),
                    grads.b1.data(), params.b1.size(), state, bias1, bias2);
  for (std::size_t k = 0; k < params.heads.size(); ++k) {
    adam_update_array(params.heads[k].w.data().data(),
                      state.m.heads[k].w.data().data(),
                      state.v.heads[k].w.data().data(),
                      grads.heads[k].w.data().data(), params.heads[k].w.size(),
                      state, bias1, bias2);
    adam_update_array(params.heads[k].b.data(), state.m.heads[k].b.data(),
                      state.v.heads[k].b.data(), grads.heads[k].b.data(),
                      params.heads[k].b.size(), state, bias1, bias2);
  }
}

GradientSet clip_combine(const GradientSet& g_a, const GradientSet& g_m) {
  const double norm_m = g_m.frobenius_norm();
  GradientSet combined = g_a;
  if (norm_m == 0.0) return combined;
  const double norm_a = g_a.frobenius_norm();
  const double scale = std::min(norm_a, norm_m) / norm_m;
  combined.accumulate(g_m, scale);
  return combined;
}

}  // namespace alertforge::numerics
