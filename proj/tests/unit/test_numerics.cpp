#include <doctest.h>

#include <cmath>

#include "alertforge/errors.hpp"
#include "alertforge/numerics.hpp"
#include "alertforge/rng.hpp"

using namespace alertforge;
using namespace alertforge::numerics;

namespace {

MlpParams one_by_one_net(double w1, double b1, double w2, double b2) {
  MlpParams params;
  params.w1 = Matrix::from_data(1, 1, {w1});
  params.b1 = {b1};
  Head head;
  head.w = Matrix::from_data(1, 1, {w2});
  head.b = {b2};
  params.heads.push_back(std::move(head));
  return params;
}

MlpParams random_net(std::size_t in, std::size_t hidden,
                     const std::vector<std::size_t>& outs, Rng& rng,
                     double scale = 0.8) {
  MlpParams params;
  params.w1 = Matrix(hidden, in);
  for (double& v : params.w1.data()) v = scale * rng.normal();
  params.b1.assign(hidden, 0.0);
  for (double& v : params.b1) v = 0.3 * rng.normal();
  for (std::size_t out : outs) {
    Head head;
    head.w = Matrix(out, hidden);
    for (double& v : head.w.data()) v = scale * rng.normal();
    head.b.assign(out, 0.0);
    for (double& v : head.b) v = 0.3 * rng.normal();
    params.heads.push_back(std::move(head));
  }
  return params;
}

// Flat views over parameters for finite differencing.
std::vector<double*> param_slots(MlpParams& params) {
  std::vector<double*> slots;
  for (double& v : params.w1.data()) slots.push_back(&v);
  for (double& v : params.b1) slots.push_back(&v);
  for (auto& head : params.heads) {
    for (double& v : head.w.data()) slots.push_back(&v);
    for (double& v : head.b) slots.push_back(&v);
  }
  return slots;
}

std::vector<double> grad_flat(const GradientSet& grads) {
  std::vector<double> flat;
  for (double v : grads.w1.data()) flat.push_back(v);
  for (double v : grads.b1) flat.push_back(v);
  for (const auto& head : grads.heads) {
    for (double v : head.w.data()) flat.push_back(v);
    for (double v : head.b) flat.push_back(v);
  }
  return flat;
}

bool close_rel(double a, double b, double tol, double floor = 1e-6) {
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), floor});
}

// Keeps relu preactivations away from the kink so central differences stay on
// one linear piece.
bool kink_safe(const MlpParams& params, std::span<const double> x,
               double margin) {
  ForwardCache cache;
  mlp_forward(params, x, &cache);
  for (double p : cache.preact) {
    if (std::fabs(p) < margin) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("zero-weight network passes biases through") {
  MlpParams params = one_by_one_net(0.0, 0.0, 0.0, 3.5);
  const auto out = mlp_forward(params, std::vector<double>{2.0});
  CHECK(out[0][0] == 3.5);
}

TEST_CASE("hand-computed 1x1 forward") {
  MlpParams params = one_by_one_net(2.0, 0.0, 3.0, 1.0);
  // relu(2*1) = 2, out = 3*2 + 1 = 7.
  CHECK(mlp_forward(params, std::vector<double>{1.0})[0][0] == 7.0);
  // relu kink: x = -1 -> hidden dead, out = b2.
  CHECK(mlp_forward(params, std::vector<double>{-1.0})[0][0] == 1.0);
}

TEST_CASE("forward rejects dimension mismatches") {
  MlpParams params = one_by_one_net(1.0, 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(mlp_forward(params, std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST_CASE("backward matches the chain rule on the 1x1 network") {
  MlpParams params = one_by_one_net(2.0, 0.0, 3.0, 1.0);
  ForwardCache cache;
  mlp_forward(params, std::vector<double>{1.0}, &cache);
  GradientSet grads = GradientSet::zeros_like(params);
  std::vector<double> input_grad;
  mlp_backward(params, cache, {{1.0}}, grads, &input_grad);
  // out = w2*relu(w1*x + b1) + b2 at x=1: d/dw2 = h = 2, d/db2 = 1,
  // d/dw1 = w2*x = 3, d/db1 = w2 = 3, d/dx = w2*w1 = 6.
  CHECK(grads.heads[0].w(0, 0) == 2.0);
  CHECK(grads.heads[0].b[0] == 1.0);
  CHECK(grads.w1(0, 0) == 3.0);
  CHECK(grads.b1[0] == 3.0);
  CHECK(input_grad[0] == 6.0);
}

TEST_CASE("zero output gradient yields a zero gradient set") {
  Rng rng(1);
  MlpParams params = random_net(3, 4, {2, 2}, rng);
  ForwardCache cache;
  mlp_forward(params, std::vector<double>{0.1, -0.2, 0.4}, &cache);
  GradientSet grads = GradientSet::zeros_like(params);
  mlp_backward(params, cache, {{0.0, 0.0}, {0.0, 0.0}}, grads);
  CHECK(grads.frobenius_norm() == 0.0);
}

TEST_CASE("backward matches central finite differences on random nets") {
  Rng rng(2024);
  int tested = 0;
  while (tested < 20) {
    const std::size_t in = 1 + rng.bounded(8);
    const std::size_t hidden = 1 + rng.bounded(8);
    const std::size_t out = 1 + rng.bounded(3);
    MlpParams params = random_net(in, hidden, {out}, rng);
    std::vector<double> x(in);
    for (double& v : x) v = rng.normal();
    if (!kink_safe(params, x, 1e-3)) continue;
    ++tested;

    // Scalar objective: sum of outputs weighted by fixed coefficients.
    std::vector<double> coeffs(out);
    for (double& c : coeffs) c = rng.normal();

    ForwardCache cache;
    mlp_forward(params, x, &cache);
    GradientSet grads = GradientSet::zeros_like(params);
    std::vector<double> input_grad;
    mlp_backward(params, cache, {coeffs}, grads, &input_grad);
    const std::vector<double> analytic = grad_flat(grads);

    const auto objective = [&](MlpParams& p) {
      const auto outputs = mlp_forward(p, x);
      double sum = 0.0;
      for (std::size_t i = 0; i < out; ++i) sum += coeffs[i] * outputs[0][i];
      return sum;
    };

    auto slots = param_slots(params);
    const double h = 1e-5;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const double saved = *slots[i];
      *slots[i] = saved + h;
      const double up = objective(params);
      *slots[i] = saved - h;
      const double down = objective(params);
      *slots[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      CHECK(close_rel(analytic[i], fd, 1e-4));
    }

    for (std::size_t i = 0; i < in; ++i) {
      const double saved = x[i];
      x[i] = saved + h;
      double up = 0.0;
      {
        const auto outputs = mlp_forward(params, x);
        for (std::size_t k = 0; k < out; ++k) up += coeffs[k] * outputs[0][k];
      }
      x[i] = saved - h;
      double down = 0.0;
      {
        const auto outputs = mlp_forward(params, x);
        for (std::size_t k = 0; k < out; ++k) down += coeffs[k] * outputs[0][k];
      }
      x[i] = saved;
      CHECK(close_rel(input_grad[i], (up - down) / (2.0 * h), 1e-4));
    }
  }
}

TEST_CASE("gradient penalty is zero for a 1-Lipschitz linear critic") {
  // D(x) = w.x with |w| = 1: relu bypassed by huge positive biases would
  // change the norm, so build it as w2 = 1 row over hidden = in identity.
  MlpParams params;
  const std::size_t in = 2;
  params.w1 = Matrix::from_data(2, 2, {1.0, 0.0, 0.0, 1.0});
  params.b1 = {100.0, 100.0};  // keeps both relus active near the test point
  Head head;
  head.w = Matrix::from_data(1, 2, {0.6, 0.8});  // norm 1 after W1 = I
  head.b = {0.0};
  params.heads.push_back(std::move(head));

  GradientSet grads = GradientSet::zeros_like(params);
  const std::vector<double> x = {0.3, -0.2};
  const GradPenaltyResult result =
      grad_penalty_param_grads(params, x, 1.0, grads);
  CHECK(result.penalty == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(grads.frobenius_norm() == doctest::Approx(0.0).epsilon(1e-9));
  (void)in;
}

TEST_CASE("gradient penalty hand case: w = (2, 0)") {
  // Critic reduces to D(x) = 2 x0 via identity W1 and active relus.
  MlpParams params;
  params.w1 = Matrix::from_data(2, 2, {1.0, 0.0, 0.0, 1.0});
  params.b1 = {100.0, 100.0};
  Head head;
  head.w = Matrix::from_data(1, 2, {2.0, 0.0});
  head.b = {0.0};
  params.heads.push_back(std::move(head));

  GradientSet grads = GradientSet::zeros_like(params);
  const std::vector<double> x = {0.1, 0.2};
  const GradPenaltyResult result =
      grad_penalty_param_grads(params, x, 1.0, grads);
  // |g| = 2 -> penalty (2-1)^2 = 1; d penalty / d w2 = 2(|g|-1) g/|g| =
  // 2*(1)*(1,0) = (2,0) through W1 = I, confirmed by central differences:
  // d/dw0 (w0-1)^2 at w0=2 is 2.
  CHECK(result.penalty == doctest::Approx(1.0));
  CHECK(grads.heads[0].w(0, 0) == doctest::Approx(2.0));
  CHECK(grads.heads[0].w(0, 1) == doctest::Approx(0.0));
  CHECK(grads.b1[0] == 0.0);
  CHECK(grads.heads[0].b[0] == 0.0);
}

TEST_CASE("gradient penalty parameter gradient matches finite differences") {
  Rng rng(777);
  int tested = 0;
  while (tested < 20) {
    const std::size_t in = 2 + rng.bounded(7);
    const std::size_t hidden = 2 + rng.bounded(7);
    MlpParams params = random_net(in, hidden, {1}, rng);
    std::vector<double> x(in);
    for (double& v : x) v = rng.normal();
    if (!kink_safe(params, x, 1e-3)) continue;

    GradientSet grads = GradientSet::zeros_like(params);
    const GradPenaltyResult result =
        grad_penalty_param_grads(params, x, 0.7, grads);
    if (result.zero_gradient) continue;
    ++tested;
    const std::vector<double> analytic = grad_flat(grads);

    const auto objective = [&](MlpParams& p) {
      std::vector<double> input_grad;
      critic_value_and_input_grad(p, x, input_grad);
      double norm_sq = 0.0;
      for (double v : input_grad) norm_sq += v * v;
      const double norm = std::sqrt(norm_sq);
      return 0.7 * (norm - 1.0) * (norm - 1.0);
    };

    auto slots = param_slots(params);
    const double h = 1e-6;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const double saved = *slots[i];
      *slots[i] = saved + h;
      const double up = objective(params);
      *slots[i] = saved - h;
      const double down = objective(params);
      *slots[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      CHECK(close_rel(analytic[i], fd, 1e-3));
    }
  }
}

TEST_CASE("zero input gradient falls back to the subgradient") {
  // All relus dead at x: D locally constant, |g| = 0.
  MlpParams params = one_by_one_net(1.0, -10.0, 1.0, 0.0);
  GradientSet grads = GradientSet::zeros_like(params);
  const GradPenaltyResult result =
      grad_penalty_param_grads(params, std::vector<double>{0.5}, 0.4, grads);
  CHECK(result.zero_gradient);
  CHECK(result.penalty == doctest::Approx(0.4));
  CHECK(grads.frobenius_norm() == 0.0);
}

TEST_CASE("adam leaves parameters alone on zero gradients") {
  MlpParams params = one_by_one_net(1.0, 2.0, 3.0, 4.0);
  const MlpParams before = params;
  AdamState state = AdamState::for_params(params, 1e-3, 0.5, 0.8);
  adam_step(params, GradientSet::zeros_like(params), state);
  CHECK(state.step == 1);
  CHECK(params.w1(0, 0) == before.w1(0, 0));
  CHECK(params.b1[0] == before.b1[0]);
}

TEST_CASE("first adam step on a unit gradient moves by about -lr") {
  MlpParams params = one_by_one_net(0.0, 0.0, 0.0, 0.0);
  AdamState state = AdamState::for_params(params, 5e-5, 0.5, 0.8);
  GradientSet grads = GradientSet::zeros_like(params);
  grads.w1(0, 0) = 1.0;
  adam_step(params, grads, state);
  // m_hat = v_hat = 1 after bias correction: step = -lr / (1 + eps).
  CHECK(params.w1(0, 0) == doctest::Approx(-5e-5).epsilon(1e-6));

  // Iterating the recurrence by hand for a constant unit gradient.
  double m = 0.5, v = 0.2, x = -5e-5 / (1.0 + 1e-8);
  for (int step = 2; step <= 5; ++step) {
    adam_step(params, grads, state);
    m = 0.5 * m + 0.5;
    v = 0.8 * v + 0.2;
    const double m_hat = m / (1.0 - std::pow(0.5, step));
    const double v_hat = v / (1.0 - std::pow(0.8, step));
    x -= 5e-5 * m_hat / (std::sqrt(v_hat) + 1e-8);
    CHECK(params.w1(0, 0) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("adam rejects non-finite gradients") {
  MlpParams params = one_by_one_net(0.0, 0.0, 0.0, 0.0);
  AdamState state = AdamState::for_params(params, 1e-3, 0.5, 0.8);
  GradientSet grads = GradientSet::zeros_like(params);
  grads.w1(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(params, grads, state), NumericsError);
}

TEST_CASE("identical adam runs stay identical") {
  Rng rng_a(5), rng_b(5);
  MlpParams a = random_net(4, 6, {2}, rng_a);
  MlpParams b = random_net(4, 6, {2}, rng_b);
  AdamState sa = AdamState::for_params(a, 1e-3, 0.5, 0.8);
  AdamState sb = AdamState::for_params(b, 1e-3, 0.5, 0.8);
  Rng ga(9), gb(9);
  for (int i = 0; i < 20; ++i) {
    GradientSet grad_a = GradientSet::zeros_like(a);
    GradientSet grad_b = GradientSet::zeros_like(b);
    for (std::size_t j = 0; j < grad_a.w1.size(); ++j) {
      grad_a.w1.data()[j] = ga.normal();
      grad_b.w1.data()[j] = gb.normal();
    }
    adam_step(a, grad_a, sa);
    adam_step(b, grad_b, sb);
  }
  CHECK(a.w1 == b.w1);
  CHECK(a.heads[0].w == b.heads[0].w);
}

namespace {

GradientSet two_entry_grads(const MlpParams& like, double g0, double g1) {
  GradientSet grads = GradientSet::zeros_like(like);
  grads.w1(0, 0) = g0;
  grads.w1(0, 1) = g1;
  return grads;
}

}  // namespace

TEST_CASE("clip_combine follows the adaptive clipping rule") {
  MlpParams params;
  params.w1 = Matrix(1, 2);
  params.b1 = {0.0};
  Head head;
  head.w = Matrix(1, 1);
  head.b = {0.0};
  params.heads.push_back(std::move(head));

  // |g_m| = 1 <= |g_a| = 3: g_norm = g_a + g_m.
  GradientSet combined =
      clip_combine(two_entry_grads(params, 3.0, 0.0), two_entry_grads(params, 0.0, 1.0));
  CHECK(combined.w1(0, 0) == doctest::Approx(3.0));
  CHECK(combined.w1(0, 1) == doctest::Approx(1.0));

  // |g_m| = 4 > |g_a| = 1: the MI part is rescaled to norm 1.
  combined =
      clip_combine(two_entry_grads(params, 1.0, 0.0), two_entry_grads(params, 0.0, 4.0));
  CHECK(combined.w1(0, 0) == doctest::Approx(1.0));
  CHECK(combined.w1(0, 1) == doctest::Approx(1.0));

  // Zero MI gradient: adversarial gradient is returned untouched.
  combined =
      clip_combine(two_entry_grads(params, 1.0, 0.5), two_entry_grads(params, 0.0, 0.0));
  CHECK(combined.w1(0, 0) == 1.0);
  CHECK(combined.w1(0, 1) == 0.5);
}

TEST_CASE("clip_combine never moves farther than the adversarial norm") {
  MlpParams params;
  params.w1 = Matrix(2, 3);
  params.b1 = {0.0, 0.0};
  Head head;
  head.w = Matrix(1, 2);
  head.b = {0.0};
  params.heads.push_back(std::move(head));

  Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    GradientSet g_a = GradientSet::zeros_like(params);
    GradientSet g_m = GradientSet::zeros_like(params);
    for (std::size_t j = 0; j < g_a.w1.size(); ++j) {
      g_a.w1.data()[j] = rng.normal() * 2.0;
      g_m.w1.data()[j] = rng.normal() * 5.0;
    }
    const GradientSet combined = clip_combine(g_a, g_m);
    GradientSet diff = combined;
    diff.accumulate(g_a, -1.0);
    CHECK(diff.frobenius_norm() <= g_a.frobenius_norm() + 1e-12);
  }
}

TEST_CASE("forward output scales linearly with head parameters") {
  Rng rng(66);
  MlpParams params = random_net(3, 5, {4}, rng);
  const std::vector<double> x = {0.4, -0.1, 0.9};
  const auto base = mlp_forward(params, x);
  MlpParams scaled = params;
  for (double& v : scaled.heads[0].w.data()) v *= 3.0;
  for (double& v : scaled.heads[0].b) v *= 3.0;
  const auto tripled = mlp_forward(scaled, x);
  for (std::size_t i = 0; i < base[0].size(); ++i) {
    CHECK(tripled[0][i] == doctest::Approx(3.0 * base[0][i]));
  }
}
