// Compares the serial per-sample math against the OpenMP batch kernels on
// training-shaped workloads.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "alertforge/batch.hpp"
#include "alertforge/gan.hpp"
#include "alertforge/numerics.hpp"
#include "alertforge/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace alertforge;
using numerics::GradientSet;
using numerics::Matrix;
using numerics::MlpParams;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

MlpParams random_mlp(std::size_t in, std::size_t hidden,
                     const std::vector<std::size_t>& heads, Rng& rng) {
  MlpParams params;
  params.w1 = Matrix(hidden, in);
  for (double& v : params.w1.data()) v = 0.1 * rng.normal();
  params.b1.assign(hidden, 0.01);
  for (std::size_t out : heads) {
    numerics::Head head;
    head.w = Matrix(out, hidden);
    for (double& v : head.w.data()) v = 0.1 * rng.normal();
    head.b.assign(out, 0.0);
    params.heads.push_back(std::move(head));
  }
  return params;
}

Matrix random_batch(std::size_t n, std::size_t width, Rng& rng) {
  Matrix x(n, width);
  for (double& v : x.data()) v = rng.normal();
  return x;
}

// Reference path: per-sample forward/backward accumulated in sample order.
double serial_forward_backward(const MlpParams& params, const Matrix& x,
                               GradientSet& grads) {
  double checksum = 0.0;
  std::vector<std::vector<double>> head_grads(params.heads.size());
  for (std::size_t k = 0; k < params.heads.size(); ++k) {
    head_grads[k].assign(params.heads[k].b.size(), 1.0 / double(x.rows()));
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    numerics::ForwardCache cache;
    const auto out = numerics::mlp_forward(
        params, std::span<const double>(x.row(r), x.cols()), &cache);
    checksum += out[0][0];
    numerics::mlp_backward(params, cache, head_grads, grads);
  }
  return checksum;
}

double batch_forward_backward(const MlpParams& params, const Matrix& x,
                              GradientSet& grads) {
  numerics::BatchCache cache;
  const auto out = numerics::batch_forward(params, x, &cache);
  double checksum = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) checksum += out[0](r, 0);
  std::vector<Matrix> head_grads;
  for (const auto& head : params.heads) {
    head_grads.emplace_back(x.rows(), head.b.size(), 1.0 / double(x.rows()));
  }
  numerics::batch_backward(params, cache, head_grads, grads);
  return checksum;
}

void bench_case(const char* name, std::size_t n, std::size_t in,
                std::size_t hidden, std::size_t out, int repeats) {
  Rng rng(42);
  const MlpParams params = random_mlp(in, hidden, {out}, rng);
  const Matrix x = random_batch(n, in, rng);

  GradientSet g1 = GradientSet::zeros_like(params);
  auto start = Clock::now();
  double checksum_serial = 0.0;
  for (int i = 0; i < repeats; ++i) {
    checksum_serial += serial_forward_backward(params, x, g1);
  }
  const double serial_time = seconds_since(start);

  GradientSet g2 = GradientSet::zeros_like(params);
  start = Clock::now();
  double checksum_batch = 0.0;
  for (int i = 0; i < repeats; ++i) {
    checksum_batch += batch_forward_backward(params, x, g2);
  }
  const double batch_time = seconds_since(start);

  std::printf("%-28s serial %8.3f ms   batch %8.3f ms   speedup %5.2fx   "
              "(checksum diff %.3e)\n",
              name, 1e3 * serial_time / repeats, 1e3 * batch_time / repeats,
              serial_time / batch_time, checksum_serial - checksum_batch);
}

void bench_penalty(std::size_t n, std::size_t width, std::size_t hidden,
                   int repeats) {
  Rng rng(7);
  const MlpParams critic = random_mlp(width, hidden, {1}, rng);
  const Matrix x = random_batch(n, width, rng);

  GradientSet g1 = GradientSet::zeros_like(critic);
  auto start = Clock::now();
  double sum_serial = 0.0;
  for (int i = 0; i < repeats; ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      sum_serial += numerics::grad_penalty_param_grads(
                        critic, std::span<const double>(x.row(r), width), 0.1,
                        g1)
                        .penalty;
    }
  }
  const double serial_time = seconds_since(start);

  GradientSet g2 = GradientSet::zeros_like(critic);
  start = Clock::now();
  double sum_batch = 0.0;
  for (int i = 0; i < repeats; ++i) {
    sum_batch +=
        numerics::batch_grad_penalty(critic, x, 0.1, g2).mean_penalty * n;
  }
  const double batch_time = seconds_since(start);

  std::printf("%-28s serial %8.3f ms   batch %8.3f ms   speedup %5.2fx   "
              "(penalty diff %.3e)\n",
              "gradient penalty", 1e3 * serial_time / repeats,
              1e3 * batch_time / repeats, serial_time / batch_time,
              (sum_serial - sum_batch) / double(repeats));
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; batch kernels run serially\n");
#endif
  bench_case("critic fwd+bwd n=100", 100, 100, 128, 1, 50);
  bench_case("critic fwd+bwd n=1000", 1000, 100, 128, 1, 10);
  bench_case("generator fwd+bwd n=100", 100, 64, 128, 100, 50);
  bench_penalty(100, 100, 128, 50);
  return 0;
}
