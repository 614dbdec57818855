#include "alertforge/gan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "alertforge/errors.hpp"

namespace alertforge::gan {

using numerics::GradientSet;
using numerics::Matrix;
using numerics::MlpParams;

std::string to_string(Variant variant) {
  return variant == Variant::wgan_gp ? "wgan_gp" : "wgan_gpmi";
}

Variant variant_from_string(const std::string& text) {
  if (text == "wgan_gp") return Variant::wgan_gp;
  if (text == "wgan_gpmi") return Variant::wgan_gpmi;
  throw SpecError("unknown variant: " + text);
}

std::string to_string(GpPoint point) {
  return point == GpPoint::interpolate ? "interpolate" : "noise";
}

GpPoint gp_point_from_string(const std::string& text) {
  if (text == "interpolate") return GpPoint::interpolate;
  if (text == "noise") return GpPoint::noise;
  throw SpecError("unknown gp-point: " + text);
}

int GanConfig::epochs() const {
  if (epochs_override > 0) return epochs_override;
  return variant == Variant::wgan_gp ? epochs_wgan_gp : epochs_wgan_gpmi;
}

double GanConfig::resolved_lambda() const {
  if (lambda_gp >= 0.0) return lambda_gp;
  return variant == Variant::wgan_gp ? 0.1 : 0.4;
}

Json GanConfig::to_json() const {
  Json j;
  j["hidden_dim"] = hidden_dim;
  j["batch_size"] = batch_size;
  j["noise_dim"] = noise_dim;
  j["critic_ratio"] = critic_ratio;
  j["epochs_wgan_gp"] = epochs_wgan_gp;
  j["epochs_wgan_gpmi"] = epochs_wgan_gpmi;
  j["epochs_override"] = epochs_override;
  j["lambda_gp"] = resolved_lambda();
  j["lr"] = lr;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["seed"] = seed;
  j["variant"] = to_string(variant);
  j["gp_point"] = to_string(gp_point);
  j["mi_steps"] = mi_steps;
  return j;
}

GanConfig GanConfig::from_json(const Json& j) {
  GanConfig c;
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.noise_dim = j.at("noise_dim").get<int>();
  c.critic_ratio = j.at("critic_ratio").get<int>();
  c.epochs_wgan_gp = j.at("epochs_wgan_gp").get<int>();
  c.epochs_wgan_gpmi = j.at("epochs_wgan_gpmi").get<int>();
  c.epochs_override = j.value("epochs_override", 0);
  c.lambda_gp = j.at("lambda_gp").get<double>();
  c.lr = j.at("lr").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.variant = variant_from_string(j.at("variant").get<std::string>());
  c.gp_point = gp_point_from_string(j.at("gp_point").get<std::string>());
  c.mi_steps = j.value("mi_steps", 1);
  return c;
}

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = stddev * rng.normal();
  return m;
}

MlpParams init_mlp(std::size_t input, std::size_t hidden,
                   const std::vector<std::size_t>& head_sizes, Rng& rng) {
  MlpParams params;
  params.w1 = random_matrix(hidden, input,
                            std::sqrt(2.0 / static_cast<double>(input)), rng);
  params.b1.assign(hidden, 0.0);
  for (std::size_t out : head_sizes) {
    numerics::Head head;
    head.w = random_matrix(out, hidden,
                           std::sqrt(1.0 / static_cast<double>(hidden)), rng);
    head.b.assign(out, 0.0);
    params.heads.push_back(std::move(head));
  }
  return params;
}

}  // namespace

GeneratorModel init_generator(const FeatureSpace& fs, const GanConfig& config,
                              Rng& rng) {
  std::vector<std::size_t> head_sizes;
  for (int f = 0; f < kFeatureCount; ++f) {
    head_sizes.push_back(
        static_cast<std::size_t>(fs.vocab_size(static_cast<Feature>(f))));
  }
  GeneratorModel model;
  model.params = init_mlp(static_cast<std::size_t>(config.noise_dim),
                          static_cast<std::size_t>(config.hidden_dim),
                          head_sizes, rng);
  model.feature_space = fs;
  return model;
}

DiscriminatorModel init_discriminator(int input_width, const GanConfig& config,
                                      Rng& rng) {
  DiscriminatorModel model;
  model.params = init_mlp(static_cast<std::size_t>(input_width),
                          static_cast<std::size_t>(config.hidden_dim), {1}, rng);
  return model;
}

MiEstimatorModel init_mi_estimator(int input_width, const GanConfig& config,
                                   Rng& rng) {
  MiEstimatorModel model;
  model.params = init_mlp(
      static_cast<std::size_t>(config.noise_dim + input_width),
      static_cast<std::size_t>(config.hidden_dim), {1}, rng);
  model.noise_dim = config.noise_dim;
  return model;
}

GeneratedBatch generate_batch(const GeneratorModel& generator, Rng& rng,
                              std::size_t n) {
  const std::size_t noise_dim = generator.params.input_dim();
  GeneratedBatch batch;
  batch.noise = Matrix(n, noise_dim);
  for (double& v : batch.noise.data()) v = rng.normal();

  const std::vector<Matrix> logits =
      numerics::batch_forward(generator.params, batch.noise, &batch.cache);

  const FeatureSpace& fs = generator.feature_space;
  batch.soft = Matrix(n, static_cast<std::size_t>(fs.total_width()));
  for (int f = 0; f < kFeatureCount; ++f) {
    const Feature feature = static_cast<Feature>(f);
    const std::size_t offset = static_cast<std::size_t>(fs.offset(feature));
    const std::size_t size = static_cast<std::size_t>(fs.vocab_size(feature));
    const Matrix& head = logits[static_cast<std::size_t>(f)];
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
      const double* in_row = head.row(r);
      double* out_row = batch.soft.row(r) + offset;
      double max_logit = in_row[0];
      for (std::size_t i = 1; i < size; ++i) {
        max_logit = std::max(max_logit, in_row[i]);
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < size; ++i) {
        out_row[i] = std::exp(in_row[i] - max_logit);
        sum += out_row[i];
      }
      for (std::size_t i = 0; i < size; ++i) out_row[i] /= sum;
    }
  }
  return batch;
}

DiscriminatorLossResult discriminator_loss(const DiscriminatorModel& critic,
                                           const Matrix& real, const Matrix& fake,
                                           double lambda_gp, GpPoint gp_point,
                                           Rng& rng) {
  if (real.rows() != fake.rows() || real.cols() != fake.cols()) {
    throw ShapeError("real and fake batches must have equal shapes");
  }
  const std::size_t n = real.rows();
  const std::size_t width = real.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  DiscriminatorLossResult result;
  result.grads = GradientSet::zeros_like(critic.params);

  numerics::BatchCache real_cache, fake_cache;
  const std::vector<Matrix> real_out =
      numerics::batch_forward(critic.params, real, &real_cache);
  const std::vector<Matrix> fake_out =
      numerics::batch_forward(critic.params, fake, &fake_cache);

  double real_mean = 0.0, fake_mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) real_mean += real_out[0](r, 0);
  for (std::size_t r = 0; r < n; ++r) fake_mean += fake_out[0](r, 0);
  real_mean *= inv_n;
  fake_mean *= inv_n;
  result.wasserstein = real_mean - fake_mean;

  // Descent objective mean D(fake) - mean D(real): +1/n on fakes, -1/n on
  // reals.
  std::vector<Matrix> head_grads(1);
  head_grads[0] = Matrix(n, 1, -inv_n);
  numerics::batch_backward(critic.params, real_cache, head_grads, result.grads);
  head_grads[0] = Matrix(n, 1, inv_n);
  numerics::batch_backward(critic.params, fake_cache, head_grads, result.grads);

  if (lambda_gp != 0.0) {
    Matrix x_hat(n, width);
    if (gp_point == GpPoint::interpolate) {
      for (std::size_t r = 0; r < n; ++r) {
        const double eps = rng.uniform();
        const double* real_row = real.row(r);
        const double* fake_row = fake.row(r);
        double* out_row = x_hat.row(r);
        for (std::size_t c = 0; c < width; ++c) {
          out_row[c] = eps * real_row[c] + (1.0 - eps) * fake_row[c];
        }
      }
    } else {
      x_hat = fake;
    }
    const numerics::BatchPenaltyResult penalty =
        numerics::batch_grad_penalty(critic.params, x_hat, lambda_gp,
                                     result.grads);
    result.gp_term = penalty.mean_penalty;
    result.gp_zero_gradient_rows = penalty.zero_gradient_rows;
  }

  result.loss = -result.wasserstein + result.gp_term;
  if (!std::isfinite(result.loss)) {
    throw NumericsError("non-finite discriminator loss");
  }
  return result;
}

MiEstimateResult mi_estimate(const MiEstimatorModel& estimator,
                             const Matrix& noise, const Matrix& fake, Rng& rng) {
  if (noise.rows() != fake.rows()) {
    throw ShapeError("noise and fake batches must pair up");
  }
  const std::size_t n = noise.rows();
  const std::size_t zdim = noise.cols();
  const std::size_t width = fake.cols();
  if (zdim + width != estimator.params.input_dim()) {
    throw ShapeError("estimator input dimension mismatch");
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<std::size_t> sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = i;
  rng.shuffle(sigma);
  std::vector<std::size_t> sigma_inv(n);
  for (std::size_t i = 0; i < n; ++i) sigma_inv[sigma[i]] = i;

  Matrix joint(n, zdim + width);
  Matrix marginal(n, zdim + width);
  for (std::size_t r = 0; r < n; ++r) {
    double* j_row = joint.row(r);
    double* m_row = marginal.row(r);
    const double* z_row = noise.row(r);
    const double* x_row = fake.row(r);
    const double* x_shuf = fake.row(sigma[r]);
    std::copy(z_row, z_row + zdim, j_row);
    std::copy(x_row, x_row + width, j_row + zdim);
    std::copy(z_row, z_row + zdim, m_row);
    std::copy(x_shuf, x_shuf + width, m_row + zdim);
  }

  numerics::BatchCache joint_cache, marg_cache;
  const std::vector<Matrix> t_joint =
      numerics::batch_forward(estimator.params, joint, &joint_cache);
  const std::vector<Matrix> t_marg =
      numerics::batch_forward(estimator.params, marginal, &marg_cache);

  double joint_mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) joint_mean += t_joint[0](r, 0);
  joint_mean *= inv_n;

  double max_t = t_marg[0](0, 0);
  for (std::size_t r = 1; r < n; ++r) max_t = std::max(max_t, t_marg[0](r, 0));
  double exp_sum = 0.0;
  std::vector<double> shifted(n);
  for (std::size_t r = 0; r < n; ++r) {
    shifted[r] = std::exp(t_marg[0](r, 0) - max_t);
    exp_sum += shifted[r];
  }
  const double log_mean_exp = max_t + std::log(exp_sum * inv_n);

  MiEstimateResult result;
  result.mi = joint_mean - log_mean_exp;
  if (!std::isfinite(result.mi)) {
    throw NumericsError("non-finite mutual information estimate");
  }

  result.t_ascent_grads = GradientSet::zeros_like(estimator.params);
  Matrix joint_input_grads, marg_input_grads;

  std::vector<Matrix> head_grads(1);
  head_grads[0] = Matrix(n, 1, inv_n);
  numerics::batch_backward(estimator.params, joint_cache, head_grads,
                           result.t_ascent_grads, &joint_input_grads);

  head_grads[0] = Matrix(n, 1);
  for (std::size_t r = 0; r < n; ++r) {
    head_grads[0](r, 0) = -shifted[r] / exp_sum;
  }
  numerics::batch_backward(estimator.params, marg_cache, head_grads,
                           result.t_ascent_grads, &marg_input_grads);

  // d MI / d x_k: the joint term touches x_k in row k, the shuffled term in
  // row sigma^{-1}(k).
  result.fake_input_grads = Matrix(n, width);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < n; ++k) {
    double* out_row = result.fake_input_grads.row(k);
    const double* j_row = joint_input_grads.row(k) + zdim;
    const double* m_row = marg_input_grads.row(sigma_inv[k]) + zdim;
    for (std::size_t c = 0; c < width; ++c) out_row[c] = j_row[c] + m_row[c];
  }
  return result;
}

namespace {

// d(loss)/d(softmax output) -> per-head logit gradients.
std::vector<Matrix> softmax_chain(const FeatureSpace& fs, const Matrix& soft,
                                  const Matrix& d_soft) {
  const std::size_t n = soft.rows();
  std::vector<Matrix> head_grads;
  head_grads.reserve(kFeatureCount);
  for (int f = 0; f < kFeatureCount; ++f) {
    const Feature feature = static_cast<Feature>(f);
    const std::size_t offset = static_cast<std::size_t>(fs.offset(feature));
    const std::size_t size = static_cast<std::size_t>(fs.vocab_size(feature));
    Matrix grads(n, size);
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
      const double* s = soft.row(r) + offset;
      const double* d = d_soft.row(r) + offset;
      double dot = 0.0;
      for (std::size_t i = 0; i < size; ++i) dot += s[i] * d[i];
      double* out = grads.row(r);
      for (std::size_t i = 0; i < size; ++i) out[i] = s[i] * (d[i] - dot);
    }
    head_grads.push_back(std::move(grads));
  }
  return head_grads;
}

}  // namespace

GeneratorStepRecord generator_step(GeneratorModel& generator,
                                   const DiscriminatorModel& critic,
                                   MiEstimatorModel* estimator,
                                   const GanConfig& config, Rng& rng,
                                   numerics::AdamState& g_state,
                                   numerics::AdamState* t_state) {
  const std::size_t n = static_cast<std::size_t>(config.batch_size);
  const FeatureSpace& fs = generator.feature_space;
  const double inv_n = 1.0 / static_cast<double>(n);

  GeneratedBatch batch = generate_batch(generator, rng, n);

  std::vector<double> critic_values;
  Matrix critic_input_grads;
  numerics::batch_critic_values_and_input_grads(critic.params, batch.soft,
                                                critic_values,
                                                critic_input_grads);
  double fake_mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) fake_mean += critic_values[r];
  fake_mean *= inv_n;

  GeneratorStepRecord record;
  record.g_loss = -fake_mean;

  // Adversarial part: d(-mean D)/d(soft) = -(1/n) dD/dx.
  Matrix d_soft(n, batch.soft.cols());
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < n; ++r) {
    const double* in_row = critic_input_grads.row(r);
    double* out_row = d_soft.row(r);
    for (std::size_t c = 0; c < batch.soft.cols(); ++c) {
      out_row[c] = -inv_n * in_row[c];
    }
  }
  GradientSet g_adv = GradientSet::zeros_like(generator.params);
  numerics::batch_backward(generator.params, batch.cache,
                           softmax_chain(fs, batch.soft, d_soft), g_adv);
  record.adversarial_grad_norm = g_adv.frobenius_norm();

  if (config.variant == Variant::wgan_gpmi) {
    if (estimator == nullptr || t_state == nullptr) {
      throw SpecError("wgan_gpmi requires the MI estimator");
    }
    // Optional extra statistic-network ascent steps tighten the DV bound
    // before the generator consumes its gradients.
    for (int extra = 1; extra < config.mi_steps; ++extra) {
      MiEstimateResult warm = mi_estimate(*estimator, batch.noise, batch.soft, rng);
      warm.t_ascent_grads.scale(-1.0);
      numerics::adam_step(estimator->params, warm.t_ascent_grads, *t_state);
    }
    MiEstimateResult mi = mi_estimate(*estimator, batch.noise, batch.soft, rng);
    record.mi_value = mi.mi;
    record.g_loss -= mi.mi;

    // G minimizes -MI: flip the ascent direction of d MI / d x.
    Matrix d_soft_mi(n, batch.soft.cols());
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
      const double* in_row = mi.fake_input_grads.row(r);
      double* out_row = d_soft_mi.row(r);
      for (std::size_t c = 0; c < batch.soft.cols(); ++c) {
        out_row[c] = -in_row[c];
      }
    }
    GradientSet g_mi = GradientSet::zeros_like(generator.params);
    numerics::batch_backward(generator.params, batch.cache,
                             softmax_chain(fs, batch.soft, d_soft_mi), g_mi);
    record.mi_grad_norm = g_mi.frobenius_norm();
    record.clipped_mi_norm =
        record.mi_grad_norm == 0.0
            ? 0.0
            : std::min(record.adversarial_grad_norm, record.mi_grad_norm);

    // One ascent step on MI for the statistic network.
    GradientSet t_descent = mi.t_ascent_grads;
    t_descent.scale(-1.0);
    numerics::adam_step(estimator->params, t_descent, *t_state);

    const GradientSet combined = numerics::clip_combine(g_adv, g_mi);
    numerics::adam_step(generator.params, combined, g_state);
  } else {
    numerics::adam_step(generator.params, g_adv, g_state);
  }
  return record;
}

namespace {

Matrix gather_rows(const EncodedDataset& dataset,
                   const std::vector<std::size_t>& indices) {
  const std::size_t width = dataset.rows.empty() ? 0 : dataset.rows[0].size();
  Matrix out(indices.size(), width);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto& row = dataset.rows[indices[r]];
    std::copy(row.begin(), row.end(), out.row(r));
  }
  return out;
}

}  // namespace

TrainResult train(const EncodedDataset& dataset, const GanConfig& config,
                  const TrainHooks* hooks) {
  if (dataset.size() == 0) throw EmptyDatasetError("cannot train on no alerts");
  const std::size_t n = dataset.size();
  const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
  const int epochs = config.epochs();
  const double lambda = config.resolved_lambda();
  const std::size_t steps_per_epoch = (n + batch_size - 1) / batch_size;

  Rng rng(config.seed);
  GeneratorModel generator = init_generator(dataset.feature_space, config, rng);
  DiscriminatorModel critic =
      init_discriminator(dataset.feature_space.total_width(), config, rng);
  MiEstimatorModel estimator;
  const bool with_mi = config.variant == Variant::wgan_gpmi;
  if (with_mi) {
    estimator =
        init_mi_estimator(dataset.feature_space.total_width(), config, rng);
  }

  numerics::AdamState g_state = numerics::AdamState::for_params(
      generator.params, config.lr, config.beta1, config.beta2);
  numerics::AdamState d_state = numerics::AdamState::for_params(
      critic.params, config.lr, config.beta1, config.beta2);
  numerics::AdamState t_state =
      with_mi ? numerics::AdamState::for_params(estimator.params, config.lr,
                                                config.beta1, config.beta2)
              : numerics::AdamState{};

  TrainResult result;
  const auto snapshot = [&](int epoch) {
    result.checkpoint.format_version = 1;
    result.checkpoint.config = config;
    result.checkpoint.feature_space = dataset.feature_space;
    result.checkpoint.epoch = epoch;
    result.checkpoint.generator = generator.params;
    result.checkpoint.discriminator = critic.params;
    if (with_mi) {
      result.checkpoint.mi_estimator = estimator.params;
    }
    result.checkpoint.rng_state = rng.save_state();
  };
  snapshot(0);

  try {
    for (int epoch = 1; epoch <= epochs; ++epoch) {
      EpochStats stats;
      for (std::size_t step = 0; step < steps_per_epoch; ++step) {
        for (int k = 0; k < config.critic_ratio; ++k) {
          const std::vector<std::size_t> indices =
              rng.sample_indices(n, batch_size);
          const Matrix real = gather_rows(dataset, indices);
          const GeneratedBatch fake = generate_batch(generator, rng, batch_size);
          const DiscriminatorLossResult d_loss = discriminator_loss(
              critic, real, fake.soft, lambda, config.gp_point, rng);
          numerics::adam_step(critic.params, d_loss.grads, d_state);
          result.discriminator_updates += 1;
          result.gp_zero_gradient_rows += d_loss.gp_zero_gradient_rows;
          stats.wasserstein += d_loss.wasserstein;
          stats.gp_term += d_loss.gp_term;
        }
        const GeneratorStepRecord record =
            generator_step(generator, critic, with_mi ? &estimator : nullptr,
                           config, rng, g_state, with_mi ? &t_state : nullptr);
        result.generator_updates += 1;
        stats.mi_estimate += record.mi_value;
        stats.g_loss += record.g_loss;
        if (hooks != nullptr && hooks->on_generator_step) {
          hooks->on_generator_step(record);
        }
      }
      const double critic_steps =
          static_cast<double>(steps_per_epoch * config.critic_ratio);
      stats.wasserstein /= critic_steps;
      stats.gp_term /= critic_steps;
      stats.mi_estimate /= static_cast<double>(steps_per_epoch);
      stats.g_loss /= static_cast<double>(steps_per_epoch);
      result.history.push_back(stats);
      snapshot(epoch);
    }
  } catch (const NumericsError& error) {
    result.aborted = true;
    result.abort_reason = error.what();
  }
  return result;
}

std::vector<ProcessedAlert> sample_alerts(const ModelCheckpoint& checkpoint,
                                          std::size_t n, std::uint64_t seed) {
  GeneratorModel generator;
  generator.params = checkpoint.generator;
  generator.feature_space = checkpoint.feature_space;
  Rng rng(seed);
  const GeneratedBatch batch = generate_batch(generator, rng, n);
  std::vector<ProcessedAlert> alerts;
  alerts.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    alerts.push_back(
        decode(std::span<const double>(batch.soft.row(r), batch.soft.cols()),
               checkpoint.feature_space));
  }
  return alerts;
}

namespace {

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = doubles_to_base64(m.data());
  return j;
}

Matrix matrix_from_json(const Json& j) {
  return Matrix::from_data(j.at("rows").get<std::size_t>(),
                           j.at("cols").get<std::size_t>(),
                           base64_to_doubles(j.at("data").get<std::string>()));
}

Json vector_to_json(const std::vector<double>& v) {
  Json j;
  j["rows"] = 1;
  j["cols"] = v.size();
  j["data"] = doubles_to_base64(v);
  return j;
}

std::vector<double> vector_from_json(const Json& j) {
  return base64_to_doubles(j.at("data").get<std::string>());
}

void mlp_to_arrays(const MlpParams& params, const std::string& prefix, Json& out) {
  out[prefix + "_w1"] = matrix_to_json(params.w1);
  out[prefix + "_b1"] = vector_to_json(params.b1);
  for (std::size_t k = 0; k < params.heads.size(); ++k) {
    const std::string head = prefix + "_head" + std::to_string(k);
    out[head + "_w"] = matrix_to_json(params.heads[k].w);
    out[head + "_b"] = vector_to_json(params.heads[k].b);
  }
}

MlpParams mlp_from_arrays(const Json& arrays, const std::string& prefix) {
  MlpParams params;
  params.w1 = matrix_from_json(arrays.at(prefix + "_w1"));
  params.b1 = vector_from_json(arrays.at(prefix + "_b1"));
  for (std::size_t k = 0;; ++k) {
    const std::string head = prefix + "_head" + std::to_string(k);
    if (!arrays.contains(head + "_w")) break;
    numerics::Head h;
    h.w = matrix_from_json(arrays.at(head + "_w"));
    h.b = vector_from_json(arrays.at(head + "_b"));
    params.heads.push_back(std::move(h));
  }
  return params;
}

}  // namespace

Json ModelCheckpoint::to_json() const {
  Json j;
  j["format_version"] = format_version;
  j["config"] = config.to_json();
  j["feature_space"] = feature_space.to_json();
  j["epoch"] = epoch;
  Json arrays;
  mlp_to_arrays(generator, "g", arrays);
  mlp_to_arrays(discriminator, "d", arrays);
  if (mi_estimator.has_value()) {
    mlp_to_arrays(*mi_estimator, "mi", arrays);
  }
  j["arrays"] = std::move(arrays);
  j["rng_state"] = rng_state;
  return j;
}

ModelCheckpoint ModelCheckpoint::from_json(const Json& j) {
  ModelCheckpoint c;
  c.format_version = j.at("format_version").get<int>();
  if (c.format_version != 1) {
    throw SpecError("unsupported checkpoint format_version");
  }
  c.config = GanConfig::from_json(j.at("config"));
  c.feature_space = FeatureSpace::from_json(j.at("feature_space"));
  c.epoch = j.at("epoch").get<int>();
  const Json& arrays = j.at("arrays");
  c.generator = mlp_from_arrays(arrays, "g");
  c.discriminator = mlp_from_arrays(arrays, "d");
  if (arrays.contains("mi_w1")) {
    c.mi_estimator = mlp_from_arrays(arrays, "mi");
  }
  c.rng_state = j.at("rng_state").get<std::string>();
  return c;
}

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::string& path) {
  write_text_file(path, checkpoint.to_json().dump(2) + "\n");
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("checkpoint not found: " + path);
  }
  return ModelCheckpoint::from_json(Json::parse(read_text_file(path)));
}

std::string training_log_csv(const std::vector<EpochStats>& history) {
  std::ostringstream out;
  out << "epoch,wasserstein_estimate,gp_term,mi_estimate,g_loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << (i + 1) << ',' << format_double(history[i].wasserstein) << ','
        << format_double(history[i].gp_term) << ','
        << format_double(history[i].mi_estimate) << ','
        << format_double(history[i].g_loss) << '\n';
  }
  return out.str();
}

}  // namespace alertforge::gan
