#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alertforge/alert_model.hpp"
#include "alertforge/batch.hpp"
#include "alertforge/json_util.hpp"
#include "alertforge/numerics.hpp"
#include "alertforge/rng.hpp"

namespace alertforge::gan {

enum class Variant { wgan_gp, wgan_gpmi };
enum class GpPoint { interpolate, noise };

std::string to_string(Variant variant);
Variant variant_from_string(const std::string& text);
std::string to_string(GpPoint point);
GpPoint gp_point_from_string(const std::string& text);

struct GanConfig {
  int hidden_dim = 128;
  int batch_size = 100;
  int noise_dim = 64;
  int critic_ratio = 5;
  int epochs_wgan_gp = 200;
  int epochs_wgan_gpmi = 300;
  int epochs_override = 0;   // > 0 wins over the per-variant counts
  double lambda_gp = -1.0;   // < 0 resolves to the variant default
  double lr = 5e-5;
  double beta1 = 0.5;
  double beta2 = 0.8;
  std::uint64_t seed = 1;
  Variant variant = Variant::wgan_gp;
  GpPoint gp_point = GpPoint::interpolate;
  // Statistic-network ascent steps per generator step (wgan_gpmi only).
  int mi_steps = 1;

  int epochs() const;
  double resolved_lambda() const;

  Json to_json() const;
  static GanConfig from_json(const Json& j);
};

struct GeneratorModel {
  numerics::MlpParams params;  // one head per feature, widths from the space
  FeatureSpace feature_space;
};

struct DiscriminatorModel {
  numerics::MlpParams params;  // single scalar head over the one-hot width
};

// DV statistic T(z, x) = w . relu(Wz z + Wg x + b) + c, stored as one MLP
// over the concatenated [z; x] input: Wz is the first noise_dim columns.
struct MiEstimatorModel {
  numerics::MlpParams params;
  int noise_dim = 0;
};

struct ModelCheckpoint {
  int format_version = 1;
  GanConfig config;
  FeatureSpace feature_space;
  int epoch = 0;
  numerics::MlpParams generator;
  numerics::MlpParams discriminator;
  std::optional<numerics::MlpParams> mi_estimator;
  std::string rng_state;

  Json to_json() const;
  static ModelCheckpoint from_json(const Json& j);
};

GeneratorModel init_generator(const FeatureSpace& fs, const GanConfig& config,
                              Rng& rng);
DiscriminatorModel init_discriminator(int input_width, const GanConfig& config,
                                      Rng& rng);
MiEstimatorModel init_mi_estimator(int input_width, const GanConfig& config,
                                   Rng& rng);

struct GeneratedBatch {
  numerics::Matrix noise;  // n x noise_dim
  numerics::Matrix soft;   // n x width, each feature segment softmax-normalized
  numerics::BatchCache cache;
};

// Draws standard-normal noise and runs the generator; every feature segment
// of every row is a softmax over that head's logits.
GeneratedBatch generate_batch(const GeneratorModel& generator, Rng& rng,
                              std::size_t n);

struct DiscriminatorLossResult {
  double loss = 0.0;         // descent objective: -W + penalty
  double wasserstein = 0.0;  // mean D(real) - mean D(fake)
  double gp_term = 0.0;
  std::size_t gp_zero_gradient_rows = 0;
  numerics::GradientSet grads;
};

DiscriminatorLossResult discriminator_loss(const DiscriminatorModel& critic,
                                           const numerics::Matrix& real,
                                           const numerics::Matrix& fake,
                                           double lambda_gp, GpPoint gp_point,
                                           Rng& rng);

struct MiEstimateResult {
  double mi = 0.0;
  numerics::GradientSet t_ascent_grads;   // d MI / d theta_T
  numerics::Matrix fake_input_grads;      // d MI / d x_k, n x width
};

// Donsker-Varadhan estimate over paired (z_i, x_i) against in-batch shuffled
// pairs; exponentials are max-shifted.
MiEstimateResult mi_estimate(const MiEstimatorModel& estimator,
                             const numerics::Matrix& noise,
                             const numerics::Matrix& fake, Rng& rng);

struct GeneratorStepRecord {
  double g_loss = 0.0;
  double adversarial_grad_norm = 0.0;
  double mi_grad_norm = 0.0;
  double clipped_mi_norm = 0.0;  // norm of the MI part actually applied
  double mi_value = 0.0;
};

GeneratorStepRecord generator_step(GeneratorModel& generator,
                                   const DiscriminatorModel& critic,
                                   MiEstimatorModel* estimator,
                                   const GanConfig& config, Rng& rng,
                                   numerics::AdamState& g_state,
                                   numerics::AdamState* t_state);

struct EpochStats {
  double wasserstein = 0.0;
  double gp_term = 0.0;
  double mi_estimate = 0.0;
  double g_loss = 0.0;
};

struct TrainHooks {
  std::function<void(const GeneratorStepRecord&)> on_generator_step;
};

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<EpochStats> history;
  std::uint64_t discriminator_updates = 0;
  std::uint64_t generator_updates = 0;
  std::size_t gp_zero_gradient_rows = 0;
  bool aborted = false;
  std::string abort_reason;
};

// Runs the full 5:1 schedule for the variant's epoch count. A NumericsError
// mid-training aborts and returns the last end-of-epoch state with
// `aborted` set.
TrainResult train(const EncodedDataset& dataset, const GanConfig& config,
                  const TrainHooks* hooks = nullptr);

std::vector<ProcessedAlert> sample_alerts(const ModelCheckpoint& checkpoint,
                                          std::size_t n, std::uint64_t seed);

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

std::string training_log_csv(const std::vector<EpochStats>& history);

}  // namespace alertforge::gan
