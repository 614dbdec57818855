#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alertforge/alert_model.hpp"
#include "alertforge/json_util.hpp"
#include "alertforge/metrics.hpp"

namespace alertforge::fixtures {

// How one feature is generated, per alert, relative to the signature index a.
struct FeatureRule {
  enum class Kind { independent, function_of_a, noisy_function_of_a };
  Kind kind = Kind::independent;
  std::vector<double> probs;  // independent: categorical over the vocabulary
  std::vector<int> mapping;   // function kinds: value per a
  double noise = 0.0;         // noisy_function: chance of a uniform draw

  Json to_json() const;
  static FeatureRule from_json(const Json& j);
};

struct RareMode {
  ProcessedAlert mode;
  double prob = 0.0;
};

// A synthetic corpus specification with planted, analytically known
// dependency structure.
struct PlantedSpec {
  std::array<int, kFeatureCount> vocab_sizes = {4, 4, 2, 2};
  std::vector<double> probs_a;  // empty means uniform
  FeatureRule rule_d;
  FeatureRule rule_s;
  FeatureRule rule_t;
  std::vector<RareMode> rare_modes;
  std::size_t n_alerts = 1000;
  std::uint64_t seed = 1;
  // Optional explicit signature names (size |A|), used when emitting the
  // corpus as a log file; defaults to zero-padded synthetic names.
  std::vector<std::string> signature_names;

  void validate() const;  // throws SpecError on inconsistency

  Json to_json() const;
  static PlantedSpec from_json(const Json& j);
};

// Exact distribution the spec induces; entropies come from the closed-form
// joint, never from samples.
class TruthRecord {
 public:
  TruthRecord() = default;
  TruthRecord(std::array<int, kFeatureCount> sizes, std::vector<double> joint);

  double joint_entropy_bits(const metrics::FeatureSet& features) const;
  // H(y | x) = H(x ∪ {y}) - H(x), in bits.
  double conditional_entropy_bits(Feature y, const metrics::FeatureSet& x) const;
  double mode_probability(const ProcessedAlert& mode) const;
  std::set<metrics::TupleKey> support() const;

 private:
  std::array<int, kFeatureCount> sizes_ = {0, 0, 0, 0};
  std::vector<double> joint_;  // dense, index ((a*|D| + d)*|S| + s)*|T| + t
};

struct GeneratedCorpus {
  std::vector<ProcessedAlert> alerts;
  TruthRecord truth;
};

GeneratedCorpus generate_corpus(const PlantedSpec& spec);

// Zipf-like weights p(k) ∝ (k+1)^-exponent, normalized.
std::vector<double> zipf_probs(int k, double exponent);

// Renders the corpus in the ingest JSON-lines format: signature names from
// the spec (or synthetic defaults), source IPs 10.99.0.<100+s>, destination
// ports drawn from a fixed well-known-port list so the bundled service table
// recovers |D| distinct services, and timestamps grouped into one burst per
// time-bin index separated by quiet gaps. Time-bin recovery through the
// preprocessing rules needs every bin to carry at least the minimum stage
// fraction, so keep |T| small and near-uniform in specs meant for the full
// pipeline.
std::string emit_jsonl(const PlantedSpec& spec, const GeneratedCorpus& corpus,
                       const std::string& target_ip);

// Analytic truth tables for reports and tests: per-subset joint entropies and
// per-pair conditional entropies.
Json truth_to_json(const PlantedSpec& spec, const TruthRecord& truth);

}  // namespace alertforge::fixtures
