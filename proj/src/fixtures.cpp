#include "alertforge/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "alertforge/errors.hpp"
#include "alertforge/rng.hpp"

namespace alertforge::fixtures {

namespace {

const char* kind_name(FeatureRule::Kind kind) {
  switch (kind) {
    case FeatureRule::Kind::independent: return "independent";
    case FeatureRule::Kind::function_of_a: return "function_of_a";
    default: return "noisy_function_of_a";
  }
}

FeatureRule::Kind kind_from_name(const std::string& name) {
  if (name == "independent") return FeatureRule::Kind::independent;
  if (name == "function_of_a") return FeatureRule::Kind::function_of_a;
  if (name == "noisy_function_of_a") return FeatureRule::Kind::noisy_function_of_a;
  throw SpecError("unknown feature rule kind: " + name);
}

// Conditional p(value | a) encoded by a rule.
double rule_prob(const FeatureRule& rule, int vocab, int a, int value) {
  switch (rule.kind) {
    case FeatureRule::Kind::independent:
      return rule.probs.empty() ? 1.0 / vocab : rule.probs[value];
    case FeatureRule::Kind::function_of_a:
      return rule.mapping[a] == value ? 1.0 : 0.0;
    default: {
      const double uniform = rule.noise / vocab;
      return rule.mapping[a] == value ? (1.0 - rule.noise) + uniform : uniform;
    }
  }
}

int sample_rule(const FeatureRule& rule, int vocab, int a, Rng& rng) {
  switch (rule.kind) {
    case FeatureRule::Kind::independent: {
      if (rule.probs.empty()) return static_cast<int>(rng.bounded(vocab));
      const double u = rng.uniform();
      double cum = 0.0;
      for (int v = 0; v < vocab; ++v) {
        cum += rule.probs[static_cast<std::size_t>(v)];
        if (u < cum) return v;
      }
      return vocab - 1;
    }
    case FeatureRule::Kind::function_of_a:
      return rule.mapping[a];
    default:
      if (rng.uniform() < rule.noise) return static_cast<int>(rng.bounded(vocab));
      return rule.mapping[a];
  }
}

void validate_rule(const FeatureRule& rule, int vocab, int vocab_a,
                   const char* name) {
  if (rule.kind == FeatureRule::Kind::independent) {
    if (!rule.probs.empty()) {
      if (static_cast<int>(rule.probs.size()) != vocab) {
        throw SpecError(std::string(name) + ": probs length != vocabulary size");
      }
      double sum = 0.0;
      for (double p : rule.probs) {
        if (p < 0.0) throw SpecError(std::string(name) + ": negative probability");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-9) {
        throw SpecError(std::string(name) + ": probabilities must sum to 1");
      }
    }
    return;
  }
  if (static_cast<int>(rule.mapping.size()) != vocab_a) {
    throw SpecError(std::string(name) + ": mapping must cover every a value");
  }
  for (int v : rule.mapping) {
    if (v < 0 || v >= vocab) {
      throw SpecError(std::string(name) + ": mapping value out of range");
    }
  }
  if (rule.kind == FeatureRule::Kind::noisy_function_of_a &&
      (rule.noise < 0.0 || rule.noise >= 1.0)) {
    throw SpecError(std::string(name) + ": noise must lie in [0,1)");
  }
}

}  // namespace

Json FeatureRule::to_json() const {
  Json j;
  j["kind"] = kind_name(kind);
  if (!probs.empty()) j["probs"] = probs;
  if (!mapping.empty()) j["mapping"] = mapping;
  if (kind == Kind::noisy_function_of_a) j["noise"] = noise;
  return j;
}

FeatureRule FeatureRule::from_json(const Json& j) {
  FeatureRule rule;
  rule.kind = kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("probs")) rule.probs = j["probs"].get<std::vector<double>>();
  if (j.contains("mapping")) rule.mapping = j["mapping"].get<std::vector<int>>();
  if (j.contains("noise")) rule.noise = j["noise"].get<double>();
  return rule;
}

void PlantedSpec::validate() const {
  for (int size : vocab_sizes) {
    if (size < 1 || size > 65535) {
      throw SpecError("vocabulary sizes must lie in [1, 65535]");
    }
  }
  if (n_alerts == 0) throw SpecError("n_alerts must be positive");
  if (!probs_a.empty()) {
    if (static_cast<int>(probs_a.size()) != vocab_sizes[0]) {
      throw SpecError("probs_a length != |A|");
    }
    double sum = 0.0;
    for (double p : probs_a) {
      if (p < 0.0) throw SpecError("negative probability in probs_a");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw SpecError("probs_a must sum to 1");
  }
  validate_rule(rule_d, vocab_sizes[1], vocab_sizes[0], "rule_d");
  validate_rule(rule_s, vocab_sizes[2], vocab_sizes[0], "rule_s");
  validate_rule(rule_t, vocab_sizes[3], vocab_sizes[0], "rule_t");

  double rare_sum = 0.0;
  for (const auto& rare : rare_modes) {
    if (rare.mode.a < 0 || rare.mode.a >= vocab_sizes[0] || rare.mode.d < 0 ||
        rare.mode.d >= vocab_sizes[1] || rare.mode.s < 0 ||
        rare.mode.s >= vocab_sizes[2] || rare.mode.t < 0 ||
        rare.mode.t >= vocab_sizes[3]) {
      throw SpecError("rare mode indices out of range");
    }
    if (rare.prob <= 0.0) throw SpecError("rare mode probability must be > 0");
    if (rare.prob * static_cast<double>(n_alerts) < 1.0) {
      throw SpecError("rare mode probability is below 1/n");
    }
    rare_sum += rare.prob;
  }
  if (rare_sum >= 1.0) throw SpecError("rare mode probabilities must sum below 1");
  if (!signature_names.empty() &&
      static_cast<int>(signature_names.size()) != vocab_sizes[0]) {
    throw SpecError("signature_names length != |A|");
  }
}

Json PlantedSpec::to_json() const {
  Json j;
  j["vocab_sizes"] = {{"A", vocab_sizes[0]},
                      {"D", vocab_sizes[1]},
                      {"S", vocab_sizes[2]},
                      {"T", vocab_sizes[3]}};
  if (!probs_a.empty()) j["probs_a"] = probs_a;
  j["rule_d"] = rule_d.to_json();
  j["rule_s"] = rule_s.to_json();
  j["rule_t"] = rule_t.to_json();
  Json rares = Json::array();
  for (const auto& rare : rare_modes) {
    rares.push_back({{"a", rare.mode.a},
                     {"d", rare.mode.d},
                     {"s", rare.mode.s},
                     {"t", rare.mode.t},
                     {"prob", rare.prob}});
  }
  j["rare_modes"] = std::move(rares);
  j["n_alerts"] = n_alerts;
  j["seed"] = seed;
  if (!signature_names.empty()) j["signature_names"] = signature_names;
  return j;
}

PlantedSpec PlantedSpec::from_json(const Json& j) {
  PlantedSpec spec;
  const Json& sizes = j.at("vocab_sizes");
  spec.vocab_sizes = {sizes.at("A").get<int>(), sizes.at("D").get<int>(),
                      sizes.at("S").get<int>(), sizes.at("T").get<int>()};
  if (j.contains("probs_a")) spec.probs_a = j["probs_a"].get<std::vector<double>>();
  spec.rule_d = FeatureRule::from_json(j.at("rule_d"));
  spec.rule_s = FeatureRule::from_json(j.at("rule_s"));
  spec.rule_t = FeatureRule::from_json(j.at("rule_t"));
  if (j.contains("rare_modes")) {
    for (const auto& r : j["rare_modes"]) {
      RareMode rare;
      rare.mode = {r.at("a").get<int>(), r.at("d").get<int>(),
                   r.at("s").get<int>(), r.at("t").get<int>()};
      rare.prob = r.at("prob").get<double>();
      spec.rare_modes.push_back(rare);
    }
  }
  spec.n_alerts = j.at("n_alerts").get<std::size_t>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("signature_names")) {
    spec.signature_names = j["signature_names"].get<std::vector<std::string>>();
  }
  spec.validate();
  return spec;
}

TruthRecord::TruthRecord(std::array<int, kFeatureCount> sizes,
                         std::vector<double> joint)
    : sizes_(sizes), joint_(std::move(joint)) {}

double TruthRecord::joint_entropy_bits(const metrics::FeatureSet& features) const {
  std::map<metrics::TupleKey, double> marginal;
  ProcessedAlert cell;
  std::size_t index = 0;
  for (cell.a = 0; cell.a < sizes_[0]; ++cell.a) {
    for (cell.d = 0; cell.d < sizes_[1]; ++cell.d) {
      for (cell.s = 0; cell.s < sizes_[2]; ++cell.s) {
        for (cell.t = 0; cell.t < sizes_[3]; ++cell.t, ++index) {
          const double p = joint_[index];
          if (p > 0.0) marginal[metrics::project_tuple(cell, features)] += p;
        }
      }
    }
  }
  double entropy = 0.0;
  for (const auto& [key, p] : marginal) entropy -= p * std::log2(p);
  return entropy;
}

double TruthRecord::conditional_entropy_bits(Feature y,
                                             const metrics::FeatureSet& x) const {
  metrics::FeatureSet joint_set = x;
  joint_set.push_back(y);
  std::sort(joint_set.begin(), joint_set.end());
  return joint_entropy_bits(joint_set) - joint_entropy_bits(x);
}

double TruthRecord::mode_probability(const ProcessedAlert& mode) const {
  const std::size_t index = static_cast<std::size_t>(
      ((mode.a * sizes_[1] + mode.d) * sizes_[2] + mode.s) * sizes_[3] + mode.t);
  return joint_[index];
}

std::set<metrics::TupleKey> TruthRecord::support() const {
  const metrics::FeatureSet all = {Feature::A, Feature::D, Feature::S,
                                   Feature::T};
  std::set<metrics::TupleKey> modes;
  ProcessedAlert cell;
  std::size_t index = 0;
  for (cell.a = 0; cell.a < sizes_[0]; ++cell.a) {
    for (cell.d = 0; cell.d < sizes_[1]; ++cell.d) {
      for (cell.s = 0; cell.s < sizes_[2]; ++cell.s) {
        for (cell.t = 0; cell.t < sizes_[3]; ++cell.t, ++index) {
          if (joint_[index] > 0.0) modes.insert(metrics::project_tuple(cell, all));
        }
      }
    }
  }
  return modes;
}

GeneratedCorpus generate_corpus(const PlantedSpec& spec) {
  spec.validate();
  const auto& sizes = spec.vocab_sizes;

  // Closed-form joint: a scaled factorized base plus the rare-mode atoms.
  double rare_total = 0.0;
  for (const auto& rare : spec.rare_modes) rare_total += rare.prob;
  const double base_scale = 1.0 - rare_total;

  std::vector<double> joint(static_cast<std::size_t>(sizes[0]) * sizes[1] *
                                sizes[2] * sizes[3],
                            0.0);
  std::size_t index = 0;
  for (int a = 0; a < sizes[0]; ++a) {
    const double pa = spec.probs_a.empty()
                          ? 1.0 / sizes[0]
                          : spec.probs_a[static_cast<std::size_t>(a)];
    for (int d = 0; d < sizes[1]; ++d) {
      const double pd = rule_prob(spec.rule_d, sizes[1], a, d);
      for (int s = 0; s < sizes[2]; ++s) {
        const double ps = rule_prob(spec.rule_s, sizes[2], a, s);
        for (int t = 0; t < sizes[3]; ++t, ++index) {
          const double pt = rule_prob(spec.rule_t, sizes[3], a, t);
          joint[index] = base_scale * pa * pd * ps * pt;
        }
      }
    }
  }
  for (const auto& rare : spec.rare_modes) {
    const std::size_t cell = static_cast<std::size_t>(
        ((rare.mode.a * sizes[1] + rare.mode.d) * sizes[2] + rare.mode.s) *
            sizes[3] +
        rare.mode.t);
    joint[cell] += rare.prob;
  }

  GeneratedCorpus corpus;
  corpus.truth = TruthRecord(sizes, std::move(joint));

  Rng rng(spec.seed);
  FeatureRule rule_a;
  rule_a.kind = FeatureRule::Kind::independent;
  rule_a.probs = spec.probs_a;

  corpus.alerts.reserve(spec.n_alerts);
  for (std::size_t i = 0; i < spec.n_alerts; ++i) {
    const double u = rng.uniform();
    double cum = 0.0;
    const RareMode* hit = nullptr;
    for (const auto& rare : spec.rare_modes) {
      cum += rare.prob;
      if (u < cum) {
        hit = &rare;
        break;
      }
    }
    if (hit != nullptr) {
      corpus.alerts.push_back(hit->mode);
      continue;
    }
    ProcessedAlert alert;
    alert.a = sample_rule(rule_a, sizes[0], 0, rng);
    alert.d = sample_rule(spec.rule_d, sizes[1], alert.a, rng);
    alert.s = sample_rule(spec.rule_s, sizes[2], alert.a, rng);
    alert.t = sample_rule(spec.rule_t, sizes[3], alert.a, rng);
    corpus.alerts.push_back(alert);
  }
  return corpus;
}

std::vector<double> zipf_probs(int k, double exponent) {
  std::vector<double> probs(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    probs[static_cast<std::size_t>(i)] =
        std::pow(static_cast<double>(i + 1), -exponent);
    sum += probs[static_cast<std::size_t>(i)];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

namespace {

// Well-known TCP ports whose bundled-table services are pairwise distinct.
const int kFixturePorts[] = {
    443,  80,   22,   3306, 53,   25,  143, 110,  21,   23,   3389, 445,
    139,  389,  636,  993,  995,  587, 465, 5432, 1433, 6379, 9200, 111,
    2049, 135,  88,   119,  179,  194, 427, 464,  502,  515,  548,  554,
    593,  631,  873,  902,  1080, 1521, 1723, 1883, 2375, 2404, 3128, 3260};

std::string default_signature_name(int a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "ET TEST Synthetic Signature %03d", a);
  return buf;
}

}  // namespace

std::string emit_jsonl(const PlantedSpec& spec, const GeneratedCorpus& corpus,
                       const std::string& target_ip) {
  if (spec.vocab_sizes[1] >
      static_cast<int>(sizeof(kFixturePorts) / sizeof(kFixturePorts[0]))) {
    throw SpecError("|D| exceeds the fixture port list");
  }
  if (spec.vocab_sizes[2] > 55) {
    throw SpecError("|S| exceeds the fixture source-IP range");
  }

  // One burst per time bin, separated by long quiet gaps so the statistical
  // binning recovers the bins.
  const double base_epoch = 1509750000.0;  // 2017-11-03T22:20:00Z
  const double burst_len = 1800.0;
  const double gap = 3600.0;

  Rng rng(mix_seed(spec.seed, 0x74696d65));
  std::ostringstream out;
  for (const auto& alert : corpus.alerts) {
    const double start =
        base_epoch + static_cast<double>(alert.t) * (burst_len + gap);
    const double ts = start + rng.uniform() * burst_len;
    Json line;
    char ts_buf[32];
    std::snprintf(ts_buf, sizeof(ts_buf), "%.3f", ts);
    line["timestamp"] = std::stod(ts_buf);
    line["src_ip"] = "10.99.0." + std::to_string(100 + alert.s);
    line["dest_ip"] = target_ip;
    line["dest_port"] = kFixturePorts[alert.d];
    line["proto"] = "TCP";
    line["alert"] = {{"signature",
                      spec.signature_names.empty()
                          ? default_signature_name(alert.a)
                          : spec.signature_names[static_cast<std::size_t>(
                                alert.a)]}};
    out << line.dump() << '\n';
  }
  return out.str();
}

Json truth_to_json(const PlantedSpec& spec, const TruthRecord& truth) {
  Json j;
  j["n_alerts"] = spec.n_alerts;
  j["seed"] = spec.seed;
  Json joint;
  for (const auto& subset : metrics::all_feature_subsets()) {
    joint[metrics::feature_set_label(subset)] =
        truth.joint_entropy_bits(subset);
  }
  j["joint_entropy_bits"] = std::move(joint);
  Json conditional;
  for (int yf = 0; yf < kFeatureCount; ++yf) {
    const Feature y = static_cast<Feature>(yf);
    for (const auto& subset : metrics::all_feature_subsets()) {
      if (subset.size() == 4) continue;
      bool contains_y = false;
      for (Feature f : subset) contains_y |= f == y;
      if (contains_y) continue;
      const std::string label = std::string(1, feature_letter(y)) + "|" +
                                metrics::feature_set_label(subset);
      conditional[label] = truth.conditional_entropy_bits(y, subset);
    }
  }
  j["conditional_entropy_bits"] = std::move(conditional);
  j["support_size"] = truth.support().size();
  return j;
}

}  // namespace alertforge::fixtures
