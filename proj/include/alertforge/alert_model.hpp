#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alertforge/json_util.hpp"

namespace alertforge {

enum class Protocol { tcp, udp, icmp, other };

Protocol protocol_from_string(const std::string& text);
std::string protocol_to_string(Protocol protocol);

// One NIDS alert as parsed from a sensor log.
struct AlertRecord {
  double timestamp = 0.0;  // seconds since epoch
  std::string src_ip;
  std::string dst_ip;
  int dst_port = 0;
  Protocol protocol = Protocol::other;
  std::string signature;

  bool valid() const;
};

// The four categorical features, in report order.
enum class Feature : int { A = 0, D = 1, S = 2, T = 3 };
inline constexpr int kFeatureCount = 4;

char feature_letter(Feature f);

// Alert reduced to indices into the per-target vocabularies.
struct ProcessedAlert {
  int a = 0;
  int d = 0;
  int s = 0;
  int t = 0;

  int index(Feature f) const {
    switch (f) {
      case Feature::A: return a;
      case Feature::D: return d;
      case Feature::S: return s;
      default: return t;
    }
  }
  auto operator<=>(const ProcessedAlert&) const = default;
};

// Raw string values backing a ProcessedAlert, used to build vocabularies.
struct AlertFeatures {
  std::string signature;
  std::string service;
  std::string src_ip;
  std::string time_bin;
};

// Per-target vocabulary of the four features and their one-hot layout.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  FeatureSpace(std::string target_ip, std::vector<std::string> vocab_a,
               std::vector<std::string> vocab_d, std::vector<std::string> vocab_s,
               std::vector<std::string> vocab_t);

  const std::string& target_ip() const { return target_ip_; }
  const std::vector<std::string>& vocab(Feature f) const {
    return vocabs_[static_cast<int>(f)];
  }
  int vocab_size(Feature f) const {
    return static_cast<int>(vocabs_[static_cast<int>(f)].size());
  }
  // Start of the feature's one-hot segment in the concatenated vector.
  int offset(Feature f) const { return offsets_[static_cast<int>(f)]; }
  int total_width() const { return offsets_[kFeatureCount]; }

  // Index of `value` in the feature's vocabulary, or -1.
  int lookup(Feature f, const std::string& value) const;

  Json to_json() const;
  static FeatureSpace from_json(const Json& j);

  bool operator==(const FeatureSpace&) const = default;

 private:
  std::string target_ip_;
  std::array<std::vector<std::string>, kFeatureCount> vocabs_;
  std::array<int, kFeatureCount + 1> offsets_ = {0, 0, 0, 0, 0};
};

// One-hot encoded alerts for a single target, plus their index form.
struct EncodedDataset {
  FeatureSpace feature_space;
  std::vector<std::vector<double>> rows;
  std::vector<ProcessedAlert> source_alerts;

  std::size_t size() const { return rows.size(); }
};

// Builds the vocabulary from observed values. Vocabularies are deduplicated
// and sorted so the encoding is independent of input order.
FeatureSpace build_feature_space(const std::vector<AlertFeatures>& alerts,
                                 const std::string& target_ip);

std::vector<double> encode(const ProcessedAlert& alert, const FeatureSpace& fs);

// Per-feature argmax over each one-hot segment; ties resolve to the lowest
// index.
ProcessedAlert decode(std::span<const double> v, const FeatureSpace& fs);

EncodedDataset encode_dataset(const FeatureSpace& fs,
                              const std::vector<ProcessedAlert>& alerts);

}  // namespace alertforge
