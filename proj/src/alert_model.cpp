#include "alertforge/alert_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "alertforge/errors.hpp"

namespace alertforge {

Protocol protocol_from_string(const std::string& text) {
  std::string lower;
  lower.reserve(text.size());
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "tcp") return Protocol::tcp;
  if (lower == "udp") return Protocol::udp;
  if (lower == "icmp" || lower == "icmpv6") return Protocol::icmp;
  return Protocol::other;
}

std::string protocol_to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::tcp: return "tcp";
    case Protocol::udp: return "udp";
    case Protocol::icmp: return "icmp";
    default: return "other";
  }
}

bool AlertRecord::valid() const {
  return std::isfinite(timestamp) && timestamp >= 0.0 && dst_port >= 0 &&
         dst_port <= 65535 && !signature.empty() && !dst_ip.empty() &&
         !src_ip.empty();
}

char feature_letter(Feature f) {
  switch (f) {
    case Feature::A: return 'A';
    case Feature::D: return 'D';
    case Feature::S: return 'S';
    default: return 'T';
  }
}

FeatureSpace::FeatureSpace(std::string target_ip, std::vector<std::string> vocab_a,
                           std::vector<std::string> vocab_d,
                           std::vector<std::string> vocab_s,
                           std::vector<std::string> vocab_t)
    : target_ip_(std::move(target_ip)) {
  vocabs_[0] = std::move(vocab_a);
  vocabs_[1] = std::move(vocab_d);
  vocabs_[2] = std::move(vocab_s);
  vocabs_[3] = std::move(vocab_t);
  offsets_[0] = 0;
  for (int f = 0; f < kFeatureCount; ++f) {
    offsets_[f + 1] = offsets_[f] + static_cast<int>(vocabs_[f].size());
  }
}

int FeatureSpace::lookup(Feature f, const std::string& value) const {
  const auto& vocab = vocabs_[static_cast<int>(f)];
  const auto it = std::lower_bound(vocab.begin(), vocab.end(), value);
  if (it == vocab.end() || *it != value) return -1;
  return static_cast<int>(it - vocab.begin());
}

Json FeatureSpace::to_json() const {
  Json j;
  j["target_ip"] = target_ip_;
  j["vocab_A"] = vocabs_[0];
  j["vocab_D"] = vocabs_[1];
  j["vocab_S"] = vocabs_[2];
  j["vocab_T"] = vocabs_[3];
  return j;
}

FeatureSpace FeatureSpace::from_json(const Json& j) {
  return FeatureSpace(j.at("target_ip").get<std::string>(),
                      j.at("vocab_A").get<std::vector<std::string>>(),
                      j.at("vocab_D").get<std::vector<std::string>>(),
                      j.at("vocab_S").get<std::vector<std::string>>(),
                      j.at("vocab_T").get<std::vector<std::string>>());
}

FeatureSpace build_feature_space(const std::vector<AlertFeatures>& alerts,
                                 const std::string& target_ip) {
  if (alerts.empty()) {
    throw EmptyDatasetError("no alerts for target " + target_ip);
  }
  std::set<std::string> sigs, services, sources, bins;
  for (const auto& alert : alerts) {
    sigs.insert(alert.signature);
    services.insert(alert.service);
    sources.insert(alert.src_ip);
    bins.insert(alert.time_bin);
  }
  const auto to_vec = [](const std::set<std::string>& s) {
    return std::vector<std::string>(s.begin(), s.end());
  };
  return FeatureSpace(target_ip, to_vec(sigs), to_vec(services), to_vec(sources),
                      to_vec(bins));
}

std::vector<double> encode(const ProcessedAlert& alert, const FeatureSpace& fs) {
  std::vector<double> v(static_cast<std::size_t>(fs.total_width()), 0.0);
  for (int f = 0; f < kFeatureCount; ++f) {
    const Feature feature = static_cast<Feature>(f);
    const int index = alert.index(feature);
    if (index < 0 || index >= fs.vocab_size(feature)) {
      throw EncodingError("feature index out of range for feature " +
                          std::string(1, feature_letter(feature)));
    }
    v[static_cast<std::size_t>(fs.offset(feature) + index)] = 1.0;
  }
  return v;
}

ProcessedAlert decode(std::span<const double> v, const FeatureSpace& fs) {
  if (static_cast<int>(v.size()) != fs.total_width()) {
    throw EncodingError("vector length does not match feature space width");
  }
  std::array<int, kFeatureCount> indices{};
  for (int f = 0; f < kFeatureCount; ++f) {
    const Feature feature = static_cast<Feature>(f);
    const int begin = fs.offset(feature);
    const int size = fs.vocab_size(feature);
    int best = 0;
    for (int i = 1; i < size; ++i) {
      if (v[static_cast<std::size_t>(begin + i)] >
          v[static_cast<std::size_t>(begin + best)]) {
        best = i;
      }
    }
    indices[static_cast<std::size_t>(f)] = best;
  }
  return ProcessedAlert{indices[0], indices[1], indices[2], indices[3]};
}

EncodedDataset encode_dataset(const FeatureSpace& fs,
                              const std::vector<ProcessedAlert>& alerts) {
  EncodedDataset out;
  out.feature_space = fs;
  out.rows.reserve(alerts.size());
  for (const auto& alert : alerts) {
    out.rows.push_back(encode(alert, fs));
  }
  out.source_alerts = alerts;
  return out;
}

}  // namespace alertforge
