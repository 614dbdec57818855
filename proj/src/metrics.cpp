#include "alertforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "alertforge/errors.hpp"
#include "alertforge/rng.hpp"

namespace alertforge::metrics {

std::vector<FeatureSet> all_feature_subsets() {
  std::vector<FeatureSet> subsets;
  for (unsigned mask = 1; mask < 16; ++mask) {
    FeatureSet set;
    for (int f = 0; f < kFeatureCount; ++f) {
      if (mask & (1u << f)) set.push_back(static_cast<Feature>(f));
    }
    subsets.push_back(std::move(set));
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const FeatureSet& a, const FeatureSet& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  return subsets;
}

std::string feature_set_label(const FeatureSet& features) {
  std::string label;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i > 0) label.push_back(',');
    label.push_back(feature_letter(features[i]));
  }
  return label;
}

FeatureSet feature_set_from_label(const std::string& label) {
  FeatureSet set;
  for (char c : label) {
    switch (c) {
      case 'A': set.push_back(Feature::A); break;
      case 'D': set.push_back(Feature::D); break;
      case 'S': set.push_back(Feature::S); break;
      case 'T': set.push_back(Feature::T); break;
      case ',': case ' ': break;
      default: throw MetricError("bad feature label: " + label);
    }
  }
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  if (set.empty()) throw MetricError("empty feature label");
  return set;
}

TupleKey project_tuple(const ProcessedAlert& alert, const FeatureSet& features) {
  TupleKey key{-1, -1, -1, -1};
  for (Feature f : features) {
    key[static_cast<std::size_t>(f)] = alert.index(f);
  }
  return key;
}

TupleHistogram build_histogram(const std::vector<ProcessedAlert>& alerts,
                               const FeatureSet& features) {
  if (features.empty()) throw MetricError("feature subset must be nonempty");
  if (alerts.empty()) throw EmptyDatasetError("cannot histogram no alerts");
  TupleHistogram histogram;
  histogram.features = features;
  for (const auto& alert : alerts) {
    histogram.counts[project_tuple(alert, features)] += 1;
  }
  histogram.total = static_cast<std::int64_t>(alerts.size());
  return histogram;
}

double histogram_intersection(const TupleHistogram& p, const TupleHistogram& q) {
  if (p.features != q.features) {
    throw MetricError("histograms cover different feature subsets");
  }
  if (p.total == 0 && q.total == 0) {
    throw MetricError("both histograms are empty");
  }
  std::int64_t min_sum = 0;
  for (const auto& [key, count] : p.counts) {
    const auto it = q.counts.find(key);
    if (it != q.counts.end()) min_sum += std::min(count, it->second);
  }
  return static_cast<double>(min_sum) /
         static_cast<double>(std::max(p.total, q.total));
}

namespace {

// 16 bits per included feature, in feature order.
std::uint64_t pack_tuple(const ProcessedAlert& alert, const FeatureSet& features) {
  std::uint64_t key = 0;
  for (Feature f : features) {
    key = (key << 16) | static_cast<std::uint64_t>(alert.index(f) & 0xffff);
  }
  return key;
}

using PackedCounts = std::unordered_map<std::uint64_t, std::int64_t>;

PackedCounts pack_counts(const std::vector<ProcessedAlert>& alerts,
                         const FeatureSet& features) {
  PackedCounts counts;
  counts.reserve(alerts.size() * 2);
  for (const auto& alert : alerts) counts[pack_tuple(alert, features)] += 1;
  return counts;
}

double packed_intersection(const PackedCounts& gt, std::int64_t gt_total,
                           const PackedCounts& gen, std::int64_t gen_total) {
  std::int64_t min_sum = 0;
  for (const auto& [key, count] : gt) {
    const auto it = gen.find(key);
    if (it != gen.end()) min_sum += std::min(count, it->second);
  }
  return static_cast<double>(min_sum) /
         static_cast<double>(std::max(gt_total, gen_total));
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

MeanStd mean_and_stddev(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::vector<std::vector<ProcessedAlert>> draw_resamples(
    const gan::ModelCheckpoint& checkpoint, std::size_t n_resamples,
    std::size_t sample_size) {
  std::vector<std::vector<ProcessedAlert>> resamples(n_resamples);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < n_resamples; ++r) {
    resamples[r] = gan::sample_alerts(
        checkpoint, sample_size, mix_seed(checkpoint.config.seed, 0x626f6f74 + r));
  }
  return resamples;
}

std::vector<IntersectionScore> scores_over_resamples(
    const std::vector<ProcessedAlert>& gt,
    const std::vector<std::vector<ProcessedAlert>>& resamples,
    const std::vector<FeatureSet>& subsets) {
  std::vector<IntersectionScore> scores(subsets.size());
  const auto gt_total = static_cast<std::int64_t>(gt.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const PackedCounts gt_counts = pack_counts(gt, subsets[s]);
    std::vector<double> values(resamples.size());
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < resamples.size(); ++r) {
      const PackedCounts gen_counts = pack_counts(resamples[r], subsets[s]);
      values[r] = packed_intersection(
          gt_counts, gt_total, gen_counts,
          static_cast<std::int64_t>(resamples[r].size()));
    }
    const MeanStd stats = mean_and_stddev(values);
    scores[s] = {subsets[s], stats.mean, stats.stddev};
  }
  return scores;
}

}  // namespace

IntersectionScore intersection_with_bootstrap(
    const std::vector<ProcessedAlert>& gt,
    const gan::ModelCheckpoint& checkpoint, const FeatureSet& features,
    std::size_t n_resamples, std::size_t sample_size) {
  if (gt.empty()) throw EmptyDatasetError("no ground-truth alerts");
  if (sample_size == 0) sample_size = gt.size();
  const auto resamples = draw_resamples(checkpoint, n_resamples, sample_size);
  return scores_over_resamples(gt, resamples, {features})[0];
}

std::vector<IntersectionScore> all_mtuple_scores(
    const std::vector<ProcessedAlert>& gt,
    const gan::ModelCheckpoint& checkpoint, std::size_t n_resamples,
    std::size_t sample_size) {
  if (gt.empty()) throw EmptyDatasetError("no ground-truth alerts");
  if (sample_size == 0) sample_size = gt.size();
  const auto resamples = draw_resamples(checkpoint, n_resamples, sample_size);
  return scores_over_resamples(gt, resamples, all_feature_subsets());
}

ConditionalEntropyResult weighted_conditional_entropy(
    const std::vector<ProcessedAlert>& alerts, Feature y, const FeatureSet& x,
    CeNormalizer normalizer) {
  if (alerts.empty()) throw EmptyDatasetError("no alerts");
  if (x.empty()) throw MetricError("condition set must be nonempty");
  for (Feature f : x) {
    if (f == y) throw MetricError("target feature cannot also condition");
  }

  // Group y counts by condition tuple.
  std::map<TupleKey, std::map<int, std::int64_t>> groups;
  for (const auto& alert : alerts) {
    groups[project_tuple(alert, x)][alert.index(y)] += 1;
  }

  const double n = static_cast<double>(alerts.size());
  double weighted = 0.0;
  std::int64_t joint_support = 0;
  std::set<int> y_support;
  for (const auto& [key, y_counts] : groups) {
    std::int64_t group_total = 0;
    for (const auto& [value, count] : y_counts) {
      group_total += count;
      y_support.insert(value);
    }
    joint_support += static_cast<std::int64_t>(y_counts.size());
    double group_entropy = 0.0;
    for (const auto& [value, count] : y_counts) {
      const double p = static_cast<double>(count) / static_cast<double>(group_total);
      if (p > 0.0) group_entropy += p * std::log2(1.0 / p);
    }
    weighted += (static_cast<double>(group_total) / n) * group_entropy;
  }

  ConditionalEntropyResult result;
  result.target = y;
  result.conditions = x;
  result.weighted = weighted;
  const std::int64_t support = normalizer == CeNormalizer::joint
                                   ? joint_support
                                   : static_cast<std::int64_t>(y_support.size());
  result.normalized =
      support > 1 ? weighted / std::log2(static_cast<double>(support)) : 0.0;
  return result;
}

JointEntropyResult normalized_joint_entropy(
    const std::vector<ProcessedAlert>& alerts, const FeatureSet& features) {
  const TupleHistogram histogram = build_histogram(alerts, features);
  const double n = static_cast<double>(histogram.total);
  double entropy = 0.0;
  for (const auto& [key, count] : histogram.counts) {
    const double p = static_cast<double>(count) / n;
    entropy -= p * std::log2(p);
  }
  JointEntropyResult result;
  result.features = features;
  result.value = entropy;
  const std::size_t support = histogram.counts.size();
  result.normalized =
      support > 1 ? entropy / std::log2(static_cast<double>(support)) : 0.0;
  return result;
}

ModeCoverage mode_coverage(const std::vector<ProcessedAlert>& gt,
                           const std::vector<ProcessedAlert>& generated) {
  if (gt.empty() || generated.empty()) {
    throw EmptyDatasetError("mode coverage needs nonempty alert sets");
  }
  const FeatureSet all = {Feature::A, Feature::D, Feature::S, Feature::T};
  std::set<TupleKey> gt_modes, gen_modes;
  for (const auto& alert : gt) gt_modes.insert(project_tuple(alert, all));
  for (const auto& alert : generated) gen_modes.insert(project_tuple(alert, all));

  ModeCoverage coverage;
  for (const auto& mode : gt_modes) {
    if (gen_modes.contains(mode)) {
      coverage.covered.insert(mode);
    } else {
      coverage.dropped.insert(mode);
    }
  }
  for (const auto& mode : gen_modes) {
    if (!gt_modes.contains(mode)) coverage.noisy.insert(mode);
  }
  coverage.gt_unique = static_cast<std::int64_t>(gt_modes.size());
  coverage.pct_dropped = static_cast<double>(coverage.dropped.size()) /
                         static_cast<double>(coverage.gt_unique);
  coverage.noise_ratio = static_cast<double>(coverage.noisy.size()) /
                         static_cast<double>(coverage.gt_unique);
  return coverage;
}

std::string dependency_graph_dot(const std::vector<IntersectionScore>& scores,
                                 double threshold) {
  const std::vector<FeatureSet> subsets = all_feature_subsets();
  std::map<std::string, double> by_label;
  for (const auto& score : scores) {
    by_label[feature_set_label(score.features)] = score.g_score;
  }
  for (const auto& subset : subsets) {
    if (!by_label.contains(feature_set_label(subset))) {
      throw MetricError("dependency graph needs all 15 subset scores");
    }
  }

  std::ostringstream out;
  out << "digraph intersection_scores {\n";
  out << "  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& subset : subsets) {
    const std::string label = feature_set_label(subset);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", by_label[label]);
    out << "  \"" << label << "\" [label=\"" << label << "\\n" << buf << "\"];\n";
  }
  for (const auto& child : subsets) {
    if (child.size() < 2) continue;
    const std::string child_label = feature_set_label(child);
    const double child_score = by_label[child_label];

    std::vector<FeatureSet> parents;
    for (std::size_t skip = 0; skip < child.size(); ++skip) {
      FeatureSet parent;
      for (std::size_t i = 0; i < child.size(); ++i) {
        if (i != skip) parent.push_back(child[i]);
      }
      parents.push_back(std::move(parent));
    }
    std::size_t parents_over = 0;
    for (const auto& parent : parents) {
      if (by_label[feature_set_label(parent)] - child_score >= threshold) {
        ++parents_over;
      }
    }
    for (const auto& parent : parents) {
      const std::string parent_label = feature_set_label(parent);
      const double drop = by_label[parent_label] - child_score;
      const char* color = "blue";
      if (drop >= threshold) {
        color = parents_over == parents.size() ? "red" : "purple";
      }
      out << "  \"" << parent_label << "\" -> \"" << child_label
          << "\" [color=" << color << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string histogram_to_csv(const TupleHistogram& histogram,
                             const FeatureSpace& fs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < histogram.features.size(); ++i) {
    if (i > 0) out << ',';
    out << feature_letter(histogram.features[i]);
  }
  out << ",count\n";
  for (const auto& [key, count] : histogram.counts) {
    for (std::size_t i = 0; i < histogram.features.size(); ++i) {
      const Feature f = histogram.features[i];
      const int index = key[static_cast<std::size_t>(f)];
      if (i > 0) out << ',';
      const std::string& value = fs.vocab(f)[static_cast<std::size_t>(index)];
      if (value.find(',') != std::string::npos ||
          value.find('"') != std::string::npos) {
        out << '"';
        for (char c : value) {
          if (c == '"') out << '"';
          out << c;
        }
        out << '"';
      } else {
        out << value;
      }
    }
    out << ',' << count << '\n';
  }
  return out.str();
}

}  // namespace alertforge::metrics
