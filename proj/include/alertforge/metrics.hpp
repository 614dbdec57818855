#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "alertforge/alert_model.hpp"
#include "alertforge/gan.hpp"

namespace alertforge::metrics {

// Ordered subset of the four alert features.
using FeatureSet = std::vector<Feature>;

// All 15 nonempty subsets, ordered by size then lexicographically by letter.
std::vector<FeatureSet> all_feature_subsets();
std::string feature_set_label(const FeatureSet& features);
FeatureSet feature_set_from_label(const std::string& label);

// Joint value tuple; -1 in the slots of excluded features.
using TupleKey = std::array<int, kFeatureCount>;
TupleKey project_tuple(const ProcessedAlert& alert, const FeatureSet& features);

struct TupleHistogram {
  FeatureSet features;
  std::map<TupleKey, std::int64_t> counts;
  std::int64_t total = 0;
};

TupleHistogram build_histogram(const std::vector<ProcessedAlert>& alerts,
                               const FeatureSet& features);

// sum_i min(P_i, Q_i) / max(sum P, sum Q) over the union of keys.
double histogram_intersection(const TupleHistogram& p, const TupleHistogram& q);

struct IntersectionScore {
  FeatureSet features;
  double g_score = 0.0;
  double stddev = 0.0;
};

// Mean and standard deviation of the intersection over independently
// generated resamples. sample_size == 0 means |gt|.
IntersectionScore intersection_with_bootstrap(
    const std::vector<ProcessedAlert>& gt,
    const gan::ModelCheckpoint& checkpoint, const FeatureSet& features,
    std::size_t n_resamples = 1000, std::size_t sample_size = 0);

// Scores for all 15 subsets; resamples are drawn once and shared across
// subsets.
std::vector<IntersectionScore> all_mtuple_scores(
    const std::vector<ProcessedAlert>& gt,
    const gan::ModelCheckpoint& checkpoint, std::size_t n_resamples = 1000,
    std::size_t sample_size = 0);

enum class CeNormalizer { joint, target };

struct ConditionalEntropyResult {
  Feature target;
  FeatureSet conditions;
  double weighted = 0.0;    // bits
  double normalized = 0.0;  // weighted / log2(support), 0 when support is 1
};

// Condition-frequency-weighted conditional entropy of y given the x tuple;
// the joint normalizer uses the observed support of x union {y}.
ConditionalEntropyResult weighted_conditional_entropy(
    const std::vector<ProcessedAlert>& alerts, Feature y, const FeatureSet& x,
    CeNormalizer normalizer = CeNormalizer::joint);

struct JointEntropyResult {
  FeatureSet features;
  double value = 0.0;       // bits
  double normalized = 0.0;  // value / log2(observed support)
};

JointEntropyResult normalized_joint_entropy(
    const std::vector<ProcessedAlert>& alerts, const FeatureSet& features);

struct ModeCoverage {
  std::set<TupleKey> covered;
  std::set<TupleKey> dropped;
  std::set<TupleKey> noisy;
  std::int64_t gt_unique = 0;
  double pct_dropped = 0.0;
  double noise_ratio = 0.0;
};

// Set algebra over unique (a, d, s, t) tuples.
ModeCoverage mode_coverage(const std::vector<ProcessedAlert>& gt,
                           const std::vector<ProcessedAlert>& generated);

// DOT graph over the 15 subsets: each m-subset feeds its (m+1)-supersets.
// An edge is blue when its score drop stays under the threshold; otherwise
// red when every parent of the child also dropped at least the threshold,
// purple when only some did.
std::string dependency_graph_dot(const std::vector<IntersectionScore>& scores,
                                 double threshold = 0.05);

// Feature value columns (vocabulary strings) plus a count column.
std::string histogram_to_csv(const TupleHistogram& histogram,
                             const FeatureSpace& fs);

}  // namespace alertforge::metrics
