#pragma once

#include <map>
#include <string>
#include <vector>

namespace alertforge::stages {

// Table-driven mapping from alert signatures to coarse attack stages.
// Exact rules beat substring rules; among substring rules the first match in
// file order wins; anything unmatched lands in Unknown.
class StageTable {
 public:
  struct Rule {
    std::string pattern;
    bool exact;
    std::string stage;
  };

  static StageTable from_csv_text(const std::string& csv);
  static StageTable from_csv_file(const std::string& path);
  static StageTable bundled();

  // The eleven named stages plus the Unknown sentinel, in report order.
  static const std::vector<std::string>& stage_names();

  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
};

std::string map_signature(const std::string& signature, const StageTable& table);

struct StageDistribution {
  std::map<std::string, double> proportions;
};

StageDistribution stage_distribution(const std::vector<std::string>& signatures,
                                     const StageTable& table);

struct StageComparison {
  std::map<std::string, double> abs_diffs;
  double total_variation = 0.0;
};

StageComparison compare_distributions(const StageDistribution& gt,
                                      const StageDistribution& generated);

}  // namespace alertforge::stages
