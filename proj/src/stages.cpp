#include "alertforge/stages.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "alertforge/embedded_assets.hpp"
#include "alertforge/errors.hpp"
#include "alertforge/json_util.hpp"

namespace alertforge::stages {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool known_stage(const std::string& name) {
  for (const auto& stage : StageTable::stage_names()) {
    if (stage == name) return true;
  }
  return false;
}

}  // namespace

const std::vector<std::string>& StageTable::stage_names() {
  // Spelling kept verbatim from the rule-table convention, including
  // "Escalate Privledges".
  static const std::vector<std::string> names = {
      "IP Scan",           "Service Scan",      "Targeted Scan",
      "Social Engineering", "Surfing",          "Specific Exploits",
      "Escalate Privledges", "Zero Day",        "Malware Injection",
      "Degrade Operations", "Data Exfiltration", "Unknown"};
  return names;
}

StageTable StageTable::from_csv_text(const std::string& csv) {
  StageTable table;
  std::istringstream in(csv);
  std::string line;
  bool first = true;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("pattern", 0) == 0) continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw IoError("stage rules line " + std::to_string(line_number) +
                    ": expected pattern,match_type,stage");
    }
    Rule rule;
    rule.pattern = fields[0];
    if (fields[1] == "exact") {
      rule.exact = true;
    } else if (fields[1] == "substring") {
      rule.exact = false;
    } else {
      throw IoError("stage rules line " + std::to_string(line_number) +
                    ": match_type must be exact or substring");
    }
    rule.stage = fields[2];
    if (rule.pattern.empty() || !known_stage(rule.stage)) {
      throw IoError("stage rules line " + std::to_string(line_number) +
                    ": empty pattern or unknown stage");
    }
    table.rules_.push_back(std::move(rule));
  }
  return table;
}

StageTable StageTable::from_csv_file(const std::string& path) {
  return from_csv_text(read_text_file(path));
}

StageTable StageTable::bundled() {
  return from_csv_text(embedded::kStageRulesCsv);
}

std::string map_signature(const std::string& signature, const StageTable& table) {
  for (const auto& rule : table.rules()) {
    if (rule.exact && rule.pattern == signature) return rule.stage;
  }
  for (const auto& rule : table.rules()) {
    if (!rule.exact && signature.find(rule.pattern) != std::string::npos) {
      return rule.stage;
    }
  }
  return "Unknown";
}

StageDistribution stage_distribution(const std::vector<std::string>& signatures,
                                     const StageTable& table) {
  if (signatures.empty()) throw EmptyDatasetError("no signatures to map");

  // Signatures repeat heavily; memoize the rule scan.
  std::unordered_map<std::string, std::string> memo;
  std::map<std::string, std::int64_t> counts;
  for (const auto& name : StageTable::stage_names()) counts[name] = 0;
  for (const auto& signature : signatures) {
    auto it = memo.find(signature);
    if (it == memo.end()) {
      it = memo.emplace(signature, map_signature(signature, table)).first;
    }
    counts[it->second] += 1;
  }

  StageDistribution distribution;
  const double n = static_cast<double>(signatures.size());
  for (const auto& [stage, count] : counts) {
    distribution.proportions[stage] = static_cast<double>(count) / n;
  }
  return distribution;
}

StageComparison compare_distributions(const StageDistribution& gt,
                                      const StageDistribution& generated) {
  StageComparison comparison;
  double sum = 0.0;
  for (const auto& name : StageTable::stage_names()) {
    const auto gt_it = gt.proportions.find(name);
    const auto gen_it = generated.proportions.find(name);
    const double a = gt_it == gt.proportions.end() ? 0.0 : gt_it->second;
    const double b = gen_it == generated.proportions.end() ? 0.0 : gen_it->second;
    const double diff = std::fabs(a - b);
    comparison.abs_diffs[name] = diff;
    sum += diff;
  }
  comparison.total_variation = 0.5 * sum;
  return comparison;
}

}  // namespace alertforge::stages
