#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alertforge/alert_model.hpp"

namespace alertforge::ingest {

enum class LogFormat { json_lines, csv };

struct ParseWarning {
  std::size_t line;
  std::string message;
};

struct RawCorpus {
  std::vector<AlertRecord> alerts;  // in file order
  std::vector<std::string> teams;   // optional per-alert team tag, "" if absent
  std::string source_path;
  std::vector<ParseWarning> parse_warnings;
};

// RFC3339 ("2017-11-04T10:00:00.000000+0000") or numeric epoch seconds.
// Returns nullopt for anything else.
std::optional<double> parse_timestamp(const std::string& text);

// Lines missing required fields are skipped and recorded as warnings.
// `team_filter`, when nonempty, keeps only alerts whose optional team tag
// matches.
RawCorpus parse_log(const std::string& path, LogFormat format,
                    const std::string& team_filter = "");

// Partitions the corpus by destination IP, preserving within-segment order.
std::map<std::string, std::vector<AlertRecord>> segment_by_target(
    const RawCorpus& corpus);

}  // namespace alertforge::ingest
