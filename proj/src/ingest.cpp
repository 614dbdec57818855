#include "alertforge/ingest.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "alertforge/errors.hpp"
#include "alertforge/json_util.hpp"

namespace alertforge::ingest {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
long long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != '-' &&
        c != '+') {
      return false;
    }
  }
  return true;
}

}  // namespace

std::optional<double> parse_timestamp(const std::string& text) {
  if (text.empty()) return std::nullopt;

  // Numeric epoch seconds.
  if (all_digits(text)) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v) && v >= 0.0) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }

  // RFC3339: YYYY-MM-DD[T ]hh:mm:ss[.frac][Z|±hh[:]mm]
  int y, mo, d, h, mi, s;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%*1[T ]%2d:%2d:%2d%n", &y, &mo, &d,
                  &h, &mi, &s, &consumed) != 6) {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
    return std::nullopt;
  }
  std::size_t pos = static_cast<std::size_t>(consumed);
  double frac = 0.0;
  if (pos < text.size() && text[pos] == '.') {
    std::size_t end = pos + 1;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) {
      ++end;
    }
    if (end == pos + 1) return std::nullopt;
    frac = std::stod(text.substr(pos, end - pos));
    pos = end;
  }
  long offset_seconds = 0;
  if (pos < text.size()) {
    const char c = text[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh = 0, om = 0;
      int n1 = 0;
      if (std::sscanf(text.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &n1) == 2 &&
          n1 == 5) {
        pos += 6;
      } else if (std::sscanf(text.c_str() + pos + 1, "%2d%2d%n", &oh, &om, &n1) ==
                     2 &&
                 n1 == 4) {
        pos += 5;
      } else {
        return std::nullopt;
      }
      offset_seconds = (oh * 3600L + om * 60L) * (c == '-' ? -1 : 1);
    } else {
      return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;

  const double epoch = static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 +
                       h * 3600.0 + mi * 60.0 + s + frac -
                       static_cast<double>(offset_seconds);
  if (epoch < 0.0) return std::nullopt;
  return epoch;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

struct LineResult {
  std::optional<AlertRecord> record;
  std::string team;
  std::string error;
};

LineResult parse_json_line(const std::string& line) {
  LineResult result;
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    result.error = "not a JSON object";
    return result;
  }
  const char* required[] = {"timestamp", "src_ip", "dest_ip", "dest_port", "proto"};
  for (const char* key : required) {
    if (!j.contains(key)) {
      result.error = std::string("missing key ") + key;
      return result;
    }
  }
  if (!j.contains("alert") || !j["alert"].is_object() ||
      !j["alert"].contains("signature")) {
    result.error = "missing alert.signature";
    return result;
  }
  AlertRecord record;
  if (j["timestamp"].is_number()) {
    record.timestamp = j["timestamp"].get<double>();
  } else if (j["timestamp"].is_string()) {
    const auto ts = parse_timestamp(j["timestamp"].get<std::string>());
    if (!ts) {
      result.error = "unparseable timestamp";
      return result;
    }
    record.timestamp = *ts;
  } else {
    result.error = "unparseable timestamp";
    return result;
  }
  if (!j["src_ip"].is_string() || !j["dest_ip"].is_string()) {
    result.error = "src_ip/dest_ip must be strings";
    return result;
  }
  record.src_ip = j["src_ip"].get<std::string>();
  record.dst_ip = j["dest_ip"].get<std::string>();
  if (j["dest_port"].is_number_integer()) {
    record.dst_port = j["dest_port"].get<int>();
  } else if (j["dest_port"].is_string()) {
    try {
      record.dst_port = std::stoi(j["dest_port"].get<std::string>());
    } catch (const std::exception&) {
      result.error = "bad dest_port";
      return result;
    }
  } else {
    result.error = "bad dest_port";
    return result;
  }
  if (!j["proto"].is_string() || !j["alert"]["signature"].is_string()) {
    result.error = "bad proto or signature";
    return result;
  }
  record.protocol = protocol_from_string(j["proto"].get<std::string>());
  record.signature = j["alert"]["signature"].get<std::string>();
  if (!record.valid()) {
    result.error = "field out of range";
    return result;
  }
  if (j.contains("team") && j["team"].is_string()) {
    result.team = j["team"].get<std::string>();
  }
  result.record = std::move(record);
  return result;
}

LineResult parse_csv_row(const std::vector<std::string>& header,
                         const std::string& line) {
  LineResult result;
  const std::vector<std::string> fields = split_csv_line(line);
  if (fields.size() < header.size()) {
    result.error = "too few columns";
    return result;
  }
  AlertRecord record;
  bool have_ts = false, have_src = false, have_dst = false, have_port = false,
       have_proto = false, have_sig = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i];
    const std::string& value = fields[i];
    if (name == "timestamp") {
      const auto ts = parse_timestamp(value);
      if (!ts) {
        result.error = "unparseable timestamp";
        return result;
      }
      record.timestamp = *ts;
      have_ts = true;
    } else if (name == "src_ip") {
      record.src_ip = value;
      have_src = true;
    } else if (name == "dest_ip" || name == "dst_ip") {
      record.dst_ip = value;
      have_dst = true;
    } else if (name == "dest_port" || name == "dst_port") {
      try {
        record.dst_port = std::stoi(value);
      } catch (const std::exception&) {
        result.error = "bad dest_port";
        return result;
      }
      have_port = true;
    } else if (name == "proto") {
      record.protocol = protocol_from_string(value);
      have_proto = true;
    } else if (name == "signature") {
      record.signature = value;
      have_sig = true;
    } else if (name == "team") {
      result.team = value;
    }
  }
  if (!(have_ts && have_src && have_dst && have_port && have_proto && have_sig)) {
    result.error = "missing required column value";
    return result;
  }
  if (!record.valid()) {
    result.error = "field out of range";
    return result;
  }
  result.record = std::move(record);
  return result;
}

}  // namespace

RawCorpus parse_log(const std::string& path, LogFormat format,
                    const std::string& team_filter) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open log file: " + path);

  RawCorpus corpus;
  corpus.source_path = path;

  std::string line;
  std::size_t line_number = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (format == LogFormat::csv && header.empty()) {
      header = split_csv_line(line);
      continue;
    }

    LineResult result = format == LogFormat::json_lines
                            ? parse_json_line(line)
                            : parse_csv_row(header, line);
    if (!result.record) {
      corpus.parse_warnings.push_back({line_number, result.error});
      continue;
    }
    if (!team_filter.empty() && result.team != team_filter) continue;
    corpus.alerts.push_back(std::move(*result.record));
    corpus.teams.push_back(std::move(result.team));
  }
  if (corpus.alerts.empty()) {
    throw EmptyDatasetError("no parseable alerts in " + path);
  }
  return corpus;
}

std::map<std::string, std::vector<AlertRecord>> segment_by_target(
    const RawCorpus& corpus) {
  if (corpus.alerts.empty()) throw EmptyDatasetError("empty corpus");
  std::map<std::string, std::vector<AlertRecord>> segments;
  for (const auto& alert : corpus.alerts) {
    segments[alert.dst_ip].push_back(alert);
  }
  return segments;
}

}  // namespace alertforge::ingest
