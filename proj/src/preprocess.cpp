#include "alertforge/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "alertforge/embedded_assets.hpp"
#include "alertforge/errors.hpp"
#include "alertforge/json_util.hpp"

namespace alertforge::preprocess {

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

}  // namespace

ServiceTable ServiceTable::from_csv_text(const std::string& csv,
                                         std::string default_label) {
  ServiceTable table;
  table.default_label_ = std::move(default_label);
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
      if (line.rfind("port_start", 0) == 0) continue;  // header
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw IoError("service table line " + std::to_string(line_number) +
                    ": expected 4 columns");
    }
    Entry entry;
    try {
      entry.port_start = std::stoi(fields[0]);
      entry.port_end = std::stoi(fields[1]);
    } catch (const std::exception&) {
      throw IoError("service table line " + std::to_string(line_number) +
                    ": bad port range");
    }
    entry.any_protocol = fields[2] == "any";
    entry.protocol = entry.any_protocol ? Protocol::other
                                        : protocol_from_string(fields[2]);
    entry.service = fields[3];
    if (entry.port_start < 0 || entry.port_end > 65535 ||
        entry.port_start > entry.port_end || entry.service.empty()) {
      throw IoError("service table line " + std::to_string(line_number) +
                    ": invalid entry");
    }
    table.entries_.push_back(std::move(entry));
  }
  return table;
}

ServiceTable ServiceTable::from_csv_file(const std::string& path,
                                         std::string default_label) {
  return from_csv_text(read_text_file(path), std::move(default_label));
}

ServiceTable ServiceTable::bundled() {
  return from_csv_text(embedded::kServiceTableCsv);
}

std::string map_port_to_service(int port, Protocol protocol,
                                const ServiceTable& table) {
  for (const auto& entry : table.entries()) {
    if (port < entry.port_start || port > entry.port_end) continue;
    if (entry.any_protocol || entry.protocol == protocol) return entry.service;
  }
  return table.default_label();
}

TimeBinning compute_time_bins(const std::vector<double>& timestamps,
                              const BinningParams& params) {
  if (timestamps.empty()) throw EmptyDatasetError("no timestamps to bin");
  if (params.min_stage_fraction <= 0.0 || params.min_stage_fraction >= 1.0 ||
      params.max_boundary_fraction <= 0.0 || params.max_boundary_fraction >= 1.0) {
    throw SpecError("binning fractions must lie in (0,1)");
  }

  TimeBinning binning;
  binning.params = params;

  const auto [min_it, max_it] =
      std::minmax_element(timestamps.begin(), timestamps.end());
  const double t_min = *min_it;
  const double t_max = *max_it;
  const double width = params.histogram_width_seconds;
  const double total = static_cast<double>(timestamps.size());

  const std::size_t nbins =
      t_max > t_min
          ? static_cast<std::size_t>(std::ceil((t_max - t_min) / width))
          : 1;

  std::vector<double> counts(nbins, 0.0);
  for (double t : timestamps) {
    auto bin = static_cast<std::size_t>((t - t_min) / width);
    if (bin >= nbins) bin = nbins - 1;
    counts[bin] += 1.0;
  }

  // Zero-padded centered moving average with a fixed divisor; interior mass
  // is conserved exactly.
  const int window = std::max(1, params.smoothing_window_bins);
  const int half = window / 2;
  std::vector<double> smoothed(nbins, 0.0);
  for (std::size_t i = 0; i < nbins; ++i) {
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
      const long long j = static_cast<long long>(i) + k;
      if (j >= 0 && j < static_cast<long long>(nbins)) {
        sum += counts[static_cast<std::size_t>(j)];
      }
    }
    smoothed[i] = sum / static_cast<double>(2 * half + 1);
  }

  // First-difference sign change from <=0 to >0 marks a local minimum.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < nbins; ++i) {
    const double before = smoothed[i] - smoothed[i - 1];
    const double after = smoothed[i + 1] - smoothed[i];
    if (before <= 0.0 && after > 0.0) candidates.push_back(i);
  }

  std::vector<double> sorted_ts = timestamps;
  std::sort(sorted_ts.begin(), sorted_ts.end());
  const auto count_in = [&](double lo, double hi) {
    const auto lo_it = std::lower_bound(sorted_ts.begin(), sorted_ts.end(), lo);
    const auto hi_it = std::lower_bound(sorted_ts.begin(), sorted_ts.end(), hi);
    return static_cast<double>(hi_it - lo_it);
  };

  const double inf = std::numeric_limits<double>::infinity();
  double previous_cut = -inf;
  for (std::size_t bin : candidates) {
    const double cut = t_min + (static_cast<double>(bin) + 0.5) * width;
    const double left = count_in(previous_cut, cut);
    const double right = count_in(cut, inf);
    if (left < params.min_stage_fraction * total) continue;
    if (right < params.min_stage_fraction * total) continue;
    if (smoothed[bin] >= params.max_boundary_fraction * total) continue;
    binning.cut_points.push_back(cut);
    previous_cut = cut;
  }

  const int bin_count = static_cast<int>(binning.cut_points.size()) + 1;
  for (int i = 0; i < bin_count; ++i) {
    char label[16];
    std::snprintf(label, sizeof(label), "tb%02d", i);
    binning.bin_labels.emplace_back(label);
  }
  return binning;
}

int assign_time_bin(double timestamp, const TimeBinning& binning) {
  const auto it = std::upper_bound(binning.cut_points.begin(),
                                   binning.cut_points.end(), timestamp);
  return static_cast<int>(it - binning.cut_points.begin());
}

PreprocessResult preprocess_target(const std::vector<AlertRecord>& alerts,
                                   const ServiceTable& table,
                                   const BinningParams& params) {
  if (alerts.empty()) throw EmptyDatasetError("no alerts to preprocess");
  const std::string& target = alerts.front().dst_ip;
  for (const auto& alert : alerts) {
    if (alert.dst_ip != target) {
      throw SpecError("preprocess_target requires a single destination IP");
    }
  }

  std::vector<double> timestamps;
  timestamps.reserve(alerts.size());
  for (const auto& alert : alerts) timestamps.push_back(alert.timestamp);

  PreprocessResult result;
  result.binning = compute_time_bins(timestamps, params);

  std::vector<AlertFeatures> features;
  features.reserve(alerts.size());
  for (const auto& alert : alerts) {
    AlertFeatures f;
    f.signature = alert.signature;
    f.service = map_port_to_service(alert.dst_port, alert.protocol, table);
    f.src_ip = alert.src_ip;
    f.time_bin =
        result.binning.bin_labels[static_cast<std::size_t>(
            assign_time_bin(alert.timestamp, result.binning))];
    features.push_back(std::move(f));
  }

  result.feature_space = build_feature_space(features, target);

  std::vector<ProcessedAlert> processed;
  processed.reserve(alerts.size());
  for (const auto& f : features) {
    ProcessedAlert p;
    p.a = result.feature_space.lookup(Feature::A, f.signature);
    p.d = result.feature_space.lookup(Feature::D, f.service);
    p.s = result.feature_space.lookup(Feature::S, f.src_ip);
    p.t = result.feature_space.lookup(Feature::T, f.time_bin);
    processed.push_back(p);
  }

  result.dataset = encode_dataset(result.feature_space, processed);
  return result;
}

}  // namespace alertforge::preprocess
