#pragma once

#include <string>
#include <utility>
#include <vector>

#include "alertforge/alert_model.hpp"

namespace alertforge::preprocess {

// Destination-port to service-category reduction.
class ServiceTable {
 public:
  struct Entry {
    int port_start;
    int port_end;
    Protocol protocol;  // Protocol::other in a rule means "any protocol"
    bool any_protocol;
    std::string service;
  };

  static ServiceTable from_csv_text(const std::string& csv,
                                    std::string default_label = "unregistered");
  static ServiceTable from_csv_file(const std::string& path,
                                    std::string default_label = "unregistered");
  static ServiceTable bundled();

  const std::string& default_label() const { return default_label_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::string default_label_ = "unregistered";
};

// First matching range wins; total via the default label.
std::string map_port_to_service(int port, Protocol protocol,
                                const ServiceTable& table);

struct BinningParams {
  double histogram_width_seconds = 300.0;
  int smoothing_window_bins = 5;
  double min_stage_fraction = 0.10;
  double max_boundary_fraction = 0.005;
};

struct TimeBinning {
  std::vector<double> cut_points;       // strictly increasing epochs
  std::vector<std::string> bin_labels;  // cut_points.size() + 1 labels
  BinningParams params;

  int bin_count() const { return static_cast<int>(bin_labels.size()); }
};

// Histogram -> centered moving average -> first-difference local minima;
// candidates accepted greedily left to right when both adjacent stages keep
// at least min_stage_fraction of the alerts and the candidate bin itself
// holds under max_boundary_fraction.
TimeBinning compute_time_bins(const std::vector<double>& timestamps,
                              const BinningParams& params);

// Half-open bins: cut_points[i-1] <= t < cut_points[i]; out-of-range clamps.
int assign_time_bin(double timestamp, const TimeBinning& binning);

struct PreprocessResult {
  FeatureSpace feature_space;
  EncodedDataset dataset;
  TimeBinning binning;
};

// Full per-target reduction: service mapping, time binning, vocabulary
// construction, one-hot encoding. All alerts must share one dst_ip.
PreprocessResult preprocess_target(const std::vector<AlertRecord>& alerts,
                                   const ServiceTable& table,
                                   const BinningParams& params);

}  // namespace alertforge::preprocess
