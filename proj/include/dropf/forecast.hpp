#pragma once

#include <map>
#include <string>
#include <vector>

#include "dropf/types.hpp"

namespace dropf {

/// Per-(node, phase, 15-minute slot) forecast statistics, all in pu on the
/// per-phase power base. Generation fields describe the maximum available
/// DER output.
struct ForecastWindow {
  std::string node;
  Phase phase = Phase::A;
  int window_index = 0;
  double p_load_mean = 0, p_load_min = 0, p_load_max = 0;
  double q_load_mean = 0, q_load_min = 0, q_load_max = 0;
  double p_gen_mean = 0, p_gen_min = 0, p_gen_max = 0;
  double q_gen_mean = 0, q_gen_min = 0, q_gen_max = 0;
};

struct ForecastSet {
  int window_minutes = 15;
  std::vector<ForecastWindow> rows;  // sorted by (window, node, phase)
  int clamp_count = 0;               // min<=mean<=max violations fixed on ingestion
  bool single_day_basis = false;

  int windows_per_day() const { return 24 * 60 / window_minutes; }
  const ForecastWindow* find(const std::string& node, Phase ph, int window) const;
  std::vector<ForecastWindow> window_slice(int window) const;

  /// Appends a row, restoring min <= mean <= max where violated.
  void ingest(ForecastWindow w);
  void sort_rows();
};

struct HistorySample {
  int minute = 0;  // minutes since the start of the recording
  std::string node;
  Phase phase = Phase::A;
  double p_load = 0, q_load = 0;
  double p_gen_avail = 0, q_gen = 0;
};

/// Clock-aligned window statistics across all recorded days: for every slot
/// (e.g. 96 per day at 15 minutes) the mean/min/max over every sample that
/// falls in that slot on any day.
ForecastSet build_forecasts(const std::vector<HistorySample>& history, int window_minutes);

}  // namespace dropf
