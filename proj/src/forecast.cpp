#include "dropf/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace dropf {

namespace {
void clamp_triplet(double& mn, double& mean, double& mx, int& clamps) {
  bool bad = !(mn <= mean && mean <= mx);
  if (!bad) return;
  ++clamps;
  double lo = std::min({mn, mean, mx});
  double hi = std::max({mn, mean, mx});
  mn = lo;
  mx = hi;
  mean = std::clamp(mean, lo, hi);
}
}  // namespace

void ForecastSet::ingest(ForecastWindow w) {
  clamp_triplet(w.p_load_min, w.p_load_mean, w.p_load_max, clamp_count);
  clamp_triplet(w.q_load_min, w.q_load_mean, w.q_load_max, clamp_count);
  clamp_triplet(w.p_gen_min, w.p_gen_mean, w.p_gen_max, clamp_count);
  clamp_triplet(w.q_gen_min, w.q_gen_mean, w.q_gen_max, clamp_count);
  rows.push_back(std::move(w));
}

void ForecastSet::sort_rows() {
  std::sort(rows.begin(), rows.end(), [](const ForecastWindow& a, const ForecastWindow& b) {
    if (a.window_index != b.window_index) return a.window_index < b.window_index;
    if (a.node != b.node) return a.node < b.node;
    return a.phase < b.phase;
  });
}

const ForecastWindow* ForecastSet::find(const std::string& node, Phase ph, int window) const {
  for (const ForecastWindow& w : rows)
    if (w.window_index == window && w.phase == ph && w.node == node) return &w;
  return nullptr;
}

std::vector<ForecastWindow> ForecastSet::window_slice(int window) const {
  std::vector<ForecastWindow> out;
  for (const ForecastWindow& w : rows)
    if (w.window_index == window) out.push_back(w);
  return out;
}

ForecastSet build_forecasts(const std::vector<HistorySample>& history, int window_minutes) {
  if (window_minutes <= 0 || 1440 % window_minutes != 0)
    throw std::runtime_error("build_forecasts: window length must divide a day");
  if (history.empty()) throw std::runtime_error("build_forecasts: empty history");

  int span = 0;
  for (const HistorySample& h : history) span = std::max(span, h.minute + 1);
  if (span < 1440)
    throw std::runtime_error("build_forecasts: history must cover at least one full day");

  const int slots = 1440 / window_minutes;

  struct Acc {
    double pl_sum = 0, pl_min = 1e300, pl_max = -1e300;
    double ql_sum = 0, ql_min = 1e300, ql_max = -1e300;
    double pg_sum = 0, pg_min = 1e300, pg_max = -1e300;
    double qg_sum = 0, qg_min = 1e300, qg_max = -1e300;
    long n = 0;
  };
  std::map<std::pair<std::string, Phase>, std::vector<Acc>> acc;
  for (const HistorySample& h : history) {
    auto key = std::make_pair(h.node, h.phase);
    auto it = acc.find(key);
    if (it == acc.end()) it = acc.emplace(key, std::vector<Acc>(slots)).first;
    Acc& a = it->second[(h.minute % 1440) / window_minutes];
    a.pl_sum += h.p_load;
    a.pl_min = std::min(a.pl_min, h.p_load);
    a.pl_max = std::max(a.pl_max, h.p_load);
    a.ql_sum += h.q_load;
    a.ql_min = std::min(a.ql_min, h.q_load);
    a.ql_max = std::max(a.ql_max, h.q_load);
    a.pg_sum += h.p_gen_avail;
    a.pg_min = std::min(a.pg_min, h.p_gen_avail);
    a.pg_max = std::max(a.pg_max, h.p_gen_avail);
    a.qg_sum += h.q_gen;
    a.qg_min = std::min(a.qg_min, h.q_gen);
    a.qg_max = std::max(a.qg_max, h.q_gen);
    a.n++;
  }

  ForecastSet out;
  out.window_minutes = window_minutes;
  out.single_day_basis = span < 2 * 1440;
  std::string missing;
  for (const auto& [key, slots_acc] : acc) {
    for (int s = 0; s < slots; ++s) {
      const Acc& a = slots_acc[s];
      if (a.n == 0) {
        missing += (missing.empty() ? "" : ", ") + key.first + "/" +
                   std::string(1, phase_char(key.second)) + "#" + std::to_string(s);
        continue;
      }
      ForecastWindow w;
      w.node = key.first;
      w.phase = key.second;
      w.window_index = s;
      w.p_load_mean = a.pl_sum / a.n;
      w.p_load_min = a.pl_min;
      w.p_load_max = a.pl_max;
      w.q_load_mean = a.ql_sum / a.n;
      w.q_load_min = a.ql_min;
      w.q_load_max = a.ql_max;
      w.p_gen_mean = a.pg_sum / a.n;
      w.p_gen_min = a.pg_min;
      w.p_gen_max = a.pg_max;
      w.q_gen_mean = a.qg_sum / a.n;
      w.q_gen_min = a.qg_min;
      w.q_gen_max = a.qg_max;
      out.rows.push_back(std::move(w));
    }
  }
  if (!missing.empty())
    throw std::runtime_error("build_forecasts: empty windows: " + missing);
  out.sort_rows();
  return out;
}

}  // namespace dropf
