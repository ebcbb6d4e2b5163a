#pragma once

// CSV and JSON encodings of the library's values. Numbers are written in the
// shortest form that round-trips, so output bytes depend only on the values.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hive/errors.hpp"
#include "hive/pmf.hpp"
#include "hive/simulator.hpp"
#include "hive/skew_normal.hpp"
#include "hive/stationary.hpp"

namespace hive::io {

using json = nlohmann::json;

inline std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "unformattable number");
  return std::string(buf, end);
}

inline std::string format_number(std::int64_t x) { return std::to_string(x); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header) : out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::ConfigError, "cannot open " + path.string() + " for writing");
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(std::int64_t x) { return format_number(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }

  std::ofstream out_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot open " + path.string() + " for writing");
  out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---- JSON ----

inline json to_json(const IntegerPmf& pmf) {
  return json{{"min_value", pmf.min_value()}, {"probs", std::vector<double>(pmf.probs().begin(), pmf.probs().end())}};
}

inline IntegerPmf pmf_from_json(const json& j) {
  if (!j.is_object() || !j.contains("min_value") || !j.contains("probs") || j.size() != 2)
    throw Error(ErrorCode::ConfigError, "PMF must be an object with exactly min_value and probs");
  if (!j.at("min_value").is_number_integer() || !j.at("probs").is_array())
    throw Error(ErrorCode::ConfigError, "PMF min_value must be an integer and probs an array");
  std::vector<double> w;
  for (const auto& x : j.at("probs")) {
    if (!x.is_number()) throw Error(ErrorCode::ConfigError, "PMF probs must be numbers");
    w.push_back(x.get<double>());
  }
  return IntegerPmf::from_weights(j.at("min_value").get<std::int64_t>(), std::move(w));
}

inline json to_json(const SkewNormalParams& p) { return json{{"xi", p.xi}, {"omega", p.omega}, {"alpha", p.alpha}}; }

inline SkewNormalParams skew_normal_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "skew_normal must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "xi" && k != "omega" && k != "alpha") throw Error(ErrorCode::ConfigError, "unknown skew_normal key '" + k + "'");
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, "skew_normal." + k + " must be a number");
  }
  for (const char* k : {"xi", "omega", "alpha"})
    if (!j.contains(k)) throw Error(ErrorCode::ConfigError, std::string("skew_normal.") + k + " is required");
  SkewNormalParams p{j.at("xi").get<double>(), j.at("omega").get<double>(), j.at("alpha").get<double>()};
  p.validate();
  return p;
}

inline json to_json(const StationaryLaw& law) {
  json j{{"mean", law.mean}, {"variance", law.variance}};
  j["poisson_mean"] = law.poisson_mean ? json(*law.poisson_mean) : json(nullptr);
  j["pmf"] = law.pmf ? to_json(*law.pmf) : json(nullptr);
  return j;
}

// ---- CSV ----

inline void write_pmf_csv(const std::filesystem::path& path, const IntegerPmf& pmf) {
  CsvWriter w(path, {"k", "prob"});
  for (std::int64_t k = pmf.min_value(); k <= pmf.max_value(); ++k) w.row(k, pmf[k]);
}

inline void write_renewal_csv(const std::filesystem::path& path, const RenewalTable& table) {
  CsvWriter w(path, {"n", "H"});
  for (std::int64_t n = 0; n <= table.n_max(); ++n) w.row(n, table[n]);
}

inline void write_day_series_csv(const std::filesystem::path& path, std::string_view column, const std::vector<double>& values) {
  CsvWriter w(path, {"day", column});
  for (std::size_t i = 0; i < values.size(); ++i) w.row(static_cast<std::int64_t>(i + 1), values[i]);
}

inline void write_mean_profile_csv(const std::filesystem::path& path, const std::vector<double>& profile) {
  write_day_series_csv(path, "mean", profile);
}

/// One row per (replication, day). `swarmed` marks swarm days; `extinct` is 1
/// from the first day below the extinction threshold onwards.
inline void write_traces_csv(const std::filesystem::path& path, const std::vector<SimTrace>& traces) {
  CsvWriter w(path, {"replication", "day", "count", "swarmed", "extinct"});
  for (std::size_t rep = 0; rep < traces.size(); ++rep) {
    const auto& tr = traces[rep];
    std::size_t next_swarm = 0;
    for (std::size_t t = 0; t < tr.counts.size(); ++t) {
      const auto day = static_cast<std::int64_t>(t + 1);
      int swarmed = 0;
      if (next_swarm < tr.swarm_days.size() && tr.swarm_days[next_swarm] == day) {
        swarmed = 1;
        ++next_swarm;
      }
      const int extinct = tr.extinct_day && day >= *tr.extinct_day ? 1 : 0;
      w.row(static_cast<std::int64_t>(rep), day, tr.counts[t], swarmed, extinct);
    }
  }
}

inline void write_summary_csv(const std::filesystem::path& path, const EnsembleSummary& s) {
  CsvWriter w(path, {"day", "mean", "sd"});
  for (std::size_t t = 0; t < s.mean.size(); ++t) w.row(static_cast<std::int64_t>(t + 1), s.mean[t], s.sd[t]);
}

inline json summary_json(const EnsembleSummary& s) {
  json j{{"days", s.mean.size()}, {"extinction_fraction", s.extinction_fraction}, {"swarm_events", s.swarm_events}};
  if (s.recovery) {
    j["recovery"] = {{"events", s.recovery->events},
                     {"recovered", s.recovery->recovered},
                     {"max_delay", s.recovery->max_delay},
                     {"mean_delay", s.recovery->mean_delay}};
  } else {
    j["recovery"] = nullptr;
  }
  return j;
}

struct ExtinctionRow {
  double L = 0.0;
  ExtinctionEstimate estimate;
};

inline void write_extinction_csv(const std::filesystem::path& path, const std::vector<ExtinctionRow>& rows) {
  CsvWriter w(path, {"L", "probability", "std_error", "analytic_lower_bound"});
  for (const auto& r : rows) {
    w.row(r.L, r.estimate.estimate, r.estimate.std_error,
          r.estimate.analytic_lower_bound ? format_number(*r.estimate.analytic_lower_bound) : std::string());
  }
}

inline void write_density_csv(const std::filesystem::path& path, const std::vector<double>& x, const std::vector<double>& density) {
  CsvWriter w(path, {"x", "density"});
  for (std::size_t i = 0; i < x.size(); ++i) w.row(x[i], density[i]);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw Error(ErrorCode::ConfigError, "bad number '" + s + "' in " + where);
  return v;
}

}  // namespace detail

/// Reads a seasonal profile with header `day,seas`; days must be exactly 1..D in order.
inline std::vector<double> read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read profile " + path.string());
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_line(line) != std::vector<std::string>{"day", "seas"})
    throw Error(ErrorCode::ConfigError, "profile CSV must start with header day,seas");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2) throw Error(ErrorCode::ConfigError, "profile rows need two columns: " + line);
    const auto day = detail::parse_double(cells[0], path.string());
    if (day != static_cast<double>(values.size() + 1))
      throw Error(ErrorCode::ConfigError, "profile days must run 1..D in order");
    values.push_back(detail::parse_double(cells[1], path.string()));
  }
  if (values.empty()) throw Error(ErrorCode::ConfigError, "profile CSV has no rows");
  return values;
}

/// Reads a two-column numeric CSV back (header skipped); used by tests and tools.
inline std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, std::vector<std::string>* header = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (header) *header = detail::split_csv_line(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& c : detail::split_csv_line(line)) row.push_back(c.empty() ? std::nan("") : detail::parse_double(c, path.string()));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hive::io
