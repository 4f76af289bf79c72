// Copyright 2026 The aesrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Impact reports, their aggregates, and the CSV / JSON / SVG renderings.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "aesrt/error.hpp"
#include "aesrt/metrics.hpp"
#include "aesrt/perturb/spec.hpp"
#include "aesrt/runner/config.hpp"

namespace aesrt {

/// Prompt id standing for all prompts pooled together.
inline constexpr std::string_view kPooledPrompt = "*";

struct ImpactKey {
  std::string scorer_id;
  TestKind test = TestKind::AddWikiRelated;
  std::string prompt_id;
  int c1 = 10;
  Position c2 = Position::End;
  bool bounded = false;

  auto tie() const { return std::tie(scorer_id, test, prompt_id, c1, c2, bounded); }
  bool operator<(const ImpactKey& o) const { return tie() < o.tie(); }
  bool operator==(const ImpactKey& o) const { return tie() == o.tie(); }
};

struct ImpactReport {
  ImpactKey key;
  std::size_t n = 0;
  double n_pos_pct = 0.0;
  double n_neg_pct = 0.0;
  double mu_pos_pct = 0.0;
  double mu_neg_pct = 0.0;
  double sigma_pct = 0.0;
  std::optional<double> t_stat;
  std::size_t dof = 0;
  std::optional<double> p_value;

  bool operator==(const ImpactReport&) const = default;
};

inline ImpactReport make_impact_report(ImpactKey key, std::span<const ScorePair> pairs, MuDenominator mu) {
  ImpactReport r;
  r.key = std::move(key);
  const auto m = adversarial_metrics(pairs, mu);
  r.n = m.n;
  r.n_pos_pct = m.n_pos_pct;
  r.n_neg_pct = m.n_neg_pct;
  r.mu_pos_pct = m.mu_pos_pct;
  r.mu_neg_pct = m.mu_neg_pct;
  r.sigma_pct = m.sigma_pct;
  if (pairs.size() >= 2) {
    const auto t = paired_t_test(pairs);
    r.t_stat = t.t_stat;
    r.dof = t.dof;
    r.p_value = t.p_value;
  }
  return r;
}

/// Mean of the five adversarial metrics over a group of reports.
struct MetricMeans {
  std::size_t reports = 0;
  double n_pos_pct = 0.0;
  double n_neg_pct = 0.0;
  double mu_pos_pct = 0.0;
  double mu_neg_pct = 0.0;
  double sigma_pct = 0.0;

  void add(const ImpactReport& r) {
    ++reports;
    n_pos_pct += r.n_pos_pct;
    n_neg_pct += r.n_neg_pct;
    mu_pos_pct += r.mu_pos_pct;
    mu_neg_pct += r.mu_neg_pct;
    sigma_pct += r.sigma_pct;
  }
  MetricMeans finished() const {
    MetricMeans m = *this;
    if (reports == 0) return m;
    const double k = static_cast<double>(reports);
    m.n_pos_pct /= k;
    m.n_neg_pct /= k;
    m.mu_pos_pct /= k;
    m.mu_neg_pct /= k;
    m.sigma_pct /= k;
    return m;
  }
};

/// Per (scorer, prompt, c1), averaged over every test, c2 and bounded mode.
struct C1Average {
  std::string scorer_id;
  std::string prompt_id;
  int c1 = 0;
  MetricMeans means;
};

/// Per (scorer, prompt, c2, bounded), averaged over Add tests and c1.
struct PositionAverage {
  std::string scorer_id;
  std::string prompt_id;
  Position c2 = Position::End;
  bool bounded = false;
  MetricMeans means;
};

struct FailureCounts {
  std::size_t perturb = 0;    // variants that could not be generated
  std::size_t scoring = 0;    // per-id scorer failures
  std::size_t clamped = 0;    // scores clamped into the prompt range

  bool operator==(const FailureCounts&) const = default;
};

struct ReportBundle {
  std::vector<ImpactReport> reports;  // sorted by key
  std::vector<C1Average> by_c1;
  std::vector<PositionAverage> by_position;
  FailureCounts failures;
};

inline void compute_aggregates(ReportBundle& b) {
  std::map<std::tuple<std::string, std::string, int>, MetricMeans> c1;
  std::map<std::tuple<std::string, std::string, Position, bool>, MetricMeans> pos;
  for (const auto& r : b.reports) {
    c1[{r.key.scorer_id, r.key.prompt_id, r.key.c1}].add(r);
    if (is_add(r.key.test)) pos[{r.key.scorer_id, r.key.prompt_id, r.key.c2, r.key.bounded}].add(r);
  }
  b.by_c1.clear();
  for (const auto& [k, m] : c1) b.by_c1.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), m.finished()});
  b.by_position.clear();
  for (const auto& [k, m] : pos)
    b.by_position.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), m.finished()});
}

// --- number formatting -------------------------------------------------------------

/// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

// --- CSV ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 15> kReportColumns = {
    "scorer_id", "test",      "prompt_id",  "c1",         "c2",        "bounded", "n",      "n_pos_pct",
    "n_neg_pct", "mu_pos_pct", "mu_neg_pct", "sigma_pct", "t_stat",    "dof",     "p_value"};

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string reports_to_csv(const std::vector<ImpactReport>& reports) {
  std::string out;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    if (i) out += ',';
    out += kReportColumns[i];
  }
  out += '\n';
  for (const auto& r : reports) {
    out += csv_field(r.key.scorer_id) + ',' + std::string(to_string(r.key.test)) + ',' + csv_field(r.key.prompt_id) + ',' +
           std::to_string(r.key.c1) + ',' + std::string(to_string(r.key.c2)) + ',' + (r.key.bounded ? "true" : "false") +
           ',' + std::to_string(r.n) + ',' + format_number(r.n_pos_pct) + ',' + format_number(r.n_neg_pct) + ',' +
           format_number(r.mu_pos_pct) + ',' + format_number(r.mu_neg_pct) + ',' + format_number(r.sigma_pct) + ',' +
           format_number(r.t_stat) + ',' + std::to_string(r.dof) + ',' + format_number(r.p_value) + '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("bad number in report CSV: " + s);
  return v;
}

inline std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace detail

/// Reads back the output of reports_to_csv.
inline std::vector<ImpactReport> reports_from_csv(std::string_view text) {
  std::vector<ImpactReport> out;
  std::size_t at = 0;
  bool header = true;
  while (at < text.size()) {
    std::size_t nl = text.find('\n', at);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(at, nl - at);
    at = nl + 1;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != kReportColumns.size()) throw Error("report CSV row has " + std::to_string(f.size()) + " fields");
    if (header) {
      for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != kReportColumns[i]) throw Error("unexpected report CSV header");
      header = false;
      continue;
    }
    ImpactReport r;
    r.key.scorer_id = f[0];
    const auto t = parse_test_kind(f[1]);
    const auto p = parse_position(f[4]);
    if (!t || !p) throw Error("bad test or c2 in report CSV");
    r.key.test = *t;
    r.key.prompt_id = f[2];
    r.key.c1 = static_cast<int>(detail::parse_double(f[3]));
    r.key.c2 = *p;
    r.key.bounded = f[5] == "true";
    r.n = static_cast<std::size_t>(detail::parse_double(f[6]));
    r.n_pos_pct = detail::parse_double(f[7]);
    r.n_neg_pct = detail::parse_double(f[8]);
    r.mu_pos_pct = detail::parse_double(f[9]);
    r.mu_neg_pct = detail::parse_double(f[10]);
    r.sigma_pct = detail::parse_double(f[11]);
    r.t_stat = detail::parse_optional(f[12]);
    r.dof = static_cast<std::size_t>(detail::parse_double(f[13]));
    r.p_value = detail::parse_optional(f[14]);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string c1_averages_to_csv(const std::vector<C1Average>& rows) {
  std::string out = "scorer_id,prompt_id,c1,reports,n_pos_pct,n_neg_pct,mu_pos_pct,mu_neg_pct,sigma_pct\n";
  for (const auto& r : rows)
    out += csv_field(r.scorer_id) + ',' + csv_field(r.prompt_id) + ',' + std::to_string(r.c1) + ',' +
           std::to_string(r.means.reports) + ',' + format_number(r.means.n_pos_pct) + ',' +
           format_number(r.means.n_neg_pct) + ',' + format_number(r.means.mu_pos_pct) + ',' +
           format_number(r.means.mu_neg_pct) + ',' + format_number(r.means.sigma_pct) + '\n';
  return out;
}

inline std::string position_averages_to_csv(const std::vector<PositionAverage>& rows) {
  std::string out = "scorer_id,prompt_id,c2,bounded,reports,n_pos_pct,n_neg_pct,mu_pos_pct,mu_neg_pct,sigma_pct\n";
  for (const auto& r : rows)
    out += csv_field(r.scorer_id) + ',' + csv_field(r.prompt_id) + ',' + std::string(to_string(r.c2)) + ',' +
           (r.bounded ? "true" : "false") + ',' + std::to_string(r.means.reports) + ',' +
           format_number(r.means.n_pos_pct) + ',' + format_number(r.means.n_neg_pct) + ',' +
           format_number(r.means.mu_pos_pct) + ',' + format_number(r.means.mu_neg_pct) + ',' +
           format_number(r.means.sigma_pct) + '\n';
  return out;
}

// --- structured ------------------------------------------------------------------

inline nlohmann::json means_to_json(const MetricMeans& m) {
  return {{"reports", m.reports},         {"n_pos_pct", m.n_pos_pct},   {"n_neg_pct", m.n_neg_pct},
          {"mu_pos_pct", m.mu_pos_pct},   {"mu_neg_pct", m.mu_neg_pct}, {"sigma_pct", m.sigma_pct}};
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

/// scorer -> test -> prompt -> list of cells, plus both aggregate tables.
inline nlohmann::json bundle_to_json(const ReportBundle& b) {
  nlohmann::json reports = nlohmann::json::object();
  for (const auto& r : b.reports) {
    auto& cell = reports[r.key.scorer_id][std::string(to_string(r.key.test))][r.key.prompt_id];
    if (cell.is_null()) cell = nlohmann::json::array();
    cell.push_back({{"c1", r.key.c1},
                    {"c2", to_string(r.key.c2)},
                    {"bounded", r.key.bounded},
                    {"n", r.n},
                    {"n_pos_pct", r.n_pos_pct},
                    {"n_neg_pct", r.n_neg_pct},
                    {"mu_pos_pct", r.mu_pos_pct},
                    {"mu_neg_pct", r.mu_neg_pct},
                    {"sigma_pct", r.sigma_pct},
                    {"t_stat", optional_json(r.t_stat)},
                    {"dof", r.dof},
                    {"p_value", optional_json(r.p_value)}});
  }
  nlohmann::json by_c1 = nlohmann::json::array();
  for (const auto& a : b.by_c1) {
    auto j = means_to_json(a.means);
    j["scorer_id"] = a.scorer_id;
    j["prompt_id"] = a.prompt_id;
    j["c1"] = a.c1;
    by_c1.push_back(std::move(j));
  }
  nlohmann::json by_pos = nlohmann::json::array();
  for (const auto& a : b.by_position) {
    auto j = means_to_json(a.means);
    j["scorer_id"] = a.scorer_id;
    j["prompt_id"] = a.prompt_id;
    j["c2"] = to_string(a.c2);
    j["bounded"] = a.bounded;
    by_pos.push_back(std::move(j));
  }
  return {{"reports", reports},
          {"by_c1", by_c1},
          {"by_position", by_pos},
          {"failures",
           {{"perturb", b.failures.perturb}, {"scoring", b.failures.scoring}, {"clamped", b.failures.clamped}}}};
}

// --- SVG -----------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 5> kChartMetrics = {"n_pos_pct", "n_neg_pct", "mu_pos_pct",
                                                                  "mu_neg_pct", "sigma_pct"};

inline double metric_value(const ImpactReport& r, std::string_view metric) {
  if (metric == "n_pos_pct") return r.n_pos_pct;
  if (metric == "n_neg_pct") return r.n_neg_pct;
  if (metric == "mu_pos_pct") return r.mu_pos_pct;
  if (metric == "mu_neg_pct") return r.mu_neg_pct;
  return r.sigma_pct;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Grouped bar chart: one group per test, one bar per scorer. Values are the
/// pooled-prompt reports averaged over c1, c2 and bounded mode.
inline std::string metric_chart_svg(const ReportBundle& b, std::string_view metric) {
  std::vector<TestKind> tests;
  std::vector<std::string> scorers;
  std::map<std::pair<std::string, TestKind>, MetricMeans> cells;
  for (const auto& r : b.reports) {
    if (r.key.prompt_id != kPooledPrompt) continue;
    if (std::find(tests.begin(), tests.end(), r.key.test) == tests.end()) tests.push_back(r.key.test);
    if (std::find(scorers.begin(), scorers.end(), r.key.scorer_id) == scorers.end()) scorers.push_back(r.key.scorer_id);
    cells[{r.key.scorer_id, r.key.test}].add(r);
  }
  std::sort(tests.begin(), tests.end());
  std::sort(scorers.begin(), scorers.end());

  static constexpr std::array<std::string_view, 6> kPalette = {"#4c72b0", "#dd8452", "#55a868",
                                                               "#c44e52", "#8172b3", "#937860"};
  const int group_w = 24 + 16 * static_cast<int>(std::max<std::size_t>(scorers.size(), 1));
  const int left = 60, top = 40, plot_h = 300, bottom = 130;
  const int width = left + 20 + group_w * static_cast<int>(std::max<std::size_t>(tests.size(), 1));
  const int height = top + plot_h + bottom;

  auto value_of = [&](const std::string& s, TestKind t) {
    auto it = cells.find({s, t});
    if (it == cells.end()) return 0.0;
    const auto m = it->second.finished();
    return metric_value(ImpactReport{{}, 0, m.n_pos_pct, m.n_neg_pct, m.mu_pos_pct, m.mu_neg_pct, m.sigma_pct, {}, 0, {}},
                        metric);
  };
  double vmax = 0.0;
  for (const auto& s : scorers)
    for (auto t : tests) vmax = std::max(vmax, value_of(s, t));
  double axis_max = 10.0;
  while (axis_max < vmax) axis_max += 10.0;

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n", width,
                height, width, height);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" +
         xml_escape(metric) + " (pooled prompts)</text>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = axis_max * tick / 5.0;
    const int y = top + plot_h - static_cast<int>(std::lround(plot_h * tick / 5.0));
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#ddd\"/>\n"
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">%g</text>\n",
                  left, y, width - 10, y, left - 4, y + 3, v);
    out += buf;
  }
  for (std::size_t ti = 0; ti < tests.size(); ++ti) {
    const int gx = left + 12 + static_cast<int>(ti) * group_w;
    for (std::size_t si = 0; si < scorers.size(); ++si) {
      const double v = value_of(scorers[si], tests[ti]);
      const int h = static_cast<int>(std::lround(plot_h * v / axis_max));
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%d\" y=\"%d\" width=\"14\" height=\"%d\" fill=\"%s\"><title>%s %s: %.3f</title></rect>\n",
                    gx + static_cast<int>(si) * 16, top + plot_h - h, h,
                    std::string(kPalette[si % kPalette.size()]).c_str(), xml_escape(scorers[si]).c_str(),
                    std::string(to_string(tests[ti])).c_str(), v);
      out += buf;
    }
    const int lx = gx + group_w / 2 - 12;
    const int ly = top + plot_h + 10;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                  "transform=\"rotate(60 %d %d)\">%s</text>\n",
                  lx, ly, lx, ly, std::string(to_string(tests[ti])).c_str());
    out += buf;
  }
  for (std::size_t si = 0; si < scorers.size(); ++si) {
    const int y = top + 4 + static_cast<int>(si) * 14;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"10\" height=\"10\" fill=\"%s\"/>"
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                  width - 150, y, std::string(kPalette[si % kPalette.size()]).c_str(), width - 136, y + 9,
                  xml_escape(scorers[si]).c_str());
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

// --- files -------------------------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

/// Writes the requested renderings into `dir` and returns the file paths.
inline std::vector<std::filesystem::path> emit_report(const ReportBundle& b, const std::vector<ReportFormat>& formats,
                                                      const std::filesystem::path& dir) {
  if (b.reports.empty()) throw Error("report bundle is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    written.push_back(dir / name);
  };
  for (auto f : formats) {
    switch (f) {
      case ReportFormat::Csv:
        put("reports.csv", reports_to_csv(b.reports));
        put("by_c1.csv", c1_averages_to_csv(b.by_c1));
        put("by_position.csv", position_averages_to_csv(b.by_position));
        break;
      case ReportFormat::Json: put("reports.json", bundle_to_json(b).dump(2) + "\n"); break;
      case ReportFormat::Svg:
        for (auto m : kChartMetrics) put("chart_" + std::string(m) + ".svg", metric_chart_svg(b, m));
        break;
    }
  }
  return written;
}

}  // namespace aesrt
