// Copyright 2026 The AMSS Authors. All Rights Reserved.
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

// Survey ingestion and the descriptive analysis layer: per-(site, condition)
// means of every normalized attribute, percent-of-scale contrasts between
// conditions and between sites, and a Holm-adjusted Kendall matrix.
//
// Mixed-effects ANOVA is not provided; the contrast table is descriptive.

#ifndef AMSS_SURVEY_HPP_
#define AMSS_SURVEY_HPP_

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "amss/common.hpp"
#include "amss/io.hpp"
#include "amss/perception.hpp"
#include "amss/statistics.hpp"

namespace amss {

inline const std::vector<std::string>& SurveySites() {
  static const std::vector<std::string> kSites = {"GFP", "RTGP"};
  return kSites;
}

inline const std::vector<std::string>& SurveyConditions() {
  static const std::vector<std::string> kConditions = {"AMB", "AMSS"};
  return kConditions;
}

// Five-point single items carried through as normalized attributes.
inline const std::vector<std::string>& SurveySingleItems() {
  static const std::vector<std::string> kItems = {"noi", "nat", "hum", "osq", "appr", "pln"};
  return kItems;
}

// Every attribute of the analysis, in report order.
inline const std::vector<std::string>& SurveyAttributes() {
  static const std::vector<std::string> kAttributes = {
      "isopl", "isoev", "noi", "nat", "hum", "osq", "appr", "pln",
      "pa",    "na",    "fas", "ba",  "com", "ec",  "es"};
  return kAttributes;
}

struct SurveyRecord {
  std::string participant_id;
  std::string site;
  std::string condition;
  PaqRatings paq;
  std::map<std::string, int> single_items;
  PrssResponses prss;
  PanasResponses panas;
};

// Attribute name -> value on [-1, 1].
inline std::map<std::string, double> NormalizedAttributes(const SurveyRecord& r) {
  std::map<std::string, double> out;
  out["isopl"] = ComputeIsopl(r.paq).value();
  out["isoev"] = ComputeIsoev(r.paq).value();
  for (const auto& [name, v] : r.single_items) {
    internal::CheckItem(v, 1, 5, name);
    out[name] = NormalizeScale(v, 1, 5).value();
  }
  const AffectScores affect = PanasScores(r.panas);
  out["pa"] = affect.positive.value();
  out["na"] = affect.negative.value();
  for (const auto& [dim, score] : PrssDimensions(r.prss)) {
    out[std::string(PrssDimensionCode(dim))] = score.value();
  }
  return out;
}

// Parses the survey CSV. Any out-of-range or malformed cell rejects the whole
// file with an error naming the row.
inline std::vector<SurveyRecord> ParseSurveyCsv(std::string_view text) {
  const CsvTable csv = ParseCsv(text);
  const int pid = csv.RequireColumn("participant_id");
  const int site = csv.RequireColumn("site");
  const int cond = csv.RequireColumn("condition");
  static const char* kPaq[] = {"r_pl", "r_ev", "r_ch", "r_vi", "r_un", "r_ca", "r_an", "r_mo"};
  int paq_cols[8];
  for (int i = 0; i < 8; ++i) paq_cols[i] = csv.RequireColumn(kPaq[i]);
  std::map<std::string, int> single_cols;
  for (const auto& name : SurveySingleItems()) single_cols[name] = csv.RequireColumn(name);
  int panas_p[5], panas_n[5];
  for (int i = 0; i < 5; ++i) {
    panas_p[i] = csv.RequireColumn("panas_p" + std::to_string(i + 1));
    panas_n[i] = csv.RequireColumn("panas_n" + std::to_string(i + 1));
  }
  // prss_<dim><k>
  std::vector<std::pair<int, PrssDimension>> prss_cols;
  for (size_t c = 0; c < csv.header.size(); ++c) {
    const std::string& h = csv.header[c];
    if (h.rfind("prss_", 0) != 0) continue;
    std::string code = h.substr(5);
    while (!code.empty() && std::isdigit(static_cast<unsigned char>(code.back()))) code.pop_back();
    prss_cols.emplace_back(static_cast<int>(c), PrssDimensionFromCode(code));
  }

  std::vector<SurveyRecord> records;
  for (size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::string where = "survey row at line " + std::to_string(csv.line_numbers[r]);
    try {
      SurveyRecord rec;
      rec.participant_id = row[pid];
      if (rec.participant_id.empty()) throw ValidationError("empty participant_id");
      rec.site = row[site];
      rec.condition = row[cond];
      if (std::find(SurveySites().begin(), SurveySites().end(), rec.site) == SurveySites().end()) {
        throw ValidationError("site '" + rec.site + "' not in {GFP, RTGP}");
      }
      if (std::find(SurveyConditions().begin(), SurveyConditions().end(), rec.condition) ==
          SurveyConditions().end()) {
        throw ValidationError("condition '" + rec.condition + "' not in {AMB, AMSS}");
      }
      int v[8];
      for (int i = 0; i < 8; ++i) v[i] = ParseInt(row[paq_cols[i]], kPaq[i]);
      rec.paq = {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
      Validate(rec.paq);
      for (const auto& [name, col] : single_cols) {
        const int x = ParseInt(row[col], name);
        internal::CheckItem(x, 1, 5, name);
        rec.single_items[name] = x;
      }
      for (int i = 0; i < 5; ++i) {
        rec.panas.positive_items[i] = ParseInt(row[panas_p[i]], "panas_p");
        rec.panas.negative_items[i] = ParseInt(row[panas_n[i]], "panas_n");
      }
      for (const auto& [col, dim] : prss_cols) {
        rec.prss.items[dim].push_back(ParseInt(row[col], csv.header[col]));
      }
      NormalizedAttributes(rec);  // full range validation
      records.push_back(std::move(rec));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const RangeError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return records;
}

inline std::vector<SurveyRecord> ReadSurveyCsv(const std::filesystem::path& path) {
  return ParseSurveyCsv(ReadFile(path));
}

struct CellSummary {
  int n = 0;
  double mean = 0.0;
  // Sample standard deviation; 0 for a single record.
  double sd = 0.0;
};

struct CellKey {
  std::string site;
  std::string condition;
  auto operator<=>(const CellKey&) const = default;
};

struct ContrastRow {
  std::string attribute;
  // "condition@<site>" compares AMSS against AMB at a site;
  // "site@<condition>" compares RTGP against GFP under a condition.
  std::string contrast;
  CellKey from;
  CellKey to;
  // Absent when either cell has no records.
  std::optional<double> mean_from;
  std::optional<double> mean_to;
  std::optional<double> percent_change;
};

struct ContrastTable {
  std::map<CellKey, std::map<std::string, CellSummary>> cells;
  std::vector<ContrastRow> contrasts;
};

inline CellSummary Summarize(const std::vector<double>& v) {
  CellSummary s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

inline ContrastTable MakeContrastTable(const std::vector<SurveyRecord>& records) {
  std::map<CellKey, std::map<std::string, std::vector<double>>> values;
  for (const auto& r : records) {
    for (const auto& [attr, v] : NormalizedAttributes(r)) values[{r.site, r.condition}][attr].push_back(v);
  }
  ContrastTable table;
  for (const auto& [key, attrs] : values) {
    for (const auto& [attr, v] : attrs) table.cells[key][attr] = Summarize(v);
  }
  auto add = [&](const std::string& attr, const std::string& label, CellKey from, CellKey to) {
    ContrastRow row{attr, label, from, to, std::nullopt, std::nullopt, std::nullopt};
    const auto fi = table.cells.find(from);
    const auto ti = table.cells.find(to);
    if (fi != table.cells.end() && ti != table.cells.end() && fi->second.contains(attr) &&
        ti->second.contains(attr)) {
      row.mean_from = fi->second.at(attr).mean;
      row.mean_to = ti->second.at(attr).mean;
      row.percent_change =
          PercentScaleChange(NormalizedScore(*row.mean_from), NormalizedScore(*row.mean_to));
    }
    table.contrasts.push_back(std::move(row));
  };
  for (const auto& attr : SurveyAttributes()) {
    for (const auto& site : SurveySites()) {
      add(attr, "condition@" + site, {site, "AMB"}, {site, "AMSS"});
    }
    for (const auto& cond : SurveyConditions()) {
      add(attr, "site@" + cond, {"GFP", cond}, {"RTGP", cond});
    }
  }
  return table;
}

namespace internal {

inline std::string FormatNumber(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

inline std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatNumber(*v) : "NA";
}

}  // namespace internal

inline std::string CellsCsv(const ContrastTable& t) {
  std::string out = "site,condition,attribute,n,mean,sd\n";
  for (const auto& [key, attrs] : t.cells) {
    for (const auto& attr : SurveyAttributes()) {
      const auto it = attrs.find(attr);
      if (it == attrs.end()) continue;
      out += key.site + "," + key.condition + "," + attr + "," + std::to_string(it->second.n) + "," +
             internal::FormatNumber(it->second.mean) + "," + internal::FormatNumber(it->second.sd) + "\n";
    }
  }
  return out;
}

inline std::string ContrastsCsv(const ContrastTable& t) {
  std::string out = "attribute,contrast,from,to,mean_from,mean_to,percent_change\n";
  for (const auto& r : t.contrasts) {
    out += r.attribute + "," + r.contrast + "," + r.from.site + "-" + r.from.condition + "," +
           r.to.site + "-" + r.to.condition + "," + internal::FormatOptional(r.mean_from) + "," +
           internal::FormatOptional(r.mean_to) + "," + internal::FormatOptional(r.percent_change) + "\n";
  }
  return out;
}

// participant_id,site,condition,attribute,value
inline std::string LongFormatCsv(const std::vector<SurveyRecord>& records) {
  std::string out = "participant_id,site,condition,attribute,value\n";
  for (const auto& r : records) {
    const auto attrs = NormalizedAttributes(r);
    for (const auto& attr : SurveyAttributes()) {
      const auto it = attrs.find(attr);
      if (it == attrs.end()) continue;
      out += r.participant_id + "," + r.site + "," + r.condition + "," + attr + "," +
             internal::FormatNumber(it->second) + "\n";
    }
  }
  return out;
}

struct CorrelationCell {
  std::string a;
  std::string b;
  KendallResult kendall;
  double p_holm = 1.0;
};

// Pairwise Kendall tau-b between attributes over all records, with Holm
// adjustment across every defined pair.
inline std::vector<CorrelationCell> KendallMatrix(const std::vector<SurveyRecord>& records,
                                                  const std::vector<std::string>& attributes =
                                                      SurveyAttributes()) {
  std::map<std::string, std::vector<double>> columns;
  for (const auto& r : records) {
    const auto attrs = NormalizedAttributes(r);
    for (const auto& a : attributes) {
      const auto it = attrs.find(a);
      columns[a].push_back(it == attrs.end() ? std::nan("") : it->second);
    }
  }
  std::vector<CorrelationCell> cells;
  std::vector<double> raw;
  std::vector<size_t> defined;
  for (size_t i = 0; i < attributes.size(); ++i) {
    for (size_t j = i + 1; j < attributes.size(); ++j) {
      // Pairwise complete observations.
      std::vector<double> x, y;
      const auto& cx = columns[attributes[i]];
      const auto& cy = columns[attributes[j]];
      for (size_t k = 0; k < cx.size(); ++k) {
        if (!std::isnan(cx[k]) && !std::isnan(cy[k])) {
          x.push_back(cx[k]);
          y.push_back(cy[k]);
        }
      }
      CorrelationCell c{attributes[i], attributes[j], {0.0, 1.0, false}, 1.0};
      if (x.size() >= 2) c.kendall = KendallTauB(x, y);
      if (c.kendall.defined) {
        defined.push_back(cells.size());
        raw.push_back(c.kendall.p_value);
      }
      cells.push_back(std::move(c));
    }
  }
  if (!raw.empty()) {
    const auto adj = HolmAdjust(raw);
    for (size_t k = 0; k < defined.size(); ++k) cells[defined[k]].p_holm = adj[k];
  }
  return cells;
}

inline std::string CorrelationCsv(const std::vector<CorrelationCell>& cells) {
  std::string out = "attribute_a,attribute_b,tau,p,p_holm\n";
  for (const auto& c : cells) {
    out += c.a + "," + c.b + "," + (c.kendall.defined ? internal::FormatNumber(c.kendall.tau) : "NA") +
           "," + (c.kendall.defined ? internal::FormatNumber(c.kendall.p_value) : "NA") + "," +
           (c.kendall.defined ? internal::FormatNumber(c.p_holm) : "NA") + "\n";
  }
  return out;
}

}  // namespace amss

#endif  // AMSS_SURVEY_HPP_
