// Copyright 2026 The kpagg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kpagg/metrics.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>

namespace kpagg {
namespace {

std::size_t CountMatches(std::span<const std::string> pred,
                         std::span<const std::string> gold) {
  const std::unordered_set<std::string_view> gold_set(gold.begin(), gold.end());
  std::size_t matches = 0;
  for (const auto& p : pred) matches += gold_set.count(p);
  return matches;
}

std::size_t DistinctCount(std::span<const std::string> items) {
  return std::unordered_set<std::string_view>(items.begin(), items.end()).size();
}

std::vector<std::string> Forms(std::span<const NormalizedPhrase> phrases) {
  std::vector<std::string> out;
  out.reserve(phrases.size());
  for (const auto& p : phrases) out.push_back(p.normalized);
  return out;
}

std::string FormatValue(const std::optional<double>& v, int decimals, double scale) {
  if (!v) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v * scale);
  return buf;
}

bool IsF1(Metric m) { return m == Metric::kF1AtM || m == Metric::kF1At5; }

}  // namespace

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

PRF score_at_m(std::span<const std::string> pred, std::span<const std::string> gold) {
  return score_at_k(pred, gold, pred.size(), /*pad=*/false);
}

PRF score_at_k(std::span<const std::string> pred, std::span<const std::string> gold,
               std::size_t k, bool pad) {
  const auto top = pred.first(std::min(k, pred.size()));
  const std::size_t gold_size = DistinctCount(gold);
  const std::size_t matches = CountMatches(top, gold);
  const std::size_t denom = pad ? k : top.size();
  PRF r;
  r.precision = denom == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(denom);
  r.recall =
      gold_size == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(gold_size);
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

double recall_at_inf(std::span<const std::string> all_phrases,
                     std::span<const std::string> gold) {
  return score_at_m(all_phrases, gold).recall;
}

std::string_view to_string(Partition partition) {
  return partition == Partition::kPresent ? "present" : "absent";
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kF1AtM:
      return "f1_at_m";
    case Metric::kF1At5:
      return "f1_at_5";
    case Metric::kRAt10:
      return "r_at_10";
    case Metric::kRAtInf:
      return "r_at_inf";
  }
  return "f1_at_m";
}

std::string_view to_string(EmptyGoldPolicy policy) {
  return policy == EmptyGoldPolicy::kZero ? "zero" : "exclude";
}

std::optional<EmptyGoldPolicy> parse_empty_gold_policy(std::string_view name) {
  if (name == "exclude") return EmptyGoldPolicy::kExclude;
  if (name == "zero") return EmptyGoldPolicy::kZero;
  return std::nullopt;
}

double DocScore::value() const {
  return IsF1(metric) ? f1.value_or(0.0) : recall;
}

std::vector<DocScore> score_document(const Document& doc, const Prediction& pred,
                                     EmptyGoldPolicy policy) {
  return score_document(doc.id, partition_gold(doc), pred, policy);
}

std::vector<DocScore> score_document(std::string_view doc_id, const GoldPartition& gold,
                                     const Prediction& pred, EmptyGoldPolicy policy) {
  std::vector<DocScore> out;
  out.reserve(kPartitions.size() * kMetrics.size());
  for (Partition part : kPartitions) {
    const bool present = part == Partition::kPresent;
    const auto gold_forms = Forms(present ? gold.present : gold.absent);
    const auto selected = Forms(present ? pred.present : pred.absent);
    const auto ranked = Forms(present ? pred.ranked_present : pred.ranked_absent);
    for (Metric metric : kMetrics) {
      DocScore s;
      s.doc_id = std::string(doc_id);
      s.partition = part;
      s.metric = metric;
      if (gold_forms.empty()) {
        s.excluded = policy == EmptyGoldPolicy::kExclude;
        if (IsF1(metric)) {
          s.precision = 0.0;
          s.f1 = 0.0;
        }
        out.push_back(std::move(s));
        continue;
      }
      PRF prf;
      switch (metric) {
        case Metric::kF1AtM:
          prf = score_at_m(selected, gold_forms);
          break;
        case Metric::kF1At5:
          prf = score_at_k(ranked, gold_forms, 5, /*pad=*/true);
          break;
        case Metric::kRAt10:
          prf = score_at_k(ranked, gold_forms, 10, /*pad=*/false);
          break;
        case Metric::kRAtInf:
          prf.recall = recall_at_inf(ranked, gold_forms);
          break;
      }
      s.recall = prf.recall;
      if (IsF1(metric)) {
        s.precision = prf.precision;
        s.f1 = prf.f1;
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

MetricCell macro_average(std::span<const DocScore> scores) {
  MetricCell cell;
  double sum = 0.0;
  for (const auto& s : scores) {
    if (s.excluded) continue;
    sum += s.value();
    ++cell.count;
  }
  if (cell.count > 0) cell.value = sum / static_cast<double>(cell.count);
  return cell;
}

const MetricCell& MetricReport::cell(Partition p, Metric m) const {
  return table[static_cast<std::size_t>(p)][static_cast<std::size_t>(m)];
}

MetricCell& MetricReport::cell(Partition p, Metric m) {
  return table[static_cast<std::size_t>(p)][static_cast<std::size_t>(m)];
}

MetricReport build_report(std::string corpus, std::string variant, std::string strategy,
                          std::span<const DocScore> scores) {
  MetricReport report;
  report.corpus = std::move(corpus);
  report.variant = std::move(variant);
  report.strategy = std::move(strategy);
  for (Partition p : kPartitions) {
    for (Metric m : kMetrics) {
      std::vector<DocScore> cell_scores;
      for (const auto& s : scores) {
        if (s.partition == p && s.metric == m) cell_scores.push_back(s);
      }
      report.cell(p, m) = macro_average(cell_scores);
    }
  }
  return report;
}

void write_csv_rows(std::ostream& out, const MetricReport& report) {
  for (Partition p : kPartitions) {
    for (Metric m : kMetrics) {
      const auto& c = report.cell(p, m);
      out << report.corpus << ',' << report.variant << ',' << report.strategy << ','
          << to_string(p) << ',' << to_string(m) << ',' << FormatValue(c.value, 6, 1.0)
          << ',' << c.count << '\n';
    }
  }
}

void write_csv(std::ostream& out, std::span<const MetricReport> reports) {
  out << kCsvHeader << '\n';
  for (const auto& r : reports) write_csv_rows(out, r);
}

void write_text_table(std::ostream& out, std::span<const MetricReport> reports) {
  // Columns: variant, strategy, then for each corpus present/absent F1@M, F1@5.
  std::vector<std::string> corpora;
  std::vector<std::pair<std::string, std::string>> rows;
  std::map<std::tuple<std::string, std::string, std::string>, const MetricReport*> index;
  for (const auto& r : reports) {
    if (std::find(corpora.begin(), corpora.end(), r.corpus) == corpora.end()) {
      corpora.push_back(r.corpus);
    }
    std::pair<std::string, std::string> row{r.variant, r.strategy};
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    index[{r.corpus, r.variant, r.strategy}] = &r;
  }

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"variant", "strategy"};
  for (const auto& c : corpora) {
    for (std::string_view part : {"pre", "abs"}) {
      header.push_back(c + " " + std::string(part) + " F1@M");
      header.push_back(c + " " + std::string(part) + " F1@5");
    }
  }
  grid.push_back(header);
  for (const auto& [variant, strategy] : rows) {
    std::vector<std::string> line = {variant, strategy};
    for (const auto& c : corpora) {
      auto it = index.find({c, variant, strategy});
      for (Partition p : kPartitions) {
        for (Metric m : {Metric::kF1AtM, Metric::kF1At5}) {
          line.push_back(it == index.end() ? "-"
                                           : FormatValue(it->second->cell(p, m).value, 1, 100.0));
        }
      }
    }
    grid.push_back(std::move(line));
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
  }
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) out << "  ";
      const std::size_t pad = widths[i] - line[i].size();
      // Text columns left aligned, numbers right aligned.
      if (i < 2) {
        out << line[i] << std::string(i + 1 == line.size() ? 0 : pad, ' ');
      } else {
        out << std::string(pad, ' ') << line[i];
      }
    }
    out << '\n';
  }
}

}  // namespace kpagg
