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

// Present/absent keyphrase metrics: F1@M, F1@5 (dummy padded), R@10, R@Inf,
// macro-averaged per partition.
//
// All inputs are normalized forms. Predictions must be duplicate free.

#ifndef KPAGG_METRICS_H_
#define KPAGG_METRICS_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpagg/aggregation.h"
#include "kpagg/corpus.h"

namespace kpagg {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 2PR/(P+R), or 0 when P+R == 0.
double f1_score(double precision, double recall);

// Precision over the whole prediction. P is 0 when pred is empty.
// Requires gold nonempty.
PRF score_at_m(std::span<const std::string> pred, std::span<const std::string> gold);

// Truncates pred to k. With pad, the precision denominator is k.
PRF score_at_k(std::span<const std::string> pred, std::span<const std::string> gold,
               std::size_t k, bool pad);

double recall_at_inf(std::span<const std::string> all_phrases,
                     std::span<const std::string> gold);

enum class Partition { kPresent, kAbsent };
enum class Metric { kF1AtM, kF1At5, kRAt10, kRAtInf };

inline constexpr std::array<Partition, 2> kPartitions = {Partition::kPresent,
                                                         Partition::kAbsent};
inline constexpr std::array<Metric, 4> kMetrics = {Metric::kF1AtM, Metric::kF1At5,
                                                   Metric::kRAt10, Metric::kRAtInf};

std::string_view to_string(Partition partition);
std::string_view to_string(Metric metric);

enum class EmptyGoldPolicy {
  kExclude,  // documents with no gold in a partition do not count
  kZero,     // they count with a score of 0
};

std::string_view to_string(EmptyGoldPolicy policy);
std::optional<EmptyGoldPolicy> parse_empty_gold_policy(std::string_view name);

struct DocScore {
  std::string doc_id;
  Partition partition = Partition::kPresent;
  Metric metric = Metric::kF1AtM;
  std::optional<double> precision;  // unset for recall-only metrics
  double recall = 0.0;
  std::optional<double> f1;
  bool excluded = false;  // gold empty under kExclude

  // The value that enters the macro average: f1 for F1 metrics, recall else.
  double value() const;
};

// Scores one document in every (partition, metric) cell.
std::vector<DocScore> score_document(const Document& doc, const Prediction& pred,
                                     EmptyGoldPolicy policy = EmptyGoldPolicy::kExclude);

// Same, against an explicit gold partition.
std::vector<DocScore> score_document(std::string_view doc_id, const GoldPartition& gold,
                                     const Prediction& pred,
                                     EmptyGoldPolicy policy = EmptyGoldPolicy::kExclude);

struct MetricCell {
  std::optional<double> value;  // nullopt when no document was included
  std::size_t count = 0;
};

// Mean of value() over non-excluded scores. Scores must share one cell.
MetricCell macro_average(std::span<const DocScore> scores);

struct MetricReport {
  std::string corpus;
  std::string variant;
  std::string strategy;
  std::array<std::array<MetricCell, 4>, 2> table{};  // [partition][metric]

  const MetricCell& cell(Partition p, Metric m) const;
  MetricCell& cell(Partition p, Metric m);
};

// Folds scores from any number of documents into a report.
MetricReport build_report(std::string corpus, std::string variant, std::string strategy,
                          std::span<const DocScore> scores);

inline constexpr std::string_view kCsvHeader =
    "corpus,variant,strategy,partition,metric,value,count";

// CSV rows (no header). Values with 6 decimals, "n/a" for empty cells.
void write_csv_rows(std::ostream& out, const MetricReport& report);
void write_csv(std::ostream& out, std::span<const MetricReport> reports);

// Aligned text table: one row per (variant, strategy), F1@M and F1@5 per
// partition, scaled by 100 with one decimal.
void write_text_table(std::ostream& out, std::span<const MetricReport> reports);

}  // namespace kpagg

#endif  // KPAGG_METRICS_H_
