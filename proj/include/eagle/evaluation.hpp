#pragma once

#include <map>
#include <string>
#include <vector>

#include "eagle/errors.hpp"

namespace eagle {

// Rank-formulation ROC-AUC (Mann-Whitney), ties counted one half.
// Requires both classes present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ScoreEntry {
  std::size_t node = 0;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based, descending score, ties by node index
  int label = 0;
};

struct ScoreReport {
  std::vector<ScoreEntry> entries;  // in rank order
  double auc = 0.0;
  std::map<std::string, double> timings_sec;
};

ScoreReport make_report(const std::vector<double>& scores,
                        const std::vector<int>& labels);

std::vector<std::size_t> top_k(const ScoreReport& report, std::size_t k);
std::vector<std::size_t> above_threshold(const ScoreReport& report,
                                         double threshold);

std::string report_csv(const ScoreReport& report);
std::string report_metrics_json(const ScoreReport& report);

// Plot-ready TSV: dimension <tab> auc, one row per sweep point.
std::string dimension_sweep_tsv(
    const std::vector<std::pair<std::size_t, double>>& points);

}  // namespace eagle
