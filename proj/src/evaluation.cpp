#include "eagle/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace eagle {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw DataError("auc: score/label length mismatch");
  }
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (int y : labels) positives += y != 0;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("auc: both classes must be present");
  }

  // Mann-Whitney rank formulation with midranks for ties.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based midrank of the tie group [i, j).
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double u = positive_rank_sum -
                   static_cast<double>(positives) *
                       (static_cast<double>(positives) + 1.0) / 2.0;
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

ScoreReport make_report(const std::vector<double>& scores,
                        const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw DataError("make_report: score/label length mismatch");
  }
  ScoreReport report;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // deterministic tie-break
  });
  report.entries.reserve(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t node = order[r];
    report.entries.push_back({node, scores[node], r + 1, labels[node]});
  }
  report.auc = auc(scores, labels);
  return report;
}

std::vector<std::size_t> top_k(const ScoreReport& report, std::size_t k) {
  k = std::min(k, report.entries.size());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(report.entries[i].node);
  return out;
}

std::vector<std::size_t> above_threshold(const ScoreReport& report,
                                         double threshold) {
  std::vector<std::size_t> out;
  for (const auto& e : report.entries) {
    if (e.score > threshold) out.push_back(e.node);
  }
  return out;
}

std::string report_csv(const ScoreReport& report) {
  std::string out = "node,score,rank,label\n";
  for (const auto& e : report.entries) {
    out += std::to_string(e.node);
    out += ',';
    out += format_double(e.score);
    out += ',';
    out += std::to_string(e.rank);
    out += ',';
    out += std::to_string(e.label);
    out += '\n';
  }
  return out;
}

std::string report_metrics_json(const ScoreReport& report) {
  std::string out = "{\n  \"auc\": " + format_double(report.auc);
  out += ",\n  \"timings_sec\": {";
  bool first = true;
  for (const auto& [name, sec] : report.timings_sec) {
    if (!first) out += ",";
    out += "\n    \"" + name + "\": " + format_double(sec);
    first = false;
  }
  out += first ? "}" : "\n  }";
  out += "\n}\n";
  return out;
}

std::string dimension_sweep_tsv(
    const std::vector<std::pair<std::size_t, double>>& points) {
  std::string out = "dimension\tauc\n";
  for (const auto& [dim, value] : points) {
    out += std::to_string(dim) + "\t" + format_double(value) + "\n";
  }
  return out;
}

}  // namespace eagle
