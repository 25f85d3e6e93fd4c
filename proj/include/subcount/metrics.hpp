#pragma once

#include <string>
#include <vector>

#include "subcount/count_table.hpp"

namespace subcount {

// Mean squared error divided by the population variance of the truths, so
// predicting the truth mean everywhere scores exactly 1; anything below 1
// beats that baseline. Errors when the variance is zero.
double normalized_mse(const std::vector<double>& preds, const std::vector<double>& truths);

double mae(const std::vector<double>& preds, const std::vector<double>& truths);

// max(pred/truth, truth/pred); both sides must be positive.
double q_error(double pred, double truth);

// q-error over all rows where both sides are positive; the rest are
// counted, not scored. Quantiles use the midpoint rule for the median and
// the nearest-rank rule for p90.
struct QErrorSummary {
    size_t used = 0;
    size_t skipped = 0;
    double mean = 0.0;
    double median = 0.0;
    double p90 = 0.0;
    double max = 0.0;
};
QErrorSummary q_error_summary(const std::vector<double>& preds,
                              const std::vector<double>& truths);

struct QueryMetrics {
    int query_id = 0;
    size_t cells = 0;
    double mae = 0.0;
    double normalized_mse = 0.0;  // NaN when the truth column has zero variance
};

struct MetricReport {
    size_t cells = 0;
    double normalized_mse = 0.0;
    double mae = 0.0;
    QErrorSummary q;
    std::vector<QueryMetrics> per_query;
};

// Cell-level comparison of a prediction table against exact counts: every
// (graph, node, query) cell is one sample. Tables must describe the same
// graphs, node counts, and query count.
MetricReport position_distribution_error(const PredTable& pred, const CountTable& truth);

// Same comparison on per-graph totals: one sample per (graph, query).
MetricReport totals_error(const PredTable& pred, const CountTable& truth);

void save_metric_report_json(const std::string& path, const MetricReport& r);
void save_metric_report_csv(const std::string& path, const MetricReport& r);

}  // namespace subcount
