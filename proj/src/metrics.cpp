#include "subcount/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "subcount/error.hpp"

namespace subcount {

namespace {

void check_lengths(const std::vector<double>& preds, const std::vector<double>& truths) {
    if (preds.size() != truths.size())
        throw ValidationError("metrics: prediction/truth length mismatch");
}

double population_variance(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / static_cast<double>(xs.size());
}

// Flattens aligned tables into (pred, truth) vectors, whole cells or
// per-graph totals.
void flatten(const PredTable& pred, const CountTable& truth, bool totals,
             std::vector<double>& p, std::vector<double>& t, std::vector<int>& query_of) {
    if (pred.num_queries != truth.num_queries)
        throw ValidationError("metrics: tables disagree on query count");
    if (pred.graphs.size() != truth.graphs.size())
        throw ValidationError("metrics: tables disagree on graph count");
    for (size_t g = 0; g < pred.graphs.size(); ++g) {
        const auto& pg = pred.graphs[g];
        const auto& tg = truth.graphs[g];
        if (pg.graph_id != tg.graph_id)
            throw ValidationError("metrics: graph id mismatch at position " + std::to_string(g));
        if (pg.per_node.size() != tg.per_node.size())
            throw ValidationError("metrics: node count mismatch for graph " +
                                  std::to_string(pg.graph_id));
        if (totals) {
            auto pt = pred.totals(pg);
            auto tt = truth.totals(tg);
            for (int q = 0; q < pred.num_queries; ++q) {
                p.push_back(pt[q]);
                t.push_back(static_cast<double>(tt[q]));
                query_of.push_back(q);
            }
        } else {
            for (size_t node = 0; node < pg.per_node.size(); ++node) {
                for (int q = 0; q < pred.num_queries; ++q) {
                    p.push_back(pg.per_node[node][q]);
                    t.push_back(static_cast<double>(tg.per_node[node][q]));
                    query_of.push_back(q);
                }
            }
        }
    }
}

MetricReport build_report(const std::vector<double>& p, const std::vector<double>& t,
                          const std::vector<int>& query_of, int num_queries) {
    MetricReport r;
    r.cells = p.size();
    r.normalized_mse = normalized_mse(p, t);
    r.mae = mae(p, t);
    r.q = q_error_summary(p, t);
    for (int q = 0; q < num_queries; ++q) {
        std::vector<double> pq, tq;
        for (size_t i = 0; i < p.size(); ++i) {
            if (query_of[i] != q) continue;
            pq.push_back(p[i]);
            tq.push_back(t[i]);
        }
        QueryMetrics qm;
        qm.query_id = q;
        qm.cells = pq.size();
        qm.mae = mae(pq, tq);
        qm.normalized_mse = population_variance(tq) > 0.0
                                ? normalized_mse(pq, tq)
                                : std::numeric_limits<double>::quiet_NaN();
        r.per_query.push_back(qm);
    }
    return r;
}

}  // namespace

double normalized_mse(const std::vector<double>& preds, const std::vector<double>& truths) {
    check_lengths(preds, truths);
    if (truths.size() < 2) throw ValidationError("normalized_mse: need at least two samples");
    double var = population_variance(truths);
    if (var <= 0.0) throw ValidationError("normalized_mse: truth variance is zero");
    double mse = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        double d = preds[i] - truths[i];
        mse += d * d;
    }
    mse /= static_cast<double>(preds.size());
    return mse / var;
}

double mae(const std::vector<double>& preds, const std::vector<double>& truths) {
    check_lengths(preds, truths);
    if (preds.empty()) throw ValidationError("mae: empty input");
    double sum = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) sum += std::fabs(preds[i] - truths[i]);
    return sum / static_cast<double>(preds.size());
}

double q_error(double pred, double truth) {
    if (pred <= 0.0 || truth <= 0.0) throw ValidationError("q_error: inputs must be positive");
    return std::max(pred / truth, truth / pred);
}

QErrorSummary q_error_summary(const std::vector<double>& preds,
                              const std::vector<double>& truths) {
    check_lengths(preds, truths);
    QErrorSummary s;
    std::vector<double> qs;
    for (size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] > 0.0 && truths[i] > 0.0)
            qs.push_back(q_error(preds[i], truths[i]));
        else
            s.skipped += 1;
    }
    s.used = qs.size();
    if (qs.empty()) return s;
    std::sort(qs.begin(), qs.end());
    for (double q : qs) s.mean += q;
    s.mean /= static_cast<double>(qs.size());
    size_t n = qs.size();
    s.median = n % 2 == 1 ? qs[n / 2] : 0.5 * (qs[n / 2 - 1] + qs[n / 2]);
    size_t rank = static_cast<size_t>(std::ceil(0.9 * static_cast<double>(n)));
    s.p90 = qs[std::max<size_t>(rank, 1) - 1];
    s.max = qs.back();
    return s;
}

MetricReport position_distribution_error(const PredTable& pred, const CountTable& truth) {
    std::vector<double> p, t;
    std::vector<int> query_of;
    flatten(pred, truth, false, p, t, query_of);
    if (p.empty()) throw ValidationError("position_distribution_error: empty tables");
    return build_report(p, t, query_of, pred.num_queries);
}

MetricReport totals_error(const PredTable& pred, const CountTable& truth) {
    std::vector<double> p, t;
    std::vector<int> query_of;
    flatten(pred, truth, true, p, t, query_of);
    if (p.empty()) throw ValidationError("totals_error: empty tables");
    return build_report(p, t, query_of, pred.num_queries);
}

void save_metric_report_json(const std::string& path, const MetricReport& r) {
    nlohmann::ordered_json j;
    j["cells"] = r.cells;
    j["normalized_mse"] = r.normalized_mse;
    j["mae"] = r.mae;
    j["q_error"] = {{"used", r.q.used},     {"skipped", r.q.skipped}, {"mean", r.q.mean},
                    {"median", r.q.median}, {"p90", r.q.p90},         {"max", r.q.max}};
    nlohmann::ordered_json per_query = nlohmann::ordered_json::array();
    for (const auto& qm : r.per_query) {
        nlohmann::ordered_json qj;
        qj["query_id"] = qm.query_id;
        qj["cells"] = qm.cells;
        qj["mae"] = qm.mae;
        if (std::isnan(qm.normalized_mse))
            qj["normalized_mse"] = nullptr;
        else
            qj["normalized_mse"] = qm.normalized_mse;
        per_query.push_back(std::move(qj));
    }
    j["per_query"] = std::move(per_query);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void save_metric_report_csv(const std::string& path, const MetricReport& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "scope,query_id,metric,value\n";
    auto row = [&](const std::string& scope, const std::string& query, const std::string& metric,
                   double value) {
        out << scope << "," << query << "," << metric << ",";
        if (std::isnan(value))
            out << "nan";
        else
            out << value;
        out << "\n";
    };
    row("all", "", "cells", static_cast<double>(r.cells));
    row("all", "", "normalized_mse", r.normalized_mse);
    row("all", "", "mae", r.mae);
    row("all", "", "q_error_used", static_cast<double>(r.q.used));
    row("all", "", "q_error_skipped", static_cast<double>(r.q.skipped));
    row("all", "", "q_error_mean", r.q.mean);
    row("all", "", "q_error_median", r.q.median);
    row("all", "", "q_error_p90", r.q.p90);
    row("all", "", "q_error_max", r.q.max);
    for (const auto& qm : r.per_query) {
        row("query", std::to_string(qm.query_id), "cells", static_cast<double>(qm.cells));
        row("query", std::to_string(qm.query_id), "mae", qm.mae);
        row("query", std::to_string(qm.query_id), "normalized_mse", qm.normalized_mse);
    }
}

}  // namespace subcount
