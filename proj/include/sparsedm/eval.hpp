#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedm/ingest.hpp"

namespace sparsedm {

/// Per-query metric values plus the corpus mean. The mean runs over queries
/// present in the qrels; judged queries with no relevant document are
/// excluded from the mean and counted in excluded_queries.
struct MetricReport {
  std::string metric;
  std::size_t cutoff = 0;
  std::map<std::string, double> per_query;
  double mean = 0.0;
  std::size_t excluded_queries = 0;

  std::string name() const { return metric + "@" + std::to_string(cutoff); }
};

namespace detail {

/// Ranked doc ids per query, in rank order.
inline std::map<std::string, std::vector<std::string>> ranked_docs(const RunList& run) {
  std::map<std::string, std::vector<std::pair<int, std::string>>> grouped;
  for (const auto& e : run) {
    grouped[e.query_id].emplace_back(e.rank, e.doc_id);
  }
  std::map<std::string, std::vector<std::string>> out;
  for (auto& [query_id, entries] : grouped) {
    std::sort(entries.begin(), entries.end());
    auto& docs = out[query_id];
    docs.reserve(entries.size());
    for (auto& [rank, doc_id] : entries) {
      docs.push_back(std::move(doc_id));
    }
  }
  return out;
}

inline void finalize_mean(MetricReport& report) {
  if (report.per_query.empty()) {
    report.mean = 0.0;
    return;
  }
  double sum = 0.0;
  for (const auto& [query_id, value] : report.per_query) sum += value;
  report.mean = sum / static_cast<double>(report.per_query.size());
}

template <typename PerQuery>
MetricReport per_relevant_query_metric(const std::string& name, std::size_t k,
                                       const RunList& run, const Qrels& qrels,
                                       PerQuery&& per_query) {
  MetricReport report;
  report.metric = name;
  report.cutoff = k;
  const auto ranked = ranked_docs(run);
  const std::vector<std::string> empty;
  for (const auto& [query_id, judged] : qrels.by_query()) {
    bool has_relevant = false;
    for (const auto& [doc_id, rel] : judged) {
      if (rel > 0) {
        has_relevant = true;
        break;
      }
    }
    if (!has_relevant) {
      ++report.excluded_queries;
      continue;
    }
    auto it = ranked.find(query_id);
    const auto& docs = it == ranked.end() ? empty : it->second;
    report.per_query[query_id] = per_query(docs, judged);
  }
  finalize_mean(report);
  return report;
}

}  // namespace detail

/// Reciprocal rank of the first relevant document within the top k, else 0.
inline MetricReport mrr_at_k(const RunList& run, const Qrels& qrels, std::size_t k = 10) {
  return detail::per_relevant_query_metric(
      "mrr", k, run, qrels,
      [&](const std::vector<std::string>& docs,
          const std::map<std::string, int>& judged) {
        for (std::size_t i = 0; i < docs.size() && i < k; ++i) {
          auto jit = judged.find(docs[i]);
          if (jit != judged.end() && jit->second > 0) {
            return 1.0 / static_cast<double>(i + 1);
          }
        }
        return 0.0;
      });
}

/// NDCG with exponential gain 2^rel - 1 and discount 1/log2(rank + 1),
/// normalized by the ideal DCG at the cutoff. Unjudged documents count as
/// non-relevant.
inline MetricReport ndcg_at_k(const RunList& run, const Qrels& qrels, std::size_t k = 10) {
  return detail::per_relevant_query_metric(
      "ndcg", k, run, qrels,
      [&](const std::vector<std::string>& docs,
          const std::map<std::string, int>& judged) {
        double dcg = 0.0;
        for (std::size_t i = 0; i < docs.size() && i < k; ++i) {
          auto jit = judged.find(docs[i]);
          const int rel = jit == judged.end() ? 0 : jit->second;
          if (rel > 0) {
            dcg += (std::pow(2.0, rel) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
          }
        }
        std::vector<int> rels;
        for (const auto& [doc_id, rel] : judged) {
          if (rel > 0) rels.push_back(rel);
        }
        std::sort(rels.begin(), rels.end(), std::greater<>());
        double idcg = 0.0;
        for (std::size_t i = 0; i < rels.size() && i < k; ++i) {
          idcg += (std::pow(2.0, rels[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
        }
        return idcg > 0.0 ? dcg / idcg : 0.0;
      });
}

/// Fraction of judged-relevant documents retrieved within the top k.
inline MetricReport recall_at_k(const RunList& run, const Qrels& qrels,
                                std::size_t k = 1000) {
  return detail::per_relevant_query_metric(
      "recall", k, run, qrels,
      [&](const std::vector<std::string>& docs,
          const std::map<std::string, int>& judged) {
        std::size_t relevant = 0;
        std::size_t found = 0;
        for (const auto& [doc_id, rel] : judged) {
          if (rel > 0) ++relevant;
        }
        for (std::size_t i = 0; i < docs.size() && i < k; ++i) {
          auto jit = judged.find(docs[i]);
          if (jit != judged.end() && jit->second > 0) ++found;
        }
        return static_cast<double>(found) / static_cast<double>(relevant);
      });
}

inline MetricReport metric_at_k(const std::string& metric, const RunList& run,
                                const Qrels& qrels, std::size_t k) {
  if (metric == "mrr") return mrr_at_k(run, qrels, k);
  if (metric == "ndcg") return ndcg_at_k(run, qrels, k);
  if (metric == "recall") return recall_at_k(run, qrels, k);
  throw std::invalid_argument("unknown metric '" + metric +
                              "' (valid: mrr, ndcg, recall)");
}

namespace detail {

// Regularized incomplete beta via the Lentz continued fraction; converges to
// well below the 1e-8 accuracy target for the t-distribution CDF.
inline double ibeta_cf(double a, double b, double x) {
  constexpr double eps = 1e-14;
  constexpr double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

inline double ibeta_reg(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - ln_beta);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * ibeta_cf(a, b, x) / a;
  }
  return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return detail::ibeta_reg(df / 2.0, 0.5, df / (df + t * t));
}

struct TTestResult {
  double t = 0.0;
  double p_raw = 1.0;
  double p_bonferroni = 1.0;
  bool significant = false;  // at alpha = 0.05 on the corrected p
  bool degenerate_variance = false;
  std::size_t n = 0;
};

/// Two-sided paired t-test between aligned per-query vectors, with a
/// Bonferroni correction over `num_comparisons` tests.
inline TTestResult paired_ttest(const std::vector<double>& a,
                                const std::vector<double>& b,
                                std::size_t num_comparisons) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired_ttest: vectors must be aligned");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("paired_ttest: need at least 2 paired observations");
  }
  if (num_comparisons < 1) {
    throw std::invalid_argument("paired_ttest: num_comparisons must be >= 1");
  }
  const std::size_t n = a.size();
  std::vector<double> diffs(n);
  for (std::size_t i = 0; i < n; ++i) diffs[i] = a[i] - b[i];
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double var = ss / static_cast<double>(n - 1);

  TTestResult result;
  result.n = n;
  if (var == 0.0) {
    if (mean == 0.0) {
      result.t = 0.0;
      result.p_raw = 1.0;
    } else {
      result.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
      result.p_raw = 0.0;
      result.degenerate_variance = true;
    }
  } else {
    result.t = mean / std::sqrt(var / static_cast<double>(n));
    result.p_raw = student_t_two_sided_p(result.t, static_cast<double>(n - 1));
  }
  result.p_bonferroni = std::min(1.0, result.p_raw * static_cast<double>(num_comparisons));
  result.significant = result.p_bonferroni < 0.05;
  return result;
}

/// Aligns two metric reports on their shared queries, in query-id order.
inline std::pair<std::vector<double>, std::vector<double>> aligned_per_query(
    const MetricReport& a, const MetricReport& b) {
  std::vector<double> va;
  std::vector<double> vb;
  for (const auto& [query_id, value] : a.per_query) {
    auto it = b.per_query.find(query_id);
    if (it != b.per_query.end()) {
      va.push_back(value);
      vb.push_back(it->second);
    }
  }
  return {std::move(va), std::move(vb)};
}

}  // namespace sparsedm
