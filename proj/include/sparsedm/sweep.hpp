#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedm/eval.hpp"
#include "sparsedm/index.hpp"
#include "sparsedm/ingest.hpp"
#include "sparsedm/parallel.hpp"

namespace sparsedm {

struct NamedScorer {
  std::string name;
  Scorer scorer;
};

struct SweepRow {
  std::string scorer;
  std::size_t segments = 0;
  std::string metric;
  double value = 0.0;
};

/// Scores every query against the index and assembles a run, preserving
/// query input order. Parallel across queries.
inline RunList run_queries(const Index& index, const std::vector<QueryRep>& queries,
                           const Scorer& scorer, std::size_t k,
                           std::size_t candidate_pool, const std::string& tag,
                           std::size_t threads = 1) {
  std::vector<RunList> per_query(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    auto results = index.retrieve(queries[i], k, scorer, candidate_pool);
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(results.size());
    for (auto& r : results) scored.emplace_back(std::move(r.doc_id), r.score);
    per_query[i] = make_run(queries[i].query_id, std::move(scored), tag);
  });
  RunList run;
  for (auto& part : per_query) {
    run.insert(run.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return run;
}

/// Rebuilds the corpus truncated to each document's first `s` segments and
/// re-runs every scorer for s = 1..max_segs, reporting MRR@10, NDCG@10 and
/// Recall@1000 per (scorer, segment count).
inline std::vector<SweepRow> run_segment_sweep(
    const Index& full_index, const std::vector<QueryRep>& queries, const Qrels& qrels,
    std::size_t max_segs, const std::vector<NamedScorer>& scorers, std::size_t k = 1000,
    std::size_t candidate_pool = 1000, std::size_t threads = 1) {
  if (max_segs < 1) {
    throw std::invalid_argument("run_segment_sweep: max_segs must be >= 1");
  }
  if (scorers.empty()) {
    throw std::invalid_argument("run_segment_sweep: no scorers requested");
  }

  std::vector<SweepRow> rows;
  for (std::size_t s = 1; s <= max_segs; ++s) {
    std::vector<SegmentRep> truncated;
    for (const auto& doc : full_index.docs()) {
      const std::size_t keep = std::min(s, doc.segments.size());
      for (std::size_t i = 0; i < keep; ++i) {
        truncated.push_back(doc.segments[i]);
      }
    }
    const Index index = Index::build(std::move(truncated));
    for (const auto& named : scorers) {
      const RunList run =
          run_queries(index, queries, named.scorer, k, candidate_pool, named.name, threads);
      const MetricReport reports[] = {mrr_at_k(run, qrels, 10), ndcg_at_k(run, qrels, 10),
                                      recall_at_k(run, qrels, std::min<std::size_t>(k, 1000))};
      for (const auto& report : reports) {
        rows.push_back({named.name, s, report.name(), report.mean});
      }
    }
  }
  return rows;
}

}  // namespace sparsedm
