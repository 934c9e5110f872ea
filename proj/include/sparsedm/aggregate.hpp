#pragma once

#include <stdexcept>
#include <string>

#include "sparsedm/core.hpp"

namespace sparsedm {

/// Long-document aggregation strategies. Sum and mean are single strategies:
/// by distributivity of the dot product they give identical results whether
/// applied to representations or to scores.
enum class AggregationStrategy { rep_max, score_max, sum, mean };

inline const char* to_string(AggregationStrategy s) {
  switch (s) {
    case AggregationStrategy::rep_max: return "rep-max";
    case AggregationStrategy::score_max: return "score-max";
    case AggregationStrategy::sum: return "sum";
    case AggregationStrategy::mean: return "mean";
  }
  return "?";
}

inline AggregationStrategy parse_aggregation(const std::string& name) {
  if (name == "rep-max") return AggregationStrategy::rep_max;
  if (name == "score-max") return AggregationStrategy::score_max;
  if (name == "sum") return AggregationStrategy::sum;
  if (name == "mean") return AggregationStrategy::mean;
  throw std::invalid_argument("unknown aggregation strategy '" + name +
                              "' (valid: rep-max, score-max, sum, mean)");
}

namespace detail {
inline void require_segments(const DocumentRep& d) {
  if (d.segments.empty()) {
    throw std::invalid_argument("document '" + d.doc_id + "' has no segments");
  }
}
}  // namespace detail

/// Document-level vector: coordinate-wise max of per-segment pooled vectors.
inline SparseVector aggregate_rep_max(const DocumentRep& d) {
  detail::require_segments(d);
  SparseVector acc = max_pool(d.segments.front());
  for (std::size_t i = 1; i < d.segments.size(); ++i) {
    acc = coordinate_max(acc, max_pool(d.segments[i]));
  }
  return acc;
}

inline double score_rep_max(const QueryRep& q, const DocumentRep& d) {
  return dot(query_to_vector(q), aggregate_rep_max(d));
}

/// Maximum per-segment relevance score.
inline double score_max(const QueryRep& q, const DocumentRep& d) {
  detail::require_segments(d);
  const SparseVector qv = query_to_vector(q);
  double best = dot(qv, max_pool(d.segments.front()));
  for (std::size_t i = 1; i < d.segments.size(); ++i) {
    best = std::max(best, dot(qv, max_pool(d.segments[i])));
  }
  return best;
}

inline double score_sum(const QueryRep& q, const DocumentRep& d) {
  detail::require_segments(d);
  const SparseVector qv = query_to_vector(q);
  double sum = 0.0;
  for (const auto& seg : d.segments) {
    sum += dot(qv, max_pool(seg));
  }
  return sum;
}

/// Sum of per-segment scores divided by the segment count.
inline double score_mean(const QueryRep& q, const DocumentRep& d) {
  return score_sum(q, d) / static_cast<double>(d.segments.size());
}

inline double aggregate_score(AggregationStrategy strategy, const QueryRep& q,
                              const DocumentRep& d) {
  switch (strategy) {
    case AggregationStrategy::rep_max: return score_rep_max(q, d);
    case AggregationStrategy::score_max: return score_max(q, d);
    case AggregationStrategy::sum: return score_sum(q, d);
    case AggregationStrategy::mean: return score_mean(q, d);
  }
  throw std::logic_error("unreachable aggregation strategy");
}

}  // namespace sparsedm
