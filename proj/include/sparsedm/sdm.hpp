#pragma once

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sparsedm/core.hpp"

namespace sparsedm {

/// Drops every expansion entry of a segment, keeping only self-translations:
/// entries whose term equals the surface token at their position. Length and
/// tokens are unchanged.
inline SegmentRep restrict_to_exact(const SegmentRep& s) {
  if (!s.tokens) {
    throw std::invalid_argument(
        "restrict_to_exact: segment " + s.doc_id + "#" + std::to_string(s.seg_index) +
        " has no token sequence; supply tokens or use soft matching");
  }
  SegmentRep out = s;
  out.entries.clear();
  for (const auto& e : s.entries) {
    if ((*s.tokens)[e.position] == e.term) {
      out.entries.push_back(e);
    }
  }
  return out;
}

/// Unweighted sums of the three potential families over query unigrams,
/// consecutive n-grams, and proximity spans. The SDM score is their
/// lambda-weighted combination, so tuning the lambdas only needs these
/// computed once per (query, document) pair.
struct SdmComponents {
  double term = 0.0;
  double phrase = 0.0;
  double window = 0.0;
};

/// Read-only scoring context for one (query, document, params) triple.
/// In exact mode every segment is restricted to self-translations up front.
/// Phrase and window matches never cross segment boundaries: segments are
/// encoded independently, so positions in different segments are unrelated.
class MatchContext {
 public:
  MatchContext(const QueryRep& q, const DocumentRep& d, const SdmParams& params)
      : terms_(q.terms), params_(params) {
    params_.validate();
    segments_.reserve(d.segments.size());
    for (const auto& seg : d.segments) {
      if (params_.mode == SdmMode::exact) {
        segments_.emplace_back(restrict_to_exact(seg));
      } else {
        segments_.emplace_back(seg);
      }
    }
  }

  std::size_t query_size() const { return terms_.size(); }
  const SdmParams& params() const { return params_; }

  /// Soft individual term matching: lambda_t * w_q^i * max over every
  /// position in every segment of the logit for the term of query index i.
  double psi_st(std::size_t q_term_index) const {
    return params_.lambda_t * term_potential(q_term_index);
  }

  /// Soft phrase matching for the n-gram starting at query index `start`:
  /// the best contiguous alignment of the query n-gram inside one segment.
  double psi_so(std::size_t start) const {
    return params_.lambda_o * phrase_potential(start);
  }

  /// Soft proximity matching: terms of the span matched anywhere within one
  /// document window of params.window_size positions, order-free.
  double psi_su(std::size_t start, std::size_t span) const {
    return params_.lambda_u * window_potential(start, span);
  }

  double term_potential(std::size_t q_term_index) const {
    const auto& [term, weight] = terms_.at(q_term_index);
    double best = 0.0;
    for (const auto& seg : segments_) {
      auto it = seg.term_max.find(term);
      if (it != seg.term_max.end()) {
        best = std::max(best, it->second);
      }
    }
    return weight * best;
  }

  double phrase_potential(std::size_t start) const {
    const std::size_t k = params_.ngram_order - 1;
    if (start + k >= terms_.size()) {
      throw std::out_of_range("phrase span exceeds query length");
    }
    double best = 0.0;
    for (const auto& seg : segments_) {
      if (seg.length <= k) continue;  // segment too short for the phrase
      for (std::uint32_t r = 0; r + k < seg.length; ++r) {
        double sum = 0.0;
        for (std::size_t l = 0; l <= k; ++l) {
          const auto& [term, weight] = terms_[start + l];
          sum += weight * seg.weight_at(r + static_cast<std::uint32_t>(l), term);
        }
        best = std::max(best, sum);
      }
    }
    return best;
  }

  double window_potential(std::size_t start, std::size_t span) const {
    if (start + span > terms_.size()) {
      throw std::out_of_range("window span exceeds query length");
    }
    const std::uint32_t p = static_cast<std::uint32_t>(params_.window_size);
    double best = 0.0;
    for (const auto& seg : segments_) {
      for (std::uint32_t r = 0; r < seg.length; ++r) {
        // window clipped at the segment tail
        const std::uint32_t end = std::min<std::uint64_t>(seg.length,
                                                          std::uint64_t{r} + p);
        double sum = 0.0;
        for (std::size_t h = start; h < start + span; ++h) {
          const auto& [term, weight] = terms_[h];
          sum += weight * seg.max_in_window(term, r, end);
        }
        best = std::max(best, sum);
      }
    }
    return best;
  }

 private:
  struct SegmentView {
    explicit SegmentView(const SegmentRep& seg) : length(seg.length) {
      by_position.resize(seg.length);
      for (const auto& e : seg.entries) {
        by_position[e.position].emplace_back(e.term, e.weight);
        auto& positions = by_term[e.term];
        positions.emplace_back(e.position, e.weight);
        auto [it, inserted] = term_max.emplace(e.term, e.weight);
        if (!inserted) it->second = std::max(it->second, e.weight);
      }
      for (auto& [term, positions] : by_term) {
        std::sort(positions.begin(), positions.end());
      }
    }

    double weight_at(std::uint32_t position, TermId term) const {
      for (const auto& [t, w] : by_position[position]) {
        if (t == term) return w;
      }
      return 0.0;
    }

    double max_in_window(TermId term, std::uint32_t begin, std::uint32_t end) const {
      auto it = by_term.find(term);
      if (it == by_term.end()) return 0.0;
      double best = 0.0;
      auto lo = std::lower_bound(it->second.begin(), it->second.end(),
                                 std::make_pair(begin, 0.0));
      for (; lo != it->second.end() && lo->first < end; ++lo) {
        best = std::max(best, lo->second);
      }
      return best;
    }

    std::uint32_t length;
    std::vector<std::vector<std::pair<TermId, double>>> by_position;
    std::unordered_map<TermId, std::vector<std::pair<std::uint32_t, double>>> by_term;
    std::unordered_map<TermId, double> term_max;
  };

  std::vector<std::pair<TermId, double>> terms_;
  SdmParams params_;
  std::vector<SegmentView> segments_;
};

namespace detail {

/// Proximity spans: (start, length) pairs over the query term sequence.
inline std::vector<std::pair<std::size_t, std::size_t>> proximity_spans(
    std::size_t query_size, const SdmParams& params) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  if (params.proximity_spans == SpanScheme::whole_query) {
    if (query_size > 0) spans.emplace_back(0, query_size);
    return spans;
  }
  if (query_size >= params.ngram_order) {
    for (std::size_t start = 0; start + params.ngram_order <= query_size; ++start) {
      spans.emplace_back(start, params.ngram_order);
    }
  }
  return spans;
}

}  // namespace detail

inline SdmComponents sdm_components(const QueryRep& q, const DocumentRep& d,
                                    const SdmParams& params) {
  MatchContext ctx(q, d, params);
  SdmComponents c;
  for (std::size_t i = 0; i < ctx.query_size(); ++i) {
    c.term += ctx.term_potential(i);
  }
  if (ctx.query_size() >= params.ngram_order) {
    for (std::size_t start = 0; start + params.ngram_order <= ctx.query_size(); ++start) {
      c.phrase += ctx.phrase_potential(start);
    }
  }
  for (const auto& [start, span] : detail::proximity_spans(ctx.query_size(), params)) {
    c.window += ctx.window_potential(start, span);
  }
  return c;
}

/// The full ranking function: sums of the three potentials over query
/// unigrams, consecutive n-grams, and proximity spans.
inline double sdm_score(const QueryRep& q, const DocumentRep& d, const SdmParams& params) {
  const SdmComponents c = sdm_components(q, d, params);
  return params.lambda_t * c.term + params.lambda_o * c.phrase + params.lambda_u * c.window;
}

/// Reference scorer: the identical contract evaluated with plain nested
/// loops over raw entry lists, no per-segment indexes. Kept deliberately
/// independent of MatchContext so the two can cross-check each other.
inline double brute_force_score(const QueryRep& q, const DocumentRep& d,
                                const SdmParams& params) {
  params.validate();

  std::vector<SegmentRep> segs;
  segs.reserve(d.segments.size());
  for (const auto& s : d.segments) {
    if (params.mode == SdmMode::exact) {
      if (!s.tokens) {
        throw std::invalid_argument(
            "brute_force_score: exact mode needs token sequences (doc '" +
            d.doc_id + "')");
      }
      SegmentRep kept = s;
      kept.entries.clear();
      for (const auto& e : s.entries) {
        if ((*s.tokens)[e.position] == e.term) kept.entries.push_back(e);
      }
      segs.push_back(std::move(kept));
    } else {
      segs.push_back(s);
    }
  }

  auto weight_at = [](const SegmentRep& s, std::uint32_t pos, TermId term) {
    for (const auto& e : s.entries) {
      if (e.position == pos && e.term == term) return e.weight;
    }
    return 0.0;
  };

  double term_sum = 0.0;
  for (const auto& [term, qw] : q.terms) {
    double best = 0.0;
    for (const auto& s : segs) {
      for (std::uint32_t pos = 0; pos < s.length; ++pos) {
        best = std::max(best, weight_at(s, pos, term));
      }
    }
    term_sum += qw * best;
  }

  const std::size_t n = params.ngram_order;
  double phrase_sum = 0.0;
  if (q.terms.size() >= n) {
    for (std::size_t start = 0; start + n <= q.terms.size(); ++start) {
      double best = 0.0;
      for (const auto& s : segs) {
        if (s.length < n) continue;
        for (std::uint32_t r = 0; r + n <= s.length; ++r) {
          double sum = 0.0;
          for (std::size_t l = 0; l < n; ++l) {
            const auto& [term, qw] = q.terms[start + l];
            sum += qw * weight_at(s, r + static_cast<std::uint32_t>(l), term);
          }
          best = std::max(best, sum);
        }
      }
      phrase_sum += best;
    }
  }

  const std::uint32_t p = static_cast<std::uint32_t>(params.window_size);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  if (params.proximity_spans == SpanScheme::whole_query) {
    if (!q.terms.empty()) spans.emplace_back(0, q.terms.size());
  } else if (q.terms.size() >= n) {
    for (std::size_t start = 0; start + n <= q.terms.size(); ++start) {
      spans.emplace_back(start, n);
    }
  }
  double window_sum = 0.0;
  for (const auto& [start, span] : spans) {
    double best = 0.0;
    for (const auto& s : segs) {
      for (std::uint32_t r = 0; r < s.length; ++r) {
        double sum = 0.0;
        for (std::size_t h = start; h < start + span; ++h) {
          const auto& [term, qw] = q.terms[h];
          double in_window = 0.0;
          for (std::uint32_t l = r; l < s.length && l < r + p; ++l) {
            in_window = std::max(in_window, weight_at(s, l, term));
          }
          sum += qw * in_window;
        }
        best = std::max(best, sum);
      }
    }
    window_sum += best;
  }

  return params.lambda_t * term_sum + params.lambda_o * phrase_sum +
         params.lambda_u * window_sum;
}

}  // namespace sparsedm
