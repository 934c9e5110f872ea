#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sparsedm {

using TermId = std::uint32_t;

/// Sparse term-weight vector in canonical form: entries sorted by term id,
/// all weights strictly positive. Zero weights are never stored, so two
/// vectors compare equal iff they score equally against every query.
class SparseVector {
 public:
  using Entry = std::pair<TermId, double>;

  SparseVector() = default;

  /// Builds a vector from arbitrary (term, weight) pairs, collapsing
  /// duplicate terms by maximum. Rejects negative weights, drops zeros.
  static SparseVector collapse_max(std::vector<Entry> items) {
    for (const auto& [term, weight] : items) {
      (void)term;
      if (weight < 0.0) {
        throw std::invalid_argument("SparseVector: negative weight");
      }
    }
    std::sort(items.begin(), items.end());
    SparseVector out;
    for (const auto& [term, weight] : items) {
      if (weight == 0.0) {
        continue;
      }
      if (!out.entries_.empty() && out.entries_.back().first == term) {
        out.entries_.back().second = std::max(out.entries_.back().second, weight);
      } else {
        out.entries_.emplace_back(term, weight);
      }
    }
    return out;
  }

  void set(TermId term, double weight) {
    if (weight < 0.0) {
      throw std::invalid_argument("SparseVector: negative weight");
    }
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), term,
        [](const Entry& e, TermId t) { return e.first < t; });
    if (it != entries_.end() && it->first == term) {
      if (weight == 0.0) {
        entries_.erase(it);
      } else {
        it->second = weight;
      }
    } else if (weight != 0.0) {
      entries_.insert(it, {term, weight});
    }
  }

  /// Weight of `term`, 0 when absent.
  double at(TermId term) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), term,
        [](const Entry& e, TermId t) { return e.first < t; });
    if (it != entries_.end() && it->first == term) {
      return it->second;
    }
    return 0.0;
  }

  bool contains(TermId term) const { return at(term) > 0.0; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;  // strictly increasing term ids
};

/// Dot product over shared terms. Two-pointer merge over the sorted entries.
inline double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

/// Coordinate-wise maximum of two sparse vectors.
inline SparseVector coordinate_max(const SparseVector& a, const SparseVector& b) {
  std::vector<SparseVector::Entry> merged;
  merged.reserve(a.size() + b.size());
  merged.insert(merged.end(), a.entries().begin(), a.entries().end());
  merged.insert(merged.end(), b.entries().begin(), b.entries().end());
  return SparseVector::collapse_max(std::move(merged));
}

/// Coordinate-wise sum of two sparse vectors.
inline SparseVector coordinate_sum(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  std::vector<SparseVector::Entry> merged;
  merged.reserve(a.size() + b.size());
  while (ia != a.entries().end() || ib != b.entries().end()) {
    if (ib == b.entries().end() || (ia != a.entries().end() && ia->first < ib->first)) {
      merged.push_back(*ia++);
    } else if (ia == a.entries().end() || ib->first < ia->first) {
      merged.push_back(*ib++);
    } else {
      merged.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  return SparseVector::collapse_max(std::move(merged));
}

/// Encoded query: ordered sequence of (term, weight) pairs. Order matters
/// for n-gram formation; a term may occur more than once.
struct QueryRep {
  std::string query_id;
  std::vector<std::pair<TermId, double>> terms;

  void validate() const {
    for (const auto& [term, weight] : terms) {
      (void)term;
      if (weight < 0.0) {
        throw std::invalid_argument("QueryRep '" + query_id + "': negative term weight");
      }
    }
  }
};

struct SegmentEntry {
  std::uint32_t position;
  TermId term;
  double weight;

  friend bool operator==(const SegmentEntry&, const SegmentEntry&) = default;
};

/// One encoded document segment: a sparse positional logit matrix stored as
/// (position, term, weight) triples, plus the surface token ids when known.
/// Weights are the encoder's log-scaled non-negative outputs; the engine
/// applies no further nonlinearity.
struct SegmentRep {
  std::string doc_id;
  std::uint32_t seg_index = 0;
  std::uint32_t length = 0;  // number of token positions
  std::vector<SegmentEntry> entries;
  std::optional<std::vector<TermId>> tokens;  // size == length when present

  /// Sorts entries by (position, term); duplicate pairs surface in validate().
  void canonicalize() {
    std::sort(entries.begin(), entries.end(),
              [](const SegmentEntry& a, const SegmentEntry& b) {
                return std::tie(a.position, a.term) < std::tie(b.position, b.term);
              });
  }

  void validate() const {
    for (const auto& e : entries) {
      if (e.position >= length) {
        throw std::invalid_argument(
            "SegmentRep " + doc_id + "#" + std::to_string(seg_index) +
            ": entry position " + std::to_string(e.position) +
            " out of range (length " + std::to_string(length) + ")");
      }
      if (e.weight < 0.0) {
        throw std::invalid_argument("SegmentRep " + doc_id + "#" +
                                    std::to_string(seg_index) + ": negative weight");
      }
    }
    std::vector<std::pair<std::uint32_t, TermId>> keys;
    keys.reserve(entries.size());
    for (const auto& e : entries) {
      keys.emplace_back(e.position, e.term);
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
      throw std::invalid_argument("SegmentRep " + doc_id + "#" +
                                  std::to_string(seg_index) +
                                  ": duplicate (position, term) entry");
    }
    if (tokens && tokens->size() != length) {
      throw std::invalid_argument("SegmentRep " + doc_id + "#" +
                                  std::to_string(seg_index) +
                                  ": token sequence size does not match length");
    }
  }
};

/// Ordered list of segments for one document; seg_index runs 0..n-1.
struct DocumentRep {
  std::string doc_id;
  std::vector<SegmentRep> segments;

  void validate() const {
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (segments[i].doc_id != doc_id) {
        throw std::invalid_argument("DocumentRep '" + doc_id +
                                    "': segment carries doc_id '" +
                                    segments[i].doc_id + "'");
      }
      if (segments[i].seg_index != i) {
        throw std::invalid_argument("DocumentRep '" + doc_id +
                                    "': seg_index values not consecutive from 0");
      }
      segments[i].validate();
    }
  }
};

enum class SdmMode { exact, soft };

/// Span construction for the proximity potential: consecutive n-gram spans
/// (the usual instantiation) or one span covering the whole query.
enum class SpanScheme { consecutive, whole_query };

struct SdmParams {
  double lambda_t = 0.85;
  double lambda_o = 0.10;
  double lambda_u = 0.05;
  std::size_t ngram_order = 2;
  std::size_t window_size = 8;
  SdmMode mode = SdmMode::soft;
  SpanScheme proximity_spans = SpanScheme::consecutive;

  void validate() const {
    if (ngram_order < 2) {
      throw std::invalid_argument("SdmParams: ngram_order must be >= 2");
    }
    if (window_size < 1) {
      throw std::invalid_argument("SdmParams: window_size must be >= 1");
    }
    if (lambda_t < 0.0 || lambda_o < 0.0 || lambda_u < 0.0) {
      throw std::invalid_argument("SdmParams: lambda weights must be non-negative");
    }
  }
};

/// Collapses a segment to its bag-of-words vector: for each term, the
/// maximum entry weight over positions.
inline SparseVector max_pool(const SegmentRep& s) {
  std::vector<SparseVector::Entry> items;
  items.reserve(s.entries.size());
  for (const auto& e : s.entries) {
    items.emplace_back(e.term, e.weight);
  }
  return SparseVector::collapse_max(std::move(items));
}

/// Collapses a query to a bag-of-words vector, resolving repeated terms by
/// maximum so the query side stays consistent with max-pooled documents.
inline SparseVector query_to_vector(const QueryRep& q) {
  return SparseVector::collapse_max(q.terms);
}

}  // namespace sparsedm
