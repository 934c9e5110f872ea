#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparsedm/core.hpp"
#include "sparsedm/ingest.hpp"

namespace sparsedm {

namespace detail {

inline std::string padded_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
  return buf;
}

}  // namespace detail

struct CorpusSpec {
  std::size_t num_docs = 10;
  std::size_t segs_per_doc = 3;
  std::size_t vocab_size = 100;
  std::size_t entries_per_seg = 8;
  std::uint64_t seed = 1;
  // extra non-self-translation entries per segment (document expansion)
  std::size_t expansion_entries_per_seg = 0;
  double weight_min = 0.1;  // avoids degenerate zero weights
  double weight_max = 3.0;
  bool allow_empty_docs = false;

  void validate() const {
    if (num_docs < 1 || vocab_size < 1 || entries_per_seg < 1) {
      throw std::invalid_argument("CorpusSpec: counts must be >= 1");
    }
    if (segs_per_doc < 1 && !allow_empty_docs) {
      throw std::invalid_argument("CorpusSpec: segs_per_doc must be >= 1");
    }
    if (weight_min <= 0.0 || weight_max < weight_min) {
      throw std::invalid_argument("CorpusSpec: need 0 < weight_min <= weight_max");
    }
  }
};

/// Deterministic synthetic segment stream. Each segment has one
/// self-translation entry per position (so exact matching works), plus the
/// requested number of expansion entries on other vocabulary terms.
inline std::vector<SegmentRep> gen_corpus(const CorpusSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<TermId> term_dist(
      0, static_cast<TermId>(spec.vocab_size - 1));
  std::uniform_real_distribution<double> weight_dist(spec.weight_min, spec.weight_max);

  std::vector<SegmentRep> segments;
  segments.reserve(spec.num_docs * spec.segs_per_doc);
  for (std::size_t d = 0; d < spec.num_docs; ++d) {
    for (std::size_t s = 0; s < spec.segs_per_doc; ++s) {
      SegmentRep seg;
      seg.doc_id = detail::padded_id("d", d);
      seg.seg_index = static_cast<std::uint32_t>(s);
      seg.length = static_cast<std::uint32_t>(spec.entries_per_seg);
      std::vector<TermId> tokens(seg.length);
      for (std::uint32_t pos = 0; pos < seg.length; ++pos) {
        tokens[pos] = term_dist(rng);
        seg.entries.push_back({pos, tokens[pos], weight_dist(rng)});
      }
      std::uniform_int_distribution<std::uint32_t> pos_dist(0, seg.length - 1);
      for (std::size_t e = 0; e < spec.expansion_entries_per_seg; ++e) {
        // resample until the expansion entry is neither a self-translation
        // nor a duplicate (position, term) pair; give up after a few tries
        for (int attempt = 0; attempt < 16; ++attempt) {
          const std::uint32_t pos = pos_dist(rng);
          const TermId term = term_dist(rng);
          if (term == tokens[pos]) continue;
          bool duplicate = false;
          for (const auto& existing : seg.entries) {
            if (existing.position == pos && existing.term == term) {
              duplicate = true;
              break;
            }
          }
          if (duplicate) continue;
          seg.entries.push_back({pos, term, weight_dist(rng)});
          break;
        }
      }
      seg.tokens = std::move(tokens);
      seg.canonicalize();
      seg.validate();
      segments.push_back(std::move(seg));
    }
  }
  return segments;
}

/// Deterministic queries with distinct terms drawn from the corpus vocab.
inline std::vector<QueryRep> gen_queries(std::size_t count, std::size_t terms_per_query,
                                         std::size_t vocab_size, std::uint64_t seed,
                                         double weight_min = 0.1, double weight_max = 3.0) {
  if (terms_per_query < 1 || terms_per_query > vocab_size) {
    throw std::invalid_argument(
        "gen_queries: need 1 <= terms_per_query <= vocab_size");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<TermId> term_dist(
      0, static_cast<TermId>(vocab_size - 1));
  std::uniform_real_distribution<double> weight_dist(weight_min, weight_max);

  std::vector<QueryRep> queries;
  queries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    QueryRep q;
    q.query_id = detail::padded_id("q", i);
    std::vector<TermId> used;
    while (used.size() < terms_per_query) {
      const TermId t = term_dist(rng);
      if (std::find(used.begin(), used.end(), t) == used.end()) {
        used.push_back(t);
        q.terms.emplace_back(t, weight_dist(rng));
      }
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

/// Builds two documents carrying identical multisets of query-term entries
/// with identical weights: in the first the query terms sit consecutively
/// inside one segment, in the second each occurrence lands in its own
/// segment. Position-agnostic scorers tie on the pair; proximity-aware
/// scorers with a window of at least 2 strictly prefer the adjacent one.
inline std::pair<DocumentRep, DocumentRep> gen_proximity_pair(const QueryRep& query,
                                                              std::uint64_t seed) {
  if (query.terms.size() < 2) {
    throw std::invalid_argument("gen_proximity_pair: query needs >= 2 terms");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight_dist(0.5, 2.5);
  std::uniform_real_distribution<double> filler_weight_dist(0.1, 1.0);
  std::uniform_int_distribution<std::uint32_t> pad_dist(1, 3);

  // filler vocabulary disjoint from the query terms
  TermId filler_base = 0;
  for (const auto& [term, weight] : query.terms) {
    (void)weight;
    filler_base = std::max(filler_base, term + 1);
  }
  std::uniform_int_distribution<TermId> filler_dist(filler_base, filler_base + 31);

  std::vector<double> match_weights;
  match_weights.reserve(query.terms.size());
  for (std::size_t i = 0; i < query.terms.size(); ++i) {
    match_weights.push_back(weight_dist(rng));
  }

  auto filler_entry = [&](SegmentRep& seg, std::uint32_t pos) {
    const TermId t = filler_dist(rng);
    (*seg.tokens)[pos] = t;
    seg.entries.push_back({pos, t, filler_weight_dist(rng)});
  };

  DocumentRep adjacent;
  adjacent.doc_id = "prox_adjacent";
  {
    const std::uint32_t pad_before = pad_dist(rng);
    const std::uint32_t pad_after = pad_dist(rng);
    SegmentRep seg;
    seg.doc_id = adjacent.doc_id;
    seg.seg_index = 0;
    seg.length = pad_before + static_cast<std::uint32_t>(query.terms.size()) + pad_after;
    seg.tokens = std::vector<TermId>(seg.length, 0);
    for (std::uint32_t pos = 0; pos < pad_before; ++pos) filler_entry(seg, pos);
    for (std::size_t i = 0; i < query.terms.size(); ++i) {
      const auto pos = pad_before + static_cast<std::uint32_t>(i);
      (*seg.tokens)[pos] = query.terms[i].first;
      seg.entries.push_back({pos, query.terms[i].first, match_weights[i]});
    }
    for (std::uint32_t pos = seg.length - pad_after; pos < seg.length; ++pos) {
      filler_entry(seg, pos);
    }
    seg.canonicalize();
    seg.validate();
    adjacent.segments.push_back(std::move(seg));
  }

  DocumentRep scattered;
  scattered.doc_id = "prox_scattered";
  for (std::size_t i = 0; i < query.terms.size(); ++i) {
    const std::uint32_t pad_before = pad_dist(rng);
    const std::uint32_t pad_after = pad_dist(rng);
    SegmentRep seg;
    seg.doc_id = scattered.doc_id;
    seg.seg_index = static_cast<std::uint32_t>(i);
    seg.length = pad_before + 1 + pad_after;
    seg.tokens = std::vector<TermId>(seg.length, 0);
    for (std::uint32_t pos = 0; pos < pad_before; ++pos) filler_entry(seg, pos);
    (*seg.tokens)[pad_before] = query.terms[i].first;
    seg.entries.push_back({pad_before, query.terms[i].first, match_weights[i]});
    for (std::uint32_t pos = pad_before + 1; pos < seg.length; ++pos) {
      filler_entry(seg, pos);
    }
    seg.canonicalize();
    seg.validate();
    scattered.segments.push_back(std::move(seg));
  }

  adjacent.validate();
  scattered.validate();
  return {std::move(adjacent), std::move(scattered)};
}

struct SyntheticEvalSet {
  std::vector<SegmentRep> segments;
  std::vector<QueryRep> queries;
  Qrels qrels;
};

/// Corpus with the relevant signal confined to each document's first segment
/// and later segments filled with other queries' terms at lower weights,
/// scattered so no proximity window covers two of them. As more segments are
/// considered, additive aggregation accumulates the cross-query noise while
/// max-style and proximity scorers stay on the signal.
///
/// Layout: document i answers query i. Its segment 0 carries query i's three
/// terms adjacent at weight 2.0. Segments 1..4 each carry the terms of
/// queries i+1 and i+2 (mod n) at weight 0.9, spaced 10 positions apart.
inline SyntheticEvalSet gen_adversarial_corpus(std::size_t num_queries = 10,
                                               std::uint64_t seed = 7) {
  if (num_queries < 3) {
    throw std::invalid_argument("gen_adversarial_corpus: need >= 3 queries");
  }
  constexpr std::size_t kTermsPerQuery = 3;
  constexpr std::size_t kNoiseSegments = 4;
  constexpr double kSignalWeight = 2.0;
  constexpr double kNoiseWeight = 0.9;
  const TermId term_base = 100;
  const TermId filler_term = static_cast<TermId>(
      term_base + num_queries * kTermsPerQuery + 100);

  auto query_term = [&](std::size_t query, std::size_t j) {
    return static_cast<TermId>(term_base + query * kTermsPerQuery + j);
  };

  SyntheticEvalSet set;
  std::mt19937_64 rng(seed);
  (void)rng;  // layout is fully deterministic; seed reserved for variants

  for (std::size_t i = 0; i < num_queries; ++i) {
    QueryRep q;
    q.query_id = detail::padded_id("q", i);
    for (std::size_t j = 0; j < kTermsPerQuery; ++j) {
      q.terms.emplace_back(query_term(i, j), 1.0);
    }
    set.queries.push_back(std::move(q));
    set.qrels.add({set.queries.back().query_id, detail::padded_id("d", i), 1});
  }

  for (std::size_t i = 0; i < num_queries; ++i) {
    const std::string doc_id = detail::padded_id("d", i);
    {
      SegmentRep seg;
      seg.doc_id = doc_id;
      seg.seg_index = 0;
      seg.length = kTermsPerQuery + 2;
      std::vector<TermId> tokens(seg.length, filler_term);
      for (std::size_t j = 0; j < kTermsPerQuery; ++j) {
        const auto pos = static_cast<std::uint32_t>(j);
        tokens[pos] = query_term(i, j);
        seg.entries.push_back({pos, tokens[pos], kSignalWeight});
      }
      seg.tokens = std::move(tokens);
      seg.validate();
      set.segments.push_back(std::move(seg));
    }
    for (std::size_t s = 1; s <= kNoiseSegments; ++s) {
      SegmentRep seg;
      seg.doc_id = doc_id;
      seg.seg_index = static_cast<std::uint32_t>(s);
      const std::size_t qa = (i + 1) % num_queries;
      const std::size_t qb = (i + 2) % num_queries;
      // interleave the two noise queries' terms 10 positions apart so no
      // window of size <= 10 ever covers two terms of the same query
      seg.length = 51;
      std::vector<TermId> tokens(seg.length, filler_term);
      for (std::size_t j = 0; j < kTermsPerQuery; ++j) {
        const auto pos_a = static_cast<std::uint32_t>(20 * j);
        const auto pos_b = static_cast<std::uint32_t>(20 * j + 10);
        tokens[pos_a] = query_term(qa, j);
        tokens[pos_b] = query_term(qb, j);
        seg.entries.push_back({pos_a, tokens[pos_a], kNoiseWeight});
        seg.entries.push_back({pos_b, tokens[pos_b], kNoiseWeight});
      }
      seg.tokens = std::move(tokens);
      seg.canonicalize();
      seg.validate();
      set.segments.push_back(std::move(seg));
    }
  }
  return set;
}

struct SyntheticTripletSet {
  std::vector<SegmentRep> segments;
  std::vector<QueryRep> queries;
  std::vector<TripletRecord> triplets;
};

/// Triplets where adjacency alone determines relevance: positive and
/// negative documents carry identical query-term weights, but only the
/// positive has the terms in one contiguous run. Bag-of-words potentials tie
/// on every pair, so any tuner that separates them must put weight on the
/// phrase or proximity potentials.
inline SyntheticTripletSet gen_proximity_triplets(std::size_t count, std::uint64_t seed) {
  if (count < 1) {
    throw std::invalid_argument("gen_proximity_triplets: count must be >= 1");
  }
  SyntheticTripletSet set;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> num_terms_dist(2, 4);
  std::uniform_real_distribution<double> qweight_dist(0.5, 2.0);

  for (std::size_t i = 0; i < count; ++i) {
    QueryRep q;
    q.query_id = detail::padded_id("tq", i);
    const std::size_t num_terms = num_terms_dist(rng);
    const TermId base = static_cast<TermId>(1000 + i * 64);
    for (std::size_t j = 0; j < num_terms; ++j) {
      q.terms.emplace_back(base + static_cast<TermId>(j), qweight_dist(rng));
    }

    auto [adjacent, scattered] = gen_proximity_pair(q, seed ^ (0x9e3779b9ull * (i + 1)));
    const std::string positive_id = detail::padded_id("tp", i);
    const std::string negative_id = detail::padded_id("tn", i);
    for (auto& seg : adjacent.segments) {
      seg.doc_id = positive_id;
      set.segments.push_back(std::move(seg));
    }
    for (auto& seg : scattered.segments) {
      seg.doc_id = negative_id;
      set.segments.push_back(std::move(seg));
    }
    set.triplets.push_back({q.query_id, positive_id, negative_id});
    set.queries.push_back(std::move(q));
  }
  return set;
}

}  // namespace sparsedm
