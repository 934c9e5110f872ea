#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sparsedm/aggregate.hpp"

using namespace sparsedm;

namespace {

SegmentRep seg_of(const std::string& doc_id, std::uint32_t index,
                  std::initializer_list<std::pair<TermId, double>> pooled) {
  // one entry per term at distinct positions; max_pool returns exactly `pooled`
  SegmentRep seg;
  seg.doc_id = doc_id;
  seg.seg_index = index;
  seg.length = static_cast<std::uint32_t>(pooled.size());
  std::uint32_t pos = 0;
  for (const auto& [term, weight] : pooled) {
    seg.entries.push_back({pos++, term, weight});
  }
  return seg;
}

DocumentRep doc_of(std::vector<SegmentRep> segments) {
  DocumentRep doc;
  doc.doc_id = segments.empty() ? "d" : segments.front().doc_id;
  doc.segments = std::move(segments);
  return doc;
}

QueryRep query_of(std::initializer_list<std::pair<TermId, double>> terms) {
  QueryRep q;
  q.query_id = "q";
  q.terms = terms;
  return q;
}

DocumentRep random_doc(std::mt19937_64& rng, std::size_t max_segments = 5) {
  std::uniform_int_distribution<std::size_t> seg_dist(1, max_segments);
  std::uniform_int_distribution<int> n_dist(0, 8);
  std::uniform_int_distribution<TermId> term_dist(0, 29);
  std::uniform_real_distribution<double> w_dist(0.1, 3.0);
  DocumentRep doc;
  doc.doc_id = "d";
  const std::size_t num_segments = seg_dist(rng);
  for (std::uint32_t s = 0; s < num_segments; ++s) {
    SegmentRep seg;
    seg.doc_id = "d";
    seg.seg_index = s;
    seg.length = 10;
    const int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
      const SegmentEntry e{static_cast<std::uint32_t>(i), term_dist(rng), w_dist(rng)};
      bool dup = false;
      for (const auto& other : seg.entries) {
        if (other.position == e.position && other.term == e.term) dup = true;
      }
      if (!dup) seg.entries.push_back(e);
    }
    doc.segments.push_back(std::move(seg));
  }
  return doc;
}

QueryRep random_query(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(0, 6);
  std::uniform_int_distribution<TermId> term_dist(0, 29);
  std::uniform_real_distribution<double> w_dist(0.1, 3.0);
  QueryRep q;
  q.query_id = "q";
  const int n = n_dist(rng);
  for (int i = 0; i < n; ++i) q.terms.emplace_back(term_dist(rng), w_dist(rng));
  return q;
}

}  // namespace

TEST_CASE("aggregate_rep_max") {
  SECTION("coordinate-wise max") {
    const auto doc = doc_of({seg_of("d", 0, {{1, 1.0}, {2, 2.0}}), seg_of("d", 1, {{1, 3.0}})});
    const auto pooled = aggregate_rep_max(doc);
    CHECK(pooled.at(1) == 3.0);
    CHECK(pooled.at(2) == 2.0);
  }
  SECTION("single segment is identity") {
    const auto doc = doc_of({seg_of("d", 0, {{1, 1.0}, {2, 2.0}})});
    CHECK(aggregate_rep_max(doc) == max_pool(doc.segments[0]));
  }
  SECTION("brute-force max across three segments") {
    const auto doc = doc_of(
        {seg_of("d", 0, {{1, 1.0}}), seg_of("d", 1, {{1, 2.0}}), seg_of("d", 2, {{1, 0.5}})});
    CHECK(aggregate_rep_max(doc).at(1) == 2.0);
  }
  SECTION("zero segments rejected") {
    CHECK_THROWS_AS(aggregate_rep_max(DocumentRep{"d", {}}), std::invalid_argument);
  }
}

TEST_CASE("score_rep_max") {
  CHECK(score_rep_max(query_of({{7, 1.0}}),
                      doc_of({seg_of("d", 0, {{7, 2.0}}), seg_of("d", 1, {{7, 5.0}})})) ==
        Catch::Approx(5.0));
  CHECK(score_rep_max(query_of({}), doc_of({seg_of("d", 0, {{7, 2.0}}) })) == 0.0);
  CHECK(score_rep_max(query_of({{7, 2.0}, {9, 1.0}}),
                      doc_of({seg_of("d", 0, {{7, 1.0}}), seg_of("d", 1, {{9, 3.0}})})) ==
        Catch::Approx(5.0));
}

TEST_CASE("score_max") {
  const auto q = query_of({{7, 1.0}, {9, 1.0}});
  SECTION("max over per-segment scores") {
    // per-segment scores 3, 5, 1
    const auto doc = doc_of({seg_of("d", 0, {{7, 3.0}}), seg_of("d", 1, {{7, 5.0}}),
                             seg_of("d", 2, {{9, 1.0}})});
    CHECK(score_max(q, doc) == Catch::Approx(5.0));
  }
  SECTION("single segment") {
    const auto doc = doc_of({seg_of("d", 0, {{7, 3.0}})});
    CHECK(score_max(q, doc) == Catch::Approx(3.0));
  }
  SECTION("segment totals compared, not per-term maxima") {
    const auto doc = doc_of({seg_of("d", 0, {{7, 4.0}}), seg_of("d", 1, {{7, 1.0}, {9, 2.0}})});
    CHECK(score_max(q, doc) == Catch::Approx(4.0));
  }
  SECTION("zero segments rejected") {
    CHECK_THROWS_AS(score_max(q, DocumentRep{"d", {}}), std::invalid_argument);
  }
}

TEST_CASE("score_sum and score_mean") {
  const auto q = query_of({{7, 1.0}});
  const auto doc = doc_of({seg_of("d", 0, {{7, 3.0}}), seg_of("d", 1, {{7, 5.0}})});
  CHECK(score_sum(q, doc) == Catch::Approx(8.0));
  CHECK(score_mean(q, doc) == Catch::Approx(4.0));

  SECTION("single segment identity") {
    const auto one = doc_of({seg_of("d", 0, {{7, 3.0}})});
    CHECK(score_sum(q, one) == Catch::Approx(3.0));
    CHECK(score_mean(q, one) == Catch::Approx(3.0));
  }
  SECTION("appending a zero-score segment") {
    auto extended = doc;
    extended.segments.push_back(seg_of("d", 2, {{12, 9.0}}));  // no query overlap
    CHECK(score_sum(q, extended) == Catch::Approx(score_sum(q, doc)));
    CHECK(score_mean(q, extended) < score_mean(q, doc));
    CHECK(score_mean(q, extended) ==
          Catch::Approx(score_mean(q, doc) * 2.0 / 3.0).epsilon(1e-12));
    // max-style scores unchanged
    CHECK(score_max(q, extended) == Catch::Approx(score_max(q, doc)));
    CHECK(score_rep_max(q, extended) == Catch::Approx(score_rep_max(q, doc)));
  }
}

TEST_CASE("distributivity: score of summed representations equals sum of scores") {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 500; ++iter) {
    const auto q = random_query(rng);
    const auto doc = random_doc(rng);
    const SparseVector qv = query_to_vector(q);

    SparseVector summed;
    double sum_of_scores = 0.0;
    for (const auto& seg : doc.segments) {
      summed = coordinate_sum(summed, max_pool(seg));
      sum_of_scores += dot(qv, max_pool(seg));
    }
    const double score_of_sum = dot(qv, summed);
    CHECK(score_of_sum ==
          Catch::Approx(sum_of_scores).epsilon(1e-9).margin(1e-12));
    CHECK(score_sum(q, doc) ==
          Catch::Approx(sum_of_scores).epsilon(1e-9).margin(1e-12));
  }
}

TEST_CASE("rep-max dominates score-max dominates mean") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 500; ++iter) {
    const auto q = random_query(rng);
    const auto doc = random_doc(rng);
    const double rep_max = score_rep_max(q, doc);
    const double smax = score_max(q, doc);
    const double mean = score_mean(q, doc);
    CHECK(rep_max >= smax - 1e-12);
    CHECK(smax >= mean - 1e-12);
  }
}

TEST_CASE("strategy parsing") {
  CHECK(parse_aggregation("rep-max") == AggregationStrategy::rep_max);
  CHECK(parse_aggregation("score-max") == AggregationStrategy::score_max);
  CHECK(parse_aggregation("sum") == AggregationStrategy::sum);
  CHECK(parse_aggregation("mean") == AggregationStrategy::mean);
  CHECK_THROWS_WITH(parse_aggregation("best"),
                    Catch::Matchers::ContainsSubstring("rep-max"));
  CHECK(std::string(to_string(AggregationStrategy::score_max)) == "score-max");
}
