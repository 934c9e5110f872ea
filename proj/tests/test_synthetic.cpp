#include <catch2/catch_amalgamated.hpp>

#include "sparsedm/aggregate.hpp"
#include "sparsedm/sdm.hpp"
#include "sparsedm/synthetic.hpp"
#include "temp_files.hpp"

using namespace sparsedm;

namespace {

bool segments_equal(const std::vector<SegmentRep>& a, const std::vector<SegmentRep>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].doc_id != b[i].doc_id || a[i].seg_index != b[i].seg_index ||
        a[i].length != b[i].length || !(a[i].entries == b[i].entries) ||
        a[i].tokens != b[i].tokens) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("gen_corpus is deterministic and well-formed") {
  CorpusSpec spec;
  spec.num_docs = 2;
  spec.segs_per_doc = 2;
  spec.vocab_size = 20;
  spec.entries_per_seg = 6;
  spec.seed = 99;

  const auto first = gen_corpus(spec);
  const auto second = gen_corpus(spec);
  CHECK(segments_equal(first, second));
  CHECK(first.size() == 4);

  for (const auto& seg : first) {
    CHECK_NOTHROW(seg.validate());
    REQUIRE(seg.tokens);
  }

  SECTION("different seed, different stream") {
    CorpusSpec other = spec;
    other.seed = 100;
    CHECK_FALSE(segments_equal(first, gen_corpus(other)));
  }
  SECTION("expansion entries are never self-translations") {
    CorpusSpec expanded = spec;
    expanded.expansion_entries_per_seg = 3;
    for (const auto& seg : gen_corpus(expanded)) {
      std::size_t expansions = 0;
      for (const auto& e : seg.entries) {
        if ((*seg.tokens)[e.position] != e.term) ++expansions;
      }
      CHECK(expansions >= 1);
    }
  }
  SECTION("invalid spec rejected") {
    CorpusSpec bad = spec;
    bad.vocab_size = 0;
    CHECK_THROWS_AS(gen_corpus(bad), std::invalid_argument);
    bad = spec;
    bad.segs_per_doc = 0;
    CHECK_THROWS_AS(gen_corpus(bad), std::invalid_argument);
  }
}

TEST_CASE("generated corpora pass ingest validation") {
  testutil::TempDir dir;
  CorpusSpec spec;
  spec.num_docs = 3;
  spec.segs_per_doc = 2;
  spec.expansion_entries_per_seg = 2;
  spec.seed = 5;
  const auto segments = gen_corpus(spec);
  const auto path = dir.file("segments.jsonl");
  write_encoded_segments(path, segments);
  const auto loaded = read_encoded_segments(path);
  CHECK(segments_equal(segments, loaded));

  const auto queries = gen_queries(4, 3, spec.vocab_size, 6);
  const auto qpath = dir.file("queries.jsonl");
  write_encoded_queries(qpath, queries);
  CHECK(read_encoded_queries(qpath).size() == 4);
}

TEST_CASE("gen_queries draws distinct terms") {
  const auto queries = gen_queries(20, 4, 30, 17);
  CHECK(queries.size() == 20);
  for (const auto& q : queries) {
    REQUIRE(q.terms.size() == 4);
    for (std::size_t i = 0; i < q.terms.size(); ++i) {
      for (std::size_t j = i + 1; j < q.terms.size(); ++j) {
        CHECK(q.terms[i].first != q.terms[j].first);
      }
    }
  }
  CHECK_THROWS_AS(gen_queries(1, 31, 30, 17), std::invalid_argument);
}

TEST_CASE("gen_proximity_pair separation guarantees") {
  const auto queries = gen_queries(40, 3, 50, 23);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    const auto [adjacent, scattered] = gen_proximity_pair(q, 1000 + i);

    // identical query-term entry multisets: bag-of-words scores tie exactly
    CHECK(score_rep_max(q, adjacent) == score_rep_max(q, scattered));

    SdmParams proximity;
    proximity.lambda_t = 0.8;
    proximity.lambda_o = 0.1;
    proximity.lambda_u = 0.1;
    for (const SdmMode mode : {SdmMode::exact, SdmMode::soft}) {
      proximity.mode = mode;
      CHECK(sdm_score(q, adjacent, proximity) > sdm_score(q, scattered, proximity));
    }

    SdmParams unigram;
    unigram.lambda_t = 1.0;
    unigram.lambda_o = 0.0;
    unigram.lambda_u = 0.0;
    CHECK(sdm_score(q, adjacent, unigram) ==
          Catch::Approx(sdm_score(q, scattered, unigram)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gen_proximity_pair(QueryRep{"q", {{1, 1.0}}}, 1),
                  std::invalid_argument);
}

TEST_CASE("gen_proximity_pair is deterministic per seed") {
  const auto queries = gen_queries(1, 3, 50, 29);
  const auto [a1, s1] = gen_proximity_pair(queries[0], 7);
  const auto [a2, s2] = gen_proximity_pair(queries[0], 7);
  CHECK(segments_equal(a1.segments, a2.segments));
  CHECK(segments_equal(s1.segments, s2.segments));
}

TEST_CASE("adversarial corpus shape") {
  const auto set = gen_adversarial_corpus(10, 3);
  CHECK(set.queries.size() == 10);
  CHECK(set.segments.size() == 50);  // 5 segments per document
  CHECK(set.qrels.query_count() == 10);
  for (const auto& seg : set.segments) {
    CHECK_NOTHROW(seg.validate());
    REQUIRE(seg.tokens);
  }
  CHECK_THROWS_AS(gen_adversarial_corpus(2, 3), std::invalid_argument);
}

TEST_CASE("proximity triplets resolve and separate") {
  const auto set = gen_proximity_triplets(10, 77);
  CHECK(set.triplets.size() == 10);
  CHECK(set.queries.size() == 10);
  for (const auto& t : set.triplets) {
    CHECK(t.positive_doc_id != t.negative_doc_id);
  }
  for (const auto& seg : set.segments) {
    CHECK_NOTHROW(seg.validate());
  }
}
