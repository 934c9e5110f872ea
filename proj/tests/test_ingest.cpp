#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sparsedm/ingest.hpp"
#include "temp_files.hpp"

using namespace sparsedm;
using testutil::TempDir;
using testutil::read_text;
using testutil::write_text;

TEST_CASE("segment reader parses records in file order") {
  TempDir dir;
  const auto path = dir.file("segments.jsonl");
  write_text(path,
             R"({"doc_id":"d1","seg":0,"len":3,"entries":[[0,7,0.5],[2,9,1.0]]})"
             "\n"
             R"({"doc_id":"d1","seg":1,"len":2,"entries":[[1,7,2.0]],"tokens":[3,7]})"
             "\n");
  SegmentReader reader(path);
  auto first = reader.next();
  REQUIRE(first);
  CHECK(first->doc_id == "d1");
  CHECK(first->seg_index == 0);
  CHECK(first->length == 3);
  REQUIRE(first->entries.size() == 2);
  CHECK(first->entries[0].position == 0);
  CHECK(first->entries[0].term == 7);
  CHECK(first->entries[0].weight == 0.5);
  CHECK_FALSE(first->tokens);

  auto second = reader.next();
  REQUIRE(second);
  CHECK(second->seg_index == 1);
  REQUIRE(second->tokens);
  CHECK((*second->tokens)[1] == 7);
  CHECK_FALSE(reader.next());
}

TEST_CASE("segment reader rejects bad records with line numbers") {
  TempDir dir;
  const auto path = dir.file("segments.jsonl");

  SECTION("position out of range") {
    write_text(path, R"({"doc_id":"d1","seg":0,"len":3,"entries":[[5,7,1.0]]})"
                     "\n");
    SegmentReader reader(path);
    CHECK_THROWS_WITH(reader.next(), Catch::Matchers::ContainsSubstring(":1:"));
  }
  SECTION("negative weight") {
    write_text(path, R"({"doc_id":"d1","seg":0,"len":3,"entries":[[0,7,-1.0]]})"
                     "\n");
    SegmentReader reader(path);
    CHECK_THROWS_AS(reader.next(), std::runtime_error);
  }
  SECTION("malformed JSON carries the line number") {
    write_text(path,
               R"({"doc_id":"d1","seg":0,"len":1,"entries":[]})"
               "\n{not json\n");
    SegmentReader reader(path);
    CHECK(reader.next());
    CHECK_THROWS_WITH(reader.next(), Catch::Matchers::ContainsSubstring(":2:"));
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(SegmentReader(dir.file("absent.jsonl")), std::runtime_error);
  }
}

TEST_CASE("query reader") {
  TempDir dir;
  const auto path = dir.file("queries.jsonl");
  write_text(path,
             R"({"query_id":"q1","terms":[[7,2.0],[9,1.0]]})"
             "\n"
             R"({"query_id":"q2","terms":[]})"
             "\n");
  auto queries = read_encoded_queries(path);
  REQUIRE(queries.size() == 2);
  CHECK(queries[0].query_id == "q1");
  REQUIRE(queries[0].terms.size() == 2);
  CHECK(queries[0].terms[0] == std::pair<TermId, double>{7, 2.0});
  CHECK(queries[1].terms.empty());

  SECTION("negative weight rejected") {
    write_text(path, R"({"query_id":"q3","terms":[[7,-2.0]]})"
                     "\n");
    CHECK_THROWS_AS(read_encoded_queries(path), std::runtime_error);
  }
}

TEST_CASE("encoded representations round-trip") {
  TempDir dir;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w_dist(0.1, 3.0);

  std::vector<SegmentRep> segments;
  for (std::uint32_t s = 0; s < 4; ++s) {
    SegmentRep seg;
    seg.doc_id = "d" + std::to_string(s / 2);
    seg.seg_index = s % 2;
    seg.length = 5;
    for (std::uint32_t pos = 0; pos < 5; ++pos) {
      seg.entries.push_back({pos, pos + s, w_dist(rng)});
    }
    if (s % 2 == 0) {
      seg.tokens = std::vector<TermId>{1, 2, 3, 4, 5};
    }
    segments.push_back(std::move(seg));
  }
  const auto seg_path = dir.file("segments.jsonl");
  write_encoded_segments(seg_path, segments);
  auto loaded = read_encoded_segments(seg_path);
  REQUIRE(loaded.size() == segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    CHECK(loaded[i].doc_id == segments[i].doc_id);
    CHECK(loaded[i].entries == segments[i].entries);
    CHECK(loaded[i].tokens == segments[i].tokens);
  }

  QueryRep q;
  q.query_id = "q1";
  q.terms = {{7, 2.25}, {9, 0.125}, {7, 1.0}};
  const auto q_path = dir.file("queries.jsonl");
  write_encoded_queries(q_path, {q});
  auto queries = read_encoded_queries(q_path);
  REQUIRE(queries.size() == 1);
  CHECK(queries[0].terms == q.terms);
}

TEST_CASE("run files") {
  TempDir dir;
  const auto path = dir.file("run.txt");

  SECTION("format") {
    write_run(path, {{"q1", "d1", 1, 3.5, "tag"}});
    CHECK(read_text(path) == "q1 Q0 d1 1 3.500000 tag\n");
  }
  SECTION("equal scores rank by ascending doc id") {
    auto run = make_run("q1", {{"d2", 1.0}, {"d1", 1.0}, {"d3", 2.0}});
    REQUIRE(run.size() == 3);
    CHECK(run[0].doc_id == "d3");
    CHECK(run[1].doc_id == "d1");
    CHECK(run[2].doc_id == "d2");
    CHECK(run[0].rank == 1);
    CHECK(run[2].rank == 3);
  }
  SECTION("empty run writes an empty file") {
    write_run(path, {});
    CHECK(read_text(path).empty());
  }
  SECTION("round-trip at 6 decimal places") {
    const RunList run = make_run("q1", {{"d1", 1.25}, {"d2", 0.5}});
    write_run(path, run);
    const RunList loaded = read_run(path);
    CHECK(loaded == run);
  }
  SECTION("non-monotone ranks rejected") {
    write_text(path, "q1 Q0 d1 1 2.000000 t\nq1 Q0 d2 3 1.000000 t\n");
    CHECK_THROWS_WITH(read_run(path), Catch::Matchers::ContainsSubstring("rank"));
  }
  SECTION("increasing score within query rejected") {
    write_text(path, "q1 Q0 d1 1 1.000000 t\nq1 Q0 d2 2 2.000000 t\n");
    CHECK_THROWS_AS(read_run(path), std::runtime_error);
  }
}

TEST_CASE("qrels") {
  TempDir dir;
  const auto path = dir.file("qrels.txt");

  SECTION("parse") {
    write_text(path, "q1 0 d1 1\nq1 0 d2 0\nq2 0 d1 2\n");
    const Qrels qrels = read_qrels(path);
    CHECK(qrels.relevance("q1", "d1") == 1);
    CHECK(qrels.relevance("q1", "d2") == 0);
    CHECK(qrels.relevance("q2", "d1") == 2);
    CHECK(qrels.relevance("q9", "d1") == 0);
    CHECK(qrels.query_count() == 2);
    CHECK(qrels.size() == 3);
  }
  SECTION("duplicate judgment rejected") {
    write_text(path, "q1 0 d1 1\nq1 0 d1 1\n");
    CHECK_THROWS_WITH(read_qrels(path), Catch::Matchers::ContainsSubstring(":2:"));
  }
  SECTION("column count enforced") {
    write_text(path, "q1 0 d1\n");
    CHECK_THROWS_WITH(read_qrels(path), Catch::Matchers::ContainsSubstring(":1:"));
  }
  SECTION("round-trip") {
    Qrels qrels;
    qrels.add({"q1", "d1", 1});
    qrels.add({"q2", "d9", 3});
    write_qrels(path, qrels);
    const Qrels loaded = read_qrels(path);
    CHECK(loaded.by_query() == qrels.by_query());
  }
}

TEST_CASE("triplets") {
  TempDir dir;
  const auto path = dir.file("triplets.tsv");

  SECTION("parse") {
    write_text(path, "q1\tdp\tdn\n");
    const auto triplets = read_triplets(path);
    REQUIRE(triplets.size() == 1);
    CHECK(triplets[0] == TripletRecord{"q1", "dp", "dn"});
  }
  SECTION("positive must differ from negative") {
    write_text(path, "q1\td1\td1\n");
    CHECK_THROWS_AS(read_triplets(path), std::runtime_error);
  }
  SECTION("column count enforced with line number") {
    write_text(path, "q1\tdp\tdn\nq2\tdp\n");
    CHECK_THROWS_WITH(read_triplets(path), Catch::Matchers::ContainsSubstring(":2:"));
  }
  SECTION("round-trip") {
    const std::vector<TripletRecord> triplets = {{"q1", "a", "b"}, {"q2", "c", "d"}};
    write_triplets(path, triplets);
    CHECK(read_triplets(path) == triplets);
  }
}
