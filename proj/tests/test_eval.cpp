#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sparsedm/eval.hpp"

using namespace sparsedm;

namespace {

RunList run_of(const std::string& query_id, const std::vector<std::string>& docs) {
  RunList run;
  int rank = 1;
  double score = static_cast<double>(docs.size());
  for (const auto& doc : docs) {
    run.push_back({query_id, doc, rank++, score--, "t"});
  }
  return run;
}

RunList concat(std::initializer_list<RunList> runs) {
  RunList all;
  for (const auto& run : runs) all.insert(all.end(), run.begin(), run.end());
  return all;
}

}  // namespace

TEST_CASE("mrr@k") {
  Qrels qrels;
  qrels.add({"q1", "d2", 1});

  SECTION("first relevant at rank 2") {
    const auto report = mrr_at_k(run_of("q1", {"d1", "d2", "d3"}), qrels, 10);
    CHECK(report.per_query.at("q1") == Catch::Approx(0.5));
    CHECK(report.mean == Catch::Approx(0.5));
  }
  SECTION("no relevant inside the cutoff") {
    std::vector<std::string> docs;
    for (int i = 0; i < 10; ++i) docs.push_back("x" + std::to_string(i));
    docs.push_back("d2");  // rank 11
    const auto report = mrr_at_k(run_of("q1", docs), qrels, 10);
    CHECK(report.per_query.at("q1") == 0.0);
  }
  SECTION("mean over queries") {
    qrels.add({"q2", "e4", 1});
    const auto run = concat({run_of("q1", {"d2"}),
                             run_of("q2", {"e1", "e2", "e3", "e4"})});
    const auto report = mrr_at_k(run, qrels, 10);
    CHECK(report.per_query.at("q1") == Catch::Approx(1.0));
    CHECK(report.per_query.at("q2") == Catch::Approx(0.25));
    CHECK(report.mean == Catch::Approx(0.625));
  }
  SECTION("judged query missing from the run counts as zero") {
    qrels.add({"q9", "d1", 2});
    const auto report = mrr_at_k(run_of("q1", {"d2"}), qrels, 10);
    CHECK(report.per_query.at("q9") == 0.0);
    CHECK(report.mean == Catch::Approx(0.5));
  }
  SECTION("queries without relevant docs are excluded and counted") {
    Qrels only_negatives;
    only_negatives.add({"q1", "d2", 1});
    only_negatives.add({"q8", "d1", 0});
    const auto report = mrr_at_k(run_of("q1", {"d2"}), only_negatives, 10);
    CHECK(report.excluded_queries == 1);
    CHECK(report.per_query.size() == 1);
    CHECK(report.mean == Catch::Approx(1.0));
  }
}

TEST_CASE("ndcg@k") {
  Qrels qrels;
  qrels.add({"q1", "rel", 1});

  SECTION("single relevant at rank 1") {
    CHECK(ndcg_at_k(run_of("q1", {"rel", "x"}), qrels, 10).mean == Catch::Approx(1.0));
  }
  SECTION("single relevant at rank 2") {
    CHECK(ndcg_at_k(run_of("q1", {"x", "rel"}), qrels, 10).mean ==
          Catch::Approx(0.6309297535714575).epsilon(1e-12));
  }
  SECTION("no relevant retrieved") {
    CHECK(ndcg_at_k(run_of("q1", {"x", "y"}), qrels, 10).mean == 0.0);
  }
  SECTION("graded gains") {
    Qrels graded;
    graded.add({"q1", "good", 2});
    graded.add({"q1", "ok", 1});
    // ideal: good then ok -> idcg = 3 + 1/log2(3)
    const double idcg = 3.0 + 1.0 / std::log2(3.0);
    // run: ok then good -> dcg = 1 + 3/log2(3)
    const double dcg = 1.0 + 3.0 / std::log2(3.0);
    CHECK(ndcg_at_k(run_of("q1", {"ok", "good"}), graded, 10).mean ==
          Catch::Approx(dcg / idcg).epsilon(1e-12));
  }
  SECTION("ideally ordered run scores 1 for every judged query") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> rel_dist(1, 3);
    Qrels graded;
    std::vector<std::pair<int, std::string>> docs;
    for (int i = 0; i < 8; ++i) {
      const int rel = rel_dist(rng);
      const std::string id = "d" + std::to_string(i);
      graded.add({"q1", id, rel});
      docs.emplace_back(rel, id);
    }
    std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<std::string> ideal;
    for (auto& [rel, id] : docs) ideal.push_back(id);
    CHECK(ndcg_at_k(run_of("q1", ideal), graded, 10).mean == Catch::Approx(1.0));
  }
}

TEST_CASE("recall@k") {
  Qrels qrels;
  qrels.add({"q1", "r1", 1});
  qrels.add({"q1", "r2", 1});
  qrels.add({"q1", "r3", 2});
  qrels.add({"q1", "r4", 1});

  SECTION("3 of 4 within the cutoff") {
    const auto report =
        recall_at_k(run_of("q1", {"r1", "x", "r2", "r3"}), qrels, 1000);
    CHECK(report.mean == Catch::Approx(0.75));
  }
  SECTION("all relevant retrieved") {
    const auto report = recall_at_k(run_of("q1", {"r1", "r2", "r3", "r4"}), qrels, 1000);
    CHECK(report.mean == Catch::Approx(1.0));
  }
  SECTION("cutoff below the relevant ranks") {
    const auto report = recall_at_k(run_of("q1", {"x", "r1", "r2", "r3", "r4"}), qrels, 2);
    CHECK(report.mean == Catch::Approx(0.25));
    CHECK(report.mean < 1.0);
  }
}

TEST_CASE("metrics depend only on ranks, not score magnitudes") {
  Qrels qrels;
  qrels.add({"q1", "d2", 1});
  qrels.add({"q1", "d5", 2});
  const auto docs = std::vector<std::string>{"d1", "d2", "d3", "d4", "d5"};
  RunList run_a = run_of("q1", docs);
  RunList run_b = run_of("q1", docs);
  for (auto& e : run_b) e.score = e.score * 1000.0 + 7.0;  // monotone rescale
  for (std::size_t k : {1u, 3u, 5u}) {
    CHECK(mrr_at_k(run_a, qrels, k).mean == mrr_at_k(run_b, qrels, k).mean);
    CHECK(ndcg_at_k(run_a, qrels, k).mean == ndcg_at_k(run_b, qrels, k).mean);
    CHECK(recall_at_k(run_a, qrels, k).mean == recall_at_k(run_b, qrels, k).mean);
  }
}

TEST_CASE("metric cutoffs are monotone") {
  std::mt19937_64 rng(77);
  Qrels qrels;
  std::vector<std::string> docs;
  for (int i = 0; i < 30; ++i) docs.push_back("d" + std::to_string(i));
  std::uniform_int_distribution<int> rel_dist(0, 1);
  for (const auto& d : docs) {
    qrels.add({"q1", d, rel_dist(rng)});
  }
  std::shuffle(docs.begin(), docs.end(), rng);
  const RunList run = run_of("q1", docs);
  double mrr_prev = 0.0;
  double recall_prev = 0.0;
  for (std::size_t k = 1; k <= 30; k += 3) {
    const double mrr = mrr_at_k(run, qrels, k).mean;
    const double recall = recall_at_k(run, qrels, k).mean;
    REQUIRE(mrr >= mrr_prev - 1e-12);
    REQUIRE(recall >= recall_prev - 1e-12);
    mrr_prev = mrr;
    recall_prev = recall;
    // NDCG@k is normalized by the ideal DCG at the same cutoff, so it is
    // bounded but not monotone in k: a deeper ideal pool can outgrow the
    // achieved DCG.
    const double ndcg = ndcg_at_k(run, qrels, k).mean;
    REQUIRE(ndcg >= 0.0);
    REQUIRE(ndcg <= 1.0 + 1e-12);
  }
}

TEST_CASE("paired t-test") {
  SECTION("identical vectors give p = 1") {
    const std::vector<double> a = {0.5, 0.6, 0.7};
    const auto result = paired_ttest(a, a, 1);
    CHECK(result.t == 0.0);
    CHECK(result.p_raw == 1.0);
    CHECK_FALSE(result.significant);
    CHECK_FALSE(result.degenerate_variance);
  }
  SECTION("mean-zero differences give t = 0, p = 1") {
    const std::vector<double> a = {1.0, 0.0, 1.0, 0.0};
    const std::vector<double> b = {0.0, 1.0, 0.0, 1.0};
    const auto result = paired_ttest(a, b, 1);
    CHECK(result.t == Catch::Approx(0.0));
    CHECK(result.p_raw == Catch::Approx(1.0));
  }
  SECTION("zero variance with nonzero mean is degenerate") {
    const std::vector<double> a = {1.0, 1.0, 1.0};
    const std::vector<double> b = {0.0, 0.0, 0.0};
    const auto result = paired_ttest(a, b, 1);
    CHECK(result.degenerate_variance);
    CHECK(result.p_raw == 0.0);
    CHECK(result.significant);
  }
  SECTION("fewer than two observations rejected") {
    CHECK_THROWS_AS(paired_ttest({1.0}, {0.5}, 1), std::invalid_argument);
    CHECK_THROWS_AS(paired_ttest({1.0, 2.0}, {0.5}, 1), std::invalid_argument);
  }
  SECTION("bonferroni correction clamps at 1") {
    const std::vector<double> a = {0.4, 0.1, 0.9, 0.2};
    const std::vector<double> b = {0.35, 0.2, 0.8, 0.25};
    const auto one = paired_ttest(a, b, 1);
    const auto many = paired_ttest(a, b, 1000);
    CHECK(many.p_bonferroni == 1.0);
    CHECK(one.p_bonferroni == Catch::Approx(one.p_raw));
  }
}

TEST_CASE("t-test matches the reference statistics oracle") {
  // expected (t, p) computed with an independent reference implementation
  struct Fixture {
    std::vector<double> diffs;
    double t;
    double p;
  };
  const std::vector<Fixture> fixtures = {
      {{0.1, 0.2, 0.15, 0.05, 0.1}, 4.706787243316417, 0.009261696759514418},
      {{0.3, -0.1, 0.2, 0.05}, 1.2857142857142856, 0.2887985136300855},
      {{0.01, 0.02, -0.005, 0.0, 0.015, 0.01, -0.02, 0.03}, 1.361227819459545,
       0.215634925402144},
      {{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, 4.582575694955841, 0.00593354451759226},
      {{-0.5, -0.25, -0.75, -0.1, -0.4, -0.6, -0.3}, -4.955274414757214,
       0.0025643569175555756},
      {{0.12, -0.08, 0.33, 0.02, -0.15, 0.27, 0.19, -0.04, 0.08, 0.11},
       1.761976038643646, 0.11191327946463747},
      {{2.5, 2.5, 2.5, 2.4}, 98.99999999999991, 2.2719860723196913e-06},
      {{0.001, -0.001, 0.002, -0.002, 0.0015}, 0.39056673294247163,
       0.7160258860061491},
      {{0.45, 0.32, 0.51, 0.29, 0.38, 0.41, 0.36, 0.47, 0.33, 0.44, 0.39, 0.5},
       19.53688248552676, 6.870447965599342e-10},
      {{-0.02, 0.05, -0.01, 0.04, -0.03, 0.02, 0.01, -0.05, 0.03, 0.0, -0.04, 0.06,
        -0.06, 0.07, 0.018},
       0.5617072133069819, 0.5831966063261849},
  };
  for (const auto& fixture : fixtures) {
    const std::vector<double> zeros(fixture.diffs.size(), 0.0);
    const auto result = paired_ttest(fixture.diffs, zeros, 1);
    CHECK_THAT(result.t, Catch::Matchers::WithinAbs(fixture.t, 1e-6) ||
                             Catch::Matchers::WithinRel(fixture.t, 1e-9));
    CHECK_THAT(result.p_raw, Catch::Matchers::WithinAbs(fixture.p, 1e-6));
  }
}

TEST_CASE("aligned_per_query intersects on query ids") {
  MetricReport a;
  a.per_query = {{"q1", 0.5}, {"q2", 0.25}, {"q3", 1.0}};
  MetricReport b;
  b.per_query = {{"q2", 0.5}, {"q3", 0.75}, {"q4", 0.1}};
  const auto [va, vb] = aligned_per_query(a, b);
  REQUIRE(va.size() == 2);
  CHECK(va == std::vector<double>{0.25, 1.0});
  CHECK(vb == std::vector<double>{0.5, 0.75});
}
