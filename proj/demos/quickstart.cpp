// In-memory walkthrough: build a tiny encoded corpus, score it with every
// aggregation strategy and both SDM modes, and print the per-document table.

#include <cstdio>

#include "sparsedm/sparsedm.hpp"

using namespace sparsedm;

int main() {
  CorpusSpec spec;
  spec.num_docs = 5;
  spec.segs_per_doc = 3;
  spec.vocab_size = 40;
  spec.entries_per_seg = 10;
  spec.expansion_entries_per_seg = 2;
  spec.seed = 42;
  const Index index = Index::build(gen_corpus(spec));

  const auto queries = gen_queries(1, 3, spec.vocab_size, 43);
  const QueryRep& q = queries.front();
  std::printf("query %s:", q.query_id.c_str());
  for (const auto& [term, weight] : q.terms) {
    std::printf(" (%u, %.2f)", term, weight);
  }
  std::printf("\n\n%-8s %9s %9s %9s %9s %9s %9s\n", "doc", "rep-max", "score-max",
              "sum", "mean", "exact", "soft");

  SdmParams exact;
  exact.mode = SdmMode::exact;
  SdmParams soft;
  soft.mode = SdmMode::soft;

  for (const auto& doc : index.docs()) {
    std::printf("%-8s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f\n", doc.doc_id.c_str(),
                score_rep_max(q, doc), score_max(q, doc), score_sum(q, doc),
                score_mean(q, doc), sdm_score(q, doc, exact), sdm_score(q, doc, soft));
  }

  const auto top = index.retrieve(q, 3, AggregationStrategy::score_max);
  std::printf("\ntop-%zu by score-max:\n", top.size());
  for (const auto& r : top) {
    std::printf("  %s  %.4f\n", r.doc_id.c_str(), r.score);
  }
  return 0;
}
