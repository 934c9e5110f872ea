// Command-line front end: segmenting, indexing, searching, tuning,
// evaluating, segment sweeps, and synthetic data generation.
//
// Machine-readable JSON summaries go to stdout; diagnostics and human
// tables go to stderr. Exit code 0 iff the operation fully succeeded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsedm/sparsedm.hpp"

namespace {

using nlohmann::json;
using namespace sparsedm;

/// JSON configuration files mirroring the flags; nested objects scope
/// subcommands, e.g. {"index": {"search": {"k": 100}}}. Command-line flags
/// take precedence over config values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static void collect(const json& node, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    if (!node.is_object()) {
      throw CLI::FileError("config must be a JSON object");
    }
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto scoped = parents;
        scoped.push_back(key);
        collect(value, std::move(scoped), items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& element : value) {
          item.inputs.push_back(scalar(element));
        }
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return value.dump();
  }
};

struct SdmFlags {
  std::string mode;  // "", "exact", "soft"
  double lambda_t = 0.85;
  double lambda_o = 0.10;
  double lambda_u = 0.05;
  std::size_t ngram = 2;
  std::size_t window = 8;
  std::string su_spans = "ngram";  // or "query"

  void attach(CLI::App* cmd, bool required_mode) {
    auto* opt = cmd->add_option("--sdm", mode, "SDM matching mode: exact or soft")
                    ->check(CLI::IsMember({"exact", "soft"}));
    if (required_mode) opt->required();
    cmd->add_option("--lambda-t", lambda_t, "unigram potential weight");
    cmd->add_option("--lambda-o", lambda_o, "ordered phrase potential weight");
    cmd->add_option("--lambda-u", lambda_u, "unordered window potential weight");
    cmd->add_option("--ngram", ngram, "phrase length (>= 2)");
    cmd->add_option("--window", window, "proximity window size (>= 1)");
    cmd->add_option("--su-spans", su_spans,
                    "proximity span construction: ngram or query")
        ->check(CLI::IsMember({"ngram", "query"}));
  }

  SdmParams params() const {
    SdmParams p;
    p.lambda_t = lambda_t;
    p.lambda_o = lambda_o;
    p.lambda_u = lambda_u;
    p.ngram_order = ngram;
    p.window_size = window;
    p.mode = mode == "exact" ? SdmMode::exact : SdmMode::soft;
    p.proximity_spans =
        su_spans == "query" ? SpanScheme::whole_query : SpanScheme::consecutive;
    p.validate();
    return p;
  }
};

json sdm_params_json(const SdmParams& p) {
  return json{{"lambda_t", p.lambda_t},
              {"lambda_o", p.lambda_o},
              {"lambda_u", p.lambda_u},
              {"ngram", p.ngram_order},
              {"window", p.window_size},
              {"mode", p.mode == SdmMode::exact ? "exact" : "soft"}};
}

Scorer make_scorer(const std::string& name, const SdmFlags& flags) {
  if (name == "sdm-exact" || name == "sdm-soft") {
    SdmFlags copy = flags;
    copy.mode = name == "sdm-exact" ? "exact" : "soft";
    return copy.params();
  }
  return parse_aggregation(name);  // throws with the valid names listed
}

std::vector<std::string> split_csv(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_segment(const std::string& input, const std::string& out_path,
                std::size_t max_tokens) {
  SegmenterConfig cfg;
  cfg.max_tokens = max_tokens;
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open '" + input + "'");
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");

  std::size_t docs = 0;
  std::size_t segments = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(input + ":" + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    const std::string doc_id = j.at("doc_id").get<std::string>();
    const std::string text = j.at("text").get<std::string>();
    const auto sentences = split_sentences(text);
    const auto segs = group_segments(sentences, cfg);
    for (std::size_t s = 0; s < segs.size(); ++s) {
      json rec{{"doc_id", doc_id}, {"seg", s}, {"text", segs[s]}};
      out << rec.dump() << '\n';
    }
    ++docs;
    segments += segs.size();
  }
  std::cout << json{{"command", "segment"},
                    {"documents", docs},
                    {"segments", segments},
                    {"out", out_path}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_index_build(const std::string& segments_path, const std::string& out_dir) {
  SegmentReader reader(segments_path);
  const Index index = Index::build([&] { return reader.next(); });
  index.save(out_dir);
  std::cout << json{{"command", "index-build"},
                    {"docs", index.doc_count()},
                    {"segments", index.segment_count()},
                    {"postings", index.posting_count()},
                    {"terms", index.term_count()},
                    {"has_tokens", index.has_tokens()},
                    {"out", out_dir}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_index_search(const std::string& index_dir, const std::string& queries_path,
                     const std::string& run_path, std::size_t k, std::size_t pool,
                     const Scorer& scorer, const std::string& scorer_name,
                     const std::string& tag, std::size_t threads) {
  const Index index = Index::load(index_dir);
  const auto queries = read_encoded_queries(queries_path);
  const RunList run = run_queries(index, queries, scorer, k, pool, tag, threads);
  write_run(run_path, run);
  std::cout << json{{"command", "index-search"},
                    {"queries", queries.size()},
                    {"results", run.size()},
                    {"scorer", scorer_name},
                    {"k", k},
                    {"pool", pool},
                    {"run", run_path}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_tune(const std::string& triplets_path, const std::string& queries_path,
             const std::string& index_dir, const SdmFlags& flags, double grid_step,
             const std::string& out_path) {
  const Index index = Index::load(index_dir);
  const auto queries = read_encoded_queries(queries_path);
  const auto triplets = read_triplets(triplets_path);
  GridSpec grid;
  grid.step = grid_step;
  const TuneReport report = tune_lambdas(triplets, queries, index, flags.params(), grid);

  json grid_json = json::array();
  for (const auto& point : report.grid) {
    grid_json.push_back(json{{"lambda_t", point.lambda_t},
                             {"lambda_o", point.lambda_o},
                             {"lambda_u", point.lambda_u},
                             {"accuracy", point.accuracy}});
  }
  const json out{{"best", sdm_params_json(report.best)},
                 {"best_accuracy", report.best_accuracy},
                 {"triplets", report.triplet_count},
                 {"grid", grid_json}};
  std::ofstream file(out_path);
  if (!file) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  file << out.dump(2) << '\n';

  std::cout << json{{"command", "tune"},
                    {"grid_points", report.grid.size()},
                    {"best", sdm_params_json(report.best)},
                    {"best_accuracy", report.best_accuracy},
                    {"triplets", report.triplet_count},
                    {"out", out_path}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_eval(const std::string& run_path, const std::string& qrels_path,
             const std::string& metrics_list, const std::string& compare_path,
             std::size_t bonferroni) {
  const RunList run = read_run(run_path);
  const Qrels qrels = read_qrels(qrels_path);

  struct MetricSpec {
    std::string name;
    std::size_t k;
  };
  std::vector<MetricSpec> specs;
  for (const auto& item : split_csv(metrics_list)) {
    const auto at = item.find('@');
    if (at == std::string::npos) {
      throw std::runtime_error("metric '" + item + "' must look like mrr@10");
    }
    specs.push_back({item.substr(0, at),
                     static_cast<std::size_t>(std::stoul(item.substr(at + 1)))});
  }
  if (specs.empty()) throw std::runtime_error("no metrics requested");

  json metrics_json;
  std::vector<MetricReport> reports;
  for (const auto& spec : specs) {
    MetricReport report = metric_at_k(spec.name, run, qrels, spec.k);
    metrics_json[report.name()] = {{"mean", report.mean},
                                   {"queries", report.per_query.size()},
                                   {"excluded", report.excluded_queries}};
    std::fprintf(stderr, "%-12s %10.6f  (%zu queries, %zu excluded)\n",
                 report.name().c_str(), report.mean, report.per_query.size(),
                 report.excluded_queries);
    reports.push_back(std::move(report));
  }

  json out{{"command", "eval"}, {"run", run_path}, {"metrics", metrics_json}};

  if (!compare_path.empty()) {
    const RunList run_b = read_run(compare_path);
    json comparison;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const MetricReport report_b = metric_at_k(specs[i].name, run_b, qrels, specs[i].k);
      const auto [a, b] = aligned_per_query(reports[i], report_b);
      const TTestResult t = paired_ttest(a, b, bonferroni);
      comparison[reports[i].name()] = {{"mean_a", reports[i].mean},
                                       {"mean_b", report_b.mean},
                                       {"t", t.t},
                                       {"p_raw", t.p_raw},
                                       {"p_bonferroni", t.p_bonferroni},
                                       {"significant", t.significant},
                                       {"degenerate_variance", t.degenerate_variance},
                                       {"n", t.n}};
      std::fprintf(stderr,
                   "%-12s A=%.6f B=%.6f t=%+.4f p=%.6g p_bonf=%.6g%s%s\n",
                   reports[i].name().c_str(), reports[i].mean, report_b.mean, t.t,
                   t.p_raw, t.p_bonferroni, t.significant ? " *" : "",
                   t.degenerate_variance ? " (degenerate variance)" : "");
    }
    out["comparison"] = comparison;
    out["compare_run"] = compare_path;
  }

  std::cout << out.dump() << '\n';
  return 0;
}

int cmd_sweep(const std::string& index_dir, const std::string& queries_path,
              const std::string& qrels_path, std::size_t max_segs,
              const std::string& scorers_list, const SdmFlags& flags,
              const std::string& out_csv, std::string out_json, std::size_t k,
              std::size_t pool, std::size_t threads) {
  if (max_segs < 1) throw std::runtime_error("--max-segs must be >= 1");
  const Index index = Index::load(index_dir);
  const auto queries = read_encoded_queries(queries_path);
  const Qrels qrels = read_qrels(qrels_path);

  std::vector<NamedScorer> scorers;
  for (const auto& name : split_csv(scorers_list)) {
    try {
      scorers.push_back({name, make_scorer(name, flags)});
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(
          "unknown scorer '" + name +
          "' (valid: rep-max, score-max, sum, mean, sdm-exact, sdm-soft)");
    }
  }
  if (scorers.empty()) throw std::runtime_error("no scorers requested");

  const auto rows =
      run_segment_sweep(index, queries, qrels, max_segs, scorers, k, pool, threads);

  std::ofstream csv(out_csv);
  if (!csv) throw std::runtime_error("cannot open '" + out_csv + "' for writing");
  csv << "scorer,segments,metric,value\n";
  json rows_json = json::array();
  for (const auto& row : rows) {
    char value[32];
    std::snprintf(value, sizeof(value), "%.6f", row.value);
    csv << row.scorer << ',' << row.segments << ',' << row.metric << ',' << value
        << '\n';
    rows_json.push_back(json{{"scorer", row.scorer},
                             {"segments", row.segments},
                             {"metric", row.metric},
                             {"value", row.value}});
  }
  if (out_json.empty()) out_json = out_csv + ".json";
  {
    std::ofstream jf(out_json);
    if (!jf) throw std::runtime_error("cannot open '" + out_json + "' for writing");
    jf << rows_json.dump(2) << '\n';
  }

  std::cout << json{{"command", "sweep"},
                    {"rows", rows.size()},
                    {"max_segs", max_segs},
                    {"out", out_csv},
                    {"json", out_json}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_baseline(const std::string& corpus_path, const std::string& queries_path,
                 const std::string& scorer, const std::string& run_path, std::size_t k,
                 double k1, double b, double mu, const SdmFlags& flags,
                 const std::string& tag) {
  if (k == 0) throw std::runtime_error("--k must be positive");
  const auto corpus = read_token_corpus(corpus_path);
  const auto queries = read_token_queries(queries_path);
  const CorpusStats stats = CorpusStats::build(corpus);
  const SdmParams params = flags.params();

  RunList run;
  for (const auto& q : queries) {
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(stats.docs().size());
    for (const auto& doc : stats.docs()) {
      if (doc.tokens.empty()) continue;
      const double score = scorer == "bm25"
                               ? bm25_score(q.tokens, doc, stats, k1, b)
                               : classic_sdm_score(q.tokens, doc, stats, params, mu);
      scored.emplace_back(doc.doc_id, score);
    }
    RunList ranked = make_run(q.query_id, std::move(scored), tag);
    if (ranked.size() > k) ranked.resize(k);
    run.insert(run.end(), ranked.begin(), ranked.end());
  }
  write_run(run_path, run);
  std::cout << json{{"command", "baseline"},
                    {"scorer", scorer},
                    {"docs", corpus.size()},
                    {"queries", queries.size()},
                    {"results", run.size()},
                    {"run", run_path}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_synth_corpus(const CorpusSpec& spec, const std::string& out_path,
                     std::size_t num_queries, std::size_t query_terms,
                     const std::string& queries_out) {
  const auto segments = gen_corpus(spec);
  write_encoded_segments(out_path, segments);
  json summary{{"command", "synth-corpus"},
               {"segments", segments.size()},
               {"docs", spec.num_docs},
               {"seed", spec.seed},
               {"out", out_path}};
  if (!queries_out.empty()) {
    const auto queries =
        gen_queries(num_queries, query_terms, spec.vocab_size, spec.seed + 1);
    write_encoded_queries(queries_out, queries);
    summary["queries"] = queries.size();
    summary["queries_out"] = queries_out;
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_synth_proximity(std::size_t count, std::uint64_t seed,
                        const std::string& segments_out, const std::string& queries_out,
                        const std::string& triplets_out) {
  const auto set = gen_proximity_triplets(count, seed);
  write_encoded_segments(segments_out, set.segments);
  write_encoded_queries(queries_out, set.queries);
  write_triplets(triplets_out, set.triplets);
  std::cout << json{{"command", "synth-proximity"},
                    {"triplets", set.triplets.size()},
                    {"segments", set.segments.size()},
                    {"seed", seed},
                    {"segments_out", segments_out},
                    {"queries_out", queries_out},
                    {"triplets_out", triplets_out}}
                   .dump()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparsedm: learned-sparse scoring for long documents"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;  // honored by randomized commands, accepted by all
  app.add_option("--seed", seed, "seed for randomized components");

  // segment
  auto* segment = app.add_subcommand("segment", "split documents into token-budgeted segments");
  std::string seg_input;
  std::string seg_out;
  std::size_t seg_max_tokens = 400;
  segment->add_option("--input", seg_input, "JSONL of {doc_id, text}")->required();
  segment->add_option("--out", seg_out, "output JSONL of {doc_id, seg, text}")->required();
  segment->add_option("--max-tokens", seg_max_tokens, "token budget per segment");

  // index build / search
  auto* index_cmd = app.add_subcommand("index", "build or query a positional impact index");
  index_cmd->require_subcommand(1);
  auto* build = index_cmd->add_subcommand("build", "build an index from encoded segments");
  std::string build_segments;
  std::string build_out;
  build->add_option("--segments", build_segments, "encoded segments JSONL")->required();
  build->add_option("--out", build_out, "output index directory")->required();

  auto* search = index_cmd->add_subcommand("search", "run top-k retrieval");
  std::string search_index;
  std::string search_queries;
  std::string search_run;
  std::string search_agg;
  std::string search_tag = "sparsedm";
  long long search_k = 1000;
  std::size_t search_pool = 1000;
  std::size_t search_threads = 1;
  SdmFlags search_sdm;
  search->add_option("--index", search_index, "index directory")->required();
  search->add_option("--queries", search_queries, "encoded queries JSONL")->required();
  search->add_option("--run", search_run, "output run file")->required();
  search->add_option("--k", search_k, "results per query");
  search->add_option("--pool", search_pool, "stage-one candidate pool size");
  search->add_option("--agg", search_agg,
                     "aggregation scorer: rep-max, score-max, sum, mean")
      ->check(CLI::IsMember({"rep-max", "score-max", "sum", "mean"}));
  search_sdm.attach(search, false);
  search->add_option("--tag", search_tag, "run tag");
  search->add_option("--threads", search_threads, "parallelism across queries");

  // tune
  auto* tune = app.add_subcommand("tune", "fit lambda weights on training triplets");
  std::string tune_triplets;
  std::string tune_queries;
  std::string tune_index;
  std::string tune_out;
  double tune_step = 0.05;
  SdmFlags tune_sdm;
  tune->add_option("--triplets", tune_triplets, "TSV triplets")->required();
  tune->add_option("--queries", tune_queries, "encoded queries JSONL")->required();
  tune->add_option("--index", tune_index, "index directory")->required();
  tune->add_option("--grid-step", tune_step, "simplex grid step");
  tune->add_option("--out", tune_out, "JSON report path")->required();
  tune_sdm.attach(tune, true);

  // eval
  auto* eval = app.add_subcommand("eval", "score a run against qrels");
  std::string eval_run;
  std::string eval_qrels;
  std::string eval_metrics = "mrr@10,ndcg@10,recall@1000";
  std::string eval_compare;
  std::size_t eval_bonferroni = 1;
  eval->add_option("--run", eval_run, "run file")->required();
  eval->add_option("--qrels", eval_qrels, "qrels file")->required();
  eval->add_option("--metrics", eval_metrics, "comma list, e.g. mrr@10,ndcg@10,recall@1000");
  eval->add_option("--compare", eval_compare, "second run for a paired t-test");
  eval->add_option("--bonferroni", eval_bonferroni, "number of comparisons to correct for");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "metric vs. segment-count sweep per scorer");
  std::string sweep_index;
  std::string sweep_queries;
  std::string sweep_qrels;
  std::string sweep_scorers = "rep-max,score-max,sum,mean";
  std::string sweep_out;
  std::string sweep_json;
  std::size_t sweep_max_segs = 5;
  std::size_t sweep_k = 1000;
  std::size_t sweep_pool = 1000;
  std::size_t sweep_threads = 1;
  SdmFlags sweep_sdm;
  sweep->add_option("--index", sweep_index, "index directory")->required();
  sweep->add_option("--queries", sweep_queries, "encoded queries JSONL")->required();
  sweep->add_option("--qrels", sweep_qrels, "qrels file")->required();
  sweep->add_option("--max-segs", sweep_max_segs, "sweep s = 1..N first segments");
  sweep->add_option("--scorers", sweep_scorers,
                    "comma list: rep-max, score-max, sum, mean, sdm-exact, sdm-soft");
  sweep->add_option("--out", sweep_out, "output CSV path")->required();
  sweep->add_option("--json", sweep_json, "JSON mirror path (default: <out>.json)");
  sweep->add_option("--k", sweep_k, "results per query");
  sweep->add_option("--pool", sweep_pool, "stage-one candidate pool size");
  sweep->add_option("--threads", sweep_threads, "parallelism across queries");
  sweep_sdm.attach(sweep, false);

  // baseline
  auto* baseline = app.add_subcommand("baseline", "BM25 and classic SDM over raw tokens");
  std::string baseline_corpus;
  std::string baseline_queries;
  std::string baseline_scorer = "bm25";
  std::string baseline_run;
  std::string baseline_tag = "baseline";
  std::size_t baseline_k = 1000;
  double baseline_k1 = 0.9;
  double baseline_b = 0.4;
  double baseline_mu = 2500.0;
  SdmFlags baseline_sdm;
  baseline->add_option("--corpus", baseline_corpus,
                       "JSONL of {doc_id, tokens} or {doc_id, text}")
      ->required();
  baseline->add_option("--queries", baseline_queries,
                       "JSONL of {query_id, tokens} or {query_id, text}")
      ->required();
  baseline->add_option("--scorer", baseline_scorer, "bm25 or sdm")
      ->check(CLI::IsMember({"bm25", "sdm"}));
  baseline->add_option("--run", baseline_run, "output run file")->required();
  baseline->add_option("--k", baseline_k, "results per query");
  baseline->add_option("--k1", baseline_k1, "BM25 k1");
  baseline->add_option("--b", baseline_b, "BM25 b");
  baseline->add_option("--mu", baseline_mu, "Dirichlet smoothing mass for classic SDM");
  baseline->add_option("--tag", baseline_tag, "run tag");
  baseline_sdm.attach(baseline, false);

  // synth
  auto* synth = app.add_subcommand("synth", "deterministic synthetic data generators");
  synth->require_subcommand(1);
  auto* corpus = synth->add_subcommand("corpus", "random encoded corpus");
  CorpusSpec corpus_spec;
  std::string corpus_out;
  std::string corpus_queries_out;
  std::size_t corpus_num_queries = 10;
  std::size_t corpus_query_terms = 3;
  corpus->add_option("--docs", corpus_spec.num_docs, "number of documents");
  corpus->add_option("--segs", corpus_spec.segs_per_doc, "segments per document");
  corpus->add_option("--vocab", corpus_spec.vocab_size, "vocabulary size");
  corpus->add_option("--entries", corpus_spec.entries_per_seg, "positions per segment");
  corpus->add_option("--expansion", corpus_spec.expansion_entries_per_seg,
                     "expansion entries per segment");
  corpus->add_option("--out", corpus_out, "output segments JSONL")->required();
  corpus->add_option("--queries-out", corpus_queries_out, "also emit queries JSONL");
  corpus->add_option("--num-queries", corpus_num_queries, "queries to emit");
  corpus->add_option("--query-terms", corpus_query_terms, "terms per query");

  auto* proximity = synth->add_subcommand("proximity",
                                          "adjacent/scattered triplet generator");
  std::size_t prox_count = 100;
  std::string prox_segments_out;
  std::string prox_queries_out;
  std::string prox_triplets_out;
  proximity->add_option("--count", prox_count, "number of triplets");
  proximity->add_option("--segments-out", prox_segments_out, "output segments JSONL")
      ->required();
  proximity->add_option("--queries-out", prox_queries_out, "output queries JSONL")
      ->required();
  proximity->add_option("--triplets-out", prox_triplets_out, "output triplets TSV")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*segment) {
      return cmd_segment(seg_input, seg_out, seg_max_tokens);
    }
    if (*build) {
      return cmd_index_build(build_segments, build_out);
    }
    if (*search) {
      if (search_k <= 0) throw std::runtime_error("--k must be positive");
      const bool has_agg = !search_agg.empty();
      const bool has_sdm = !search_sdm.mode.empty();
      if (has_agg == has_sdm) {
        throw std::runtime_error("pick exactly one scorer: --agg or --sdm");
      }
      Scorer scorer = has_agg ? Scorer{parse_aggregation(search_agg)}
                              : Scorer{search_sdm.params()};
      const std::string name = has_agg ? search_agg : "sdm-" + search_sdm.mode;
      return cmd_index_search(search_index, search_queries, search_run,
                              static_cast<std::size_t>(search_k), search_pool, scorer,
                              name, search_tag, search_threads);
    }
    if (*tune) {
      return cmd_tune(tune_triplets, tune_queries, tune_index, tune_sdm, tune_step,
                      tune_out);
    }
    if (*eval) {
      return cmd_eval(eval_run, eval_qrels, eval_metrics, eval_compare, eval_bonferroni);
    }
    if (*baseline) {
      return cmd_baseline(baseline_corpus, baseline_queries, baseline_scorer,
                          baseline_run, baseline_k, baseline_k1, baseline_b,
                          baseline_mu, baseline_sdm, baseline_tag);
    }
    if (*sweep) {
      return cmd_sweep(sweep_index, sweep_queries, sweep_qrels, sweep_max_segs,
                       sweep_scorers, sweep_sdm, sweep_out, sweep_json, sweep_k,
                       sweep_pool, sweep_threads);
    }
    if (*corpus) {
      corpus_spec.seed = seed;
      return cmd_synth_corpus(corpus_spec, corpus_out, corpus_num_queries,
                              corpus_query_terms, corpus_queries_out);
    }
    if (*proximity) {
      return cmd_synth_proximity(prox_count, seed, prox_segments_out, prox_queries_out,
                                 prox_triplets_out);
    }
    std::cerr << "no command selected\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
