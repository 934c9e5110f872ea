#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sparsedm/core.hpp"

namespace sparsedm {

struct TokenDoc {
  std::string doc_id;
  std::vector<std::string> tokens;
};

struct TokenQuery {
  std::string query_id;
  std::vector<std::string> tokens;
};

inline std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

namespace detail {

inline std::vector<std::string> tokens_of_record(const nlohmann::json& j,
                                                 const std::string& where) {
  if (j.contains("tokens")) {
    return j.at("tokens").get<std::vector<std::string>>();
  }
  if (j.contains("text")) {
    return whitespace_tokens(j.at("text").get<std::string>());
  }
  throw std::runtime_error(where + ": record needs a 'tokens' array or a 'text' field");
}

}  // namespace detail

/// Raw-token corpus: JSONL of {"doc_id", "tokens": [str, ...]} or
/// {"doc_id", "text": str} with text split on whitespace.
inline std::vector<TokenDoc> read_token_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::vector<TokenDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      docs.push_back({j.at("doc_id").get<std::string>(),
                      detail::tokens_of_record(j, where)});
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return docs;
}

inline std::vector<TokenQuery> read_token_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::vector<TokenQuery> queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      queries.push_back({j.at("query_id").get<std::string>(),
                         detail::tokens_of_record(j, where)});
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return queries;
}

/// Number of exact consecutive occurrences of `ngram` in `tokens`
/// (overlapping occurrences count).
inline std::size_t count_ordered_ngram(const std::vector<std::string>& tokens,
                                       const std::vector<std::string>& ngram) {
  if (ngram.empty() || tokens.size() < ngram.size()) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + ngram.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < ngram.size(); ++j) {
      if (tokens[i + j] != ngram[j]) {
        match = false;
        break;
      }
    }
    if (match) ++count;
  }
  return count;
}

/// Number of minimal windows of at most `window` positions containing every
/// distinct term of `terms` (order-free). A window [i, j] is minimal when no
/// proper sub-window still contains all terms; counting minimal windows
/// keeps occurrences non-overlapping in the usual case and the convention
/// deterministic.
inline std::size_t count_unordered_window(const std::vector<std::string>& tokens,
                                          const std::vector<std::string>& terms,
                                          std::size_t window) {
  std::set<std::string> need(terms.begin(), terms.end());
  if (need.empty() || window == 0) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!need.count(tokens[i])) continue;
    std::set<std::string> missing = need;
    std::size_t j = i;
    bool covered = false;
    for (; j < tokens.size(); ++j) {
      missing.erase(tokens[j]);
      if (missing.empty()) {
        covered = true;
        break;
      }
    }
    if (!covered) break;  // later starts cannot be covered either
    // minimal iff tokens[i] does not reoccur inside (i, j]
    bool reoccurs = false;
    for (std::size_t l = i + 1; l <= j; ++l) {
      if (tokens[l] == tokens[i]) {
        reoccurs = true;
        break;
      }
    }
    if (!reoccurs && j - i + 1 <= window) ++count;
  }
  return count;
}

/// Corpus statistics for the classic scorers. Immutable after build; n-gram
/// and window collection frequencies are computed on demand and memoized.
class CorpusStats {
 public:
  static CorpusStats build(std::vector<TokenDoc> docs) {
    CorpusStats stats;
    stats.docs_ = std::move(docs);
    for (const auto& doc : stats.docs_) {
      stats.total_tokens_ += doc.tokens.size();
      std::set<std::string> seen;
      for (const auto& token : doc.tokens) {
        ++stats.term_cf_[token];
        seen.insert(token);
      }
      for (const auto& token : seen) {
        ++stats.term_df_[token];
      }
    }
    return stats;
  }

  std::size_t total_tokens() const { return total_tokens_; }
  std::size_t doc_count() const { return docs_.size(); }
  double avg_doc_length() const {
    return docs_.empty() ? 0.0
                         : static_cast<double>(total_tokens_) / static_cast<double>(docs_.size());
  }
  const std::vector<TokenDoc>& docs() const { return docs_; }

  std::size_t term_cf(const std::string& term) const {
    auto it = term_cf_.find(term);
    return it == term_cf_.end() ? 0 : it->second;
  }

  std::size_t term_df(const std::string& term) const {
    auto it = term_df_.find(term);
    return it == term_df_.end() ? 0 : it->second;
  }

  std::size_t ngram_cf(const std::vector<std::string>& ngram) const {
    std::string key = "#1";
    for (const auto& t : ngram) {
      key += '\x1f';
      key += t;
    }
    return cached(std::move(key), [&] {
      std::size_t cf = 0;
      for (const auto& doc : docs_) {
        cf += count_ordered_ngram(doc.tokens, ngram);
      }
      return cf;
    });
  }

  std::size_t window_cf(const std::vector<std::string>& terms, std::size_t window) const {
    std::string key = "#uw" + std::to_string(window);
    for (const auto& t : terms) {
      key += '\x1f';
      key += t;
    }
    return cached(std::move(key), [&] {
      std::size_t cf = 0;
      for (const auto& doc : docs_) {
        cf += count_unordered_window(doc.tokens, terms, window);
      }
      return cf;
    });
  }

 private:
  // memoized on-demand frequencies; behind a pointer so the stats object
  // stays movable
  struct Cache {
    std::mutex mutex;
    std::unordered_map<std::string, std::size_t> values;
  };

  template <typename Compute>
  std::size_t cached(std::string key, Compute&& compute) const {
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->values.find(key);
      if (it != cache_->values.end()) return it->second;
    }
    const std::size_t value = compute();
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->values.emplace(std::move(key), value);
    return value;
  }

  std::vector<TokenDoc> docs_;
  std::size_t total_tokens_ = 0;
  std::unordered_map<std::string, std::size_t> term_cf_;
  std::unordered_map<std::string, std::size_t> term_df_;
  std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

/// Dirichlet-style smoothing factor for a document of `doc_len` tokens.
inline double dirichlet_alpha(std::size_t doc_len, double mu = 2500.0) {
  return mu / (static_cast<double>(doc_len) + mu);
}

namespace detail {

/// log-smoothed potential shared by the three classic potentials. When both
/// tf and cf are zero the log argument would vanish; a configurable floor
/// (zero_cf stand-in collection mass) keeps scores finite.
inline double classic_potential(double tf, double doc_len, double cf, double corpus_len,
                                double alpha, double lambda, bool* floored,
                                double zero_cf = 0.5) {
  if (doc_len <= 0.0 || corpus_len <= 0.0) {
    throw std::invalid_argument("classic potential: |D| and |C| must be positive");
  }
  if (alpha <= 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("classic potential: alpha must be in (0, 1)");
  }
  double arg = (1.0 - alpha) * tf / doc_len + alpha * cf / corpus_len;
  if (arg <= 0.0) {
    arg = alpha * zero_cf / corpus_len;
    if (floored) *floored = true;
  }
  return lambda * std::log(arg);
}

}  // namespace detail

inline double classic_psi_t(const std::string& term, const TokenDoc& doc,
                            const CorpusStats& stats, double alpha, double lambda,
                            bool* floored = nullptr) {
  const double tf = static_cast<double>(
      std::count(doc.tokens.begin(), doc.tokens.end(), term));
  return detail::classic_potential(tf, static_cast<double>(doc.tokens.size()),
                                   static_cast<double>(stats.term_cf(term)),
                                   static_cast<double>(stats.total_tokens()), alpha,
                                   lambda, floored);
}

inline double classic_psi_o(const std::vector<std::string>& ngram, const TokenDoc& doc,
                            const CorpusStats& stats, double alpha, double lambda,
                            bool* floored = nullptr) {
  const double tf = static_cast<double>(count_ordered_ngram(doc.tokens, ngram));
  return detail::classic_potential(tf, static_cast<double>(doc.tokens.size()),
                                   static_cast<double>(stats.ngram_cf(ngram)),
                                   static_cast<double>(stats.total_tokens()), alpha,
                                   lambda, floored);
}

inline double classic_psi_u(const std::vector<std::string>& terms, std::size_t window,
                            const TokenDoc& doc, const CorpusStats& stats, double alpha,
                            double lambda, bool* floored = nullptr) {
  const double tf = static_cast<double>(count_unordered_window(doc.tokens, terms, window));
  return detail::classic_potential(tf, static_cast<double>(doc.tokens.size()),
                                   static_cast<double>(stats.window_cf(terms, window)),
                                   static_cast<double>(stats.total_tokens()), alpha,
                                   lambda, floored);
}

/// Classic SDM ranking function over raw tokens: unigram potentials plus
/// ordered-phrase and unordered-window potentials over consecutive n-gram
/// spans (params.ngram_order, default bigrams).
inline double classic_sdm_score(const std::vector<std::string>& query_tokens,
                                const TokenDoc& doc, const CorpusStats& stats,
                                const SdmParams& params, double mu = 2500.0,
                                std::size_t* floored_terms = nullptr) {
  params.validate();
  if (doc.tokens.empty()) {
    throw std::invalid_argument("classic_sdm_score: empty document '" + doc.doc_id + "'");
  }
  const double alpha = dirichlet_alpha(doc.tokens.size(), mu);
  double score = 0.0;
  for (const auto& term : query_tokens) {
    bool floored = false;
    score += classic_psi_t(term, doc, stats, alpha, params.lambda_t, &floored);
    if (floored && floored_terms) ++*floored_terms;
  }
  const std::size_t n = params.ngram_order;
  if (query_tokens.size() >= n) {
    for (std::size_t start = 0; start + n <= query_tokens.size(); ++start) {
      const std::vector<std::string> span(query_tokens.begin() + start,
                                          query_tokens.begin() + start + n);
      bool floored_o = false;
      bool floored_u = false;
      score += classic_psi_o(span, doc, stats, alpha, params.lambda_o, &floored_o);
      score += classic_psi_u(span, params.window_size, doc, stats, alpha,
                             params.lambda_u, &floored_u);
      if (floored_terms) *floored_terms += (floored_o ? 1 : 0) + (floored_u ? 1 : 0);
    }
  }
  return score;
}

/// Robertson BM25 with idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1).
/// Sums over distinct query terms.
inline double bm25_score(const std::vector<std::string>& query_tokens, const TokenDoc& doc,
                         const CorpusStats& stats, double k1 = 0.9, double b = 0.4) {
  const double n_docs = static_cast<double>(stats.doc_count());
  const double avgdl = stats.avg_doc_length();
  const double doc_len = static_cast<double>(doc.tokens.size());
  std::set<std::string> terms(query_tokens.begin(), query_tokens.end());
  double score = 0.0;
  for (const auto& term : terms) {
    const double tf = static_cast<double>(
        std::count(doc.tokens.begin(), doc.tokens.end(), term));
    if (tf == 0.0) continue;
    const double df = static_cast<double>(stats.term_df(term));
    const double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
    const double norm = k1 * (1.0 - b + b * doc_len / avgdl);
    score += idf * tf * (k1 + 1.0) / (tf + norm);
  }
  return score;
}

}  // namespace sparsedm
