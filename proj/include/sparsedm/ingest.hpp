#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsedm/core.hpp"

namespace sparsedm {

struct TripletRecord {
  std::string query_id;
  std::string positive_doc_id;
  std::string negative_doc_id;

  friend bool operator==(const TripletRecord&, const TripletRecord&) = default;
};

struct QrelRecord {
  std::string query_id;
  std::string doc_id;
  int relevance = 0;
};

/// Graded relevance judgments, one record per (query, doc). Duplicates are
/// rejected on insert.
class Qrels {
 public:
  void add(const QrelRecord& rec) {
    if (rec.relevance < 0) {
      throw std::invalid_argument("Qrels: negative relevance for (" + rec.query_id +
                                  ", " + rec.doc_id + ")");
    }
    auto& per_query = judgments_[rec.query_id];
    if (!per_query.emplace(rec.doc_id, rec.relevance).second) {
      throw std::invalid_argument("Qrels: duplicate judgment for (" + rec.query_id +
                                  ", " + rec.doc_id + ")");
    }
  }

  int relevance(const std::string& query_id, const std::string& doc_id) const {
    auto qit = judgments_.find(query_id);
    if (qit == judgments_.end()) return 0;
    auto dit = qit->second.find(doc_id);
    return dit == qit->second.end() ? 0 : dit->second;
  }

  const std::map<std::string, std::map<std::string, int>>& by_query() const {
    return judgments_;
  }
  std::size_t query_count() const { return judgments_.size(); }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [q, docs] : judgments_) n += docs.size();
    return n;
  }

 private:
  std::map<std::string, std::map<std::string, int>> judgments_;
};

struct RunEntry {
  std::string query_id;
  std::string doc_id;
  int rank = 0;
  double score = 0.0;
  std::string tag = "sparsedm";

  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

using RunList = std::vector<RunEntry>;

namespace detail {

inline std::runtime_error line_error(const std::string& path, std::size_t line_no,
                                     const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

inline bool blank(const std::string& line) {
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  return out;
}

inline std::string format_score(double score) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", score);
  return buf;
}

}  // namespace detail

/// Streaming reader over encoded-segment JSONL. Holds one record at a time.
/// Line format: {"doc_id": str, "seg": int, "len": int,
///               "entries": [[position, term, weight], ...],
///               "tokens": [int, ...]}   (tokens optional, size == len)
class SegmentReader {
 public:
  explicit SegmentReader(const std::string& path)
      : path_(path), in_(detail::open_input(path)) {}

  std::optional<SegmentRep> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (detail::blank(line)) continue;
      return parse(line);
    }
    return std::nullopt;
  }

 private:
  SegmentRep parse(const std::string& line) const {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw detail::line_error(path_, line_no_, std::string("malformed JSON: ") + e.what());
    }
    SegmentRep seg;
    try {
      seg.doc_id = j.at("doc_id").get<std::string>();
      const auto seg_index = j.at("seg").get<std::int64_t>();
      const auto length = j.at("len").get<std::int64_t>();
      if (seg_index < 0 || length < 0) {
        throw detail::line_error(path_, line_no_, "seg and len must be non-negative");
      }
      seg.seg_index = static_cast<std::uint32_t>(seg_index);
      seg.length = static_cast<std::uint32_t>(length);
      for (const auto& entry : j.at("entries")) {
        if (!entry.is_array() || entry.size() != 3) {
          throw detail::line_error(path_, line_no_, "entry must be [position, term, weight]");
        }
        const auto position = entry[0].get<std::int64_t>();
        const auto term = entry[1].get<std::int64_t>();
        if (position < 0 || term < 0) {
          throw detail::line_error(path_, line_no_, "entry position/term must be non-negative");
        }
        seg.entries.push_back({static_cast<std::uint32_t>(position),
                               static_cast<TermId>(term), entry[2].get<double>()});
      }
      if (j.contains("tokens")) {
        std::vector<TermId> tokens;
        for (const auto& t : j.at("tokens")) {
          const auto id = t.get<std::int64_t>();
          if (id < 0) {
            throw detail::line_error(path_, line_no_, "token ids must be non-negative");
          }
          tokens.push_back(static_cast<TermId>(id));
        }
        seg.tokens = std::move(tokens);
      }
    } catch (const nlohmann::json::exception& e) {
      throw detail::line_error(path_, line_no_, std::string("bad segment record: ") + e.what());
    }
    seg.canonicalize();
    try {
      seg.validate();
    } catch (const std::invalid_argument& e) {
      throw detail::line_error(path_, line_no_, e.what());
    }
    return seg;
  }

  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

/// Streaming reader over encoded-query JSONL.
/// Line format: {"query_id": str, "terms": [[term, weight], ...]} in token order.
class QueryReader {
 public:
  explicit QueryReader(const std::string& path)
      : path_(path), in_(detail::open_input(path)) {}

  std::optional<QueryRep> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (detail::blank(line)) continue;
      return parse(line);
    }
    return std::nullopt;
  }

 private:
  QueryRep parse(const std::string& line) const {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw detail::line_error(path_, line_no_, std::string("malformed JSON: ") + e.what());
    }
    QueryRep q;
    try {
      q.query_id = j.at("query_id").get<std::string>();
      for (const auto& term : j.at("terms")) {
        if (!term.is_array() || term.size() != 2) {
          throw detail::line_error(path_, line_no_, "term must be [term_id, weight]");
        }
        const auto id = term[0].get<std::int64_t>();
        if (id < 0) {
          throw detail::line_error(path_, line_no_, "term ids must be non-negative");
        }
        q.terms.emplace_back(static_cast<TermId>(id), term[1].get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw detail::line_error(path_, line_no_, std::string("bad query record: ") + e.what());
    }
    try {
      q.validate();
    } catch (const std::invalid_argument& e) {
      throw detail::line_error(path_, line_no_, e.what());
    }
    return q;
  }

  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

inline std::vector<SegmentRep> read_encoded_segments(const std::string& path) {
  SegmentReader reader(path);
  std::vector<SegmentRep> out;
  while (auto seg = reader.next()) {
    out.push_back(std::move(*seg));
  }
  return out;
}

inline std::vector<QueryRep> read_encoded_queries(const std::string& path) {
  QueryReader reader(path);
  std::vector<QueryRep> out;
  while (auto q = reader.next()) {
    out.push_back(std::move(*q));
  }
  return out;
}

inline void write_encoded_segment(std::ostream& out, const SegmentRep& seg) {
  nlohmann::json j;
  j["doc_id"] = seg.doc_id;
  j["seg"] = seg.seg_index;
  j["len"] = seg.length;
  auto entries = nlohmann::json::array();
  for (const auto& e : seg.entries) {
    entries.push_back({e.position, e.term, e.weight});
  }
  j["entries"] = std::move(entries);
  if (seg.tokens) {
    j["tokens"] = *seg.tokens;
  }
  out << j.dump() << '\n';
}

inline void write_encoded_segments(const std::string& path,
                                   const std::vector<SegmentRep>& segments) {
  auto out = detail::open_output(path);
  for (const auto& seg : segments) {
    write_encoded_segment(out, seg);
  }
}

inline void write_encoded_queries(const std::string& path,
                                  const std::vector<QueryRep>& queries) {
  auto out = detail::open_output(path);
  for (const auto& q : queries) {
    nlohmann::json j;
    j["query_id"] = q.query_id;
    auto terms = nlohmann::json::array();
    for (const auto& [term, weight] : q.terms) {
      terms.push_back({term, weight});
    }
    j["terms"] = std::move(terms);
    out << j.dump() << '\n';
  }
}

/// Ranks scored documents for one query: descending score, ties broken by
/// ascending doc_id, ranks assigned 1..n.
inline RunList make_run(const std::string& query_id,
                        std::vector<std::pair<std::string, double>> scored,
                        const std::string& tag = "sparsedm") {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  RunList run;
  run.reserve(scored.size());
  int rank = 1;
  for (auto& [doc_id, score] : scored) {
    run.push_back({query_id, std::move(doc_id), rank++, score, tag});
  }
  return run;
}

/// Writes the six-column run format: "query_id Q0 doc_id rank score tag",
/// scores fixed to 6 decimal places.
inline void write_run(const std::string& path, const RunList& run) {
  auto out = detail::open_output(path);
  for (const auto& e : run) {
    out << e.query_id << " Q0 " << e.doc_id << ' ' << e.rank << ' '
        << detail::format_score(e.score) << ' ' << e.tag << '\n';
  }
}

inline RunList read_run(const std::string& path) {
  auto in = detail::open_input(path);
  RunList run;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::pair<int, double>> last_by_query;  // rank, score
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    std::istringstream fields(line);
    RunEntry e;
    std::string q0;
    if (!(fields >> e.query_id >> q0 >> e.doc_id >> e.rank >> e.score >> e.tag)) {
      throw detail::line_error(path, line_no, "expected 6 columns: query_id Q0 doc_id rank score tag");
    }
    std::string extra;
    if (fields >> extra) {
      throw detail::line_error(path, line_no, "trailing content after 6 columns");
    }
    auto it = last_by_query.find(e.query_id);
    if (it == last_by_query.end()) {
      if (e.rank != 1) {
        throw detail::line_error(path, line_no,
                                 "ranks for query '" + e.query_id + "' must start at 1");
      }
    } else {
      if (e.rank != it->second.first + 1) {
        throw detail::line_error(path, line_no,
                                 "non-monotone rank for query '" + e.query_id + "'");
      }
      if (e.score > it->second.second) {
        throw detail::line_error(path, line_no,
                                 "scores must be non-increasing within query '" + e.query_id + "'");
      }
    }
    last_by_query[e.query_id] = {e.rank, e.score};
    run.push_back(std::move(e));
  }
  return run;
}

/// Reads "query_id 0 doc_id relevance" judgment lines. The second column is
/// conventional filler and ignored. Duplicate (query, doc) pairs are errors.
inline Qrels read_qrels(const std::string& path) {
  auto in = detail::open_input(path);
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    std::istringstream fields(line);
    QrelRecord rec;
    std::string filler;
    if (!(fields >> rec.query_id >> filler >> rec.doc_id >> rec.relevance)) {
      throw detail::line_error(path, line_no, "expected 4 columns: query_id 0 doc_id relevance");
    }
    std::string extra;
    if (fields >> extra) {
      throw detail::line_error(path, line_no, "trailing content after 4 columns");
    }
    try {
      qrels.add(rec);
    } catch (const std::invalid_argument& e) {
      throw detail::line_error(path, line_no, e.what());
    }
  }
  return qrels;
}

inline void write_qrels(const std::string& path, const Qrels& qrels) {
  auto out = detail::open_output(path);
  for (const auto& [query_id, docs] : qrels.by_query()) {
    for (const auto& [doc_id, rel] : docs) {
      out << query_id << " 0 " << doc_id << ' ' << rel << '\n';
    }
  }
}

/// Streaming reader over tab-separated triplets: query_id, positive doc,
/// negative doc.
class TripletReader {
 public:
  explicit TripletReader(const std::string& path)
      : path_(path), in_(detail::open_input(path)) {}

  std::optional<TripletRecord> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (detail::blank(line)) continue;
      return parse(line);
    }
    return std::nullopt;
  }

 private:
  TripletRecord parse(const std::string& line) const {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      if (tab == std::string::npos) {
        cols.push_back(line.substr(start));
        break;
      }
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
      throw detail::line_error(path_, line_no_,
                               "expected 3 tab-separated columns: query_id, positive, negative");
    }
    if (cols[1] == cols[2]) {
      throw detail::line_error(path_, line_no_,
                               "positive and negative doc ids must differ");
    }
    return {cols[0], cols[1], cols[2]};
  }

  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

inline std::vector<TripletRecord> read_triplets(const std::string& path) {
  TripletReader reader(path);
  std::vector<TripletRecord> out;
  while (auto t = reader.next()) {
    out.push_back(std::move(*t));
  }
  return out;
}

inline void write_triplets(const std::string& path,
                           const std::vector<TripletRecord>& triplets) {
  auto out = detail::open_output(path);
  for (const auto& t : triplets) {
    out << t.query_id << '\t' << t.positive_doc_id << '\t' << t.negative_doc_id << '\n';
  }
}

}  // namespace sparsedm
