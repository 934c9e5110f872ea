#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sparsedm/aggregate.hpp"
#include "sparsedm/core.hpp"
#include "sparsedm/sdm.hpp"

namespace sparsedm {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

struct Posting {
  std::uint32_t doc_ordinal;
  std::uint32_t seg_index;
  std::uint32_t position;
  double weight;
};

struct SearchResult {
  std::string doc_id;
  double score;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

/// Second-stage scorer: an aggregation strategy or an SDM configuration.
using Scorer = std::variant<AggregationStrategy, SdmParams>;

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

inline void write_f64(std::ostream& out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline void write_str(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("index file truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

inline std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("index file truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

inline double read_f64(std::istream& in) {
  return std::bit_cast<double>(read_u64(in));
}

inline std::string read_str(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw std::runtime_error("index file truncated");
  return s;
}

}  // namespace detail

/// Positional impact index over encoded segments plus a forward store for
/// rescoring. Immutable after build; concurrent read-only queries are safe.
///
/// Retrieval is two-stage: a document-at-a-time traversal of the posting
/// lists scores every document sharing a term with the query by the rep-max
/// bound, then the top candidate_pool documents are rescored with the
/// requested scorer from the forward store. Because rep-max upper-bounds the
/// score-max and mean scores of the same document, stage one is a safe
/// filter for those scorers once candidate_pool covers the corpus; for sum
/// and the SDM scorers it is a heuristic filter at smaller pools.
class Index {
 public:
  Index() = default;

  static Index build(const std::function<std::optional<SegmentRep>()>& next_segment) {
    Index index;
    std::unordered_set<std::string> finished;
    DocumentRep current;
    bool open = false;

    auto finalize = [&](DocumentRep&& doc) {
      std::sort(doc.segments.begin(), doc.segments.end(),
                [](const SegmentRep& a, const SegmentRep& b) {
                  return a.seg_index < b.seg_index;
                });
      for (std::size_t i = 0; i + 1 < doc.segments.size(); ++i) {
        if (doc.segments[i].seg_index == doc.segments[i + 1].seg_index) {
          throw std::invalid_argument("duplicate segment (" + doc.doc_id + ", " +
                                      std::to_string(doc.segments[i].seg_index) + ")");
        }
      }
      doc.validate();  // also checks seg_index values are 0..n-1
      index.add_document(std::move(doc));
    };

    while (auto seg = next_segment()) {
      seg->validate();
      seg->canonicalize();
      if (!open) {
        current.doc_id = seg->doc_id;
        open = true;
      } else if (seg->doc_id != current.doc_id) {
        finished.insert(current.doc_id);
        finalize(std::move(current));
        current = DocumentRep{};
        current.doc_id = seg->doc_id;
      }
      if (finished.count(seg->doc_id)) {
        throw std::invalid_argument("segments of document '" + seg->doc_id +
                                    "' are not contiguous in the input");
      }
      current.segments.push_back(std::move(*seg));
    }
    if (open) {
      finalize(std::move(current));
    }
    return index;
  }

  static Index build(std::vector<SegmentRep> segments) {
    std::size_t i = 0;
    return build([&]() -> std::optional<SegmentRep> {
      if (i >= segments.size()) return std::nullopt;
      return std::move(segments[i++]);
    });
  }

  std::size_t doc_count() const { return docs_.size(); }
  std::size_t segment_count() const { return segment_count_; }
  std::size_t posting_count() const { return posting_count_; }
  std::size_t term_count() const { return postings_.size(); }
  bool has_tokens() const { return has_tokens_; }

  const std::vector<DocumentRep>& docs() const { return docs_; }
  const DocumentRep& doc(std::uint32_t ordinal) const { return docs_.at(ordinal); }

  const DocumentRep* find_doc(const std::string& doc_id) const {
    auto it = ordinal_of_.find(doc_id);
    return it == ordinal_of_.end() ? nullptr : &docs_[it->second];
  }

  /// Top-k retrieval. Results are sorted by score descending, ties broken by
  /// ascending doc_id; at most min(k, matched docs) entries are returned.
  std::vector<SearchResult> retrieve(const QueryRep& q, std::size_t k,
                                     const Scorer& scorer,
                                     std::size_t candidate_pool = 1000) const {
    if (k == 0) {
      throw std::invalid_argument("retrieve: k must be positive");
    }
    if (candidate_pool < k) {
      throw std::invalid_argument("retrieve: candidate_pool must be >= k");
    }
    if (const auto* params = std::get_if<SdmParams>(&scorer)) {
      if (params->mode == SdmMode::exact && !has_tokens_) {
        throw std::invalid_argument(
            "retrieve: exact SDM needs token sequences, but the index was built "
            "without them; re-encode with tokens or use soft mode");
      }
    }

    const SparseVector qv = query_to_vector(q);
    if (qv.empty() || docs_.empty()) return {};

    // stage 1: DAAT over posting cursors, scoring by rep-max
    struct Cursor {
      const std::vector<Posting>* postings;
      std::size_t i;
      double query_weight;
    };
    std::vector<Cursor> cursors;
    for (const auto& [term, qw] : qv.entries()) {
      auto it = postings_.find(term);
      if (it != postings_.end() && !it->second.empty()) {
        cursors.push_back({&it->second, 0, qw});
      }
    }
    if (cursors.empty()) return {};

    std::vector<std::pair<std::uint32_t, double>> stage1;  // (ordinal, score)
    while (true) {
      std::uint32_t cur_doc = UINT32_MAX;
      for (const auto& c : cursors) {
        if (c.i < c.postings->size()) {
          cur_doc = std::min(cur_doc, (*c.postings)[c.i].doc_ordinal);
        }
      }
      if (cur_doc == UINT32_MAX) break;
      double score = 0.0;
      for (auto& c : cursors) {
        if (c.i < c.postings->size() && (*c.postings)[c.i].doc_ordinal == cur_doc) {
          double best = 0.0;
          while (c.i < c.postings->size() && (*c.postings)[c.i].doc_ordinal == cur_doc) {
            best = std::max(best, (*c.postings)[c.i].weight);
            ++c.i;
          }
          score += c.query_weight * best;
        }
      }
      stage1.emplace_back(cur_doc, score);
    }

    auto by_score_then_id = [this](const std::pair<std::uint32_t, double>& a,
                                   const std::pair<std::uint32_t, double>& b) {
      if (a.second != b.second) return a.second > b.second;
      return docs_[a.first].doc_id < docs_[b.first].doc_id;
    };
    if (stage1.size() > candidate_pool) {
      std::nth_element(stage1.begin(), stage1.begin() + candidate_pool, stage1.end(),
                       by_score_then_id);
      stage1.resize(candidate_pool);
    }

    // stage 2: rescore candidates with the requested scorer
    std::vector<SearchResult> results;
    results.reserve(stage1.size());
    for (const auto& [ordinal, bound] : stage1) {
      (void)bound;
      const DocumentRep& doc = docs_[ordinal];
      double score;
      if (const auto* strategy = std::get_if<AggregationStrategy>(&scorer)) {
        score = aggregate_score(*strategy, q, doc);
      } else {
        score = sdm_score(q, doc, std::get<SdmParams>(scorer));
      }
      results.push_back({doc.doc_id, score});
    }
    std::sort(results.begin(), results.end(),
              [](const SearchResult& a, const SearchResult& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.doc_id < b.doc_id;
              });
    if (results.size() > k) results.resize(k);
    return results;
  }

  /// Persists the index as a directory: manifest.json, forward.bin,
  /// postings.bin. All integers and doubles little-endian.
  void save(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
      std::ofstream out(fs::path(dir) / "forward.bin", std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + dir + "/forward.bin");
      detail::write_u32(out, static_cast<std::uint32_t>(docs_.size()));
      for (const auto& doc : docs_) {
        detail::write_str(out, doc.doc_id);
        detail::write_u32(out, static_cast<std::uint32_t>(doc.segments.size()));
        for (const auto& seg : doc.segments) {
          detail::write_u32(out, seg.seg_index);
          detail::write_u32(out, seg.length);
          detail::write_u32(out, static_cast<std::uint32_t>(seg.entries.size()));
          for (const auto& e : seg.entries) {
            detail::write_u32(out, e.position);
            detail::write_u32(out, e.term);
            detail::write_f64(out, e.weight);
          }
          detail::write_u32(out, seg.tokens ? 1 : 0);
          if (seg.tokens) {
            for (TermId t : *seg.tokens) detail::write_u32(out, t);
          }
        }
      }
    }
    {
      std::ofstream out(fs::path(dir) / "postings.bin", std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + dir + "/postings.bin");
      detail::write_u64(out, postings_.size());
      for (const auto& [term, plist] : postings_) {  // std::map: ascending term order
        detail::write_u32(out, term);
        detail::write_u64(out, plist.size());
        for (const auto& p : plist) {
          detail::write_u32(out, p.doc_ordinal);
          detail::write_u32(out, p.seg_index);
          detail::write_u32(out, p.position);
          detail::write_f64(out, p.weight);
        }
      }
    }
    {
      nlohmann::json manifest;
      manifest["format_version"] = kIndexFormatVersion;
      manifest["num_docs"] = docs_.size();
      manifest["num_segments"] = segment_count_;
      manifest["num_postings"] = posting_count_;
      manifest["num_terms"] = postings_.size();
      manifest["has_tokens"] = has_tokens_;
      std::ofstream out(fs::path(dir) / "manifest.json");
      if (!out) throw std::runtime_error("cannot write " + dir + "/manifest.json");
      out << manifest.dump(2) << '\n';
    }
  }

  static Index load(const std::string& dir) {
    namespace fs = std::filesystem;
    nlohmann::json manifest;
    {
      std::ifstream in(fs::path(dir) / "manifest.json");
      if (!in) throw std::runtime_error("cannot open " + dir + "/manifest.json");
      in >> manifest;
    }
    if (manifest.at("format_version").get<std::uint32_t>() != kIndexFormatVersion) {
      throw std::runtime_error("unsupported index format version in " + dir);
    }

    Index index;
    {
      std::ifstream in(fs::path(dir) / "forward.bin", std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + dir + "/forward.bin");
      const std::uint32_t num_docs = detail::read_u32(in);
      for (std::uint32_t d = 0; d < num_docs; ++d) {
        DocumentRep doc;
        doc.doc_id = detail::read_str(in);
        const std::uint32_t num_segs = detail::read_u32(in);
        for (std::uint32_t s = 0; s < num_segs; ++s) {
          SegmentRep seg;
          seg.doc_id = doc.doc_id;
          seg.seg_index = detail::read_u32(in);
          seg.length = detail::read_u32(in);
          const std::uint32_t num_entries = detail::read_u32(in);
          seg.entries.reserve(num_entries);
          for (std::uint32_t e = 0; e < num_entries; ++e) {
            SegmentEntry entry;
            entry.position = detail::read_u32(in);
            entry.term = detail::read_u32(in);
            entry.weight = detail::read_f64(in);
            seg.entries.push_back(entry);
          }
          if (detail::read_u32(in) != 0) {
            std::vector<TermId> tokens(seg.length);
            for (auto& t : tokens) t = detail::read_u32(in);
            seg.tokens = std::move(tokens);
          }
          doc.segments.push_back(std::move(seg));
        }
        doc.validate();
        index.add_document(std::move(doc));
      }
    }
    {
      // postings are also rebuilt by add_document; read the file to verify it
      std::ifstream in(fs::path(dir) / "postings.bin", std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + dir + "/postings.bin");
      const std::uint64_t num_terms = detail::read_u64(in);
      std::uint64_t num_postings = 0;
      for (std::uint64_t t = 0; t < num_terms; ++t) {
        detail::read_u32(in);
        const std::uint64_t n = detail::read_u64(in);
        for (std::uint64_t i = 0; i < n; ++i) {
          detail::read_u32(in);
          detail::read_u32(in);
          detail::read_u32(in);
          detail::read_f64(in);
        }
        num_postings += n;
      }
      if (num_terms != index.postings_.size() || num_postings != index.posting_count_) {
        throw std::runtime_error("postings.bin does not match forward store in " + dir);
      }
    }

    if (manifest.at("num_docs").get<std::size_t>() != index.doc_count() ||
        manifest.at("num_segments").get<std::size_t>() != index.segment_count_ ||
        manifest.at("num_postings").get<std::size_t>() != index.posting_count_) {
      throw std::runtime_error("manifest counts do not match index data in " + dir);
    }
    return index;
  }

 private:
  void add_document(DocumentRep&& doc) {
    const auto ordinal = static_cast<std::uint32_t>(docs_.size());
    if (!ordinal_of_.emplace(doc.doc_id, ordinal).second) {
      throw std::invalid_argument("duplicate document id '" + doc.doc_id + "'");
    }
    for (const auto& seg : doc.segments) {
      ++segment_count_;
      if (!seg.tokens) has_tokens_ = false;
      for (const auto& e : seg.entries) {
        postings_[e.term].push_back({ordinal, seg.seg_index, e.position, e.weight});
        ++posting_count_;
      }
    }
    docs_.push_back(std::move(doc));
  }

  std::vector<DocumentRep> docs_;
  std::unordered_map<std::string, std::uint32_t> ordinal_of_;
  std::map<TermId, std::vector<Posting>> postings_;
  std::size_t segment_count_ = 0;
  std::size_t posting_count_ = 0;
  bool has_tokens_ = true;
};

}  // namespace sparsedm
