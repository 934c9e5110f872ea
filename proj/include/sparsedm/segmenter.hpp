#pragma once

#include <cctype>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sparsedm {

inline std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

struct SegmenterConfig {
  std::size_t max_tokens = 400;
  // Pluggable counter: swap in a subword counter to match a specific
  // encoder's token budget. Default counts whitespace-separated words.
  std::function<std::size_t(std::string_view)> count_tokens = whitespace_token_count;

  void validate() const {
    if (max_tokens < 1) {
      throw std::invalid_argument("SegmenterConfig: max_tokens must be >= 1");
    }
    if (!count_tokens) {
      throw std::invalid_argument("SegmenterConfig: count_tokens must be set");
    }
  }
};

/// Splits text into sentences. A sentence ends at '.', '!' or '?' followed
/// by whitespace or end of text. Sentences are trimmed; empty ones dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  auto is_terminal = [](char c) { return c == '.' || c == '!' || c == '?'; };

  std::vector<std::string> sentences;
  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    if (end > begin) {
      sentences.emplace_back(text.substr(begin, end - begin));
    }
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_terminal(text[i]) && (i + 1 == text.size() || is_space(text[i + 1]))) {
      emit(start, i + 1);
      start = i + 1;
    }
  }
  emit(start, text.size());
  return sentences;
}

/// Greedy left-to-right packing of sentences into segments of at most
/// cfg.max_tokens tokens. A sentence that alone exceeds the budget becomes
/// its own segment. Sentence order is preserved and no sentence is split.
inline std::vector<std::string> group_segments(const std::vector<std::string>& sentences,
                                               const SegmenterConfig& cfg = {}) {
  cfg.validate();
  std::vector<std::string> segments;
  std::string current;
  std::size_t current_tokens = 0;

  auto flush = [&] {
    if (!current.empty()) {
      segments.push_back(std::move(current));
      current.clear();
      current_tokens = 0;
    }
  };

  for (const auto& sentence : sentences) {
    const std::size_t tokens = cfg.count_tokens(sentence);
    if (!current.empty() && current_tokens + tokens > cfg.max_tokens) {
      flush();
    }
    if (tokens > cfg.max_tokens) {
      // over-budget sentence stays whole as a single segment
      flush();
      segments.push_back(sentence);
      continue;
    }
    if (current.empty()) {
      current = sentence;
    } else {
      current += ' ';
      current += sentence;
    }
    current_tokens += tokens;
  }
  flush();
  return segments;
}

}  // namespace sparsedm
