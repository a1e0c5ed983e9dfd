#include "microsum/rouge.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_map>

namespace microsum {

TokenSeq tokenize(const std::string& text) {
  TokenSeq tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  };
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      tokens.push_back(std::string(1, static_cast<char>(c)));
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string cur;
  auto flush = [&] {
    std::size_t b = cur.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
      cur.clear();
      return;
    }
    std::size_t e = cur.find_last_not_of(" \t\r\n");
    sentences.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return sentences;
}

RougeScore make_rouge_score(double overlap, double cand_total, double ref_total) {
  RougeScore s;
  if (cand_total > 0.0) s.precision = overlap / cand_total;
  if (ref_total > 0.0) s.recall = overlap / ref_total;
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

namespace {

// join n consecutive tokens with an unlikely separator so multisets hash simply
std::unordered_map<std::string, std::size_t> ngram_counts(const TokenSeq& seq, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      if (j) key.push_back('\x1f');
      key += seq[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

RougeScore rouge_n(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  if (cand.empty() || ref.empty()) return {};
  std::size_t overlap = 0, cand_total = 0, ref_total = 0;
  for (const auto& [k, c] : cand) cand_total += c;
  for (const auto& [k, c] : ref) ref_total += c;
  for (const auto& [k, c] : cand) {
    auto it = ref.find(k);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  return make_rouge_score(static_cast<double>(overlap), static_cast<double>(cand_total),
                          static_cast<double>(ref_total));
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() || b.empty()) return 0;
  // two-row DP
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
  if (candidate.empty() || reference.empty()) return {};
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  return make_rouge_score(lcs, static_cast<double>(candidate.size()),
                          static_cast<double>(reference.size()));
}

SaliencyLabels relative_importance(const std::vector<TokenSeq>& sentences,
                                   const TokenSeq& summary) {
  if (sentences.empty()) {
    throw std::invalid_argument("relative_importance: no sentences");
  }
  SaliencyLabels out;
  out.scores.resize(sentences.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const double raw = 0.5 * (rouge_n(sentences[i], summary, 2).f1 +
                              rouge_l(sentences[i], summary).f1);
    out.scores[i] = raw;
    total += raw;
  }
  if (total > 0.0) {
    for (double& s : out.scores) s /= total;
  } else {
    const double uniform = 1.0 / static_cast<double>(sentences.size());
    for (double& s : out.scores) s = uniform;
  }
  return out;
}

RougeAggregate evaluate_rouge(const std::vector<TokenSeq>& candidates,
                              const std::vector<TokenSeq>& references) {
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("evaluate_rouge: " + std::to_string(candidates.size()) +
                                " candidates vs " + std::to_string(references.size()) +
                                " references");
  }
  RougeAggregate agg;
  if (candidates.empty()) return agg;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    agg.rouge1 += rouge_n(candidates[i], references[i], 1).f1;
    agg.rouge2 += rouge_n(candidates[i], references[i], 2).f1;
    agg.rougeL += rouge_l(candidates[i], references[i]).f1;
  }
  const double n = static_cast<double>(candidates.size());
  agg.rouge1 /= n;
  agg.rouge2 /= n;
  agg.rougeL /= n;
  return agg;
}

}  // namespace microsum
