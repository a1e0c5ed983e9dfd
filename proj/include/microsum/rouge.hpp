#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace microsum {

using TokenSeq = std::vector<std::string>;

// Lowercases, splits punctuation characters into separate tokens, then splits
// on whitespace. No stemming, no stopword removal, so results are fully
// deterministic (this intentionally diverges from the official ROUGE toolkit).
TokenSeq tokenize(const std::string& text);

// Splits text into sentences at terminal punctuation (. ! ?). The terminal
// punctuation is consumed; empty sentences are dropped.
std::vector<std::string> split_sentences(const std::string& text);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge_score(double overlap, double cand_total, double ref_total);

// N-gram overlap with clipped multiset counts. Empty n-gram sets on either
// side give an all-zero score. No smoothing.
RougeScore rouge_n(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n);

// Longest-common-subsequence score: recall = LCS/|ref|, precision = LCS/|cand|.
RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// Per-sentence relative importance against a reference summary: the mean of
// ROUGE-2 and ROUGE-L f1 per sentence, normalized to sum to 1. If every
// sentence scores zero the labels fall back to the uniform distribution so
// they stay a valid regression target.
struct SaliencyLabels {
  std::vector<double> scores;
};

SaliencyLabels relative_importance(const std::vector<TokenSeq>& sentences,
                                   const TokenSeq& summary);

struct RougeAggregate {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
};

// Mean f1 per variant over aligned candidate/reference pairs.
RougeAggregate evaluate_rouge(const std::vector<TokenSeq>& candidates,
                              const std::vector<TokenSeq>& references);

}  // namespace microsum
