#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "microsum/errors.hpp"
#include "microsum/rouge.hpp"

namespace microsum {

struct Example {
  std::string id;
  std::string source;
  std::string summary;
};

struct Corpus {
  std::vector<Example> examples;
  std::size_t size() const { return examples.size(); }
  // Order-sensitive content hash; changes on any byte change.
  std::uint64_t content_hash() const;
};

struct LoadReport {
  struct BadLine {
    std::size_t line_number;  // 1-based
    std::string reason;
  };
  std::vector<BadLine> malformed;
  std::vector<std::string> warnings;
};

// One JSON object per line with string fields id/source/summary. Malformed
// lines land in the report; more than 10% malformed is a corpus error.
Corpus load_jsonl(const std::string& path, LoadReport* report = nullptr);

class Vocabulary {
 public:
  // reserved ids, fixed and disjoint
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kSentBegin = 2;   // <s>
  static constexpr int kSentEnd = 3;     // </s>
  static constexpr int kDecodeStart = 4;
  static constexpr int kNumReserved = 5;

  Vocabulary();

  // Word-level vocabulary from the training split, min frequency 1,
  // first-occurrence order. Out-of-vocabulary tokens map to <unk>.
  static Vocabulary build(const std::vector<TokenSeq>& texts);

  int id(const std::string& token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  std::vector<int> encode(const TokenSeq& tokens) const;
  TokenSeq decode(const std::vector<int>& ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Source tokens with every sentence wrapped in begin/end sentinels:
// [<s> sent1 </s> <s> sent2 </s> ...]; eos_positions index the </s> tokens.
struct FramedDocument {
  std::vector<int> token_ids;
  std::vector<std::size_t> eos_positions;
  std::size_t sentence_count() const { return eos_positions.size(); }
};

struct FramedExample {
  std::string id;
  FramedDocument doc;
  std::vector<int> target;          // [decode-start, summary tokens..., </s>]
  std::vector<TokenSeq> sentences;  // tokenized source sentences
  TokenSeq summary_tokens;
};

// Returns nullopt when the source has no extractable sentences.
std::optional<FramedExample> frame(const Example& ex, const Vocabulary& vocab);

// Strips sentinels back out of a framed document.
std::vector<int> strip_framing(const FramedDocument& doc);

// Relative-importance labels per example (empty scores for sources with no
// extractable sentences). Pure per example, parallelized over examples.
std::vector<SaliencyLabels> label_corpus(const Corpus& corpus);

// Same, but backed by an on-disk cache keyed by the corpus content hash.
// A hash match loads the cached labels bit-for-bit without recomputation.
std::vector<SaliencyLabels> label_corpus_cached(const Corpus& corpus,
                                                const std::string& cache_path);

enum class SyntheticTask { copy, lead1, keyword_extract };

std::string synthetic_task_name(SyntheticTask t);
SyntheticTask synthetic_task_from_name(const std::string& name);

struct SyntheticSpec {
  SyntheticTask task = SyntheticTask::copy;
  std::size_t n_train = 32;
  std::size_t n_val = 8;
  std::size_t min_sentences = 1;
  std::size_t max_sentences = 1;
  std::size_t min_words = 4;
  std::size_t max_words = 8;
  std::size_t vocab_words = 30;  // content words, excluding the keyword marker
  double noise_rate = 0.0;       // train-only label noise; validation stays clean
  std::uint64_t seed = 1;
};

// The keyword_extract task plants this word in exactly one sentence and makes
// that sentence the summary.
extern const char* const kKeywordMarker;

struct SyntheticCorpus {
  Corpus train;
  Corpus val;
  std::vector<std::size_t> corrupted;  // train indices whose summary was replaced
};

// copy: summary = all source words; lead1: summary = first sentence;
// keyword_extract: summary = the marker sentence. With probability noise_rate
// a training summary is replaced by a random non-target sentence.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace microsum
