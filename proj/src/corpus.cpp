#include "microsum/corpus.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "microsum/rng.hpp"

namespace microsum {

namespace {

std::uint64_t hash_field(std::uint64_t h, const std::string& s) {
  h = fnv1a64(std::to_string(s.size()) + ":", h);
  return fnv1a64(s, h);
}

}  // namespace

std::uint64_t Corpus::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Example& ex : examples) {
    h = hash_field(h, ex.id);
    h = hash_field(h, ex.source);
    h = hash_field(h, ex.summary);
  }
  return h;
}

Corpus load_jsonl(const std::string& path, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read corpus file: " + path);
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  Corpus corpus;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  std::size_t candidate_lines = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++candidate_lines;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      rep.malformed.push_back({line_number, "not a JSON object"});
      continue;
    }
    std::string missing;
    for (const char* field : {"id", "source", "summary"}) {
      if (!j.contains(field) || !j[field].is_string()) {
        missing = missing.empty() ? field : missing + ", " + field;
      }
    }
    if (!missing.empty()) {
      rep.malformed.push_back({line_number, "missing string field(s): " + missing});
      continue;
    }
    Example ex{j["id"].get<std::string>(), j["source"].get<std::string>(),
               j["summary"].get<std::string>()};
    if (ex.source.empty()) {
      rep.malformed.push_back({line_number, "empty source"});
      continue;
    }
    if (!seen_ids.insert(ex.id).second) {
      rep.malformed.push_back({line_number, "duplicate id '" + ex.id + "'"});
      continue;
    }
    corpus.examples.push_back(std::move(ex));
  }
  if (candidate_lines == 0) {
    rep.warnings.push_back("corpus file is empty: " + path);
  }
  if (candidate_lines > 0 && 10 * rep.malformed.size() > candidate_lines) {
    std::ostringstream os;
    os << "corpus error: " << rep.malformed.size() << " of " << candidate_lines
       << " lines malformed (>10%) in " << path << "; first bad line "
       << rep.malformed.front().line_number << ": " << rep.malformed.front().reason;
    throw InputError(os.str());
  }
  return corpus;
}

Vocabulary::Vocabulary() {
  tokens_ = {"<pad>", "<unk>", "<s>", "</s>", "<start>"};
  for (int i = 0; i < kNumReserved; ++i) ids_[tokens_[static_cast<std::size_t>(i)]] = i;
}

Vocabulary Vocabulary::build(const std::vector<TokenSeq>& texts) {
  Vocabulary v;
  for (const TokenSeq& seq : texts) {
    for (const std::string& tok : seq) {
      if (v.ids_.find(tok) == v.ids_.end()) {
        v.ids_[tok] = static_cast<int>(v.tokens_.size());
        v.tokens_.push_back(tok);
      }
    }
  }
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("vocabulary: id " + std::to_string(id) + " outside [0, " +
                            std::to_string(tokens_.size()) + ")");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(const TokenSeq& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(id(t));
  return out;
}

TokenSeq Vocabulary::decode(const std::vector<int>& ids) const {
  TokenSeq out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

std::optional<FramedExample> frame(const Example& ex, const Vocabulary& vocab) {
  FramedExample fe;
  fe.id = ex.id;
  for (const std::string& sentence : split_sentences(ex.source)) {
    TokenSeq toks = tokenize(sentence);
    if (toks.empty()) continue;
    fe.doc.token_ids.push_back(Vocabulary::kSentBegin);
    for (int id : vocab.encode(toks)) fe.doc.token_ids.push_back(id);
    fe.doc.token_ids.push_back(Vocabulary::kSentEnd);
    fe.doc.eos_positions.push_back(fe.doc.token_ids.size() - 1);
    fe.sentences.push_back(std::move(toks));
  }
  if (fe.sentences.empty()) return std::nullopt;
  fe.summary_tokens = tokenize(ex.summary);
  fe.target.push_back(Vocabulary::kDecodeStart);
  for (int id : vocab.encode(fe.summary_tokens)) fe.target.push_back(id);
  fe.target.push_back(Vocabulary::kSentEnd);
  return fe;
}

std::vector<int> strip_framing(const FramedDocument& doc) {
  std::vector<int> out;
  for (int id : doc.token_ids) {
    if (id != Vocabulary::kSentBegin && id != Vocabulary::kSentEnd) out.push_back(id);
  }
  return out;
}

std::vector<SaliencyLabels> label_corpus(const Corpus& corpus) {
  std::vector<SaliencyLabels> labels(corpus.size());
  const long n = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic, 8) if (n >= 32)
  for (long i = 0; i < n; ++i) {
    const Example& ex = corpus.examples[static_cast<std::size_t>(i)];
    std::vector<TokenSeq> sentences;
    for (const std::string& s : split_sentences(ex.source)) {
      TokenSeq toks = tokenize(s);
      if (!toks.empty()) sentences.push_back(std::move(toks));
    }
    if (sentences.empty()) continue;  // leaves an empty score row
    labels[static_cast<std::size_t>(i)] =
        relative_importance(sentences, tokenize(ex.summary));
  }
  return labels;
}

namespace {

constexpr char kLabelMagic[4] = {'M', 'S', 'L', 'B'};
constexpr std::uint32_t kLabelVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_raw(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

}  // namespace

std::vector<SaliencyLabels> label_corpus_cached(const Corpus& corpus,
                                                const std::string& cache_path) {
  const std::uint64_t want = corpus.content_hash();
  {
    std::ifstream in(cache_path, std::ios::binary);
    if (in) {
      char magic[4];
      std::uint32_t version = 0;
      std::uint64_t hash = 0, count = 0;
      in.read(magic, 4);
      if (in && std::equal(magic, magic + 4, kLabelMagic) && read_raw(in, version) &&
          version == kLabelVersion && read_raw(in, hash) && hash == want &&
          read_raw(in, count) && count == corpus.size()) {
        std::vector<SaliencyLabels> labels(count);
        bool ok = true;
        for (auto& row : labels) {
          std::uint32_t n = 0;
          if (!read_raw(in, n)) {
            ok = false;
            break;
          }
          row.scores.resize(n);
          in.read(reinterpret_cast<char*>(row.scores.data()),
                  static_cast<std::streamsize>(n * sizeof(double)));
          if (!in) {
            ok = false;
            break;
          }
        }
        if (ok) return labels;
      }
    }
  }
  std::vector<SaliencyLabels> labels = label_corpus(corpus);
  const std::string tmp = cache_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write label cache: " + tmp);
    out.write(kLabelMagic, 4);
    write_raw(out, kLabelVersion);
    write_raw(out, want);
    write_raw(out, static_cast<std::uint64_t>(labels.size()));
    for (const auto& row : labels) {
      write_raw(out, static_cast<std::uint32_t>(row.scores.size()));
      out.write(reinterpret_cast<const char*>(row.scores.data()),
                static_cast<std::streamsize>(row.scores.size() * sizeof(double)));
    }
  }
  std::filesystem::rename(tmp, cache_path);  // atomic publish
  return labels;
}

std::string synthetic_task_name(SyntheticTask t) {
  switch (t) {
    case SyntheticTask::copy: return "copy";
    case SyntheticTask::lead1: return "lead1";
    case SyntheticTask::keyword_extract: return "keyword_extract";
  }
  return "?";
}

SyntheticTask synthetic_task_from_name(const std::string& name) {
  if (name == "copy") return SyntheticTask::copy;
  if (name == "lead1") return SyntheticTask::lead1;
  if (name == "keyword_extract") return SyntheticTask::keyword_extract;
  throw std::invalid_argument("unknown synthetic task '" + name +
                              "' (expected copy|lead1|keyword_extract)");
}

const char* const kKeywordMarker = "marker";

namespace {

std::string join(const TokenSeq& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

void validate_spec(const SyntheticSpec& spec) {
  std::vector<std::string> problems;
  if (spec.min_sentences < 1) problems.push_back("min_sentences must be >= 1");
  if (spec.max_sentences < spec.min_sentences)
    problems.push_back("max_sentences must be >= min_sentences");
  if (spec.min_words < 1) problems.push_back("min_words must be >= 1");
  if (spec.max_words < spec.min_words) problems.push_back("max_words must be >= min_words");
  if (spec.vocab_words < 1) problems.push_back("vocab_words must be >= 1");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0))
    problems.push_back("noise_rate must be in [0, 1)");
  if (spec.n_train < 1) problems.push_back("n_train must be >= 1");
  if (!problems.empty()) {
    std::string msg = "infeasible synthetic spec:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw std::invalid_argument(msg);
  }
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  validate_spec(spec);
  std::vector<std::string> words;
  words.reserve(spec.vocab_words);
  for (std::size_t i = 0; i < spec.vocab_words; ++i) words.push_back("w" + std::to_string(i));

  RngStream rng = substream(spec.seed, "synthetic");
  auto make_sentence = [&]() {
    const std::size_t k =
        spec.min_words + rng.next_below(spec.max_words - spec.min_words + 1);
    TokenSeq s;
    for (std::size_t i = 0; i < k; ++i) s.push_back(words[rng.next_below(words.size())]);
    return s;
  };

  SyntheticCorpus out;
  auto emit = [&](Corpus& corpus, const std::string& prefix, std::size_t index, bool noisy) {
    const std::size_t n_sent =
        spec.min_sentences + rng.next_below(spec.max_sentences - spec.min_sentences + 1);
    std::vector<TokenSeq> sentences;
    for (std::size_t s = 0; s < n_sent; ++s) sentences.push_back(make_sentence());

    std::size_t target_idx = 0;  // sentence the summary is built from, when applicable
    TokenSeq summary;
    switch (spec.task) {
      case SyntheticTask::copy: {
        for (const auto& s : sentences) summary.insert(summary.end(), s.begin(), s.end());
        break;
      }
      case SyntheticTask::lead1: {
        summary = sentences[0];
        break;
      }
      case SyntheticTask::keyword_extract: {
        target_idx = rng.next_below(n_sent);
        TokenSeq& t = sentences[target_idx];
        t.insert(t.begin() + static_cast<std::ptrdiff_t>(rng.next_below(t.size() + 1)),
                 kKeywordMarker);
        summary = t;
        break;
      }
    }

    bool corrupted = false;
    if (noisy && rng.next_double() < spec.noise_rate) {
      corrupted = true;
      // a uniformly random non-target sentence; fabricate one if none exists
      std::vector<std::size_t> candidates;
      for (std::size_t s = 0; s < n_sent; ++s) {
        const bool is_target =
            (spec.task == SyntheticTask::copy) ||
            (spec.task == SyntheticTask::lead1 && s == 0) ||
            (spec.task == SyntheticTask::keyword_extract && s == target_idx);
        if (!is_target) candidates.push_back(s);
      }
      if (candidates.empty()) {
        summary = make_sentence();
      } else {
        summary = sentences[candidates[rng.next_below(candidates.size())]];
      }
    }

    std::string source;
    for (std::size_t s = 0; s < n_sent; ++s) {
      if (s) source += " ";
      source += join(sentences[s]) + " .";
    }
    Example ex;
    ex.id = prefix + "-" + std::to_string(index);
    ex.source = std::move(source);
    ex.summary = join(summary);
    if (corrupted) out.corrupted.push_back(corpus.examples.size());
    corpus.examples.push_back(std::move(ex));
  };

  for (std::size_t i = 0; i < spec.n_train; ++i) emit(out.train, "train", i, true);
  for (std::size_t i = 0; i < spec.n_val; ++i) emit(out.val, "val", i, false);
  return out;
}

}  // namespace microsum
