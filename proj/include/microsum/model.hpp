#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "microsum/corpus.hpp"
#include "microsum/tensor.hpp"

namespace microsum {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 64;
  std::size_t n_heads = 4;
  std::size_t enc_layers = 2;
  std::size_t dec_layers = 2;
  std::size_t ffn_dim = 128;
  std::size_t max_len = 256;
  // Adds a cross-attention sublayer per decoder layer whose keys/values are
  // the per-sentence representations gathered at </s> positions.
  bool sentence_attention = true;

  void validate() const;
};

// Captured attention weight matrices, for tests.
struct AttnRecord {
  std::string kind;  // enc.self | dec.self | dec.cross | dec.sent | tag.sent
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;
};

struct AttnProbe {
  std::vector<AttnRecord> records;
};

struct NamedParam {
  std::string name;
  Tensor tensor;
};

struct AttentionParams {
  Tensor norm_gain, norm_bias;
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
};

struct FfnParams {
  Tensor norm_gain, norm_bias;
  Tensor w1, b1, w2, b2;
};

struct EncoderLayerParams {
  AttentionParams self_attn;
  FfnParams ffn;
};

struct DecoderLayerParams {
  AttentionParams self_attn;
  AttentionParams cross_attn;
  std::optional<AttentionParams> sent_attn;
  FfnParams ffn;
};

struct EncodeResult {
  Tensor token_states;  // [len x d_model]
  Tensor bank;          // [n_sentences x d_model], rows at </s> positions
};

enum class DecodeMode { greedy, beam };

// Pre-norm transformer encoder-decoder with tied input/output embedding,
// fixed sinusoidal positions and no dropout, so every forward pass is
// deterministic. Decoder layers run masked self-attention, token
// cross-attention, optionally sentence cross-attention, then the
// feed-forward block, each with its own residual.
class Seq2SeqModel {
 public:
  Seq2SeqModel(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }

  // Runtime toggle used by ablation tests: parameters stay allocated, the
  // sublayer is just skipped. Only valid when the model was built with
  // sentence attention.
  void set_sentence_attention_active(bool active);
  bool sentence_attention_active() const { return sent_attn_active_; }

  bool stage1_done() const { return stage1_done_; }
  void mark_stage1_done() { stage1_done_ = true; }

  // Inputs longer than max_len are truncated at the last complete sentence.
  EncodeResult encode(const FramedDocument& doc, AttnProbe* probe = nullptr) const;

  // Saliency scores per sentence, each in (0,1): bank rows pass through the
  // sentence-attention modules (as self-attention) and a linear+sigmoid head.
  Tensor tag_scores(const EncodeResult& enc, AttnProbe* probe = nullptr) const;
  std::vector<double> tag_sentences(const FramedDocument& doc) const;

  // Teacher-forced logits for every prefix position: [len(prefix) x vocab].
  Tensor decode_logits(std::span<const int> prefix, const EncodeResult& enc,
                       AttnProbe* probe = nullptr) const;
  // Next-token logits after the prefix.
  std::vector<double> decode_step(std::span<const int> prefix, const EncodeResult& enc) const;

  // Mean token cross-entropy of the framed target [decode-start, ..., </s>]
  // under teacher forcing; a scalar per sample, length-normalized.
  Tensor summarization_loss(const FramedDocument& doc, std::span<const int> framed_target) const;

  // Greedy or beam decoding; beam ranking uses length-normalized log
  // probability with deterministic lower-token-id tie-breaks. Returns
  // generated tokens without decode-start or the final </s>.
  std::vector<int> generate(const FramedDocument& doc, DecodeMode mode,
                            std::size_t beam_width, std::size_t max_new_tokens) const;

  const std::vector<NamedParam>& parameters() const { return params_; }
  Tensor param(const std::string& name) const;
  std::size_t parameter_count() const;

  std::vector<std::vector<double>> snapshot_params() const;
  void restore_params(const std::vector<std::vector<double>>& snap);

  void save(const std::string& path) const;
  static Seq2SeqModel load(const std::string& path);

  static bool is_embedding_param(const std::string& name);
  static bool is_encoder_param(const std::string& name);
  static bool is_sentence_attention_param(const std::string& name);
  static bool is_tag_param(const std::string& name);

 private:
  Tensor make_param(const std::string& name, const Shape& shape, std::size_t fan_in);
  Tensor make_const_param(const std::string& name, const Shape& shape, double fill);
  AttentionParams make_attention(const std::string& prefix);
  FfnParams make_ffn(const std::string& prefix);
  Tensor positions(std::size_t len) const;
  Tensor attention(const AttentionParams& p, const Tensor& x, const Tensor* kv,
                   const Tensor* mask, const char* kind, AttnProbe* probe) const;
  Tensor ffn(const FfnParams& p, const Tensor& x) const;
  FramedDocument truncate(const FramedDocument& doc) const;

  ModelConfig cfg_;
  std::uint64_t seed_ = 0;
  bool sent_attn_active_ = false;
  bool stage1_done_ = false;

  Tensor embedding_;
  std::vector<EncoderLayerParams> enc_layers_;
  Tensor enc_final_gain_, enc_final_bias_;
  std::vector<DecoderLayerParams> dec_layers_;
  Tensor dec_final_gain_, dec_final_bias_;
  Tensor tag_w_, tag_b_;

  std::vector<double> pos_table_;  // [max_len x d_model]
  std::vector<NamedParam> params_;
};

}  // namespace microsum
