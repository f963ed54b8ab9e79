#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tangent/dual.hpp"
#include "tangent/rng.hpp"
#include "tangent/tensor.hpp"

namespace tangent {

enum class PredictionMode { kFull, kJvpOnly };

// Which kinds of tangent parameters carry deltas inside the tunable blocks
// (and the final norm). Head / embedding / cls participation is governed by
// their own mask flags.
enum class ParamSubset { kAll, kBiasOnly, kLayerNormOnly };

struct ModelConfig {
  int depth = 2;
  int d = 32;
  int heads = 2;
  int mlp_ratio = 4;
  int n_classes = 4;
  int input_dim = 16;
  int input_tokens = 8;

  // Tunability mask: which parameters receive tangent deltas.
  int tunable_blocks = 1;  // counted from the end
  bool tune_head = true;
  bool tune_final_norm = true;
  bool tune_embedding = false;
  ParamSubset subset = ParamSubset::kAll;

  // Linearization-point options.
  bool reset_last_block = false;
  bool linearize_cls = false;

  PredictionMode prediction_mode = PredictionMode::kFull;
  double ln_eps = 1e-5;

  int tokens() const { return input_tokens + 1; }  // cls column prepended
  int mlp_hidden() const { return d * mlp_ratio; }
  int first_tunable_block() const { return depth - tunable_blocks; }
  bool mask_empty() const;
  void validate() const;
};

std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& text);

// ---- weights ---------------------------------------------------------------

struct EmbeddingParams {
  LinearParams proj;  // d x input_dim
  Tensor pos;         // d x tokens
};

struct EmbeddingDeltas {
  LinearDeltas proj;
  Tensor dpos;
};

struct BlockParams {
  LayerNormParams ln1;
  AttentionParams attn;
  LinearParams attn_out;
  LayerNormParams ln2;
  LinearParams fc1, fc2;
};

struct BlockDeltas {
  LayerNormDeltas ln1;
  AttentionDeltas attn;
  LinearDeltas attn_out;
  LayerNormDeltas ln2;
  LinearDeltas fc1, fc2;
  static BlockDeltas zeros(const ModelConfig& cfg);
};

// Frozen linearization point w. Immutable during tangent training; the
// nonlinear trainer owns the only mutating path.
struct BaseWeights {
  EmbeddingParams embed;
  Tensor cls_token;  // length d
  std::vector<BlockParams> blocks;
  LayerNormParams final_norm;
  LinearParams head;  // n_classes x d
};

// Learnable deltas, structurally parallel to the masked subset of
// BaseWeights. Forms a vector space under the flat operations below.
struct TangentWeights {
  int depth = 0;
  int first_block = 0;  // == depth when no blocks are tunable
  bool has_head = false, has_final_norm = false, has_embedding = false, has_cls = false;
  ParamSubset subset = ParamSubset::kAll;

  std::vector<BlockDeltas> blocks;  // depth - first_block entries
  LayerNormDeltas final_norm;
  LinearDeltas head;
  EmbeddingDeltas embedding;
  Tensor cls_delta;

  static TangentWeights zeros(const ModelConfig& cfg);
  // Empty mask: no deltas anywhere (value-only evaluation).
  static TangentWeights none(const ModelConfig& cfg);
  // Deltas for every parameter in the model; used by the nonlinear trainer.
  static TangentWeights zeros_full(const ModelConfig& cfg);

  bool same_structure(const TangentWeights& o) const;
  bool empty_mask() const { return blocks.empty() && !has_head && !has_final_norm && !has_embedding && !has_cls; }
};

// Flat vector-space view over the active entries (subset-filtered), in a
// fixed enumeration order shared with apply_delta and the base updates.
std::vector<double> flatten(const TangentWeights& tw);
void unflatten_into(TangentWeights& tw, const std::vector<double>& flat);
double delta_norm(const TangentWeights& tw);
double delta_dot(const TangentWeights& a, const TangentWeights& b);
void delta_axpy(double a, const TangentWeights& x, TangentWeights& y);
void delta_scale(TangentWeights& tw, double s);
TangentWeights zero_like(const TangentWeights& tw);

// Weighted sum over structurally identical deltas, accumulated in input order.
TangentWeights weighted_sum(const std::vector<const TangentWeights*>& deltas, const std::vector<double>& lambdas);

// base + scale * delta over the masked slots (other weights untouched).
BaseWeights apply_delta(BaseWeights base, const TangentWeights& delta, double scale);
// base update restricted to active slots: base -= lr * grad.
void apply_gradient_to_base(BaseWeights& base, const TangentWeights& grad, double lr);

// ---- model -------------------------------------------------------------

struct TangentModel {
  ModelConfig config;
  BaseWeights base;
  TangentWeights delta;
};

BaseWeights random_base(const ModelConfig& cfg, Rng& rng);

// Applies the linearization-point choices (reset_last_block, linearize_cls)
// to a pre-trained base and returns it with zero-initialized deltas.
TangentModel init_tangent(const ModelConfig& cfg, BaseWeights pretrained, Rng& rng);

// Fingerprint of (config, base): models may only be composed when equal.
std::string base_fingerprint(const ModelConfig& cfg, const BaseWeights& base);

struct BlockTrace {
  bool dual = false;  // dual caches populated (jvp stream live in this block)
  LayerNormCache ln1, ln2;
  AttentionCache attn;
  LinearCache attn_out, fc1, fc2;
  GeluCache gelu;
};

struct ForwardTrace {
  Tensor tokens;
  DualValue embed_out;
  int first_live_block = 0;
  std::vector<BlockTrace> blocks;
  LayerNormCache final_norm;
  LinearCache head;
  DualValue logits;
};

// Modified forward pass: returns (f_w(x), grad_w f_w(x) . delta) at the
// classifier head. Layers before any delta source propagate a jvp that is
// identically zero and are evaluated value-only.
DualValue forward_dual(const TangentModel& m, const Tensor& tokens, ForwardTrace* trace = nullptr);

// Plain forward of the nonlinear network at the given base weights.
Tensor forward_value(const ModelConfig& cfg, const BaseWeights& base, const Tensor& tokens);

// Prediction logits per config.prediction_mode (value + jvp, or jvp alone).
Tensor predict_logits(const TangentModel& m, const Tensor& tokens);
Tensor logits_from_dual(const ModelConfig& cfg, const DualValue& out);

// Exact gradient of a scalar loss with respect to every active delta, given
// d(loss)/d(logits). Base weights receive no gradient.
TangentWeights grad_tangent(const TangentModel& m, const ForwardTrace& trace, const Tensor& loss_grad);

// Instrumentation: number of forward_dual invocations since the last reset.
std::uint64_t forward_pass_count();
void reset_forward_pass_count();

// ---- dataset-level activation cache -----------------------------------

// Stores, per example, the value activations at the boundaries of the frozen
// prefix blocks (d x tokens each; plus the embedding output when the cls
// token is linearized, since the prefix jvp must then be replayed).
struct ActivationCache {
  int prefix_blocks = 0;
  bool store_embed = false;
  struct Entry {
    Tensor embed_out;
    std::vector<Tensor> block_out;
  };
  std::unordered_map<std::uint64_t, Entry> entries;
  mutable std::uint64_t hits = 0, misses = 0;
  std::size_t memory_floats() const;
};

ActivationCache make_activation_cache(const TangentModel& m);
void cache_example(ActivationCache& cache, const TangentModel& m, std::uint64_t id, const Tensor& tokens);

// Bit-identical to forward_dual; skips the frozen prefix using the cache.
// Unknown ids fall back to the full computation and are counted as misses.
DualValue forward_dual_cached(const TangentModel& m, const ActivationCache& cache, std::uint64_t id,
                              const Tensor& tokens, ForwardTrace* trace = nullptr);

}  // namespace tangent
