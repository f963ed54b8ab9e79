#pragma once

#include <vector>

#include "tangent/tensor.hpp"

namespace tangent {

// Layer conventions, fixed once for the whole library:
//   * activations are d x n matrices, one token per column;
//   * projections act on the left, y = W * x;
//   * attention logits for head h are scale * Q_h^T K_h (n x n, row = query
//     token) and the softmax is taken over rows.
//
// Every layer consumes a (value, jvp) pair and emits one. The jvp stream
// carries the directional derivative of the value stream along the tangent
// deltas, so a layer with zero deltas and zero incoming jvp emits an exactly
// zero jvp. Deltas are passed as pointers; nullptr means "no deltas here",
// which drops the corresponding terms instead of multiplying by zeros.

struct DualValue {
  Tensor value;
  Tensor jvp;
};

// ---- parameters and deltas ---------------------------------------------

struct AttentionParams {
  Tensor w_q, w_k, w_v;  // d x d
  int heads = 1;
  double scale = 0.0;  // <= 0 selects 1/sqrt(d/heads)
  double logit_scale() const;
};

struct AttentionDeltas {
  Tensor dw_q, dw_k, dw_v;
  static AttentionDeltas zeros(int d);
};

struct LayerNormParams {
  Tensor gamma, beta;  // length d
  double eps = 1e-5;
};

struct LayerNormDeltas {
  Tensor dgamma, dbeta;
  static LayerNormDeltas zeros(int d);
};

struct LinearParams {
  Tensor w;  // out x in
  Tensor b;  // out
};

struct LinearDeltas {
  Tensor dw, db;
  static LinearDeltas zeros(int out, int in);
};

// ---- value-only forward --------------------------------------------------

struct AttentionValueCache {
  Tensor q, k, v;
  std::vector<Tensor> phi;  // per-head n x n attention matrices
};

Tensor attention_value(const Tensor& x, const AttentionParams& p, AttentionValueCache* vc = nullptr);
Tensor layernorm_value(const Tensor& x, const LayerNormParams& p);
Tensor linear_value(const Tensor& x, const LinearParams& p);
Tensor gelu_value(const Tensor& x);

double gelu_scalar(double x);
double gelu_derivative(double x);  // CDF(x) + x * pdf(x)
double normal_cdf(double x);
double normal_pdf(double x);

// ---- dual forward ----------------------------------------------------------

struct AttentionCache {
  Tensor x, jvp_in;
  Tensor q, k, v;            // d x n projections
  Tensor q_dot, k_dot, gam;  // their directional derivatives (gam = value-path Gamma)
  std::vector<Tensor> phi, psi, phi_dot;  // per-head n x n
};

struct LayerNormCache {
  Tensor x, jvp_in;
  Tensor centered, xhat, jc;       // d x n
  std::vector<double> sigma, qcv;  // per-token sqrt(var+eps) and mean(c*jc)
};

struct LinearCache {
  Tensor x, jvp_in;
};

struct GeluCache {
  Tensor x, jvp_in;
};

DualValue attention_dual(const DualValue& x, const AttentionParams& p, const AttentionDeltas* dp,
                         AttentionCache* cache = nullptr);
DualValue layernorm_dual(const DualValue& x, const LayerNormParams& p, const LayerNormDeltas* dp,
                         LayerNormCache* cache = nullptr);
DualValue linear_dual(const DualValue& x, const LinearParams& p, const LinearDeltas* dp, LinearCache* cache = nullptr);
DualValue gelu_dual(const DualValue& x, GeluCache* cache = nullptr);

// ---- backward --------------------------------------------------------------
//
// Each backward consumes the forward cache plus the loss gradients with
// respect to the layer's (value, jvp) outputs and produces exact gradients
// with respect to the input pair and, when grad_dp is non-null, the deltas.
// Base parameters are frozen and get no gradient. grad_x accumulators are
// overwritten, not accumulated into.

void attention_backward(const AttentionCache& cache, const AttentionParams& p, const AttentionDeltas* dp,
                        const Tensor& grad_value, const Tensor& grad_jvp, DualValue* grad_x, AttentionDeltas* grad_dp);
void layernorm_backward(const LayerNormCache& cache, const LayerNormParams& p, const LayerNormDeltas* dp,
                        const Tensor& grad_value, const Tensor& grad_jvp, DualValue* grad_x, LayerNormDeltas* grad_dp);
void linear_backward(const LinearCache& cache, const LinearParams& p, const LinearDeltas* dp, const Tensor& grad_value,
                     const Tensor& grad_jvp, DualValue* grad_x, LinearDeltas* grad_dp);
void gelu_backward(const GeluCache& cache, const Tensor& grad_value, const Tensor& grad_jvp, DualValue* grad_x);

}  // namespace tangent
