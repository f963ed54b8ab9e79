#include "tangent/dual.hpp"

#include <cmath>
#include <string>

#include "tangent/errors.hpp"

namespace tangent {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

void check_dual(const DualValue& x, const char* op) {
  check_same_shape(x.value, x.jvp, op);
}

void check_square_d(const Tensor& w, int d, const char* name) {
  if (w.ndim() != 2 || w.rows() != d || w.cols() != d) {
    throw DimensionError(std::string(name) + ": expected (" + std::to_string(d) + "x" + std::to_string(d) + "), got " +
                         w.shape_str());
  }
}

}  // namespace

double AttentionParams::logit_scale() const {
  if (scale > 0.0) return scale;
  const int d = w_q.rows();
  return 1.0 / std::sqrt(static_cast<double>(d / heads));
}

AttentionDeltas AttentionDeltas::zeros(int d) {
  return AttentionDeltas{Tensor({d, d}), Tensor({d, d}), Tensor({d, d})};
}

LayerNormDeltas LayerNormDeltas::zeros(int d) { return LayerNormDeltas{Tensor({d}), Tensor({d})}; }

LinearDeltas LinearDeltas::zeros(int out, int in) { return LinearDeltas{Tensor({out, in}), Tensor({out})}; }

// ---- attention -------------------------------------------------------------

namespace {

struct AttentionShapes {
  int d, n, heads, dh;
  double scale;
};

AttentionShapes attention_shapes(const Tensor& x, const AttentionParams& p) {
  if (x.ndim() != 2) throw DimensionError("attention: input must be d x n, got " + x.shape_str());
  const int d = x.rows(), n = x.cols();
  check_square_d(p.w_q, d, "attention w_q");
  check_square_d(p.w_k, d, "attention w_k");
  check_square_d(p.w_v, d, "attention w_v");
  if (p.heads < 1 || d % p.heads != 0) {
    throw ConfigError("attention: heads=" + std::to_string(p.heads) + " must divide d=" + std::to_string(d));
  }
  return {d, n, p.heads, d / p.heads, p.logit_scale()};
}

// Shared value path so the plain and dual forwards are bit-identical.
void attention_core(const Tensor& x, const AttentionParams& p, const AttentionShapes& s, Tensor& q, Tensor& k,
                    Tensor& v, std::vector<Tensor>& phi, Tensor& out) {
  q = matmul(p.w_q, x);
  k = matmul(p.w_k, x);
  v = matmul(p.w_v, x);
  phi.clear();
  phi.reserve(static_cast<std::size_t>(s.heads));
  out = Tensor({s.d, s.n});
  for (int h = 0; h < s.heads; ++h) {
    const int r0 = h * s.dh, r1 = r0 + s.dh;
    const Tensor qh = row_slice(q, r0, r1);
    const Tensor kh = row_slice(k, r0, r1);
    const Tensor vh = row_slice(v, r0, r1);
    Tensor logits = matmul_tn(qh, kh);
    scale_inplace(logits, s.scale);
    Tensor ph = softmax_rows(logits);
    set_row_slice(out, r0, matmul_nt(vh, ph));
    phi.push_back(std::move(ph));
  }
}

}  // namespace

Tensor attention_value(const Tensor& x, const AttentionParams& p, AttentionValueCache* vc) {
  const AttentionShapes s = attention_shapes(x, p);
  Tensor q, k, v, out;
  std::vector<Tensor> phi;
  attention_core(x, p, s, q, k, v, phi, out);
  if (vc) {
    vc->q = std::move(q);
    vc->k = std::move(k);
    vc->v = std::move(v);
    vc->phi = std::move(phi);
  }
  return out;
}

DualValue attention_dual(const DualValue& x, const AttentionParams& p, const AttentionDeltas* dp,
                         AttentionCache* cache) {
  check_dual(x, "attention_dual");
  const AttentionShapes s = attention_shapes(x.value, p);
  if (dp) {
    check_square_d(dp->dw_q, s.d, "attention dw_q");
    check_square_d(dp->dw_k, s.d, "attention dw_k");
    check_square_d(dp->dw_v, s.d, "attention dw_v");
  }

  Tensor q, k, v, value;
  std::vector<Tensor> phi;
  attention_core(x.value, p, s, q, k, v, phi, value);

  // Directional derivatives of the projections: the delta applied to the
  // input value plus the frozen weight pushed through the incoming jvp.
  Tensor q_dot = matmul(p.w_q, x.jvp);
  Tensor k_dot = matmul(p.w_k, x.jvp);
  Tensor gam = matmul(p.w_v, x.jvp);
  if (dp) {
    add_inplace(q_dot, matmul(dp->dw_q, x.value));
    add_inplace(k_dot, matmul(dp->dw_k, x.value));
    add_inplace(gam, matmul(dp->dw_v, x.value));
  }

  Tensor jvp({s.d, s.n});
  std::vector<Tensor> psi_all, phidot_all;
  psi_all.reserve(static_cast<std::size_t>(s.heads));
  phidot_all.reserve(static_cast<std::size_t>(s.heads));
  for (int h = 0; h < s.heads; ++h) {
    const int r0 = h * s.dh, r1 = r0 + s.dh;
    const Tensor qh = row_slice(q, r0, r1);
    const Tensor kh = row_slice(k, r0, r1);
    const Tensor vh = row_slice(v, r0, r1);
    const Tensor qdh = row_slice(q_dot, r0, r1);
    const Tensor kdh = row_slice(k_dot, r0, r1);
    const Tensor gh = row_slice(gam, r0, r1);
    const Tensor& ph = phi[static_cast<std::size_t>(h)];

    // Psi is the derivative of the scaled logits.
    Tensor psi = matmul_tn(qdh, kh) + matmul_tn(qh, kdh);
    scale_inplace(psi, s.scale);

    // Row-wise softmax derivative: phi .* psi - diag(rowsum(phi .* psi)) phi.
    Tensor phidot = hadamard(ph, psi);
    for (int i = 0; i < s.n; ++i) {
      double r = 0.0;
      for (int j = 0; j < s.n; ++j) r += phidot.at(i, j);
      for (int j = 0; j < s.n; ++j) phidot.at(i, j) -= r * ph.at(i, j);
    }

    Tensor jh = matmul_nt(gh, ph) + matmul_nt(vh, phidot);
    set_row_slice(jvp, r0, jh);
    psi_all.push_back(std::move(psi));
    phidot_all.push_back(std::move(phidot));
  }

  if (cache) {
    cache->x = x.value;
    cache->jvp_in = x.jvp;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->q_dot = std::move(q_dot);
    cache->k_dot = std::move(k_dot);
    cache->gam = std::move(gam);
    cache->phi = std::move(phi);
    cache->psi = std::move(psi_all);
    cache->phi_dot = std::move(phidot_all);
  }
  return DualValue{std::move(value), std::move(jvp)};
}

void attention_backward(const AttentionCache& cache, const AttentionParams& p, const AttentionDeltas* dp,
                        const Tensor& grad_value, const Tensor& grad_jvp, DualValue* grad_x,
                        AttentionDeltas* grad_dp) {
  const AttentionShapes s = attention_shapes(cache.x, p);
  check_same_shape(grad_value, cache.x, "attention_backward grad_value");
  check_same_shape(grad_jvp, cache.x, "attention_backward grad_jvp");
  if (cache.phi.size() != static_cast<std::size_t>(s.heads)) {
    throw StateError("attention_backward: cache does not match parameters");
  }

  Tensor q_bar({s.d, s.n}), k_bar({s.d, s.n}), v_bar({s.d, s.n});
  Tensor qd_bar({s.d, s.n}), kd_bar({s.d, s.n}), g_bar({s.d, s.n});

  for (int h = 0; h < s.heads; ++h) {
    const int r0 = h * s.dh, r1 = r0 + s.dh;
    const Tensor gv = row_slice(grad_value, r0, r1);
    const Tensor gj = row_slice(grad_jvp, r0, r1);
    const Tensor qh = row_slice(cache.q, r0, r1);
    const Tensor kh = row_slice(cache.k, r0, r1);
    const Tensor vh = row_slice(cache.v, r0, r1);
    const Tensor qdh = row_slice(cache.q_dot, r0, r1);
    const Tensor kdh = row_slice(cache.k_dot, r0, r1);
    const Tensor gamh = row_slice(cache.gam, r0, r1);
    const Tensor& ph = cache.phi[static_cast<std::size_t>(h)];
    const Tensor& psih = cache.psi[static_cast<std::size_t>(h)];
    const Tensor& pdh = cache.phi_dot[static_cast<std::size_t>(h)];

    // value output: out_h = V_h Phi_h^T
    set_row_slice(v_bar, r0, matmul(gv, ph));
    Tensor phi_bar = matmul_tn(gv, vh);

    // jvp output: jvp_h = Gamma_h Phi_h^T + V_h PhiDot_h^T
    set_row_slice(g_bar, r0, matmul(gj, ph));
    add_inplace(phi_bar, matmul_tn(gj, gamh));
    {
      Tensor vb = row_slice(v_bar, r0, r1);
      add_inplace(vb, matmul(gj, pdh));
      set_row_slice(v_bar, r0, vb);
    }
    Tensor phidot_bar = matmul_tn(gj, vh);

    // phidot = T - diag(rowsum T) phi with T = phi .* psi
    Tensor t_bar = phidot_bar;  // copy
    for (int i = 0; i < s.n; ++i) {
      double rsum = 0.0;  // rowsum of T = phi .* psi
      double rbar = 0.0;
      for (int j = 0; j < s.n; ++j) {
        rsum += ph.at(i, j) * psih.at(i, j);
        rbar -= phidot_bar.at(i, j) * ph.at(i, j);
      }
      for (int j = 0; j < s.n; ++j) {
        phi_bar.at(i, j) -= rsum * phidot_bar.at(i, j);
        t_bar.at(i, j) += rbar;
      }
    }
    Tensor psi_bar = hadamard(t_bar, ph);
    add_inplace(phi_bar, hadamard(t_bar, psih));

    // softmax rows: logits_bar_i = phi_i .* phi_bar_i - <phi_i, phi_bar_i> phi_i
    Tensor logits_bar({s.n, s.n});
    for (int i = 0; i < s.n; ++i) {
      double d = 0.0;
      for (int j = 0; j < s.n; ++j) d += ph.at(i, j) * phi_bar.at(i, j);
      for (int j = 0; j < s.n; ++j) logits_bar.at(i, j) = ph.at(i, j) * (phi_bar.at(i, j) - d);
    }

    // psi = scale (Qd^T K + Q^T Kd); logits = scale Q^T K
    Tensor qd_b = matmul_nt(kh, psi_bar);
    scale_inplace(qd_b, s.scale);
    set_row_slice(qd_bar, r0, qd_b);
    Tensor kd_b = matmul(qh, psi_bar);
    scale_inplace(kd_b, s.scale);
    set_row_slice(kd_bar, r0, kd_b);
    Tensor q_b = matmul_nt(kdh, psi_bar) + matmul_nt(kh, logits_bar);
    scale_inplace(q_b, s.scale);
    set_row_slice(q_bar, r0, q_b);
    Tensor k_b = matmul(qdh, psi_bar) + matmul(qh, logits_bar);
    scale_inplace(k_b, s.scale);
    set_row_slice(k_bar, r0, k_b);
  }

  if (grad_dp) {
    grad_dp->dw_q = matmul_nt(qd_bar, cache.x);
    grad_dp->dw_k = matmul_nt(kd_bar, cache.x);
    grad_dp->dw_v = matmul_nt(g_bar, cache.x);
  }
  if (grad_x) {
    Tensor xv = matmul_tn(p.w_q, q_bar) + matmul_tn(p.w_k, k_bar) + matmul_tn(p.w_v, v_bar);
    if (dp) {
      add_inplace(xv, matmul_tn(dp->dw_q, qd_bar));
      add_inplace(xv, matmul_tn(dp->dw_k, kd_bar));
      add_inplace(xv, matmul_tn(dp->dw_v, g_bar));
    }
    Tensor xj = matmul_tn(p.w_q, qd_bar) + matmul_tn(p.w_k, kd_bar) + matmul_tn(p.w_v, g_bar);
    grad_x->value = std::move(xv);
    grad_x->jvp = std::move(xj);
  }
}

// ---- layer norm --------------------------------------------------------

namespace {

void check_layernorm(const Tensor& x, const LayerNormParams& p) {
  if (x.ndim() != 2) throw DimensionError("layernorm: input must be d x n, got " + x.shape_str());
  const int d = x.rows();
  if (static_cast<int>(p.gamma.size()) != d || static_cast<int>(p.beta.size()) != d) {
    throw DimensionError("layernorm: gamma/beta length must be " + std::to_string(d));
  }
  if (p.eps <= 0.0) throw ConfigError("layernorm: eps must be positive");
}

}  // namespace

Tensor layernorm_value(const Tensor& x, const LayerNormParams& p) {
  check_layernorm(x, p);
  const int d = x.rows(), n = x.cols();
  Tensor out({d, n});
  for (int j = 0; j < n; ++j) {
    double mu = 0.0;
    for (int i = 0; i < d; ++i) mu += x.at(i, j);
    mu /= d;
    double var = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = x.at(i, j) - mu;
      var += c * c;
    }
    var /= d;
    const double sigma = std::sqrt(var + p.eps);
    for (int i = 0; i < d; ++i) {
      out.at(i, j) = p.gamma[static_cast<std::size_t>(i)] * ((x.at(i, j) - mu) / sigma) +
                     p.beta[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

DualValue layernorm_dual(const DualValue& x, const LayerNormParams& p, const LayerNormDeltas* dp,
                         LayerNormCache* cache) {
  check_dual(x, "layernorm_dual");
  check_layernorm(x.value, p);
  const int d = x.value.rows(), n = x.value.cols();
  if (dp && (static_cast<int>(dp->dgamma.size()) != d || static_cast<int>(dp->dbeta.size()) != d)) {
    throw DimensionError("layernorm: dgamma/dbeta length must be " + std::to_string(d));
  }

  Tensor value({d, n}), jvp({d, n});
  Tensor centered({d, n}), xhat({d, n}), jc({d, n});
  std::vector<double> sigma(static_cast<std::size_t>(n)), qcv(static_cast<std::size_t>(n));

  for (int j = 0; j < n; ++j) {
    double mu = 0.0, mudot = 0.0;
    for (int i = 0; i < d; ++i) {
      mu += x.value.at(i, j);
      mudot += x.jvp.at(i, j);
    }
    mu /= d;
    mudot /= d;
    double var = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = x.value.at(i, j) - mu;
      centered.at(i, j) = c;
      var += c * c;
    }
    var /= d;
    const double sg = std::sqrt(var + p.eps);
    sigma[static_cast<std::size_t>(j)] = sg;

    double q = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = centered.at(i, j);
      const double jci = x.jvp.at(i, j) - mudot;
      jc.at(i, j) = jci;
      xhat.at(i, j) = c / sg;
      q += c * jci;
    }
    q /= d;
    qcv[static_cast<std::size_t>(j)] = q;

    const double inv_sg = 1.0 / sg;
    const double qs3 = q / (sg * sg * sg);
    for (int i = 0; i < d; ++i) {
      const double xh = xhat.at(i, j);
      value.at(i, j) = p.gamma[static_cast<std::size_t>(i)] * xh + p.beta[static_cast<std::size_t>(i)];
      // derivative of xhat along the direction: jc/sigma - (q/sigma^3) c
      const double jhat = jc.at(i, j) * inv_sg - qs3 * centered.at(i, j);
      double ji = p.gamma[static_cast<std::size_t>(i)] * jhat;
      if (dp) ji += dp->dgamma[static_cast<std::size_t>(i)] * xh + dp->dbeta[static_cast<std::size_t>(i)];
      jvp.at(i, j) = ji;
    }
  }

  if (cache) {
    cache->x = x.value;
    cache->jvp_in = x.jvp;
    cache->centered = std::move(centered);
    cache->xhat = std::move(xhat);
    cache->jc = std::move(jc);
    cache->sigma = std::move(sigma);
    cache->qcv = std::move(qcv);
  }
  return DualValue{std::move(value), std::move(jvp)};
}

void layernorm_backward(const LayerNormCache& cache, const LayerNormParams& p, const LayerNormDeltas* dp,
                        const Tensor& grad_value, const Tensor& grad_jvp, DualValue* grad_x,
                        LayerNormDeltas* grad_dp) {
  const int d = cache.x.rows(), n = cache.x.cols();
  check_same_shape(grad_value, cache.x, "layernorm_backward grad_value");
  check_same_shape(grad_jvp, cache.x, "layernorm_backward grad_jvp");

  if (grad_dp) {
    grad_dp->dgamma = Tensor({d});
    grad_dp->dbeta = Tensor({d});
    for (int i = 0; i < d; ++i) {
      double ga = 0.0, ba = 0.0;
      for (int j = 0; j < n; ++j) {
        ga += grad_jvp.at(i, j) * cache.xhat.at(i, j);
        ba += grad_jvp.at(i, j);
      }
      grad_dp->dgamma[static_cast<std::size_t>(i)] = ga;
      grad_dp->dbeta[static_cast<std::size_t>(i)] = ba;
    }
  }

  if (!grad_x) return;
  grad_x->value = Tensor({d, n});
  grad_x->jvp = Tensor({d, n});

  std::vector<double> xhat_bar(static_cast<std::size_t>(d)), jhat_bar(static_cast<std::size_t>(d));
  std::vector<double> c_bar(static_cast<std::size_t>(d)), jc_bar(static_cast<std::size_t>(d));
  for (int j = 0; j < n; ++j) {
    const double sg = cache.sigma[static_cast<std::size_t>(j)];
    const double q = cache.qcv[static_cast<std::size_t>(j)];
    const double inv_sg = 1.0 / sg;
    const double qs3 = q / (sg * sg * sg);

    for (int i = 0; i < d; ++i) {
      const double gj = grad_jvp.at(i, j);
      double xb = p.gamma[static_cast<std::size_t>(i)] * grad_value.at(i, j);
      if (dp) xb += dp->dgamma[static_cast<std::size_t>(i)] * gj;
      xhat_bar[static_cast<std::size_t>(i)] = xb;
      jhat_bar[static_cast<std::size_t>(i)] = p.gamma[static_cast<std::size_t>(i)] * gj;
    }

    // jhat = jc/sigma - (q/sigma^3) c
    double dot_jh_c = 0.0, dot_jh_jc = 0.0;
    for (int i = 0; i < d; ++i) {
      const double jb = jhat_bar[static_cast<std::size_t>(i)];
      dot_jh_c += jb * cache.centered.at(i, j);
      dot_jh_jc += jb * cache.jc.at(i, j);
    }
    double sigma_bar = -dot_jh_jc / (sg * sg) + 3.0 * q / (sg * sg * sg * sg) * dot_jh_c;
    const double q_bar = -dot_jh_c / (sg * sg * sg);
    for (int i = 0; i < d; ++i) {
      jc_bar[static_cast<std::size_t>(i)] = jhat_bar[static_cast<std::size_t>(i)] * inv_sg;
      c_bar[static_cast<std::size_t>(i)] = -qs3 * jhat_bar[static_cast<std::size_t>(i)];
    }

    // q = mean(c .* jc)
    for (int i = 0; i < d; ++i) {
      c_bar[static_cast<std::size_t>(i)] += q_bar / d * cache.jc.at(i, j);
      jc_bar[static_cast<std::size_t>(i)] += q_bar / d * cache.centered.at(i, j);
    }

    // jc = jvp_in - mean(jvp_in)
    double jc_bar_mean = 0.0;
    for (int i = 0; i < d; ++i) jc_bar_mean += jc_bar[static_cast<std::size_t>(i)];
    jc_bar_mean /= d;
    for (int i = 0; i < d; ++i) grad_x->jvp.at(i, j) = jc_bar[static_cast<std::size_t>(i)] - jc_bar_mean;

    // xhat = c / sigma
    double dot_xh_c = 0.0;
    for (int i = 0; i < d; ++i) dot_xh_c += xhat_bar[static_cast<std::size_t>(i)] * cache.centered.at(i, j);
    sigma_bar -= dot_xh_c / (sg * sg);
    for (int i = 0; i < d; ++i) c_bar[static_cast<std::size_t>(i)] += xhat_bar[static_cast<std::size_t>(i)] * inv_sg;

    // sigma = sqrt(mean(c^2) + eps)
    const double coef = sigma_bar / (d * sg);
    for (int i = 0; i < d; ++i) c_bar[static_cast<std::size_t>(i)] += coef * cache.centered.at(i, j);

    // c = x - mean(x)
    double c_bar_mean = 0.0;
    for (int i = 0; i < d; ++i) c_bar_mean += c_bar[static_cast<std::size_t>(i)];
    c_bar_mean /= d;
    for (int i = 0; i < d; ++i) grad_x->value.at(i, j) = c_bar[static_cast<std::size_t>(i)] - c_bar_mean;
  }
}

// ---- linear ------------------------------------------------------------

namespace {

void check_linear(const Tensor& x, const LinearParams& p) {
  if (x.ndim() != 2) throw DimensionError("linear: input must be d x n, got " + x.shape_str());
  if (p.w.ndim() != 2 || p.w.cols() != x.rows()) {
    throw DimensionError("linear: weight " + p.w.shape_str() + " does not accept input " + x.shape_str());
  }
  if (static_cast<int>(p.b.size()) != p.w.rows()) {
    throw DimensionError("linear: bias length " + std::to_string(p.b.size()) + " vs output dim " +
                         std::to_string(p.w.rows()));
  }
}

}  // namespace

Tensor linear_value(const Tensor& x, const LinearParams& p) {
  check_linear(x, p);
  Tensor out = matmul(p.w, x);
  add_column_broadcast(out, p.b);
  return out;
}

DualValue linear_dual(const DualValue& x, const LinearParams& p, const LinearDeltas* dp, LinearCache* cache) {
  check_dual(x, "linear_dual");
  check_linear(x.value, p);
  if (dp) {
    check_same_shape(dp->dw, p.w, "linear dw");
    check_same_shape(dp->db, p.b, "linear db");
  }
  Tensor value = matmul(p.w, x.value);
  add_column_broadcast(value, p.b);
  Tensor jvp = matmul(p.w, x.jvp);
  if (dp) {
    add_inplace(jvp, matmul(dp->dw, x.value));
    add_column_broadcast(jvp, dp->db);
  }
  if (cache) {
    cache->x = x.value;
    cache->jvp_in = x.jvp;
  }
  return DualValue{std::move(value), std::move(jvp)};
}

void linear_backward(const LinearCache& cache, const LinearParams& p, const LinearDeltas* dp, const Tensor& grad_value,
                     const Tensor& grad_jvp, DualValue* grad_x, LinearDeltas* grad_dp) {
  if (grad_dp) {
    grad_dp->dw = matmul_nt(grad_jvp, cache.x);
    grad_dp->db = Tensor({p.w.rows()});
    for (int i = 0; i < grad_jvp.rows(); ++i) {
      double acc = 0.0;
      for (int j = 0; j < grad_jvp.cols(); ++j) acc += grad_jvp.at(i, j);
      grad_dp->db[static_cast<std::size_t>(i)] = acc;
    }
  }
  if (grad_x) {
    Tensor xv = matmul_tn(p.w, grad_value);
    if (dp) add_inplace(xv, matmul_tn(dp->dw, grad_jvp));
    grad_x->value = std::move(xv);
    grad_x->jvp = matmul_tn(p.w, grad_jvp);
  }
}

// ---- gelu --------------------------------------------------------------

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double gelu_scalar(double x) { return x * normal_cdf(x); }

double gelu_derivative(double x) { return normal_cdf(x) + x * normal_pdf(x); }

Tensor gelu_value(const Tensor& x) {
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = gelu_scalar(out[i]);
  return out;
}

DualValue gelu_dual(const DualValue& x, GeluCache* cache) {
  check_dual(x, "gelu_dual");
  Tensor value = x.value;
  Tensor jvp = x.jvp;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double xi = value[i];
    value[i] = gelu_scalar(xi);
    jvp[i] *= gelu_derivative(xi);
  }
  if (cache) {
    cache->x = x.value;
    cache->jvp_in = x.jvp;
  }
  return DualValue{std::move(value), std::move(jvp)};
}

void gelu_backward(const GeluCache& cache, const Tensor& grad_value, const Tensor& grad_jvp, DualValue* grad_x) {
  if (!grad_x) return;
  check_same_shape(grad_value, cache.x, "gelu_backward grad_value");
  check_same_shape(grad_jvp, cache.x, "gelu_backward grad_jvp");
  grad_x->value = cache.x;
  grad_x->jvp = cache.x;
  for (std::size_t i = 0; i < cache.x.size(); ++i) {
    const double xi = cache.x[i];
    const double g1 = gelu_derivative(xi);
    const double g2 = (2.0 - xi * xi) * normal_pdf(xi);  // second derivative
    grad_x->value[i] = g1 * grad_value[i] + g2 * cache.jvp_in[i] * grad_jvp[i];
    grad_x->jvp[i] = g1 * grad_jvp[i];
  }
}

}  // namespace tangent
