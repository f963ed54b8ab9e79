#pragma once

// Shared test utilities: relative-error metrics, central finite differences,
// and naive reference implementations of the transformer layers. The
// references are deliberately written as straight loops, independent of the
// library's kernels, so they can serve as oracles.

#include <cmath>
#include <functional>
#include <vector>

#include "tangent/dual.hpp"
#include "tangent/rng.hpp"
#include "tangent/tensor.hpp"

namespace testutil {

using tangent::Tensor;

inline double rel_err(const Tensor& got, const Tensor& want, double floor = 1e-12) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double d = got[i] - want[i];
    num += d * d;
    den += want[i] * want[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

inline Tensor random_tensor(tangent::Rng& rng, std::vector<int> shape, double scale = 1.0) {
  return tangent::gaussian(rng, std::move(shape), 0.0, scale);
}

// Central finite difference of a tensor-valued function of a scalar knob.
inline Tensor central_diff(const std::function<Tensor(double)>& f, double step = 1e-4) {
  Tensor plus = f(step);
  Tensor minus = f(-step);
  Tensor out = plus - minus;
  tangent::scale_inplace(out, 1.0 / (2.0 * step));
  return out;
}

// Central finite difference of a scalar function per entry of a tensor.
inline Tensor central_diff_per_entry(Tensor& param, const std::function<double()>& loss, double step = 1e-5) {
  Tensor grad = param;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double orig = param[i];
    param[i] = orig + step;
    const double up = loss();
    param[i] = orig - step;
    const double down = loss();
    param[i] = orig;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

// ---- naive references ------------------------------------------------------

inline Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor out({a.rows(), b.cols()});
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols(); ++k) acc += a.at(i, k) * b.at(k, j);
      out.at(i, j) = acc;
    }
  return out;
}

// Multi-head attention written from the definition: per head, logits are
// scale * q_i . k_j, softmax over j, output mixes value columns.
inline Tensor naive_attention(const Tensor& x, const Tensor& wq, const Tensor& wk, const Tensor& wv, int heads,
                              double scale) {
  const int d = x.rows(), n = x.cols();
  const int dh = d / heads;
  Tensor q = naive_matmul(wq, x), k = naive_matmul(wk, x), v = naive_matmul(wv, x);
  Tensor out({d, n});
  for (int h = 0; h < heads; ++h) {
    const int r0 = h * dh;
    for (int i = 0; i < n; ++i) {  // query token
      std::vector<double> logits(static_cast<std::size_t>(n));
      double mx = -1e300;
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int r = 0; r < dh; ++r) acc += q.at(r0 + r, i) * k.at(r0 + r, j);
        logits[static_cast<std::size_t>(j)] = scale * acc;
        mx = std::max(mx, logits[static_cast<std::size_t>(j)]);
      }
      double z = 0.0;
      for (int j = 0; j < n; ++j) z += std::exp(logits[static_cast<std::size_t>(j)] - mx);
      for (int r = 0; r < dh; ++r) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += std::exp(logits[static_cast<std::size_t>(j)] - mx) / z * v.at(r0 + r, j);
        out.at(r0 + r, i) = acc;
      }
    }
  }
  return out;
}

inline Tensor naive_layernorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const int d = x.rows(), n = x.cols();
  Tensor out({d, n});
  for (int j = 0; j < n; ++j) {
    double mu = 0.0;
    for (int i = 0; i < d; ++i) mu += x.at(i, j);
    mu /= d;
    double var = 0.0;
    for (int i = 0; i < d; ++i) var += (x.at(i, j) - mu) * (x.at(i, j) - mu);
    var /= d;
    for (int i = 0; i < d; ++i) {
      out.at(i, j) = gamma[static_cast<std::size_t>(i)] * (x.at(i, j) - mu) / std::sqrt(var + eps) +
                     beta[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

inline double naive_gelu(double x) { return x * 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace testutil
