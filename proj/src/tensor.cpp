#include "tangent/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tangent/errors.hpp"

namespace tangent {

namespace {

std::size_t checked_count(const std::vector<int>& shape) {
  if (shape.empty()) throw DimensionError("tensor shape must be non-empty");
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw DimensionError("tensor dimensions must be positive, got " + shape_str(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(checked_count(shape_), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (checked_count(shape_) != data_.size()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                         tangent::shape_str(shape_));
  }
}

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Tensor Tensor::identity(int n) {
  Tensor t({n, n});
  for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

int Tensor::rows() const {
  if (ndim() != 2) throw DimensionError("expected a matrix, got shape " + shape_str());
  return shape_[0];
}

int Tensor::cols() const {
  if (ndim() != 2) throw DimensionError("expected a matrix, got shape " + shape_str());
  return shape_[1];
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const { return tangent::shape_str(shape_); }

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
}

namespace {

void check_matrix(const Tensor& a, const char* op) {
  if (a.ndim() != 2) throw DimensionError(std::string(op) + ": expected a matrix, got " + a.shape_str());
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_matrix(a, "matmul");
  check_matrix(b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ, " + a.shape_str() + " vs " + b.shape_str());
  }
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out({m, n});
  const double* ap = a.data();
  const double* bp = b.data();
  double* op = out.data();
  for (int i = 0; i < m; ++i) {
    const double* arow = ap + static_cast<std::size_t>(i) * k;
    double* orow = op + static_cast<std::size_t>(i) * n;
    for (int kk = 0; kk < k; ++kk) {
      const double aik = arow[kk];
      const double* brow = bp + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  check_matrix(a, "matmul_tn");
  check_matrix(b, "matmul_tn");
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: leading dimensions differ, " + a.shape_str() + " vs " + b.shape_str());
  }
  const int k = a.rows(), m = a.cols(), n = b.cols();
  Tensor out({m, n});
  const double* ap = a.data();
  const double* bp = b.data();
  double* op = out.data();
  for (int kk = 0; kk < k; ++kk) {
    const double* arow = ap + static_cast<std::size_t>(kk) * m;
    const double* brow = bp + static_cast<std::size_t>(kk) * n;
    for (int i = 0; i < m; ++i) {
      const double aki = arow[i];
      double* orow = op + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  check_matrix(a, "matmul_nt");
  check_matrix(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: trailing dimensions differ, " + a.shape_str() + " vs " + b.shape_str());
  }
  const int m = a.rows(), k = a.cols(), n = b.rows();
  Tensor out({m, n});
  for (int i = 0; i < m; ++i) {
    const double* arow = a.data() + static_cast<std::size_t>(i) * k;
    double* orow = out.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* brow = b.data() + static_cast<std::size_t>(j) * k;
      double acc = 0.0;
      for (int kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
      orow[j] = acc;
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  check_matrix(a, "transpose");
  Tensor out({a.cols(), a.rows()});
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
  return out;
}

Tensor operator+(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "hadamard");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor operator*(double s, const Tensor& a) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return out;
}

void add_inplace(Tensor& y, const Tensor& x) {
  check_same_shape(y, x, "add_inplace");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i];
}

void axpy(double a, const Tensor& x, Tensor& y) {
  check_same_shape(y, x, "axpy");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void scale_inplace(Tensor& y, double s) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= s;
}

double dot(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(const Tensor& a) { return std::sqrt(dot(a, a)); }

double sum(const Tensor& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i];
  return acc;
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

Tensor softmax_rows(const Tensor& x) {
  check_matrix(x, "softmax_rows");
  const int m = x.rows(), n = x.cols();
  Tensor out({m, n});
  for (int i = 0; i < m; ++i) {
    double mx = x.at(i, 0);
    for (int j = 1; j < n; ++j) mx = std::max(mx, x.at(i, j));
    double z = 0.0;
    for (int j = 0; j < n; ++j) {
      const double e = std::exp(x.at(i, j) - mx);
      out.at(i, j) = e;
      z += e;
    }
    for (int j = 0; j < n; ++j) out.at(i, j) /= z;
  }
  return out;
}

Tensor row_slice(const Tensor& a, int r0, int r1) {
  check_matrix(a, "row_slice");
  if (r0 < 0 || r1 > a.rows() || r0 >= r1) {
    throw DimensionError("row_slice: rows [" + std::to_string(r0) + "," + std::to_string(r1) + ") out of " +
                         a.shape_str());
  }
  Tensor out({r1 - r0, a.cols()});
  std::copy(a.data() + static_cast<std::size_t>(r0) * a.cols(), a.data() + static_cast<std::size_t>(r1) * a.cols(),
            out.data());
  return out;
}

void set_row_slice(Tensor& dst, int r0, const Tensor& src) {
  if (dst.cols() != src.cols() || r0 + src.rows() > dst.rows()) {
    throw DimensionError("set_row_slice: " + src.shape_str() + " does not fit into " + dst.shape_str() + " at row " +
                         std::to_string(r0));
  }
  std::copy(src.data(), src.data() + src.size(), dst.data() + static_cast<std::size_t>(r0) * dst.cols());
}

Tensor column(const Tensor& a, int j) {
  check_matrix(a, "column");
  if (j < 0 || j >= a.cols()) throw DimensionError("column " + std::to_string(j) + " out of " + a.shape_str());
  Tensor out({a.rows(), 1});
  for (int i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = a.at(i, j);
  return out;
}

void add_column_broadcast(Tensor& a, const Tensor& v) {
  if (static_cast<int>(v.size()) != a.rows()) {
    throw DimensionError("add_column_broadcast: vector " + v.shape_str() + " vs matrix " + a.shape_str());
  }
  for (int i = 0; i < a.rows(); ++i) {
    const double vi = v[static_cast<std::size_t>(i)];
    for (int j = 0; j < a.cols(); ++j) a.at(i, j) += vi;
  }
}

}  // namespace tangent
