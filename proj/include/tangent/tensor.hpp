#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tangent {

/// Dense row-major tensor of doubles. Values are immutable by convention once
/// an operation returns; mutation happens through the explicit *_inplace /
/// accumulate helpers, which callers use single-threaded.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);  // zero-filled
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, double value);
  static Tensor identity(int n);

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Matrix accessors; require ndim() == 2.
  int rows() const;
  int cols() const;
  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * shape_[1] + j]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * shape_[1] + j]; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& storage() const { return data_; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  std::string shape_str() const;

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

std::string shape_str(const std::vector<int>& shape);

// Throws DimensionError mentioning both shapes unless a and b match.
void check_same_shape(const Tensor& a, const Tensor& b, const char* op);

// ---- matrix products -------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);     // a (m,k) * b (k,n)
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T * b, a (k,m), b (k,n)
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T, a (m,k), b (n,k)
Tensor transpose(const Tensor& a);

// ---- elementwise -----------------------------------------------------------

Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor operator*(double s, const Tensor& a);

void add_inplace(Tensor& y, const Tensor& x);              // y += x
void axpy(double a, const Tensor& x, Tensor& y);           // y += a*x
void scale_inplace(Tensor& y, double s);

// ---- reductions & misc -----------------------------------------------------

double dot(const Tensor& a, const Tensor& b);
double l2_norm(const Tensor& a);
double sum(const Tensor& a);
double max_abs(const Tensor& a);

// Row-stable softmax over the last dimension of a matrix; each output row sums
// to one and is invariant under adding a constant to the row.
Tensor softmax_rows(const Tensor& x);

// Copies rows [r0, r1) of a matrix.
Tensor row_slice(const Tensor& a, int r0, int r1);
void set_row_slice(Tensor& dst, int r0, const Tensor& src);

Tensor column(const Tensor& a, int j);                  // (rows,1)
void add_column_broadcast(Tensor& a, const Tensor& v);  // a(:,j) += v for all j

}  // namespace tangent
