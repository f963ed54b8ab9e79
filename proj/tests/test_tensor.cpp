#include "tangent/tensor.hpp"

#include <cmath>

#include "doctest.h"
#include "tangent/errors.hpp"
#include "tangent/rng.hpp"
#include "test_helpers.hpp"

using namespace tangent;

TEST_CASE("matmul identity and annihilation") {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor i2 = Tensor::identity(2);
  Tensor prod = matmul(i2, a);
  for (std::size_t k = 0; k < 4; ++k) CHECK(prod[k] == a[k]);

  Tensor p({2, 2}, {1, 0, 0, 0});
  Tensor q({2, 2}, {0, 0, 0, 1});
  Tensor z = matmul(p, q);
  for (std::size_t k = 0; k < 4; ++k) CHECK(z[k] == 0.0);
}

TEST_CASE("matmul matches triple-loop oracle") {
  Rng rng(42);
  // the 5x7 * 7x3 case plus random sizes up to 64x64
  {
    Tensor a = testutil::random_tensor(rng, {5, 7});
    Tensor b = testutil::random_tensor(rng, {7, 3});
    CHECK(testutil::rel_err(matmul(a, b), testutil::naive_matmul(a, b)) <= 1e-13);
  }
  for (int t = 0; t < 20; ++t) {
    const int m = 1 + static_cast<int>(rng.uniform_below(64));
    const int k = 1 + static_cast<int>(rng.uniform_below(64));
    const int n = 1 + static_cast<int>(rng.uniform_below(64));
    Tensor a = testutil::random_tensor(rng, {m, k});
    Tensor b = testutil::random_tensor(rng, {k, n});
    CHECK(testutil::rel_err(matmul(a, b), testutil::naive_matmul(a, b)) <= 1e-13);
    // transposed kernels agree with the plain one
    CHECK(testutil::rel_err(matmul_tn(transpose(a), b), testutil::naive_matmul(a, b)) <= 1e-13);
    CHECK(testutil::rel_err(matmul_nt(a, transpose(b)), testutil::naive_matmul(a, b)) <= 1e-13);
  }
}

TEST_CASE("matmul shape errors name both shapes") {
  Tensor a({2, 3});
  Tensor b({2, 3});
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("(2x3)"), DimensionError);
}

TEST_CASE("softmax rows: symmetry, stability, extended-precision oracle") {
  Tensor z({1, 2}, {0.0, 0.0});
  Tensor s = softmax_rows(z);
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-15));

  Tensor big({1, 2}, {1000.0, 0.0});
  Tensor sb = softmax_rows(big);
  CHECK(sb.all_finite());
  CHECK(sb[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sb[1] >= 0.0);
  CHECK(sb[1] <= 1e-300);

  Tensor v({1, 3}, {1.0, 2.0, 3.0});
  Tensor sv = softmax_rows(v);
  long double zsum = 0.0L;
  for (int j = 0; j < 3; ++j) zsum += expl(static_cast<long double>(v[static_cast<std::size_t>(j)]));
  for (int j = 0; j < 3; ++j) {
    const long double want = expl(static_cast<long double>(v[static_cast<std::size_t>(j)])) / zsum;
    CHECK(std::fabs(sv[static_cast<std::size_t>(j)] - static_cast<double>(want)) <= 1e-15);
  }
}

TEST_CASE("softmax rows sum to one and shift invariance") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const int m = 1 + static_cast<int>(rng.uniform_below(8));
    const int n = 1 + static_cast<int>(rng.uniform_below(8));
    Tensor x = testutil::random_tensor(rng, {m, n}, 3.0);
    Tensor s = softmax_rows(x);
    for (int i = 0; i < m; ++i) {
      double rowsum = 0.0;
      for (int j = 0; j < n; ++j) {
        rowsum += s.at(i, j);
        CHECK(s.at(i, j) > 0.0);
        CHECK(s.at(i, j) < 1.0 + 1e-12);
      }
      CHECK(std::fabs(rowsum - 1.0) <= 1e-12);
    }
    Tensor shifted = x;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) shifted.at(i, j) += 17.5;
    CHECK(testutil::rel_err(softmax_rows(shifted), s) <= 1e-12);
  }
}

TEST_CASE("gaussian: zero std, determinism, moments") {
  Rng rng(123);
  Tensor z = gaussian(rng, {3, 3}, 0.0, 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);

  Rng a(99), b(99);
  Tensor ta = gaussian(a, {4, 5}, 1.0, 2.0);
  Tensor tb = gaussian(b, {4, 5}, 1.0, 2.0);
  for (std::size_t i = 0; i < ta.size(); ++i) CHECK(ta[i] == tb[i]);

  Rng big(2024);
  const int n = 1000000;
  Tensor samples = gaussian(big, {n}, 0.0, 1.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) mean += samples[i];
  mean /= n;
  double var = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) var += (samples[i] - mean) * (samples[i] - mean);
  var /= n;
  CHECK(std::fabs(mean) <= 5e-3);
  CHECK(std::fabs(std::sqrt(var) - 1.0) <= 5e-3);
}

TEST_CASE("gaussian rejects negative std") {
  Rng rng(1);
  CHECK_THROWS_AS(gaussian(rng, {2}, 0.0, -1.0), ConfigError);
}

TEST_CASE("rng streams reproduce and forks differ") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng base(5);
  Rng f1 = base.fork("shard-0");
  Rng f2 = base.fork("shard-1");
  CHECK(f1.next_u64() != f2.next_u64());
  Rng f1b = Rng(5).fork("shard-0");
  CHECK(Rng(5).fork("shard-0").next_u64() == f1b.next_u64());
}

TEST_CASE("tensor invariants") {
  CHECK_THROWS_AS(Tensor({0, 3}), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0}), DimensionError);
  Tensor t({2, 2}, {1, 2, 3, 4});
  CHECK(t.size() == 4);
  CHECK(t.all_finite());
}
