#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pecnet/kernels.hpp"
#include "pecnet/rng.hpp"
#include "pecnet/tensor.hpp"

using namespace pecnet;

namespace {

// sizes chosen to exercise both the vector body and the scalar tail
const std::vector<std::size_t> kLens = {1, 3, 7, 8, 9, 16, 31, 64, 257};

template <typename T>
std::vector<T> rand_vec(Rng& rng, std::size_t n, double lo = -2, double hi = 2) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(rng.uniform(lo, hi));
  return v;
}

}  // namespace

TEST_CASE_TEMPLATE("scalar matmul family matches the triple-loop oracle",
                   T, float, double) {
  kern::set_isa(kern::Isa::scalar);
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 1 + rng.uniform_int(6);
    const std::size_t k = 1 + rng.uniform_int(9);
    const std::size_t n = 1 + rng.uniform_int(11);
    auto A = oracle::random_tensor<T>(rng, {m, k});
    auto B = oracle::random_tensor<T>(rng, {k, n});
    Tensor<T> C({m, n});
    kern::ops<T>().matmul(A.data(), B.data(), C.data(), m, k, n, false);
    const auto ref = oracle::matmul(A, B);
    const double tol = sizeof(T) == 8 ? 1e-12 : 1e-4;
    for (std::size_t i = 0; i < C.numel(); ++i)
      CHECK(std::abs(double(C[i]) - double(ref[i])) < tol);

    // nt and tn routes against explicit transposes
    auto Bt = Tensor<T>({n, k});
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j) Bt.at2(j, i) = B.at2(i, j);
    Tensor<T> Cnt({m, n});
    kern::ops<T>().matmul_nt(A.data(), Bt.data(), Cnt.data(), m, k, n, false);
    for (std::size_t i = 0; i < Cnt.numel(); ++i)
      CHECK(std::abs(double(Cnt[i]) - double(ref[i])) < tol);

    auto At = Tensor<T>({k, m});
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) At.at2(j, i) = A.at2(i, j);
    Tensor<T> Ctn({m, n});
    kern::ops<T>().matmul_tn(At.data(), B.data(), Ctn.data(), m, k, n, false);
    for (std::size_t i = 0; i < Ctn.numel(); ++i)
      CHECK(std::abs(double(Ctn[i]) - double(ref[i])) < tol);
  }
  kern::set_isa(kern::avx2_available() ? kern::Isa::avx2 : kern::Isa::scalar);
}

TEST_CASE_TEMPLATE("avx2 elementwise kernels are bit-identical to scalar",
                   T, float, double) {
  if (!kern::avx2_available()) return;
  Rng rng(7);
  const auto& sc = kern::detail::scalar_ops_f32();
  (void)sc;
  for (std::size_t n : kLens) {
    auto a = rand_vec<T>(rng, n);
    auto b = rand_vec<T>(rng, n);
    auto x = rand_vec<T>(rng, n, -1, 1);

    const auto run = [&](kern::Isa isa, auto&& fn) {
      kern::set_isa(isa);
      return fn(kern::ops<T>());
    };

    const auto check_same = [&](auto&& fn) {
      auto r1 = run(kern::Isa::scalar, fn);
      auto r2 = run(kern::Isa::avx2, fn);
      REQUIRE(r1.size() == r2.size());
      for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == r2[i]);
    };

    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> y(n);
      o.relu(x.data(), y.data(), n);
      return y;
    });
    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> gx(n, T(0.5));
      o.relu_grad(x.data(), a.data(), gx.data(), n);
      return gx;
    });
    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> y(n);
      o.add(a.data(), b.data(), y.data(), n);
      return y;
    });
    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> y(n);
      o.sub(a.data(), b.data(), y.data(), n);
      return y;
    });
    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> y(n);
      o.mul(a.data(), b.data(), y.data(), n);
      return y;
    });
    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> y = b;
      o.axpy(T(1.7), a.data(), y.data(), n);
      return y;
    });
    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> y(n);
      o.scale_shift(a.data(), T(0.3), T(-2), y.data(), n);
      return y;
    });
    const std::vector<T> g = rand_vec<T>(rng, n);
    check_same([&](const kern::Ops<T>& o) {
      std::vector<T> p = a, m = b, v = x;
      for (auto& vi : v) vi = std::abs(vi);
      o.adam_step(p.data(), g.data(), m.data(), v.data(), n, T(3e-4), T(0.9),
                  T(0.999), T(1e-8), T(0.1), T(0.001));
      std::vector<T> all;
      all.insert(all.end(), p.begin(), p.end());
      all.insert(all.end(), m.begin(), m.end());
      all.insert(all.end(), v.begin(), v.end());
      return all;
    });
  }
  kern::set_isa(kern::Isa::avx2);
}

TEST_CASE_TEMPLATE("avx2 matmul and reductions agree with scalar to rounding",
                   T, float, double) {
  if (!kern::avx2_available()) return;
  Rng rng(99);
  const double tol = sizeof(T) == 8 ? 1e-11 : 1e-3;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t m = 1 + rng.uniform_int(17);
    const std::size_t k = 1 + rng.uniform_int(33);
    const std::size_t n = 1 + rng.uniform_int(19);
    auto A = rand_vec<T>(rng, m * k);
    auto B = rand_vec<T>(rng, k * n);
    auto Bt = rand_vec<T>(rng, n * k);
    auto At = rand_vec<T>(rng, k * m);

    const auto both = [&](auto&& fn) {
      kern::set_isa(kern::Isa::scalar);
      auto r1 = fn(kern::ops<T>());
      kern::set_isa(kern::Isa::avx2);
      auto r2 = fn(kern::ops<T>());
      REQUIRE(r1.size() == r2.size());
      for (std::size_t i = 0; i < r1.size(); ++i)
        CHECK(oracle::rel_err(double(r1[i]), double(r2[i])) < tol);
    };

    both([&](const kern::Ops<T>& o) {
      std::vector<T> C(m * n, T(1));
      o.matmul(A.data(), B.data(), C.data(), m, k, n, true);
      return C;
    });
    both([&](const kern::Ops<T>& o) {
      std::vector<T> C(m * n);
      o.matmul_nt(A.data(), Bt.data(), C.data(), m, k, n, false);
      return C;
    });
    both([&](const kern::Ops<T>& o) {
      std::vector<T> C(m * n);
      o.matmul_tn(At.data(), B.data(), C.data(), m, k, n, false);
      return C;
    });
    both([&](const kern::Ops<T>& o) {
      return std::vector<T>{static_cast<T>(o.sum(A.data(), A.size())),
                            static_cast<T>(o.dot(A.data(), A.data(), A.size()))};
    });
  }
  kern::set_isa(kern::Isa::avx2);
}

TEST_CASE("isa dispatch honours set_isa and reports availability") {
  const kern::Isa before = kern::active_isa();
  kern::set_isa(kern::Isa::scalar);
  CHECK(kern::active_isa() == kern::Isa::scalar);
  if (kern::avx2_available()) {
    kern::set_isa(kern::Isa::avx2);
    CHECK(kern::active_isa() == kern::Isa::avx2);
  } else {
    CHECK_THROWS(kern::set_isa(kern::Isa::avx2));
  }
  kern::set_isa(before);
  CHECK(std::string(kern::isa_name(kern::Isa::scalar)) == "scalar");
}
