#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "pecnet/adam.hpp"
#include "pecnet/kernels.hpp"
#include "pecnet/rng.hpp"
#include "pecnet/tape.hpp"

using namespace pecnet;
using Node = Tape<double>::NodeId;

namespace {

// Builds the loss twice: once for analytic gradients, then element by
// element for central differences. make_loss must be a pure function of the
// current tensor contents.
void check_gradients(
    std::vector<Tensor<double>*> xs,
    const std::function<Node(Tape<double>&, const std::vector<Node>&)>&
        make_loss,
    double tol = 1e-4, double h = 1e-5) {
  Tape<double> tape;
  std::vector<Node> ids;
  for (auto* x : xs) ids.push_back(tape.leaf(*x));
  const Node loss = make_loss(tape, ids);
  REQUIRE(tape.value(loss).numel() == 1);
  tape.backward(loss);

  const auto eval = [&] {
    Tape<double> t2;
    std::vector<Node> ids2;
    for (auto* x : xs) ids2.push_back(t2.leaf(*x));
    return t2.value(make_loss(t2, ids2))[0];
  };

  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    const Tensor<double>& g = tape.grad(ids[xi]);
    for (std::size_t i = 0; i < xs[xi]->numel(); ++i) {
      const double fd = oracle::central_diff(*xs[xi], i, h, eval);
      CHECK(oracle::rel_err(g[i], fd) < tol);
    }
  }
}

// kink-free random values for relu/clamp checks
Tensor<double> rand_away_from(Rng& rng, Shape shape,
                              const std::vector<double>& kinks,
                              double margin = 1e-2) {
  Tensor<double> t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) {
    double v;
    bool ok;
    do {
      v = rng.uniform(-2.0, 2.0);
      ok = true;
      for (double k : kinks)
        if (std::abs(v - k) < margin) ok = false;
    } while (!ok);
    t[i] = v;
  }
  return t;
}

}  // namespace

TEST_CASE("linear forward: identity, hand sum, and the triple-loop oracle") {
  Tape<double> t;
  const Node x = t.leaf(Tensor<double>::row({1, 0}));
  const Node w = t.leaf(Tensor<double>({2, 2}, {1, 0, 0, 1}));
  const Node b = t.leaf(Tensor<double>::vec({0, 0}));
  const Node y = t.linear(x, w, b);
  CHECK(t.value(y).at2(0, 0) == 1.0);
  CHECK(t.value(y).at2(0, 1) == 0.0);

  const Node x2 = t.leaf(Tensor<double>::row({1, 2}));
  const Node w2 = t.leaf(Tensor<double>({2, 1}, {1, 1}));
  const Node b2 = t.leaf(Tensor<double>::vec({3}));
  CHECK(t.value(t.linear(x2, w2, b2))[0] == 6.0);

  Rng rng(11);
  auto xr = oracle::random_tensor<double>(rng, {4, 3});
  auto wr = oracle::random_tensor<double>(rng, {3, 5});
  auto br = oracle::random_tensor<double>(rng, {5});
  const Node yr = t.linear(t.leaf(xr), t.leaf(wr), t.leaf(br));
  const auto ref = oracle::linear(xr, wr, br);
  for (std::size_t i = 0; i < ref.numel(); ++i)
    CHECK(std::abs(t.value(yr)[i] - ref[i]) < 1e-12);

  CHECK_THROWS_AS(t.linear(x, t.leaf(Tensor<double>({3, 2})), b), ShapeError);
  try {
    t.linear(x, t.leaf(Tensor<double>({3, 2})), b);
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[1x2]") != std::string::npos);
    CHECK(msg.find("[3x2]") != std::string::npos);
  }
}

TEST_CASE("relu forward: examples and elementwise oracle") {
  Tape<double> t;
  const Node y = t.relu(t.leaf(Tensor<double>::row({-1, 0, 2})));
  CHECK(t.value(y)[0] == 0.0);
  CHECK(t.value(y)[1] == 0.0);
  CHECK(t.value(y)[2] == 2.0);

  const Node z = t.relu(t.leaf(Tensor<double>::row({-3, -1, -0.5})));
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.value(z)[i] == 0.0);

  Rng rng(5);
  auto x = oracle::random_tensor<double>(rng, {3, 7});
  const Node yr = t.relu(t.leaf(x));
  for (std::size_t i = 0; i < x.numel(); ++i)
    CHECK(t.value(yr)[i] == (x[i] > 0 ? x[i] : 0.0));
}

TEST_CASE("backward: all-ones for sum, relu subgradient convention") {
  Tape<double> t;
  const Node x = t.leaf(Tensor<double>::row({0.3, -0.7, 2.5}));
  t.backward(t.sum(x));
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.grad(x)[i] == 1.0);

  Tape<double> t2;
  const Node x2 = t2.leaf(Tensor<double>::row({-1, 2}));
  t2.backward(t2.sum(t2.relu(x2)));
  CHECK(t2.grad(x2)[0] == 0.0);
  CHECK(t2.grad(x2)[1] == 1.0);

  Tape<double> t3;
  const Node x3 = t3.leaf(Tensor<double>::row({1, 2}));
  CHECK_THROWS_AS(t3.backward(t3.relu(x3)), ShapeError);
}

TEST_CASE("backward: random 2-layer mlp against finite differences") {
  Rng rng(2024);
  auto x = oracle::random_tensor<double>(rng, {3, 4});
  auto w1 = rand_away_from(rng, {4, 6}, {0});
  auto b1 = oracle::random_tensor<double>(rng, {6}, -0.2, 0.2);
  auto w2 = oracle::random_tensor<double>(rng, {6, 1});
  auto b2 = oracle::random_tensor<double>(rng, {1});
  check_gradients({&x, &w1, &b1, &w2, &b2},
                  [](Tape<double>& t, const std::vector<Node>& in) {
                    const Node h = t.relu(t.linear(in[0], in[1], in[2]));
                    return t.sum(t.linear(h, in[3], in[4]));
                  });
}

TEST_CASE("per-primitive gradients match central differences over 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed * 7919 + 13);
    auto a = oracle::random_tensor<double>(rng, {2, 3});
    auto b = oracle::random_tensor<double>(rng, {2, 3});
    auto w = oracle::random_tensor<double>(rng, {3, 4});
    auto bias = oracle::random_tensor<double>(rng, {4});
    auto sq = oracle::random_tensor<double>(rng, {3, 3});
    auto relu_in = rand_away_from(rng, {2, 3}, {0});
    auto clamp_in = rand_away_from(rng, {2, 3}, {-1.5, 1.5});
    auto mix = oracle::random_tensor<double>(rng, {2, 3});

    const auto weighted_sum = [&](Tape<double>& t, Node y, const Shape& s) {
      // fixed mixing tensor so gradients are not all-ones
      Tensor<double> w2(s);
      Rng r2(seed + 999);
      r2.fill_uniform(w2, -1, 1);
      return t.sum(t.mul(y, t.leaf(w2)));
    };

    check_gradients({&a, &b}, [&](Tape<double>& t, const std::vector<Node>& in) {
      return weighted_sum(t, t.add(in[0], in[1]), a.shape());
    });
    check_gradients({&a, &b}, [&](Tape<double>& t, const std::vector<Node>& in) {
      return weighted_sum(t, t.sub(in[0], in[1]), a.shape());
    });
    check_gradients({&a, &b}, [&](Tape<double>& t, const std::vector<Node>& in) {
      return weighted_sum(t, t.mul(in[0], in[1]), a.shape());
    });
    check_gradients({&relu_in},
                    [&](Tape<double>& t, const std::vector<Node>& in) {
                      return weighted_sum(t, t.relu(in[0]), relu_in.shape());
                    });
    check_gradients({&a}, [&](Tape<double>& t, const std::vector<Node>& in) {
      return weighted_sum(t, t.exp(t.scale_shift(in[0], 0.4, -0.1)), a.shape());
    });
    check_gradients({&clamp_in},
                    [&](Tape<double>& t, const std::vector<Node>& in) {
                      return weighted_sum(t, t.clamp(in[0], -1.5, 1.5),
                                          clamp_in.shape());
                    });
    check_gradients({&a, &w, &bias},
                    [&](Tape<double>& t, const std::vector<Node>& in) {
                      return weighted_sum(t, t.linear(in[0], in[1], in[2]),
                                          Shape{2, 4});
                    });
    check_gradients({&a, &sq}, [&](Tape<double>& t, const std::vector<Node>& in) {
      return weighted_sum(t, t.matmul(in[0], in[1]), Shape{2, 3});
    });
    check_gradients({&a, &b}, [&](Tape<double>& t, const std::vector<Node>& in) {
      return weighted_sum(t, t.matmul_nt(in[0], in[1]), Shape{2, 2});
    });
    check_gradients({&a, &mix},
                    [&](Tape<double>& t, const std::vector<Node>& in) {
                      return weighted_sum(t, t.concat_cols(in[0], in[1]),
                                          Shape{2, 6});
                    });
    check_gradients({&a}, [&](Tape<double>& t, const std::vector<Node>& in) {
      return weighted_sum(t, t.slice_cols(in[0], 1, 2), Shape{2, 2});
    });
    check_gradients({&sq}, [&](Tape<double>& t, const std::vector<Node>& in) {
      Tensor<double> mask({3, 3});
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          mask.at2(i, j) = (i == j || (i + j) % 2 == 0) ? 1.0 : 0.0;
      return weighted_sum(t, t.masked_softmax(in[0], mask), Shape{3, 3});
    });
  }
}

TEST_CASE("fan-out sums branch gradients exactly") {
  Rng rng(31);
  auto x = rand_away_from(rng, {2, 4}, {0});

  Tape<double> t;
  const Node xi = t.leaf(x);
  const Node loss = t.add(t.sum(t.relu(xi)), t.sum(t.mul(xi, xi)));
  t.backward(loss);

  Tape<double> t1;
  const Node x1 = t1.leaf(x);
  t1.backward(t1.sum(t1.relu(x1)));
  Tape<double> t2;
  const Node x2 = t2.leaf(x);
  t2.backward(t2.sum(t2.mul(x2, x2)));

  for (std::size_t i = 0; i < x.numel(); ++i)
    CHECK(t.grad(xi)[i] == t1.grad(x1)[i] + t2.grad(x2)[i]);
}

TEST_CASE("forward pass is bitwise deterministic") {
  Rng rng(77);
  auto x = oracle::random_tensor<double>(rng, {4, 8});
  auto w = oracle::random_tensor<double>(rng, {8, 8});
  auto b = oracle::random_tensor<double>(rng, {8});
  const auto run = [&] {
    Tape<double> t;
    return t.value(
        t.sum(t.relu(t.linear(t.leaf(x), t.leaf(w), t.leaf(b)))))[0];
  };
  const double r1 = run(), r2 = run();
  CHECK(r1 == r2);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

namespace {

// textbook reference, kept separate from the kernel implementation
struct AdamRef {
  double m = 0, v = 0;
  int t = 0;
  double step(double p, double g, double lr, double b1, double b2, double eps) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    return p - lr * mh / (std::sqrt(vh) + eps);
  }
};

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged, t increments") {
  Tensor<double> p({3}, {1.0, -2.0, 0.5});
  const Tensor<double> p0 = p;
  Tensor<double> g({3});
  AdamState<double> opt(AdamConfig{}, {p.shape()});
  opt.step({&p}, {&g}, {"p"});
  CHECK(opt.t() == 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == p0[i]);
}

TEST_CASE("adam: first-step magnitude is about lr") {
  const double lr = 3e-4;
  Tensor<double> p({1}, {0.7});
  Tensor<double> g({1}, {2.3});
  AdamState<double> opt(AdamConfig{lr, 0.9, 0.999, 1e-8}, {p.shape()});
  opt.step({&p}, {&g}, {"p"});
  // bias-corrected mhat/sqrt(vhat) = sign(g), so |update| ~= lr
  CHECK(std::abs(std::abs(0.7 - p[0]) - lr) < 1e-8);
  CHECK(p[0] < 0.7);  // moved against the positive gradient
}

TEST_CASE("adam: two constant-gradient steps match a hand-rolled reference") {
  const double lr = 1e-2, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Tensor<double> p({2}, {0.4, -1.1});
  Tensor<double> g({2}, {0.33, -0.8});
  AdamState<double> opt(AdamConfig{lr, b1, b2, eps}, {p.shape()});
  AdamRef r0, r1;
  double q0 = 0.4, q1 = -1.1;
  for (int s = 0; s < 2; ++s) {
    opt.step({&p}, {&g}, {"p"});
    q0 = r0.step(q0, 0.33, lr, b1, b2, eps);
    q1 = r1.step(q1, -0.8, lr, b1, b2, eps);
  }
  CHECK(std::abs(p[0] - q0) < 1e-12);
  CHECK(std::abs(p[1] - q1) < 1e-12);
  CHECK(opt.t() == 2);
}

TEST_CASE("adam: non-finite gradient names the parameter") {
  Tensor<double> p({2});
  Tensor<double> g({2}, {1.0, std::nan("")});
  AdamState<double> opt(AdamConfig{}, {p.shape()});
  try {
    opt.step({&p}, {&g}, {"e_past.0.w"});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("e_past.0.w") != std::string::npos);
  }
}
