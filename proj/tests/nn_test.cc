// Copyright 2026 The dictner Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dictner/error.h"
#include "dictner/lstm.h"
#include "dictner/tensor.h"
#include "oracles.h"

using namespace dictner;

namespace {

double sigm(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void randomize(LstmParams& p, Rng& rng, double scale = 0.5) {
  for (Param* q : p.params()) {
    q->value = oracle::random_normal(q->value.rows(), q->value.cols(), rng);
    for (double& v : q->value.flat()) v *= scale;
  }
}

double weighted_sum(const Matrix& h, const Matrix& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) s += h.flat()[k] * w.flat()[k];
  return s;
}

Matrix reversed_rows(const Matrix& m) {
  Matrix r(m.rows(), m.cols());
  for (std::size_t t = 0; t < m.rows(); ++t) {
    for (std::size_t k = 0; k < m.cols(); ++k) r(t, k) = m(m.rows() - 1 - t, k);
  }
  return r;
}

}  // namespace

TEST_CASE("Rng is deterministic and portable") {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());
  Rng c(0);
  // splitmix64 reference output for seed 0.
  CHECK(c.next() == 0xe220a8397b1dcdafULL);
  Rng d(9);
  for (int k = 0; k < 1000; ++k) {
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(d.below(7) < 7);
  }
}

TEST_CASE("embedding lookup") {
  EmbeddingTable e("emb", 3, 3);
  for (std::size_t r = 0; r < 3; ++r) e.table.value(r, r) = 1.0;
  const auto row = e.lookup(1);
  CHECK(std::vector<double>(row.begin(), row.end()) == std::vector<double>{0, 1, 0});
  CHECK(e.lookup(0)[0] == 1.0);
  CHECK_THROWS_AS(e.lookup(3), StructureError);

  Rng rng(1);
  EmbeddingTable init("init", 50, 12);
  init.init(rng);
  const double bound = std::sqrt(3.0 / 12);
  for (double v : init.table.value.flat()) CHECK(std::abs(v) <= bound);
}

TEST_CASE("embedding gradients are sparse and match finite differences") {
  Rng rng(3);
  EmbeddingTable e("emb", 5, 4);
  e.init(rng);
  const Matrix w = oracle::random_normal(2, 4, rng);
  const std::size_t ids[2] = {1, 3};
  auto loss = [&] {
    double s = 0.0;
    for (int k = 0; k < 2; ++k) {
      const auto row = e.lookup(ids[k]);
      for (std::size_t j = 0; j < 4; ++j) s += row[j] * w(k, j);
    }
    return s;
  };
  e.table.zero_grad();
  for (int k = 0; k < 2; ++k) e.accumulate_grad(ids[k], w.row(k));
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double numeric = oracle::central_difference(e.table.value(r, j), loss);
      CHECK(oracle::relative_error(e.table.grad(r, j), numeric) < 1e-6);
    }
  }
  const Matrix before = e.table.value;
  Adam adam;
  Param* ps[] = {&e.table};
  adam.update(ps);
  for (std::size_t r = 0; r < 5; ++r) {
    const bool touched = r == 1 || r == 3;
    for (std::size_t j = 0; j < 4; ++j) CHECK((e.table.value(r, j) != before(r, j)) == touched);
  }
}

TEST_CASE("lstm_step with zero parameters") {
  LstmParams p("l", 3, 4);
  const std::vector<double> x = {0.3, -2.0, 7.0};
  const LstmState s = lstm_step(p, x, LstmState::zeros(4));
  for (double v : s.h) CHECK(v == 0.0);
  for (double v : s.c) CHECK(v == 0.0);
}

TEST_CASE("lstm_step scalar hand calculation") {
  LstmParams p("l", 1, 1);
  p.W_i.value(0, 0) = 0.5;  p.U_i.value(0, 0) = -0.3; p.b_i.value(0, 0) = 0.1;
  p.W_f.value(0, 0) = -0.4; p.U_f.value(0, 0) = 0.2;  p.b_f.value(0, 0) = 1.0;
  p.W_c.value(0, 0) = 0.7;  p.U_c.value(0, 0) = 0.6;  p.b_c.value(0, 0) = -0.2;
  p.W_o.value(0, 0) = 0.9;  p.U_o.value(0, 0) = -0.8; p.b_o.value(0, 0) = 0.05;
  const double x = 1.5, h = 0.2, c = -0.3;
  const double i = sigm(0.5 * x - 0.3 * h + 0.1);
  const double f = sigm(-0.4 * x + 0.2 * h + 1.0);
  const double g = std::tanh(0.7 * x + 0.6 * h - 0.2);
  const double o = sigm(0.9 * x - 0.8 * h + 0.05);
  const double c_new = f * c + i * g;
  const double h_new = o * std::tanh(c_new);
  const LstmState s = lstm_step(p, std::vector<double>{x}, LstmState{{h}, {c}});
  CHECK(s.c[0] == doctest::Approx(c_new).epsilon(1e-14));
  CHECK(s.h[0] == doctest::Approx(h_new).epsilon(1e-14));
}

TEST_CASE("lstm_forward agrees with repeated lstm_step") {
  Rng rng(4);
  LstmParams p("l", 3, 5);
  randomize(p, rng);
  const Matrix x = oracle::random_normal(6, 3, rng);
  for (bool reverse : {false, true}) {
    const LstmTrace tr = lstm_forward(p, x, reverse);
    LstmState s = LstmState::zeros(5);
    for (std::size_t k = 0; k < 6; ++k) {
      const std::size_t t = reverse ? 5 - k : k;
      s = lstm_step(p, x.row(t), s);
      for (std::size_t j = 0; j < 5; ++j) CHECK(tr.h(t, j) == doctest::Approx(s.h[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("lstm_backward matches central differences for every tensor") {
  Rng rng(8);
  for (bool reverse : {false, true}) {
    LstmParams p("l", 3, 4);
    randomize(p, rng);
    Matrix x = oracle::random_normal(5, 3, rng);
    const Matrix w = oracle::random_normal(5, 4, rng);
    auto loss = [&] { return weighted_sum(lstm_forward(p, x, reverse).h, w); };

    for (Param* q : p.params()) q->zero_grad();
    const Matrix dx = lstm_backward(p, lstm_forward(p, x, reverse), w);

    double worst = 0.0;
    for (Param* q : p.params()) {
      for (std::size_t k = 0; k < q->value.size(); ++k) {
        const double numeric = oracle::central_difference(q->value.flat()[k], loss);
        worst = std::max(worst, oracle::relative_error(q->grad.flat()[k], numeric));
      }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double numeric = oracle::central_difference(x.flat()[k], loss);
      worst = std::max(worst, oracle::relative_error(dx.flat()[k], numeric));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("bilstm composition") {
  Rng rng(12);
  BiLstm net("enc", 3, 4);
  randomize(net.fwd, rng);
  randomize(net.bwd, rng);

  SUBCASE("length one is two single steps") {
    const Matrix x = oracle::random_normal(1, 3, rng);
    const Matrix y = bilstm_forward(net, x);
    const LstmState f = lstm_step(net.fwd, x.row(0), LstmState::zeros(4));
    const LstmState b = lstm_step(net.bwd, x.row(0), LstmState::zeros(4));
    REQUIRE(y.cols() == 8);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(y(0, j) == doctest::Approx(f.h[j]).epsilon(1e-14));
      CHECK(y(0, 4 + j) == doctest::Approx(b.h[j]).epsilon(1e-14));
    }
  }

  SUBCASE("reversal symmetry") {
    const Matrix x = oracle::random_normal(7, 3, rng);
    const Matrix y = bilstm_forward(net, x);
    BiLstm swapped = net;
    std::swap(swapped.fwd, swapped.bwd);
    const Matrix z = bilstm_forward(swapped, reversed_rows(x));
    for (std::size_t t = 0; t < 7; ++t) {
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(z(t, j) == doctest::Approx(y(6 - t, 4 + j)).epsilon(1e-14));
        CHECK(z(t, 4 + j) == doctest::Approx(y(6 - t, j)).epsilon(1e-14));
      }
    }
  }

  SUBCASE("outputs are bounded") {
    for (Param* q : net.params()) {
      for (double& v : q->value.flat()) v *= 20.0;
    }
    Matrix x = oracle::random_normal(10, 3, rng);
    for (double& v : x.flat()) v *= 10.0;
    const Matrix y = bilstm_forward(net, x);
    for (double v : y.flat()) {
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) <= 1.0);
    }
  }

  SUBCASE("zero parameters give zero outputs") {
    BiLstm zero("z", 3, 4);
    const Matrix y = bilstm_forward(zero, oracle::random_normal(5, 3, rng));
    for (double v : y.flat()) CHECK(v == 0.0);
  }

  SUBCASE("backward matches central differences") {
    Matrix x = oracle::random_normal(4, 3, rng);
    const Matrix w = oracle::random_normal(4, 8, rng);
    auto loss = [&] { return weighted_sum(bilstm_forward(net, x), w); };
    for (Param* q : net.params()) q->zero_grad();
    BiLstmTrace trace;
    bilstm_forward(net, x, &trace);
    const Matrix dx = bilstm_backward(net, trace, w);
    double worst = 0.0;
    for (Param* q : net.params()) {
      for (std::size_t k = 0; k < q->value.size(); ++k) {
        const double numeric = oracle::central_difference(q->value.flat()[k], loss);
        worst = std::max(worst, oracle::relative_error(q->grad.flat()[k], numeric));
      }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      worst = std::max(worst, oracle::relative_error(dx.flat()[k], oracle::central_difference(x.flat()[k], loss)));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("lstm init ranges") {
  Rng rng(2);
  LstmParams p("l", 10, 6);
  p.init(rng);
  const double bound = std::sqrt(6.0 / 16.0);
  for (const Param* q : {&p.W_i, &p.W_f, &p.W_c, &p.W_o, &p.U_i, &p.U_f, &p.U_c, &p.U_o}) {
    for (double v : q->value.flat()) CHECK(std::abs(v) <= bound);
  }
  for (double v : p.b_f.value.flat()) CHECK(v == 1.0);
  for (const Param* q : {&p.b_i, &p.b_c, &p.b_o}) {
    for (double v : q->value.flat()) CHECK(v == 0.0);
  }
}

TEST_CASE("affine: a chain of adds back-propagates ones") {
  // With W = I the layer is y = x + b; d(sum y) is one everywhere.
  Affine a("a", 3, 3);
  for (std::size_t k = 0; k < 3; ++k) a.weight.value(k, k) = 1.0;
  Rng rng(6);
  const Matrix x = oracle::random_normal(4, 3, rng);
  const Matrix dx = a.backward(x, Matrix(4, 3, 1.0));
  for (double v : dx.flat()) CHECK(v == 1.0);
  for (double v : a.bias.grad.flat()) CHECK(v == 4.0);
}

TEST_CASE("affine backward matches central differences") {
  Rng rng(7);
  Affine a("a", 5, 3);
  a.init(rng);
  a.bias.value = oracle::random_normal(1, 3, rng);
  Matrix x = oracle::random_normal(4, 5, rng);
  const Matrix w = oracle::random_normal(4, 3, rng);
  auto loss = [&] { return weighted_sum(a.forward(x), w); };
  a.weight.zero_grad();
  a.bias.zero_grad();
  const Matrix dx = a.backward(x, w);
  for (Param* q : {&a.weight, &a.bias}) {
    for (std::size_t k = 0; k < q->value.size(); ++k) {
      CHECK(oracle::relative_error(q->grad.flat()[k], oracle::central_difference(q->value.flat()[k], loss)) < 1e-6);
    }
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(oracle::relative_error(dx.flat()[k], oracle::central_difference(x.flat()[k], loss)) < 1e-6);
  }
}

TEST_CASE("dropout") {
  Rng rng(13);
  const Matrix x = oracle::random_normal(3, 4, rng);
  CHECK(dropout_forward(x, 0.0, Mode::kTrain, rng) == x);
  CHECK(dropout_forward(x, 0.0, Mode::kEval, rng) == x);
  CHECK(dropout_forward(x, 0.7, Mode::kEval, rng) == x);
  CHECK_THROWS_AS(dropout_forward(x, 1.0, Mode::kTrain, rng), StructureError);
  CHECK_THROWS_AS(dropout_forward(x, -0.1, Mode::kTrain, rng), StructureError);

  const Matrix ones(1, 100000, 1.0);
  Matrix mask;
  const Matrix y = dropout_forward(ones, 0.2, Mode::kTrain, rng, &mask);
  std::size_t survivors = 0;
  double mean = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y.flat()[k] != 0.0) {
      ++survivors;
      CHECK(y.flat()[k] == doctest::Approx(1.25).epsilon(1e-15));
    }
    mean += y.flat()[k];
  }
  mean /= static_cast<double>(y.size());
  CHECK(std::abs(static_cast<double>(survivors) / 100000.0 - 0.8) < 0.01);
  // The expectation of the train-mode output is the eval-mode output.
  CHECK(std::abs(mean - 1.0) < 0.0125);
  CHECK(mask.same_shape(ones));
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    Param p("p", 2, 2);
    p.value.fill(0.5);
    Adam adam;
    Param* ps[] = {&p};
    adam.update(ps);
    CHECK(adam.step() == 1);
    for (double v : p.value.flat()) CHECK(v == 0.5);
  }
  SUBCASE("first step moves each coordinate by about lr against the gradient") {
    Param p("p", 1, 4);
    p.grad(0, 0) = 3.0;
    p.grad(0, 1) = -0.01;
    p.grad(0, 2) = 250.0;
    p.grad(0, 3) = 0.0;
    Adam adam;
    Param* ps[] = {&p};
    adam.update(ps);
    CHECK(p.value(0, 0) == doctest::Approx(-0.001).epsilon(1e-6));
    CHECK(p.value(0, 1) == doctest::Approx(0.001).epsilon(1e-5));
    CHECK(p.value(0, 2) == doctest::Approx(-0.001).epsilon(1e-6));
    CHECK(p.value(0, 3) == 0.0);
  }
  SUBCASE("two-step scalar trace") {
    Param p("p", 1, 1);
    p.value(0, 0) = 1.0;
    Adam adam;
    Param* ps[] = {&p};
    const double g1 = 0.4, g2 = -1.2;
    p.grad(0, 0) = g1;
    adam.update(ps);
    p.grad(0, 0) = g2;
    adam.update(ps);
    // Hand recurrence with bias correction.
    double m = 0.0, v = 0.0, x = 1.0;
    const double grads[2] = {g1, g2};
    for (int t = 1; t <= 2; ++t) {
      m = 0.9 * m + 0.1 * grads[t - 1];
      v = 0.999 * v + 0.001 * grads[t - 1] * grads[t - 1];
      const double mh = m / (1.0 - std::pow(0.9, t));
      const double vh = v / (1.0 - std::pow(0.999, t));
      x -= 0.001 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(p.value(0, 0) == doctest::Approx(x).epsilon(1e-14));
    CHECK(adam.step() == 2);
  }
  SUBCASE("shape change is rejected") {
    Param p("p", 1, 2);
    Adam adam;
    Param* ps[] = {&p};
    adam.update(ps);
    Param q("q", 2, 2);
    Param* qs[] = {&q};
    CHECK_THROWS_AS(adam.update(qs), StructureError);
  }
}

TEST_CASE("gradient clipping") {
  Param a("a", 1, 2), b("b", 1, 1);
  a.grad(0, 0) = 3.0;
  a.grad(0, 1) = 0.0;
  b.grad(0, 0) = 4.0;
  Param* ps[] = {&a, &b};
  CHECK(gradient_norm(ps) == doctest::Approx(5.0));
  CHECK(clip_gradients(ps, 1.0) == doctest::Approx(5.0));
  CHECK(gradient_norm(ps) == doctest::Approx(1.0));
  CHECK(b.grad(0, 0) == doctest::Approx(0.8));
  CHECK(clip_gradients(ps, 10.0) == doctest::Approx(1.0));
  CHECK(b.grad(0, 0) == doctest::Approx(0.8));
}

TEST_CASE("forward passes are bit-reproducible") {
  auto run = [] {
    Rng rng(77);
    BiLstm net("enc", 4, 6);
    net.init(rng);
    const Matrix x = oracle::random_normal(9, 4, rng);
    Rng drop(5);
    return dropout_forward(bilstm_forward(net, x), 0.3, Mode::kTrain, drop);
  };
  CHECK(run() == run());
}
