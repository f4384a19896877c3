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

#include "dictner/lstm.h"

#include <cmath>

#include "dictner/error.h"

namespace dictner {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// out = W x + U h + b, one row of output per hidden unit.
void gate_preactivation(const Param& W, const Param& U, const Param& b,
                        std::span<const double> x, std::span<const double> h,
                        std::span<double> out) {
  const std::size_t d_h = out.size();
  for (std::size_t r = 0; r < d_h; ++r) {
    double s = b.value(0, r);
    const auto w = W.value.row(r);
    for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * x[k];
    const auto u = U.value.row(r);
    for (std::size_t k = 0; k < h.size(); ++k) s += u[k] * h[k];
    out[r] = s;
  }
}

// Accumulates the parameter gradients of one gate and adds W^T dz into dx
// and U^T dz into dh.
void gate_backward(Param& W, Param& U, Param& b, std::span<const double> dz,
                   std::span<const double> x, std::span<const double> h,
                   std::span<double> dx, std::span<double> dh) {
  for (std::size_t r = 0; r < dz.size(); ++r) {
    const double g = dz[r];
    if (g == 0.0) continue;
    b.grad(0, r) += g;
    const auto w = W.value.row(r);
    auto gw = W.grad.row(r);
    for (std::size_t k = 0; k < x.size(); ++k) {
      gw[k] += g * x[k];
      dx[k] += g * w[k];
    }
    const auto u = U.value.row(r);
    auto gu = U.grad.row(r);
    for (std::size_t k = 0; k < h.size(); ++k) {
      gu[k] += g * h[k];
      dh[k] += g * u[k];
    }
  }
}

}  // namespace

LstmParams::LstmParams(const std::string& name, std::size_t d_in, std::size_t d_h)
    : W_i(name + ".W_i", d_h, d_in), W_f(name + ".W_f", d_h, d_in),
      W_c(name + ".W_c", d_h, d_in), W_o(name + ".W_o", d_h, d_in),
      U_i(name + ".U_i", d_h, d_h), U_f(name + ".U_f", d_h, d_h),
      U_c(name + ".U_c", d_h, d_h), U_o(name + ".U_o", d_h, d_h),
      b_i(name + ".b_i", 1, d_h), b_f(name + ".b_f", 1, d_h),
      b_c(name + ".b_c", 1, d_h), b_o(name + ".b_o", 1, d_h) {}

void LstmParams::init(Rng& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(input_dim() + hidden_dim()));
  for (Param* w : {&W_i, &W_f, &W_c, &W_o, &U_i, &U_f, &U_c, &U_o}) {
    init_uniform(w->value, bound, rng);
  }
  b_i.value.fill(0.0);
  b_f.value.fill(1.0);
  b_c.value.fill(0.0);
  b_o.value.fill(0.0);
}

std::vector<Param*> LstmParams::params() {
  return {&W_i, &W_f, &W_c, &W_o, &U_i, &U_f, &U_c, &U_o, &b_i, &b_f, &b_c, &b_o};
}

std::vector<const Param*> LstmParams::params() const {
  return {&W_i, &W_f, &W_c, &W_o, &U_i, &U_f, &U_c, &U_o, &b_i, &b_f, &b_c, &b_o};
}

LstmState lstm_step(const LstmParams& p, std::span<const double> x, const LstmState& prev) {
  const std::size_t d_h = p.hidden_dim();
  if (x.size() != p.input_dim() || prev.h.size() != d_h || prev.c.size() != d_h) {
    throw StructureError("lstm_step: shape mismatch");
  }
  std::vector<double> zi(d_h), zf(d_h), zc(d_h), zo(d_h);
  gate_preactivation(p.W_i, p.U_i, p.b_i, x, prev.h, zi);
  gate_preactivation(p.W_f, p.U_f, p.b_f, x, prev.h, zf);
  gate_preactivation(p.W_c, p.U_c, p.b_c, x, prev.h, zc);
  gate_preactivation(p.W_o, p.U_o, p.b_o, x, prev.h, zo);
  LstmState next = LstmState::zeros(d_h);
  for (std::size_t r = 0; r < d_h; ++r) {
    const double i = sigmoid(zi[r]);
    const double f = sigmoid(zf[r]);
    const double g = std::tanh(zc[r]);
    const double o = sigmoid(zo[r]);
    next.c[r] = f * prev.c[r] + i * g;
    next.h[r] = o * std::tanh(next.c[r]);
  }
  return next;
}

LstmTrace lstm_forward(const LstmParams& p, const Matrix& input, bool reverse) {
  const std::size_t T = input.rows();
  const std::size_t d_h = p.hidden_dim();
  if (input.cols() != p.input_dim()) throw StructureError("lstm_forward: input width mismatch");
  LstmTrace tr;
  tr.reverse = reverse;
  tr.input = input;
  for (Matrix* m : {&tr.i, &tr.f, &tr.g, &tr.o, &tr.c, &tr.tanh_c, &tr.h}) *m = Matrix(T, d_h);

  const std::vector<double> zeros(d_h, 0.0);
  std::vector<double> zi(d_h), zf(d_h), zc(d_h), zo(d_h);
  for (std::size_t k = 0; k < T; ++k) {
    const std::size_t t = reverse ? T - 1 - k : k;
    const bool first = k == 0;
    const std::size_t prev = reverse ? t + 1 : t - 1;
    std::span<const double> h_prev = first ? std::span<const double>(zeros) : tr.h.row(prev);
    std::span<const double> c_prev = first ? std::span<const double>(zeros) : tr.c.row(prev);
    const auto x = input.row(t);
    gate_preactivation(p.W_i, p.U_i, p.b_i, x, h_prev, zi);
    gate_preactivation(p.W_f, p.U_f, p.b_f, x, h_prev, zf);
    gate_preactivation(p.W_c, p.U_c, p.b_c, x, h_prev, zc);
    gate_preactivation(p.W_o, p.U_o, p.b_o, x, h_prev, zo);
    for (std::size_t r = 0; r < d_h; ++r) {
      const double i = sigmoid(zi[r]);
      const double f = sigmoid(zf[r]);
      const double g = std::tanh(zc[r]);
      const double o = sigmoid(zo[r]);
      const double c = f * c_prev[r] + i * g;
      const double tc = std::tanh(c);
      tr.i(t, r) = i;
      tr.f(t, r) = f;
      tr.g(t, r) = g;
      tr.o(t, r) = o;
      tr.c(t, r) = c;
      tr.tanh_c(t, r) = tc;
      tr.h(t, r) = o * tc;
    }
  }
  return tr;
}

Matrix lstm_backward(LstmParams& p, const LstmTrace& tr, const Matrix& d_h_out) {
  const std::size_t T = tr.h.rows();
  const std::size_t d_h = p.hidden_dim();
  check_shape(d_h_out, T, d_h, "lstm_backward gradient");
  Matrix dx(T, p.input_dim());

  const std::vector<double> zeros(d_h, 0.0);
  std::vector<double> dh_next(d_h, 0.0), dc_next(d_h, 0.0);
  std::vector<double> dh_prev(d_h), dzi(d_h), dzf(d_h), dzc(d_h), dzo(d_h);
  for (std::size_t k = T; k-- > 0;) {
    const std::size_t t = tr.reverse ? T - 1 - k : k;
    const bool first = k == 0;
    const std::size_t prev = tr.reverse ? t + 1 : t - 1;
    std::span<const double> h_prev = first ? std::span<const double>(zeros) : tr.h.row(prev);
    std::span<const double> c_prev = first ? std::span<const double>(zeros) : tr.c.row(prev);
    for (std::size_t r = 0; r < d_h; ++r) {
      const double dh = d_h_out(t, r) + dh_next[r];
      const double i = tr.i(t, r), f = tr.f(t, r), g = tr.g(t, r), o = tr.o(t, r);
      const double tc = tr.tanh_c(t, r);
      const double d_o = dh * tc;
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[r];
      dzi[r] = dc * g * i * (1.0 - i);
      dzf[r] = dc * c_prev[r] * f * (1.0 - f);
      dzc[r] = dc * i * (1.0 - g * g);
      dzo[r] = d_o * o * (1.0 - o);
      dc_next[r] = dc * f;
    }
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    const auto x = tr.input.row(t);
    auto dxr = dx.row(t);
    gate_backward(p.W_i, p.U_i, p.b_i, dzi, x, h_prev, dxr, dh_prev);
    gate_backward(p.W_f, p.U_f, p.b_f, dzf, x, h_prev, dxr, dh_prev);
    gate_backward(p.W_c, p.U_c, p.b_c, dzc, x, h_prev, dxr, dh_prev);
    gate_backward(p.W_o, p.U_o, p.b_o, dzo, x, h_prev, dxr, dh_prev);
    dh_next.swap(dh_prev);
  }
  return dx;
}

std::vector<Param*> BiLstm::params() {
  auto out = fwd.params();
  auto b = bwd.params();
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Matrix bilstm_forward(const BiLstm& net, const Matrix& input, BiLstmTrace* trace) {
  if (net.fwd.input_dim() != net.bwd.input_dim() || net.fwd.hidden_dim() != net.bwd.hidden_dim()) {
    throw StructureError("bilstm: direction shapes differ");
  }
  LstmTrace f = lstm_forward(net.fwd, input, false);
  LstmTrace b = lstm_forward(net.bwd, input, true);
  const std::size_t T = input.rows();
  const std::size_t d_h = net.hidden_dim();
  Matrix out(T, 2 * d_h);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t r = 0; r < d_h; ++r) {
      out(t, r) = f.h(t, r);
      out(t, d_h + r) = b.h(t, r);
    }
  }
  if (trace) {
    trace->fwd = std::move(f);
    trace->bwd = std::move(b);
  }
  return out;
}

Matrix bilstm_backward(BiLstm& net, const BiLstmTrace& trace, const Matrix& d_out) {
  const std::size_t T = d_out.rows();
  const std::size_t d_h = net.hidden_dim();
  check_shape(d_out, T, 2 * d_h, "bilstm_backward gradient");
  Matrix df(T, d_h), db(T, d_h);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t r = 0; r < d_h; ++r) {
      df(t, r) = d_out(t, r);
      db(t, r) = d_out(t, d_h + r);
    }
  }
  Matrix dx = lstm_backward(net.fwd, trace.fwd, df);
  const Matrix dxb = lstm_backward(net.bwd, trace.bwd, db);
  auto a = dx.flat();
  const auto b = dxb.flat();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return dx;
}

}  // namespace dictner
