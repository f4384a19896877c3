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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dictner/tensor.h"

namespace dictner {

/// Per-gate LSTM weights: input (i), forget (f), candidate (c), output (o).
struct LstmParams {
  Param W_i, W_f, W_c, W_o;  // d_h x d_in
  Param U_i, U_f, U_c, U_o;  // d_h x d_h
  Param b_i, b_f, b_c, b_o;  // 1 x d_h

  LstmParams() = default;
  LstmParams(const std::string& name, std::size_t d_in, std::size_t d_h);

  std::size_t input_dim() const { return W_i.value.cols(); }
  std::size_t hidden_dim() const { return W_i.value.rows(); }

  /// Weights uniform in +-sqrt(6/(d_in+d_h)), forget bias 1, other biases 0.
  void init(Rng& rng);
  std::vector<Param*> params();
  std::vector<const Param*> params() const;
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  static LstmState zeros(std::size_t d_h) { return {std::vector<double>(d_h), std::vector<double>(d_h)}; }
};

/// One recurrence step:
///   i = sigm(W_i x + U_i h + b_i), f = sigm(...), c~ = tanh(...),
///   c' = f * c + i * c~, o = sigm(...), h' = o * tanh(c').
LstmState lstm_step(const LstmParams& p, std::span<const double> x, const LstmState& prev);

/// Activations recorded by a full-sequence pass, indexed by input position.
struct LstmTrace {
  bool reverse = false;
  Matrix input;                   // T x d_in
  Matrix i, f, g, o, c, tanh_c;   // T x d_h
  Matrix h;                       // T x d_h, the outputs
};

/// Runs the cell over all rows of `input` from a zero state, right to left
/// when `reverse` is set. Output row t is the state after consuming row t.
LstmTrace lstm_forward(const LstmParams& p, const Matrix& input, bool reverse);

/// Back-propagation through time. Accumulates into the gradients of `p` and
/// returns dL/d(input).
Matrix lstm_backward(LstmParams& p, const LstmTrace& trace, const Matrix& d_h);

struct BiLstm {
  LstmParams fwd;
  LstmParams bwd;

  BiLstm() = default;
  BiLstm(const std::string& name, std::size_t d_in, std::size_t d_h)
      : fwd(name + ".fwd", d_in, d_h), bwd(name + ".bwd", d_in, d_h) {}

  std::size_t input_dim() const { return fwd.input_dim(); }
  std::size_t hidden_dim() const { return fwd.hidden_dim(); }
  std::size_t output_dim() const { return 2 * fwd.hidden_dim(); }

  void init(Rng& rng) { fwd.init(rng); bwd.init(rng); }
  std::vector<Param*> params();
};

struct BiLstmTrace {
  LstmTrace fwd;
  LstmTrace bwd;
};

/// Row t of the result is [forward h_t, backward h_t].
Matrix bilstm_forward(const BiLstm& net, const Matrix& input, BiLstmTrace* trace = nullptr);
Matrix bilstm_backward(BiLstm& net, const BiLstmTrace& trace, const Matrix& d_out);

}  // namespace dictner
