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

#include "dictner/tensor.h"

#include <algorithm>
#include <cmath>

#include "dictner/error.h"

namespace dictner {

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw StructureError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

// splitmix64
std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) return 0;
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

void init_uniform(Matrix& m, double bound, Rng& rng) {
  for (double& x : m.flat()) x = rng.uniform(-bound, bound);
}

void EmbeddingTable::init(Rng& rng) {
  init_uniform(table.value, std::sqrt(3.0 / static_cast<double>(dim())), rng);
}

std::span<const double> EmbeddingTable::lookup(std::size_t index) const {
  if (index >= rows()) {
    throw StructureError("embedding index " + std::to_string(index) + " out of range for " +
                         std::to_string(rows()) + " rows");
  }
  return table.value.row(index);
}

void EmbeddingTable::accumulate_grad(std::size_t index, std::span<const double> grad) {
  if (index >= rows() || grad.size() != dim()) throw StructureError("embedding gradient mismatch");
  auto row = table.grad.row(index);
  for (std::size_t k = 0; k < grad.size(); ++k) row[k] += grad[k];
}

void Affine::init(Rng& rng) {
  init_uniform(weight.value, std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim())), rng);
  bias.value.fill(0.0);
}

Matrix Affine::forward(const Matrix& x) const {
  if (x.cols() != in_dim()) throw StructureError("affine input width mismatch");
  const std::size_t out = out_dim();
  Matrix y(x.rows(), out);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto xr = x.row(t);
    for (std::size_t o = 0; o < out; ++o) {
      const auto w = weight.value.row(o);
      double s = bias.value(0, o);
      for (std::size_t k = 0; k < xr.size(); ++k) s += w[k] * xr[k];
      y(t, o) = s;
    }
  }
  return y;
}

Matrix Affine::backward(const Matrix& x, const Matrix& d_out) {
  check_shape(d_out, x.rows(), out_dim(), "affine gradient");
  Matrix dx(x.rows(), in_dim());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto xr = x.row(t);
    auto dxr = dx.row(t);
    for (std::size_t o = 0; o < out_dim(); ++o) {
      const double g = d_out(t, o);
      if (g == 0.0) continue;
      bias.grad(0, o) += g;
      const auto w = weight.value.row(o);
      auto gw = weight.grad.row(o);
      for (std::size_t k = 0; k < xr.size(); ++k) {
        gw[k] += g * xr[k];
        dxr[k] += g * w[k];
      }
    }
  }
  return dx;
}

Matrix dropout_forward(const Matrix& x, double rate, Mode mode, Rng& rng, Matrix* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) throw StructureError("dropout rate must lie in [0, 1)");
  if (mode == Mode::kEval || rate == 0.0) {
    if (mask) *mask = Matrix(x.rows(), x.cols(), 1.0);
    return x;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix m(x.rows(), x.cols());
  Matrix y(x.rows(), x.cols());
  auto mf = m.flat();
  auto yf = y.flat();
  const auto xf = x.flat();
  for (std::size_t k = 0; k < xf.size(); ++k) {
    mf[k] = rng.uniform() < rate ? 0.0 : keep_scale;
    yf[k] = xf[k] * mf[k];
  }
  if (mask) *mask = std::move(m);
  return y;
}

void Adam::update(std::span<Param* const> params) {
  if (m_.empty()) {
    for (const Param* p : params) {
      m_.emplace_back(p->value.rows(), p->value.cols());
      v_.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (m_.size() != params.size()) throw StructureError("Adam: parameter count changed");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->grad.same_shape(params[i]->value) || !m_[i].same_shape(params[i]->value)) {
      throw StructureError("Adam: shape mismatch for " + params[i]->name);
    }
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i]->value.flat();
    const auto g = params[i]->grad.flat();
    auto m = m_[i].flat();
    auto v = v_[i].flat();
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      w[k] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
}

double gradient_norm(std::span<Param* const> params) {
  double sq = 0.0;
  for (const Param* p : params)
    for (double g : p->grad.flat()) sq += g * g;
  return std::sqrt(sq);
}

double clip_gradients(std::span<Param* const> params, double max_norm) {
  const double norm = gradient_norm(params);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (Param* p : params)
      for (double& g : p->grad.flat()) g *= scale;
  }
  return norm;
}

}  // namespace dictner
