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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dictner {

/// Dense row-major matrix of doubles. Dimensions are fixed at construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double v);
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws StructureError with `what` when the shapes differ.
void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what);

/// A trainable tensor with its gradient accumulator.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;

  Param() = default;
  Param(std::string n, std::size_t rows, std::size_t cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  void zero_grad() { grad.fill(0.0); }
};

/// Seedable generator with platform-independent derived distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

enum class Mode { kTrain, kEval };

/// Lookup table: one row per symbol.
struct EmbeddingTable {
  Param table;

  EmbeddingTable() = default;
  EmbeddingTable(std::string name, std::size_t rows, std::size_t dim)
      : table(std::move(name), rows, dim) {}

  std::size_t rows() const { return table.value.rows(); }
  std::size_t dim() const { return table.value.cols(); }

  /// Rows uniform in [-sqrt(3/d), sqrt(3/d)].
  void init(Rng& rng);
  /// Throws StructureError when `index` is out of range.
  std::span<const double> lookup(std::size_t index) const;
  void accumulate_grad(std::size_t index, std::span<const double> grad);
};

/// y = W x + b applied row-wise to a T x in matrix.
struct Affine {
  Param weight;  // out x in
  Param bias;    // 1 x out

  Affine() = default;
  Affine(const std::string& name, std::size_t in, std::size_t out)
      : weight(name + ".W", out, in), bias(name + ".b", 1, out) {}

  std::size_t in_dim() const { return weight.value.cols(); }
  std::size_t out_dim() const { return weight.value.rows(); }

  void init(Rng& rng);
  Matrix forward(const Matrix& x) const;
  /// Accumulates parameter gradients; returns dL/dx.
  Matrix backward(const Matrix& x, const Matrix& d_out);
};

/// Inverted dropout. In train mode each entry is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate); the applied multipliers are
/// written to `mask` when given. Eval mode returns `x` unchanged.
Matrix dropout_forward(const Matrix& x, double rate, Mode mode, Rng& rng,
                       Matrix* mask = nullptr);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moments are created lazily on the first
/// update and must keep matching the parameter shapes afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void update(std::span<Param* const> params);

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t step() const { return step_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

 private:
  AdamConfig cfg_;
  std::uint64_t step_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

double gradient_norm(std::span<Param* const> params);
/// Rescales all gradients so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_gradients(std::span<Param* const> params, double max_norm);

/// Glorot-style uniform bound sqrt(6 / (fan_in + fan_out)).
void init_uniform(Matrix& m, double bound, Rng& rng);

}  // namespace dictner
