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

#include "dictner/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dictner/corpus.h"
#include "dictner/error.h"

namespace dictner::crf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_inputs(const Matrix& em, const Matrix& trans) {
  const std::size_t K = em.cols();
  check_shape(trans, K + 2, K + 2, "transition matrix");
}

void check_path(const Matrix& em, std::span<const int> path) {
  if (path.size() != em.rows()) {
    throw StructureError("path length " + std::to_string(path.size()) +
                         " does not match " + std::to_string(em.rows()) + " positions");
  }
  for (int y : path) {
    if (y < 0 || static_cast<std::size_t>(y) >= em.cols()) {
      throw StructureError("tag code " + std::to_string(y) + " out of range");
    }
  }
}

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// alpha(t, j): log-sum of all prefixes ending in tag j at t, emission included.
Matrix forward_table(const Matrix& em, const Matrix& trans) {
  const std::size_t T = em.rows(), K = em.cols();
  const std::size_t S = start_state(K);
  Matrix alpha(T, K);
  std::vector<double> buf(K);
  for (std::size_t j = 0; j < K; ++j) alpha(0, j) = trans(S, j) + em(0, j);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t i = 0; i < K; ++i) buf[i] = alpha(t - 1, i) + trans(i, j);
      alpha(t, j) = log_sum_exp(buf) + em(t, j);
    }
  }
  return alpha;
}

// beta(t, i): log-sum of all suffixes after tag i at t, end transition included.
Matrix backward_table(const Matrix& em, const Matrix& trans) {
  const std::size_t T = em.rows(), K = em.cols();
  const std::size_t E = end_state(K);
  Matrix beta(T, K);
  std::vector<double> buf(K);
  for (std::size_t i = 0; i < K; ++i) beta(T - 1, i) = trans(i, E);
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < K; ++j) buf[j] = trans(i, j) + em(t + 1, j) + beta(t + 1, j);
      beta(t, i) = log_sum_exp(buf);
    }
  }
  return beta;
}

double final_logz(const Matrix& alpha, const Matrix& trans) {
  const std::size_t T = alpha.rows(), K = alpha.cols();
  std::vector<double> buf(K);
  for (std::size_t j = 0; j < K; ++j) buf[j] = alpha(T - 1, j) + trans(j, end_state(K));
  return log_sum_exp(buf);
}

}  // namespace

Matrix make_transitions(std::size_t num_tags) { return Matrix(num_tags + 2, num_tags + 2); }

double sequence_score(const Matrix& em, const Matrix& trans, std::span<const int> path) {
  check_inputs(em, trans);
  check_path(em, path);
  const std::size_t K = em.cols();
  if (path.empty()) return 0.0;
  double s = trans(start_state(K), path[0]) + em(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    s += trans(path[t - 1], path[t]);
    s += em(t, path[t]);
  }
  s += trans(path.back(), end_state(K));
  return s;
}

double forward_logz(const Matrix& em, const Matrix& trans) {
  check_inputs(em, trans);
  if (em.rows() == 0) return 0.0;
  return final_logz(forward_table(em, trans), trans);
}

double nll(const Matrix& em, const Matrix& trans, std::span<const int> gold) {
  const double score = sequence_score(em, trans, gold);
  return forward_logz(em, trans) - score;
}

double nll_backward(const Matrix& em, const Matrix& trans, std::span<const int> gold,
                    Matrix& d_em, Matrix& d_trans) {
  const double score = sequence_score(em, trans, gold);
  const std::size_t T = em.rows(), K = em.cols();
  check_shape(d_em, T, K, "emission gradient");
  check_shape(d_trans, K + 2, K + 2, "transition gradient");
  if (T == 0) return 0.0;
  const std::size_t S = start_state(K), E = end_state(K);

  const Matrix alpha = forward_table(em, trans);
  const Matrix beta = backward_table(em, trans);
  const double logz = final_logz(alpha, trans);

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      d_em(t, j) += std::exp(alpha(t, j) + beta(t, j) - logz);
    }
  }
  for (std::size_t j = 0; j < K; ++j) {
    d_trans(S, j) += std::exp(alpha(0, j) + beta(0, j) - logz);
    d_trans(j, E) += std::exp(alpha(T - 1, j) + trans(j, E) - logz);
  }
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t i = 0; i < K; ++i) {
      const double a = alpha(t - 1, i);
      for (std::size_t j = 0; j < K; ++j) {
        d_trans(i, j) += std::exp(a + trans(i, j) + em(t, j) + beta(t, j) - logz);
      }
    }
  }

  d_trans(S, gold[0]) -= 1.0;
  d_trans(gold[T - 1], E) -= 1.0;
  for (std::size_t t = 0; t < T; ++t) {
    d_em(t, gold[t]) -= 1.0;
    if (t > 0) d_trans(gold[t - 1], gold[t]) -= 1.0;
  }
  return logz - score;
}

TagPath viterbi_decode(const Matrix& em, const Matrix& trans, const Matrix* allowed) {
  check_inputs(em, trans);
  const std::size_t T = em.rows(), K = em.cols();
  if (allowed) check_shape(*allowed, K + 2, K + 2, "allowed-transition mask");
  TagPath out;
  if (T == 0) return out;
  const std::size_t S = start_state(K), E = end_state(K);
  auto tr = [&](std::size_t a, std::size_t b) {
    return (allowed && (*allowed)(a, b) == 0.0) ? kNegInf : trans(a, b);
  };

  Matrix delta(T, K);
  std::vector<std::vector<int>> back(T, std::vector<int>(K, 0));
  for (std::size_t j = 0; j < K; ++j) delta(0, j) = tr(S, j) + em(0, j);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (std::size_t i = 0; i < K; ++i) {
        const double v = delta(t - 1, i) + tr(i, j);
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      delta(t, j) = best + em(t, j);
      back[t][j] = arg;
    }
  }
  double best = kNegInf;
  int last = 0;
  for (std::size_t j = 0; j < K; ++j) {
    const double v = delta(T - 1, j) + tr(j, E);
    if (v > best) {
      best = v;
      last = static_cast<int>(j);
    }
  }
  out.tags.assign(T, 0);
  out.tags[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) out.tags[t - 1] = back[t][out.tags[t]];
  out.score = sequence_score(em, trans, out.tags);
  return out;
}

const Matrix& bieos_allowed_transitions() {
  static const Matrix mask = [] {
    constexpr std::size_t K = Tag::kCount;
    Matrix m(K + 2, K + 2);
    auto opens_free = [](Tag t) {  // tag after which a new entity may start
      return t.is_outside() || t.position() == Position::kEnd || t.position() == Position::kSingle;
    };
    auto starts_free = [](Tag t) {
      return t.is_outside() || t.position() == Position::kBegin || t.position() == Position::kSingle;
    };
    for (std::size_t b = 0; b < K; ++b) {
      const Tag next = Tag::from_code(static_cast<int>(b));
      if (starts_free(next)) m(start_state(K), b) = 1.0;
      if (opens_free(next)) m(b, end_state(K)) = 1.0;
      for (std::size_t a = 0; a < K; ++a) {
        const Tag prev = Tag::from_code(static_cast<int>(a));
        bool ok;
        if (opens_free(prev)) {
          ok = starts_free(next);
        } else {
          ok = !next.is_outside() && next.type() == prev.type() &&
               (next.position() == Position::kInside || next.position() == Position::kEnd);
        }
        m(a, b) = ok ? 1.0 : 0.0;
      }
    }
    return m;
  }();
  return mask;
}

}  // namespace dictner::crf
