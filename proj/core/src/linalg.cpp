// Copyright 2026 The pancake Authors.
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

#include "pancake/linalg.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pancake/errors.hpp"

namespace pancake {

SkewMap SkewMap::zero(int dim) { return SkewMap(Mat::Zero(dim, dim)); }

SkewMap SkewMap::from_matrix(const Mat& entries) {
  if (entries.rows() != entries.cols()) {
    throw InvalidArgument("SkewMap: matrix is not square");
  }
  const double asym = (entries + entries.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12)) {
    throw InvalidArgument(
        fmt::format("SkewMap: |M + M^T| = {:.3e} exceeds 1e-12", asym));
  }
  return skew_part(entries);
}

SkewMap SkewMap::skew_part(const Mat& entries) {
  return SkewMap(0.5 * (entries - entries.transpose()));
}

double SkewMap::trace_inner(const SkewMap& other) const {
  return entries_.cwiseProduct(other.entries_).sum();
}

SkewMap& SkewMap::operator+=(const SkewMap& rhs) {
  entries_ += rhs.entries_;
  return *this;
}

SkewMap& SkewMap::operator-=(const SkewMap& rhs) {
  entries_ -= rhs.entries_;
  return *this;
}

SkewMap& SkewMap::operator*=(double s) {
  entries_ *= s;
  return *this;
}

SkewMap wedge(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument(fmt::format("wedge: dimension mismatch ({} vs {})",
                                      a.size(), b.size()));
  }
  // (a∧b) u = b (a·u) - a (b·u)
  Mat m = b * a.transpose() - a * b.transpose();
  return SkewMap::skew_part(m);
}

Mat tangent_projector(const Vec& nu) {
  const auto n = nu.size();
  return Mat::Identity(n, n) - nu * nu.transpose();
}

SkewSplit skew_decompose(const SkewMap& v, const Vec& nu) {
  if (nu.size() != v.dim()) {
    throw InvalidArgument("skew_decompose: dimension mismatch");
  }
  if (std::abs(nu.norm() - 1.0) > 1e-12) {
    throw InvalidArgument(
        fmt::format("skew_decompose: |nu| = {:.17g} is not 1", nu.norm()));
  }
  const Mat proj = tangent_projector(nu);
  Mat tangential = proj * v.matrix() * proj;
  return {SkewMap::skew_part(tangential), v.apply(nu)};
}

Vec upper_triangle(const SkewMap& s) {
  const int m = s.dim();
  Vec out(m * (m - 1) / 2);
  int k = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) out[k++] = s.matrix()(i, j);
  }
  return out;
}

Vec unit(int dim, int i) {
  Vec e = Vec::Zero(dim);
  e[i] = 1.0;
  return e;
}

Mat complement_basis(const Vec& n) {
  const auto m = n.size();
  // Householder reflection H with H n = e_k for the coordinate k with the
  // largest |n_k|; the other columns of H span n^⊥.
  Eigen::Index k = 0;
  n.cwiseAbs().maxCoeff(&k);
  Vec v = n;
  const double sign = n[k] >= 0.0 ? 1.0 : -1.0;
  v[k] += sign;
  Mat h = Mat::Identity(m, m) - 2.0 * v * v.transpose() / v.squaredNorm();
  Mat basis(m, m - 1);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j != k) basis.col(col++) = h.col(j);
  }
  return basis;
}

}  // namespace pancake
