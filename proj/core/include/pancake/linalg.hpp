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

#pragma once

#include <Eigen/Core>

namespace pancake {

/// Largest ambient dimension supported. Vectors and matrices are dynamically
/// sized up to this bound but stored inline, so hot loops never allocate.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim,
                          kMaxDim>;

/// Skew-symmetric m x m matrix: a tangential spin, an angular velocity, or
/// the result of a wedge product.
class SkewMap {
 public:
  SkewMap() = default;

  static SkewMap zero(int dim);

  /// Validates skew-symmetry to 1e-12 componentwise; throws InvalidArgument.
  static SkewMap from_matrix(const Mat& entries);

  /// Takes the skew part (M - M^T) / 2 without validation.
  static SkewMap skew_part(const Mat& entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Mat& matrix() const { return entries_; }

  Vec apply(const Vec& v) const { return entries_ * v; }

  /// Frobenius norm.
  double norm() const { return entries_.norm(); }

  /// Tr(A B^T).
  double trace_inner(const SkewMap& other) const;

  SkewMap& operator+=(const SkewMap& rhs);
  SkewMap& operator-=(const SkewMap& rhs);
  SkewMap& operator*=(double s);

  friend SkewMap operator+(SkewMap a, const SkewMap& b) { return a += b; }
  friend SkewMap operator-(SkewMap a, const SkewMap& b) { return a -= b; }
  friend SkewMap operator*(SkewMap a, double s) { return a *= s; }
  friend SkewMap operator*(double s, SkewMap a) { return a *= s; }
  friend SkewMap operator-(SkewMap a) { return a *= -1.0; }

 private:
  explicit SkewMap(Mat entries) : entries_(std::move(entries)) {}
  Mat entries_;
};

/// a ∧ b : u -> (a·u) b - (b·u) a.
SkewMap wedge(const Vec& a, const Vec& b);

/// I - nu nu^T.
Mat tangent_projector(const Vec& nu);

struct SkewSplit {
  SkewMap tangential;  // Π V Π
  Vec normal_part;     // W = V ν
};

/// Orthogonal split V = ΠVΠ + ν∧(Vν) with respect to the trace inner product.
/// Throws InvalidArgument unless |ν| = 1 to 1e-12.
SkewSplit skew_decompose(const SkewMap& v, const Vec& nu);

/// Upper-triangle entries (row-major: S12, S13, ..., S(m-1)m).
Vec upper_triangle(const SkewMap& s);

/// Unit vector along coordinate `i` in dimension `dim`.
Vec unit(int dim, int i);

/// Orthonormal basis of the complement of `n` inside span(ambient), with
/// `n` unit. Deterministic (Householder based) so downstream frames are
/// reproducible.
Mat complement_basis(const Vec& n);

}  // namespace pancake
