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

#include <stdexcept>
#include <string>

namespace pancake {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation on an argument (dimension mismatch, non-unit
/// normal, non-skew matrix, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Ball radius is not admissible for the plate family.
class InadmissibleRadius : public Error {
 public:
  using Error::Error;
};

/// A point that was required to lie on the pancake surface does not.
class NotOnSurface : public Error {
 public:
  using Error::Error;
};

/// Closest-point projection requested too far from the surface.
class AmbiguousProjection : public Error {
 public:
  using Error::Error;
};

/// Shape operator requested on a seam, where it is discontinuous.
class SeamPoint : public Error {
 public:
  using Error::Error;
};

/// Trajectory or orbit reached a non-smooth boundary point (corner, vertex)
/// or produced non-finite geometry.
class SingularGeometry : public Error {
 public:
  using Error::Error;
};

/// Billiard flight left an unbounded domain.
class EscapedDomain : public Error {
 public:
  using Error::Error;
};

/// Rolling trajectory stayed on the edge tube beyond its time budget.
class NonExit : public Error {
 public:
  using Error::Error;
};

}  // namespace pancake
