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

#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pancake/linalg.hpp"
#include "pancake/plate.hpp"

namespace pancake {

enum class RegionKind { FlatSheetPlus, FlatSheetMinus, EdgeTube, Cap, Seam };

std::string_view to_string(RegionKind kind);

/// Chart descriptor: a region kind plus a human-readable parametrisation.
struct SurfaceRegion {
  RegionKind kind;
  std::string chart;
};

/// Boundary data of the plate at the foot of a point. All vectors are
/// ambient; `tangents` has one column per edge direction (E_1..E_{k-1}).
struct EdgeFrame {
  Vec point;            // foot on P0 (height zero)
  Vec inward_normal;    // n, pointing into the plate
  Mat tangents;         // orthonormal frame of T P0
  double curvature = 0.0;        // signed curvature along tangents.col(0)
  double signed_distance = 0.0;  // in-plane distance, positive inside P
};

/// The boundary N(r) of the r-neighbourhood of a plate, as an atlas of
/// analytic regions. Regions double as charts: normal_in / shape_operator_in
/// extend each region's formulas analytically off the surface and a little
/// past its seams, which is what the integrator's stages evaluate.
///
/// Immutable after construction; every query is thread-safe.
class PancakeSurface {
 public:
  /// Seam detection band for classify().
  static constexpr double kSeamBand = 1e-9;
  /// Tolerance on |dist(x, P) - r| accepted by the point queries.
  static constexpr double kOnSurfaceTol = 1e-8;

  PancakeSurface(PlateSpec plate, double r);
  virtual ~PancakeSurface() = default;

  const PlateSpec& plate() const { return plate_; }
  double radius() const { return r_; }
  int dim() const { return dim_; }

  virtual std::vector<SurfaceRegion> regions() const = 0;

  /// Closest point of the plate P to the ambient point x.
  virtual Vec closest_plate_point(const Vec& x) const = 0;
  double distance_to_plate(const Vec& x) const;

  /// Region containing x, ignoring the seam band (seams resolved to the side
  /// the point lies on).
  virtual RegionKind side(const Vec& x) const = 0;

  /// Signed seam function of a region: positive inside, zero on the region's
  /// seam, negative past it. +inf for regions without seams.
  virtual double seam_function(RegionKind region, const Vec& x) const = 0;

  /// Region entered when leaving `from` through its seam at x.
  virtual RegionKind region_across_seam(RegionKind from, const Vec& x) const = 0;

  /// Analytic chart formulas for ν and 𝕊 (𝕊v = −D_vν) of one region.
  virtual Vec normal_in(RegionKind region, const Vec& x) const = 0;
  virtual Mat shape_operator_in(RegionKind region, const Vec& x) const = 0;

  /// Boundary frame at the foot of x; throws InvalidArgument for families
  /// without an edge curve.
  virtual EdgeFrame edge_frame(const Vec& x) const;

  /// Coordinates for output (e.g. wraps torus coordinates into [0, L)).
  virtual Vec display_point(const Vec& x) const { return x; }

  /// Time for the straight motion x + t u on a flat sheet to reach the seam
  /// (exact ray cast); +inf when it never does or no ray cast is available.
  /// The search may stop early (returning +inf) beyond `horizon`.
  virtual double sheet_seam_time(const Vec& x, const Vec& u,
                                 double horizon = std::numeric_limits<double>::infinity()) const;

  /// Region kind with seam detection (|seam function| <= kSeamBand).
  RegionKind classify(const Vec& x) const;

  /// Unit normal of the surface at x (continuous across seams). Throws
  /// NotOnSurface when x is off the surface by more than kOnSurfaceTol.
  Vec normal(const Vec& x) const;

  /// Shape operator at x. Throws SeamPoint on a seam, NotOnSurface off it.
  Mat shape_operator(const Vec& x) const;

  /// Nearest surface point. Throws AmbiguousProjection when x is farther than
  /// r/2 from the surface.
  Vec project(const Vec& x) const;

 protected:
  void require_on_surface(const Vec& x) const;

 private:
  PlateSpec plate_;
  double r_;
  int dim_;
};

using SurfacePtr = std::shared_ptr<const PancakeSurface>;

/// Builds N(r) for a plate. Throws InadmissibleRadius naming the violated
/// bound when r is too large for the closest-point map to be well defined.
SurfacePtr build_pancake(const PlateSpec& plate, double r);

/// Free-function forms of the geometry queries.
Vec normal(const PancakeSurface& surface, const Vec& x);
Mat shape_operator(const PancakeSurface& surface, const Vec& x);
Vec project_to_surface(const PancakeSurface& surface, const Vec& x);
RegionKind classify_region(const PancakeSurface& surface, const Vec& x);

}  // namespace pancake
