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

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pancake/linalg.hpp"
#include "pancake/plate.hpp"

namespace pancake {

struct FlightHit {
  Vec point;
  double time = 0.0;
  Vec normal;  // inward unit normal at the hit
};

/// Region P of R^k in which the no-slip billiard ball moves.
class BilliardDomain {
 public:
  virtual ~BilliardDomain() = default;
  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  /// First boundary hit of x + t u for t > 0 (x may be a departing boundary
  /// point). Throws SingularGeometry at corners, EscapedDomain when the ray
  /// never returns to the boundary.
  virtual FlightHit flight(const Vec& x, const Vec& u) const = 0;
  /// Wraps coordinates for output (torus domains); identity otherwise.
  virtual Vec display_point(const Vec& x) const { return x; }
};

using DomainPtr = std::shared_ptr<const BilliardDomain>;

/// k-ball of radius R centred at the origin.
DomainPtr make_disc_domain(double R, int k = 2);
/// {x in R^k : x_k >= 0}.
DomainPtr make_half_plane_domain(int k);
/// Convex polygon with counter-clockwise vertices.
DomainPtr make_polygon_domain(const std::vector<std::array<double, 2>>& vertices);
/// Flat torus [0, L)^2 minus a disc of radius rho (unwrapped coordinates).
DomainPtr make_sinai_domain(double L, double rho);
/// Region inside a closed periodic spline through counter-clockwise samples.
DomainPtr make_curve_domain(const std::vector<std::array<double, 2>>& points);

/// Billiard domain of a plate family (HalfPlane, Disc, SinaiTorus,
/// SmoothPlanarPlate); throws InvalidArgument for the others.
DomainPtr make_billiard_domain(const PlateSpec& plate);

/// PlateSpec JSON schema plus {"family": "ConvexPolygon", "vertices": [...]}
/// and an optional "k" for Disc.
DomainPtr billiard_domain_from_json(const nlohmann::json& j);

/// Billiard state: position, velocity and spin 𝒮 = rγS (k x k).
struct BilliardState {
  Vec x;
  Vec u;
  SkewMap spin;
};

/// |u|² + ½Tr(𝒮𝒮ᵀ) (twice the kinetic energy with unit mass).
double billiard_energy(const BilliardState& s);

/// Full collision map in the unscaled spin S: u' = c u − (s/γ)(u·n)n + sγr Sn,
/// S' = S + (s/(γr)) n∧(u − rSn), (c, s) = (c_β, s_β). For γ = 0 the
/// decoupled limit is used: specular u, W = Sn sign-flipped.
std::pair<Vec, SkewMap> collision_full(const Vec& u, const SkewMap& S,
                                       const Vec& n, double r, double gamma);

/// Boundary-frame split at a point with inward normal n.
struct BoundarySplit {
  Vec u_bar;        // Πu
  Vec W;            // 𝒮n
  double u_perp = 0.0;  // u·n
  SkewMap tangential;   // Π𝒮Π
};
BoundarySplit split_at_boundary(const Vec& u, const SkewMap& spin, const Vec& n);
/// Inverse of split_at_boundary: u = ū + u⊥n, 𝒮 = Π𝒮Π + n∧W.
std::pair<Vec, SkewMap> assemble_from_split(const BoundarySplit& s, const Vec& n);

struct ReducedCollision {
  Vec u_bar;
  Vec W;
  double u_perp = 0.0;
};

/// Reduced (rolling-limit) form: u⊥' = −u⊥, (ū', W') = [[cos θ, sin θ], [sin θ, −cos θ]](ū, W).
ReducedCollision collision_reduced(const Vec& u_bar, const Vec& W, double u_perp,
                                   double theta);

/// Applies collision_reduced to a full state at a boundary point.
BilliardState collide(const BilliardState& s, const Vec& n, double theta);

FlightHit flight_to_boundary(const BilliardDomain& domain, const Vec& x, const Vec& u);

struct CollisionRecord {
  int n = 0;
  Vec point;
  Vec normal;
  double time = 0.0;          // cumulative flight time at the hit
  double chord_distance = 0.0;  // origin-to-line distance of the incoming segment
  BilliardState before;
  BilliardState after;
};

struct BilliardOrbit {
  BilliardState initial;
  std::vector<CollisionRecord> collisions;
};

/// Alternates flight_to_boundary and collide(θ) for n_collisions hits.
BilliardOrbit billiard_orbit(const BilliardDomain& domain, const BilliardState& s0,
                             double theta, int n_collisions);

struct CausticCluster {
  double radius = 0.0;
  int multiplicity = 0;
};

/// Distances from the centre to every chord line of a disc orbit, clustered
/// in 1-d with gap threshold 1e-6·R. An orbit with n collisions has n + 1
/// segments (the outgoing one after the last hit included); needs >= 50.
std::vector<CausticCluster> caustic_radii(const BilliardOrbit& orbit, double R);

/// Orbit CSV `n,x1..xk,u1..uk,W1..W(k-1),chord_dist`: one row per collision
/// with the post-collision state; W in the boundary tangent frame at the hit.
void write_orbit_csv(std::ostream& out, const BilliardDomain& domain,
                     const BilliardOrbit& orbit);

/// Tangent frame of the boundary at a point with inward normal n: for k = 2
/// the single column T with n = J T (J the +90° rotation); otherwise the
/// Householder complement of n.
Mat boundary_tangent_frame(const Vec& n);

}  // namespace pancake
