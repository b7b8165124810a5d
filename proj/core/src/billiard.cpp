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

#include "pancake/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "pancake/boundary_curve.hpp"
#include "pancake/errors.hpp"
#include "pancake/oracles.hpp"

namespace pancake {
namespace {

// Relative position along a polygon edge treated as a vertex hit.
constexpr double kVertexBand = 1e-9;

void require_speed(const Vec& u) {
  if (!(u.norm() > 0.0)) throw InvalidArgument("flight: velocity must be nonzero");
}

class DiscDomain final : public BilliardDomain {
 public:
  DiscDomain(double R, int k) : R_(R), k_(k) {
    if (!(R > 0.0)) throw InvalidArgument("Disc: R must be > 0");
    if (k < 1 || k > kMaxDim) throw InvalidArgument("Disc: unsupported dimension");
  }
  int dim() const override { return k_; }
  std::string kind() const override { return "Disc"; }

  FlightHit flight(const Vec& x, const Vec& u) const override {
    require_speed(u);
    const double a = u.squaredNorm();
    const double b = x.dot(u);
    const double c = x.squaredNorm() - R_ * R_;
    const double disc = b * b - a * c;
    if (disc < 0.0) throw EscapedDomain("Disc: ray misses the boundary");
    const double sq = std::sqrt(disc);
    // Larger root, in the cancellation-free form.
    const double t = b < 0.0 ? (sq - b) / a : -c / (b + sq);
    if (!(t > 1e-14 * R_ / std::sqrt(a))) {
      throw SingularGeometry("Disc: ray leaves the disc at its start point");
    }
    FlightHit hit;
    hit.time = t;
    hit.point = x + t * u;
    hit.normal = -hit.point / hit.point.norm();
    return hit;
  }

 private:
  double R_;
  int k_;
};

class HalfPlaneDomain final : public BilliardDomain {
 public:
  explicit HalfPlaneDomain(int k) : k_(k) {
    if (k < 1 || k > kMaxDim) throw InvalidArgument("HalfPlane: unsupported dimension");
  }
  int dim() const override { return k_; }
  std::string kind() const override { return "HalfPlane"; }

  FlightHit flight(const Vec& x, const Vec& u) const override {
    require_speed(u);
    const int i = k_ - 1;
    if (!(u[i] < 0.0)) throw EscapedDomain("HalfPlane: ray never returns to the wall");
    const double t = -x[i] / u[i];
    if (!(t > 0.0)) throw SingularGeometry("HalfPlane: ray starts outside the plate");
    FlightHit hit;
    hit.time = t;
    hit.point = x + t * u;
    hit.point[i] = 0.0;
    hit.normal = unit(k_, i);
    return hit;
  }

 private:
  int k_;
};

class PolygonDomain final : public BilliardDomain {
 public:
  explicit PolygonDomain(const std::vector<std::array<double, 2>>& v) {
    if (v.size() < 3) throw InvalidArgument("ConvexPolygon: need >= 3 vertices");
    for (const auto& p : v) vertices_.emplace_back(p[0], p[1]);
    const auto n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d e0 = vertices_[(i + 1) % n] - vertices_[i];
      const Eigen::Vector2d e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
      if (!(e0.x() * e1.y() - e0.y() * e1.x() > 0.0)) {
        throw InvalidArgument(
            "ConvexPolygon: vertices must be strictly convex and counter-clockwise");
      }
    }
  }
  int dim() const override { return 2; }
  std::string kind() const override { return "ConvexPolygon"; }

  FlightHit flight(const Vec& x, const Vec& u) const override {
    require_speed(u);
    const Eigen::Vector2d q(x[0], x[1]);
    const Eigen::Vector2d d(u[0], u[1]);
    const auto n = vertices_.size();
    double best = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    Eigen::Vector2d best_normal;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d p = vertices_[i];
      const Eigen::Vector2d e = vertices_[(i + 1) % n] - p;
      const Eigen::Vector2d nn = Eigen::Vector2d(-e.y(), e.x()).normalized();
      const double approach = d.dot(nn);
      if (!(approach < 0.0)) continue;
      const double t = (p - q).dot(nn) / approach;
      if (t > 0.0 && t < best) {
        best = t;
        best_s = (q + t * d - p).dot(e) / e.squaredNorm();
        best_normal = nn;
      }
    }
    if (!std::isfinite(best)) throw EscapedDomain("ConvexPolygon: no edge ahead");
    if (best_s < kVertexBand || best_s > 1.0 - kVertexBand) {
      throw SingularGeometry(fmt::format(
          "ConvexPolygon: ray hits a vertex (edge parameter {:.3e})", best_s));
    }
    FlightHit hit;
    hit.time = best;
    hit.point = x + best * u;
    hit.normal = Vec::Zero(2);
    hit.normal << best_normal.x(), best_normal.y();
    return hit;
  }

 private:
  std::vector<Eigen::Vector2d> vertices_;
};

class CurveDomain final : public BilliardDomain {
 public:
  CurveDomain(std::shared_ptr<const BoundaryCurve> curve, std::string kind,
              double scale, double wrap_period)
      : curve_(std::move(curve)),
        kind_(std::move(kind)),
        scale_(scale),
        wrap_period_(wrap_period) {}
  int dim() const override { return 2; }
  std::string kind() const override { return kind_; }

  FlightHit flight(const Vec& x, const Vec& u) const override {
    require_speed(u);
    const Eigen::Vector2d q(x[0], x[1]);
    const Eigen::Vector2d d(u[0], u[1]);
    const double t_min = 1e-10 * scale_ / d.norm();
    const double t = curve_->ray_hit(q, d, t_min);
    if (!(t > 0.0)) throw EscapedDomain(fmt::format("{}: ray never meets the boundary", kind_));
    const CurveFoot f = curve_->foot(q + t * d);
    FlightHit hit;
    hit.time = t;
    hit.point = Vec::Zero(2);
    hit.point << f.point.x(), f.point.y();
    hit.normal = Vec::Zero(2);
    hit.normal << f.inward_normal.x(), f.inward_normal.y();
    return hit;
  }

  Vec display_point(const Vec& x) const override {
    if (wrap_period_ <= 0.0) return x;
    Vec y = x;
    for (int i = 0; i < 2; ++i) {
      y[i] = std::fmod(y[i], wrap_period_);
      if (y[i] < 0.0) y[i] += wrap_period_;
    }
    return y;
  }

 private:
  std::shared_ptr<const BoundaryCurve> curve_;
  std::string kind_;
  double scale_;
  double wrap_period_;
};

double line_distance(const Vec& p, const Vec& u) {
  const Vec dir = u.normalized();
  return (p - p.dot(dir) * dir).norm();
}

}  // namespace

DomainPtr make_disc_domain(double R, int k) { return std::make_shared<DiscDomain>(R, k); }

DomainPtr make_half_plane_domain(int k) { return std::make_shared<HalfPlaneDomain>(k); }

DomainPtr make_polygon_domain(const std::vector<std::array<double, 2>>& vertices) {
  return std::make_shared<PolygonDomain>(vertices);
}

DomainPtr make_sinai_domain(double L, double rho) {
  return std::make_shared<CurveDomain>(std::make_shared<PeriodicHoleBoundary>(L, rho),
                                       "SinaiTorus", rho, L);
}

DomainPtr make_curve_domain(const std::vector<std::array<double, 2>>& points) {
  auto curve = std::make_shared<SplineBoundary>(points);
  const double scale = curve->period();
  return std::make_shared<CurveDomain>(std::move(curve), "SmoothCurve", scale, 0.0);
}

DomainPtr make_billiard_domain(const PlateSpec& plate) {
  validate(plate);
  if (const auto* p = std::get_if<HalfPlane>(&plate)) return make_half_plane_domain(p->k);
  if (const auto* p = std::get_if<Disc>(&plate)) return make_disc_domain(p->R, 2);
  if (const auto* p = std::get_if<SinaiTorus>(&plate)) return make_sinai_domain(p->L, p->rho);
  if (const auto* p = std::get_if<SmoothPlanarPlate>(&plate)) {
    return make_curve_domain(p->points);
  }
  throw InvalidArgument(
      fmt::format("{} plate has no billiard interior", family_name(plate)));
}

DomainPtr billiard_domain_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw InvalidArgument("domain: expected an object with a \"family\" field");
  }
  const auto family = j.at("family").get<std::string>();
  if (family == "ConvexPolygon") {
    for (const auto& [key, _] : j.items()) {
      if (key != "family" && key != "vertices") {
        throw InvalidArgument(fmt::format("domain: unknown key \"{}\" for ConvexPolygon", key));
      }
    }
    return make_polygon_domain(j.at("vertices").get<std::vector<std::array<double, 2>>>());
  }
  if (family == "Disc" && j.contains("k")) {
    nlohmann::json rest = j;
    const int k = rest.at("k").get<int>();
    rest.erase("k");
    const auto disc = std::get<Disc>(plate_from_json(rest));
    return make_disc_domain(disc.R, k);
  }
  return make_billiard_domain(plate_from_json(j));
}

double billiard_energy(const BilliardState& s) {
  return s.u.squaredNorm() + 0.5 * s.spin.trace_inner(s.spin);
}

std::pair<Vec, SkewMap> collision_full(const Vec& u, const SkewMap& S, const Vec& n,
                                       double r, double gamma) {
  if (u.size() != n.size() || S.dim() != u.size()) {
    throw InvalidArgument("collision_full: dimension mismatch");
  }
  if (std::abs(n.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("collision_full: normal must be a unit vector");
  }
  if (!(r > 0.0)) throw InvalidArgument("collision_full: r must be > 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("collision_full: gamma must be >= 0");
  if (gamma == 0.0) {
    const SkewSplit split = skew_decompose(S, n);
    return {u - 2.0 * u.dot(n) * n, split.tangential - wedge(n, split.normal_part)};
  }
  const Eigen::Vector2d cs = cbeta_sbeta(gamma);
  const double c = cs[0];
  const double s = cs[1];
  const Vec sn = S.apply(n);
  Vec u_out = c * u - (s / gamma) * u.dot(n) * n + s * gamma * r * sn;
  SkewMap s_out = S + (s / (gamma * r)) * wedge(n, u - r * sn);
  return {std::move(u_out), std::move(s_out)};
}

BoundarySplit split_at_boundary(const Vec& u, const SkewMap& spin, const Vec& n) {
  const SkewSplit sk = skew_decompose(spin, n);
  BoundarySplit out;
  out.u_perp = u.dot(n);
  out.u_bar = u - out.u_perp * n;
  out.W = sk.normal_part;
  out.tangential = sk.tangential;
  return out;
}

std::pair<Vec, SkewMap> assemble_from_split(const BoundarySplit& s, const Vec& n) {
  return {s.u_bar + s.u_perp * n, s.tangential + wedge(n, s.W)};
}

ReducedCollision collision_reduced(const Vec& u_bar, const Vec& W, double u_perp,
                                   double theta) {
  if (u_bar.size() != W.size()) throw InvalidArgument("collision_reduced: dimension mismatch");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * u_bar + s * W, s * u_bar - c * W, -u_perp};
}

BilliardState collide(const BilliardState& st, const Vec& n, double theta) {
  BoundarySplit sp = split_at_boundary(st.u, st.spin, n);
  const ReducedCollision rc = collision_reduced(sp.u_bar, sp.W, sp.u_perp, theta);
  sp.u_bar = rc.u_bar;
  sp.W = rc.W;
  sp.u_perp = rc.u_perp;
  auto [u, spin] = assemble_from_split(sp, n);
  return {st.x, std::move(u), std::move(spin)};
}

FlightHit flight_to_boundary(const BilliardDomain& domain, const Vec& x, const Vec& u) {
  if (x.size() != domain.dim() || u.size() != domain.dim()) {
    throw InvalidArgument("flight_to_boundary: dimension mismatch");
  }
  return domain.flight(x, u);
}

BilliardOrbit billiard_orbit(const BilliardDomain& domain, const BilliardState& s0,
                             double theta, int n_collisions) {
  if (n_collisions < 0) throw InvalidArgument("billiard_orbit: n_collisions must be >= 0");
  BilliardOrbit orbit;
  orbit.initial = s0;
  BilliardState s = s0;
  double t = 0.0;
  for (int i = 1; i <= n_collisions; ++i) {
    const FlightHit hit = flight_to_boundary(domain, s.x, s.u);
    t += hit.time;
    CollisionRecord rec;
    rec.n = i;
    rec.point = hit.point;
    rec.normal = hit.normal;
    rec.time = t;
    rec.chord_distance = line_distance(s.x, s.u);
    rec.before = {hit.point, s.u, s.spin};
    rec.after = collide(rec.before, hit.normal, theta);
    s = rec.after;
    orbit.collisions.push_back(std::move(rec));
  }
  return orbit;
}

std::vector<CausticCluster> caustic_radii(const BilliardOrbit& orbit, double R) {
  const auto segments = orbit.collisions.size() + 1;
  if (segments < 50) {
    throw InvalidArgument(
        fmt::format("caustic_radii: need >= 50 segments, orbit has {}", segments));
  }
  std::vector<double> d;
  d.reserve(segments);
  for (const auto& c : orbit.collisions) d.push_back(c.chord_distance);
  const auto& last = orbit.collisions.empty() ? orbit.initial : orbit.collisions.back().after;
  d.push_back(line_distance(last.x, last.u));
  std::sort(d.begin(), d.end());
  std::vector<CausticCluster> out;
  double sum = d.front();
  int count = 1;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] - d[i - 1] > 1e-6 * R) {
      out.push_back({sum / count, count});
      sum = 0.0;
      count = 0;
    }
    sum += d[i];
    ++count;
  }
  out.push_back({sum / count, count});
  return out;
}

Mat boundary_tangent_frame(const Vec& n) {
  if (n.size() == 2) {
    Mat t(2, 1);
    t << n[1], -n[0];
    return t;
  }
  return complement_basis(n);
}

void write_orbit_csv(std::ostream& out, const BilliardDomain& domain,
                     const BilliardOrbit& orbit) {
  const int k = domain.dim();
  out << 'n';
  for (int i = 1; i <= k; ++i) out << ",x" << i;
  for (int i = 1; i <= k; ++i) out << ",u" << i;
  for (int i = 1; i < k; ++i) out << ",W" << i;
  out << ",chord_dist\n";
  for (const auto& c : orbit.collisions) {
    const Vec x = domain.display_point(c.after.x);
    const Vec w = boundary_tangent_frame(c.normal).transpose() * c.after.spin.apply(c.normal);
    fmt::print(out, "{}", c.n);
    for (int i = 0; i < k; ++i) fmt::print(out, ",{:.17g}", x[i]);
    for (int i = 0; i < k; ++i) fmt::print(out, ",{:.17g}", c.after.u[i]);
    for (int i = 0; i + 1 < k; ++i) fmt::print(out, ",{:.17g}", w[i]);
    fmt::print(out, ",{:.17g}\n", c.chord_distance);
  }
}

}  // namespace pancake
