#pragma once

#include "nueg/types.hpp"

namespace nueg::geometry {

// Half-space n . x <= c.
struct Halfspace {
  Vector3 normal;
  double offset = 0.0;
};

// Bounded convex polyhedron stored as a list of planar faces. Only what the
// cell-fraction rasterizer needs: clipping and volume.
class ConvexPolyhedron {
public:
  static ConvexPolyhedron box(const Vector3& lo, const Vector3& hi);

  ConvexPolyhedron clipped(const Halfspace& h) const;
  double volume() const;
  bool empty() const { return faces_.size() < 4; }

private:
  std::vector<std::vector<Vector3>> faces_;
};

// |[lo,hi] ∩ {x : n_k . x <= c_k for all k}|, exact up to rounding.
double box_polytope_volume(const Vector3& lo, const Vector3& hi, const std::vector<Halfspace>& hs);

double point_segment_distance(const Point& p, const Point& a, const Point& b);
double point_triangle_distance(const Vector3& p, const Vector3& a, const Vector3& b, const Vector3& c);

} // namespace nueg::geometry
