#include "nueg/polytope.hpp"

#include <algorithm>
#include <cmath>

namespace nueg::geometry {

ConvexPolyhedron ConvexPolyhedron::box(const Vector3& lo, const Vector3& hi) {
  auto corner = [&](int mask) {
    return Vector3((mask & 1) ? hi.x() : lo.x(), (mask & 2) ? hi.y() : lo.y(), (mask & 4) ? hi.z() : lo.z());
  };
  ConvexPolyhedron p;
  // Each face as a cyclic corner list; orientation is irrelevant to volume().
  const int quads[6][4] = {{0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6}};
  for (const auto& q : quads) p.faces_.push_back({corner(q[0]), corner(q[1]), corner(q[2]), corner(q[3])});
  return p;
}

ConvexPolyhedron ConvexPolyhedron::clipped(const Halfspace& h) const {
  constexpr double eps = 1e-14;
  ConvexPolyhedron out;
  std::vector<Vector3> cap;
  bool face_on_plane = false;  // an existing face already closes the cut
  for (const auto& face : faces_) {
    std::vector<Vector3> kept;
    const std::size_t n = face.size();
    std::size_t on = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vector3& a = face[i];
      const Vector3& b = face[(i + 1) % n];
      const double da = h.normal.dot(a) - h.offset;
      const double db = h.normal.dot(b) - h.offset;
      if (da <= eps) kept.push_back(a);
      if (std::abs(da) <= eps) {
        cap.push_back(a);
        ++on;
      }
      if ((da < -eps && db > eps) || (da > eps && db < -eps)) {
        Vector3 x = a + (da / (da - db)) * (b - a);
        kept.push_back(x);
        cap.push_back(x);
      }
    }
    if (on == n) face_on_plane = true;
    if (kept.size() >= 3) out.faces_.push_back(std::move(kept));
  }
  if (!face_on_plane && cap.size() >= 3) {
    Vector3 centre = Vector3::Zero();
    for (const auto& v : cap) centre += v;
    centre /= static_cast<double>(cap.size());
    Vector3 u = h.normal.unitOrthogonal();
    Vector3 w = h.normal.normalized().cross(u);
    std::sort(cap.begin(), cap.end(), [&](const Vector3& a, const Vector3& b) {
      return std::atan2((a - centre).dot(w), (a - centre).dot(u)) <
             std::atan2((b - centre).dot(w), (b - centre).dot(u));
    });
    std::vector<Vector3> unique;
    for (const auto& v : cap)
      if (unique.empty() || (v - unique.back()).norm() > 1e-12) unique.push_back(v);
    if (unique.size() > 1 && (unique.front() - unique.back()).norm() <= 1e-12) unique.pop_back();
    if (unique.size() >= 3) out.faces_.push_back(std::move(unique));
  }
  return out;
}

double ConvexPolyhedron::volume() const {
  if (empty()) return 0.0;
  Vector3 inner = Vector3::Zero();
  std::size_t count = 0;
  for (const auto& f : faces_)
    for (const auto& v : f) {
      inner += v;
      ++count;
    }
  inner /= static_cast<double>(count);
  double vol = 0.0;
  for (const auto& f : faces_) {
    // Newell normal; its length is twice the face area.
    Vector3 n = Vector3::Zero();
    Vector3 c = Vector3::Zero();
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Vector3& a = f[i];
      const Vector3& b = f[(i + 1) % f.size()];
      n += a.cross(b);
      c += a;
    }
    c /= static_cast<double>(f.size());
    const double area2 = n.norm();
    if (area2 < 1e-300) continue;
    vol += area2 / 6.0 * std::abs((n / area2).dot(c - inner));
  }
  return vol;
}

double box_polytope_volume(const Vector3& lo, const Vector3& hi, const std::vector<Halfspace>& hs) {
  const double full = (hi - lo).prod();
  bool inside_all = true;
  for (const auto& h : hs) {
    int in = 0;
    for (int mask = 0; mask < 8; ++mask) {
      Vector3 v((mask & 1) ? hi.x() : lo.x(), (mask & 2) ? hi.y() : lo.y(), (mask & 4) ? hi.z() : lo.z());
      if (h.normal.dot(v) <= h.offset) ++in;
    }
    if (in == 0) return 0.0;
    if (in < 8) inside_all = false;
  }
  if (inside_all) return full;
  ConvexPolyhedron p = ConvexPolyhedron::box(lo, hi);
  for (const auto& h : hs) {
    p = p.clipped(h);
    if (p.empty()) return 0.0;
  }
  return std::clamp(p.volume(), 0.0, full);
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest point on a triangle via region classification (Ericson, RTCD 5.1.5).
double point_triangle_distance(const Vector3& p, const Vector3& a, const Vector3& b, const Vector3& c) {
  const Vector3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();
  const Vector3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
  const Vector3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

} // namespace nueg::geometry
