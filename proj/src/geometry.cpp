#include "nueg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nueg::geometry {

Isometry Isometry::identity(int d) { return {Matrix::Identity(d, d), Point::Zero(d)}; }

Isometry Isometry::inverse() const {
  Matrix rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

Isometry Isometry::compose(const Isometry& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

void Isometry::validate(double tol) const {
  const int d = dim();
  require(rotation.cols() == d && translation.size() == d, "isometry dimension mismatch");
  require((rotation.transpose() * rotation - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol,
          "isometry rotation is not orthogonal");
  require(std::abs(rotation.determinant() - 1.0) <= tol, "isometry rotation must have determinant +1");
}

namespace {

double cross2(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

} // namespace

Domain Domain::from_hull(int d, const PointList& input, DomainKind kind, double scale) {
  require(d >= 1 && d <= 3, "domain dimension must be 1, 2 or 3");
  require(static_cast<int>(input.size()) >= d + 1, "domain needs at least d+1 vertices");
  for (const auto& v : input) require(v.size() == d && v.allFinite(), "domain vertex has wrong dimension");
  Domain dom;
  dom.kind_ = kind;
  dom.dim_ = d;
  dom.scale_ = scale;

  if (d == 1) {
    double lo = input[0][0], hi = input[0][0];
    for (const auto& v : input) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    dom.vertices_ = {Point::Constant(1, lo), Point::Constant(1, hi)};
    dom.facets_ = {{0}, {1}};
    dom.normals_ = Matrix(2, 1);
    dom.normals_ << -1.0, 1.0;
    dom.offsets_ = Vector(2);
    dom.offsets_ << -lo, hi;
    dom.volume_ = hi - lo;
    dom.boundary_ = 2.0;
  } else if (d == 2) {
    PointList pts = input;
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
      return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    PointList hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
      hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
      while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
      hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    const int n = static_cast<int>(hull.size());
    require(n >= 3, "degenerate polygon");
    dom.vertices_ = hull;
    dom.normals_ = Matrix(n, 2);
    dom.offsets_ = Vector(n);
    double area = 0.0, perim = 0.0;
    for (int i = 0; i < n; ++i) {
      const Point& a = hull[i];
      const Point& b = hull[(i + 1) % n];
      const double len = (b - a).norm();
      Point nrm(2);
      nrm << (b[1] - a[1]) / len, -(b[0] - a[0]) / len;
      dom.normals_.row(i) = nrm.transpose();
      dom.offsets_[i] = nrm.dot(a);
      dom.facets_.push_back({i, (i + 1) % n});
      area += a[0] * b[1] - a[1] * b[0];
      perim += len;
    }
    dom.volume_ = 0.5 * area;
    dom.boundary_ = perim;
  } else {
    const int n = static_cast<int>(input.size());
    double extent = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) extent = std::max(extent, (input[i] - input[j]).norm());
    require(extent > 0.0, "degenerate polytope");
    const double tol = 1e-10 * extent;
    std::vector<std::pair<Vector3, double>> planes;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Vector3 a = input[i], b = input[j], c = input[k];
          Vector3 nrm = (b - a).cross(c - a);
          if (nrm.norm() <= tol * extent) continue;
          nrm.normalize();
          double off = nrm.dot(a);
          bool below = true, above = true;
          for (int m = 0; m < n; ++m) {
            double s = nrm.dot(Vector3(input[m])) - off;
            if (s > tol) below = false;
            if (s < -tol) above = false;
          }
          if (!below && !above) continue;
          if (!below) {
            nrm = -nrm;
            off = -off;
          }
          bool dup = false;
          for (const auto& pl : planes)
            if ((pl.first - nrm).norm() < 1e-9 && std::abs(pl.second - off) < tol) dup = true;
          if (!dup) planes.emplace_back(nrm, off);
        }
    require(planes.size() >= 4, "degenerate polytope");
    // Keep only points lying on some facet plane; order each facet by angle.
    std::vector<int> keep;
    std::vector<std::vector<int>> raw_facets;
    for (const auto& pl : planes) {
      std::vector<int> on;
      Vector3 centre = Vector3::Zero();
      for (int m = 0; m < n; ++m)
        if (std::abs(pl.first.dot(Vector3(input[m])) - pl.second) <= tol) {
          on.push_back(m);
          centre += Vector3(input[m]);
        }
      centre /= static_cast<double>(on.size());
      Vector3 u = pl.first.unitOrthogonal(), w = pl.first.cross(u);
      std::sort(on.begin(), on.end(), [&](int a, int b) {
        Vector3 pa = Vector3(input[a]) - centre, pb = Vector3(input[b]) - centre;
        return std::atan2(pa.dot(w), pa.dot(u)) < std::atan2(pb.dot(w), pb.dot(u));
      });
      raw_facets.push_back(on);
      for (int m : on) keep.push_back(m);
    }
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    std::vector<int> remap(n, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      remap[keep[i]] = static_cast<int>(i);
      dom.vertices_.push_back(input[keep[i]]);
    }
    Vector3 inner = Vector3::Zero();
    for (const auto& v : dom.vertices_) inner += Vector3(v);
    inner /= static_cast<double>(dom.vertices_.size());
    dom.normals_ = Matrix(planes.size(), 3);
    dom.offsets_ = Vector(planes.size());
    double area = 0.0, vol = 0.0;
    for (std::size_t f = 0; f < planes.size(); ++f) {
      dom.normals_.row(f) = planes[f].first.transpose();
      dom.offsets_[f] = planes[f].second;
      std::vector<int> idx;
      Vector3 newell = Vector3::Zero();
      const auto& on = raw_facets[f];
      for (std::size_t m = 0; m < on.size(); ++m) {
        idx.push_back(remap[on[m]]);
        newell += Vector3(input[on[m]]).cross(Vector3(input[on[(m + 1) % on.size()]]));
      }
      const double fa = 0.5 * std::abs(newell.dot(planes[f].first));
      area += fa;
      vol += fa * (planes[f].second - planes[f].first.dot(inner)) / 3.0;
      dom.facets_.push_back(idx);
    }
    dom.volume_ = vol;
    dom.boundary_ = area;
  }
  require(dom.volume_ > 1e-14, "domain has zero volume");
  dom.lo_ = dom.vertices_[0];
  dom.hi_ = dom.vertices_[0];
  for (const auto& v : dom.vertices_) {
    dom.lo_ = dom.lo_.cwiseMin(v);
    dom.hi_ = dom.hi_.cwiseMax(v);
  }
  return dom;
}

Domain Domain::cube(int d, double side, const Point& center) {
  require(side > 0.0, "cube side must be positive");
  Point c = center.size() == 0 ? Point::Zero(d) : center;
  require(c.size() == d, "cube center dimension mismatch");
  PointList corners;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Point v(d);
    for (int k = 0; k < d; ++k) v[k] = c[k] + (((mask >> k) & 1) ? 0.5 : -0.5) * side;
    corners.push_back(v);
  }
  return from_hull(d, corners, DomainKind::Cube, side);
}

Domain Domain::tetrahedron(double scale, const Isometry& iso) {
  require(scale > 0.0, "tetrahedron scale must be positive");
  require(iso.dim() == 3, "tetrahedron isometry must be 3D");
  iso.validate(1e-9);
  PointList v;
  for (const auto& r : tiling24().reference) v.push_back(iso.apply(Point(scale * r)));
  return from_hull(3, v, DomainKind::Tetrahedron, scale);
}

Domain Domain::polytope(const PointList& vertices) {
  require(!vertices.empty(), "polytope needs vertices");
  return from_hull(static_cast<int>(vertices[0].size()), vertices, DomainKind::Polytope, 1.0);
}

Domain Domain::transformed(const Isometry& iso) const {
  require(iso.dim() == dim_, "isometry dimension mismatch");
  PointList v;
  for (const auto& p : vertices_) v.push_back(iso.apply(p));
  return from_hull(dim_, v, kind_, scale_);
}

double Domain::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) best = std::max(best, (vertices_[i] - vertices_[j]).norm());
  return best;
}

std::vector<Halfspace> Domain::halfspaces() const {
  require(dim_ == 3, "half-space list is only used in 3D");
  std::vector<Halfspace> out;
  for (int f = 0; f < normals_.rows(); ++f) out.push_back({normals_.row(f).transpose(), offsets_[f]});
  return out;
}

bool Domain::contains(const Point& x) const {
  return ((normals_ * x - offsets_).array() <= 1e-12).all();
}

bool Domain::contains_open(const Point& x, double tol) const {
  return ((normals_ * x - offsets_).array() < -tol).all();
}

double Domain::distance_to_boundary(const Point& x) const {
  const Vector slack = offsets_ - normals_ * x;
  if ((slack.array() >= 0.0).all()) return slack.minCoeff();
  if (dim_ == 1) return std::min(std::abs(x[0] - lo_[0]), std::abs(x[0] - hi_[0]));
  double best = std::numeric_limits<double>::infinity();
  if (dim_ == 2) {
    for (const auto& f : facets_) best = std::min(best, point_segment_distance(x, vertices_[f[0]], vertices_[f[1]]));
    return best;
  }
  for (const auto& f : facets_)
    for (std::size_t m = 1; m + 1 < f.size(); ++m)
      best = std::min(best, point_triangle_distance(x, vertices_[f[0]], vertices_[f[m]], vertices_[f[m + 1]]));
  return best;
}

namespace {

Tiling24 build_tiling() {
  Tiling24 t;
  // Rotations of the cube: signed permutation matrices with det +1, identity first.
  std::vector<Matrix3> rots;
  int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (auto& p : perms)
    for (int signs = 0; signs < 8; ++signs) {
      Matrix3 r = Matrix3::Zero();
      for (int i = 0; i < 3; ++i) r(i, p[i]) = ((signs >> i) & 1) ? -1.0 : 1.0;
      if (r.determinant() > 0.0) rots.push_back(r);
    }
  const Vector3 o(0, 0, 0), f(0.5, 0, 0), a(0.5, -0.5, -0.5), b(0.5, 0.5, -0.5);
  t.base_barycenter = (o + f + a + b) / 4.0;
  t.reference = {o - t.base_barycenter, f - t.base_barycenter, a - t.base_barycenter, b - t.base_barycenter};
  for (int j = 0; j < 24; ++j) {
    t.rotation[j] = rots[j];
    t.shift[j] = -(rots[j] * t.base_barycenter);
  }
  return t;
}

Matrix3 reference_inverse() {
  const auto& r = tiling24().reference;
  Matrix3 m;
  m.col(0) = r[1] - r[0];
  m.col(1) = r[2] - r[0];
  m.col(2) = r[3] - r[0];
  return m.inverse();
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double radical_inverse(int base, long long i) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

} // namespace

const Tiling24& tiling24() {
  static const Tiling24 t = build_tiling();
  return t;
}

std::array<Vector3, 4> Tiling24::tile_vertices(int j, double scale, double shrink) const {
  std::array<Vector3, 4> out;
  for (int v = 0; v < 4; ++v) out[v] = scale * map(j, shrink * reference[v]);
  return out;
}

double Tiling24::barycentric_margin(int j, const Vector3& x, double scale) const {
  static const Matrix3 inv = reference_inverse();
  const Vector3 y = unmap(j, x / scale);
  const Vector3 l = inv * (y - reference[0]);
  return std::min({1.0 - l.sum(), l[0], l[1], l[2]});
}

int Tiling24::locate(const Vector3& x, double scale, double tol) const {
  int best = -1;
  double margin = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < 24; ++j) {
    double m = barycentric_margin(j, x, scale);
    if (m > margin) {
      margin = m;
      best = j;
    }
  }
  return margin > tol ? best : -1;
}

std::vector<Matrix> so_quadrature(int d, int n, std::uint64_t seed) {
  require(n >= 1, "rotation count must be positive");
  require(d >= 1 && d <= 3, "dimension must be 1, 2 or 3");
  std::vector<Matrix> out;
  if (d == 1) {
    out.push_back(Matrix::Identity(1, 1));
    return out;
  }
  if (d == 2) {
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * M_PI * i / n;
      Matrix r(2, 2);
      r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
      out.push_back(r);
    }
    return out;
  }
  // Shoemake's map applied to a Cranley-Patterson shifted Halton sequence.
  std::uint64_t state = seed;
  const double shift[3] = {unit_double(splitmix64(state)), unit_double(splitmix64(state)),
                           unit_double(splitmix64(state))};
  const int bases[3] = {2, 3, 5};
  for (int i = 0; i < n; ++i) {
    double u[3];
    for (int k = 0; k < 3; ++k) {
      u[k] = radical_inverse(bases[k], i + 1) + shift[k];
      u[k] -= std::floor(u[k]);
    }
    const double r1 = std::sqrt(1.0 - u[0]), r2 = std::sqrt(u[0]);
    Eigen::Quaterniond q(r2 * std::cos(2 * M_PI * u[2]), r1 * std::sin(2 * M_PI * u[1]),
                         r1 * std::cos(2 * M_PI * u[1]), r2 * std::sin(2 * M_PI * u[2]));
    q.normalize();
    out.push_back(q.toRotationMatrix());
  }
  return out;
}

double fisher_regularity(const Domain& domain, double t, std::uint64_t seed, int samples, bool include_exterior) {
  require(t >= 0.0 && std::isfinite(t), "Fisher parameter t must be finite and nonnegative");
  require(samples > 0, "sample count must be positive");
  const int d = domain.dim();
  const double r = std::pow(domain.volume(), 1.0 / d) * t;
  if (!include_exterior && r >= domain.diameter()) return 1.0;
  std::mt19937_64 rng(seed);
  const double pad = include_exterior ? r : 0.0;
  Point lo = domain.bbox_lo().array() - pad, hi = domain.bbox_hi().array() + pad;
  Point x(d);
  long long hits = 0, drawn = 0, accepted = 0;
  while (accepted < samples) {
    for (int k = 0; k < d; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * unit_double(rng());
    ++drawn;
    const bool inside = domain.contains(x);
    if (!include_exterior) {
      if (!inside) continue;
      ++accepted;
      if (domain.distance_to_boundary(x) <= r) ++hits;
    } else {
      ++accepted;
      if (domain.distance_to_boundary(x) <= r) ++hits;
    }
  }
  if (!include_exterior) return static_cast<double>(hits) / static_cast<double>(accepted);
  const double box = (hi - lo).prod();
  return static_cast<double>(hits) / static_cast<double>(drawn) * box / domain.volume();
}

} // namespace nueg::geometry
